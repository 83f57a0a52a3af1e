#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use qsb_core::cbergman::{numeric_kernel_build, ComplexKernel};
use qsb_core::holo::{c_anti_decompose, c_pair_decompose, classify, HoloSeries};
use qsb_core::qalg::{parse_frame_spec, parse_quaternion, Frame, Quaternion};
use qsb_core::quad::{
    ball_orders_for_degree, build_ball_rule, build_disk_rule, build_rectangle_rule,
    disk_orders_for_degree,
};
use qsb_core::sbergman::{
    first_kind_eval, gram_build, second_kind_components, second_kind_eval, FirstKindKernel,
};
use qsb_core::slicefn::{
    extend_p, extend_series, fourfold_decompose, is_intrinsic, refined_split, restrict_q,
    split_basis, SliceSeries,
};
use qsb_core::verify::{self, Suite, Tolerances, VerifyOptions};

type Q = Quaternion<f64>;

#[derive(Parser)]
#[command(
    name = "qsb",
    version,
    about = "Slice regular functions and quaternionic Bergman kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a series into C / anti-C parts or intrinsic components.
    Decompose(DecomposeArgs),
    /// Slice extension of a holomorphic series on C(i).
    Extend(ExtendArgs),
    /// Restriction of a slice series to C(i).
    Restrict(RestrictArgs),
    /// Evaluate a kernel on a grid or on given point pairs.
    Kernel(KernelArgs),
    /// Run the identity verification suites.
    Verify(VerifyArgs),
    /// Export a quadrature rule.
    Rule(RuleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    CPair,
    CAnti,
    Fourfold,
    Split,
    Refined,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Second,
    First,
    Complex,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Disk,
    Ball,
    Rectangle,
}

#[derive(clap::Args)]
struct DecomposeArgs {
    /// Series JSON: `{"coeffs": [[w,x,y,z], ...]}` or a bare coefficient list.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "i=e1")]
    frame: String,
    #[arg(long, value_enum, default_value = "fourfold")]
    mode: Mode,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ExtendArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "i=e1")]
    frame: String,
    /// Evaluate the extension at these points (`w,x,y,z`) instead of writing the series.
    #[arg(long = "at", allow_hyphen_values = true)]
    at: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RestrictArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "i=e1")]
    frame: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Truncation N. Second kind defaults to 32, first kind to 8; the
    /// complex kind uses the closed form unless N is given.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, default_value = "i=e1")]
    frame: String,
    /// Fixed first argument; the grid fills the second when `--r` is absent.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Fixed second argument; defaults to 0 when neither `--q` nor `--r` is given.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Grid points per axis on the slice plane of the frame.
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Grid radius.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// JSON list of `[q, r]` pairs; overrides the grid.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Add K⁰..K³ (second kind) or R, I (complex kind) columns.
    #[arg(long)]
    components: bool,
    /// Prebuilt first kind Gram JSON.
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Write the first kind Gram JSON here.
    #[arg(long)]
    save_gram: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 5)]
    degree: usize,
    /// First kind truncation; defaults to max(degree, 2).
    #[arg(long)]
    truncation: Option<usize>,
    /// Single tolerance for every identity class.
    #[arg(long)]
    tol: Option<f64>,
    /// Run kernel consistency with the second kind kernel truncated past the first kind one.
    #[arg(long)]
    mismatch_truncation: bool,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RuleArgs {
    #[arg(long, value_enum, default_value = "disk")]
    domain: Domain,
    /// Comma separated orders: `n_r,n_ang` (disk), `n_r,n_ang,n_sphere` (ball), `n_x,n_y` (rectangle).
    #[arg(long)]
    orders: Option<String>,
    /// Choose orders exact to this polynomial degree.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value = "i=e1")]
    frame: String,
    #[arg(long, default_value_t = 1.0)]
    half_width: f64,
    #[arg(long, default_value_t = 0.5)]
    half_height: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeriesInput {
    Object { coeffs: Vec<Q>, radius: Option<f64> },
    Bare(Vec<Q>),
}

impl SeriesInput {
    fn into_parts(self) -> (Vec<Q>, f64) {
        match self {
            Self::Object { coeffs, radius } => (coeffs, radius.unwrap_or(1.0)),
            Self::Bare(coeffs) => (coeffs, 1.0),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    anyhow!("{e}")
}

fn read_series(path: &Path) -> anyhow::Result<(Vec<Q>, f64)> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let input: SeriesInput =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (coeffs, radius) = input.into_parts();
    if coeffs.is_empty() {
        return Err(usage(format!("{}: empty coefficient list", path.display())));
    }
    if !(radius > 0.0) {
        return Err(usage(format!(
            "{}: radius must be positive",
            path.display()
        )));
    }
    Ok((coeffs, radius))
}

fn frame(spec: &str) -> anyhow::Result<Frame<f64>> {
    parse_frame_spec(spec).map_err(usage)
}

fn point(s: &str) -> anyhow::Result<Q> {
    parse_quaternion(s).map_err(usage)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<S: serde::Serialize>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn cmd_decompose(a: DecomposeArgs) -> anyhow::Result<()> {
    let (coeffs, radius) = read_series(&a.input)?;
    let frame = frame(&a.frame)?;
    let stem = a
        .input
        .file_stem()
        .map_or_else(|| "series".into(), |s| s.to_string_lossy().into_owned());
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let holo = || HoloSeries::new(frame, coeffs.clone()).with_radius(radius);
    let slice = || SliceSeries::new(coeffs.clone()).with_radius(radius);
    let (mode, classification, parts): (&str, serde_json::Value, Vec<(&str, String)>) = match a.mode
    {
        Mode::CPair => {
            let f = holo();
            let (f1, f2) = c_pair_decompose(&f)?;
            (
                "c-pair",
                json!(classify(&f)?),
                vec![("f1", pretty(&f1)), ("f2", pretty(&f2))],
            )
        }
        Mode::CAnti => {
            let f = holo();
            let (fc, fa) = c_anti_decompose(&f)?;
            (
                "c-anti",
                json!(classify(&f)?),
                vec![("fc", pretty(&fc)), ("fa", pretty(&fa))],
            )
        }
        Mode::Fourfold => {
            let f = slice();
            let p = fourfold_decompose(&f, frame);
            let names = ["f0", "f1", "f2", "f3"];
            (
                "fourfold",
                json!(is_intrinsic(&f)),
                names.iter().zip(&p).map(|(n, s)| (*n, pretty(s))).collect(),
            )
        }
        Mode::Split => {
            let f = slice();
            let (f1, f2) = split_basis(&f, frame);
            (
                "split",
                json!(is_intrinsic(&f)),
                vec![("f1", pretty(&f1)), ("f2", pretty(&f2))],
            )
        }
        Mode::Refined => {
            let f = slice();
            let h = refined_split(&f, frame);
            let names = ["h0", "h1", "h2", "h3"];
            (
                "refined",
                json!(is_intrinsic(&f)),
                names.iter().zip(&h).map(|(n, s)| (*n, pretty(s))).collect(),
            )
        }
    };
    let mut files = Vec::new();
    for (name, text) in parts {
        let path = a.out.join(format!("{stem}.{name}.json"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        files.push(path.display().to_string());
    }
    print!(
        "{}",
        pretty(&json!({ "mode": mode, "classification": classification, "files": files }))
    );
    Ok(())
}

fn cmd_extend(a: ExtendArgs) -> anyhow::Result<()> {
    let (coeffs, radius) = read_series(&a.input)?;
    let f = HoloSeries::new(frame(&a.frame)?, coeffs).with_radius(radius);
    f.require_slice_valued()?;
    let text = if a.at.is_empty() {
        pretty(&extend_series(&f))
    } else {
        let values =
            a.at.iter()
                .map(|s| {
                    let q = point(s)?;
                    Ok(json!({ "q": q, "value": extend_p(&f, q)? }))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
        pretty(&values)
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_restrict(a: RestrictArgs) -> anyhow::Result<()> {
    let (coeffs, radius) = read_series(&a.input)?;
    let f = SliceSeries::new(coeffs).with_radius(radius);
    emit(a.out.as_deref(), &pretty(&restrict_q(&f, frame(&a.frame)?)))
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(groups: &[&str], complex: bool) -> Self {
        let suffixes: &[&str] = if complex {
            &["re", "im"]
        } else {
            &["w", "x", "y", "z"]
        };
        let columns = groups
            .iter()
            .flat_map(|g| suffixes.iter().map(move |s| format!("{g}_{s}")))
            .collect();
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",") + "\n";
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        pretty(&json!({ "columns": self.columns, "rows": self.rows }))
    }
}

fn kernel_pairs(a: &KernelArgs, frame: Frame<f64>) -> anyhow::Result<Vec<(Q, Q)>> {
    if let Some(path) = &a.input {
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let pairs: Vec<(Q, Q)> =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(pairs);
    }
    let q = a.q.as_deref().map(point).transpose()?;
    let r = a.r.as_deref().map(point).transpose()?;
    if let (Some(q), Some(r)) = (q, r) {
        return Ok(vec![(q, r)]);
    }
    if a.grid < 1 || !(a.radius >= 0.0) {
        return Err(usage(
            "grid needs at least one point and a nonnegative radius",
        ));
    }
    let step = |k: usize| {
        if a.grid == 1 {
            0.0
        } else {
            -a.radius + 2.0 * a.radius * k as f64 / (a.grid - 1) as f64
        }
    };
    let mut grid = Vec::new();
    for ix in 0..a.grid {
        for iy in 0..a.grid {
            let (x, y) = (step(ix), step(iy));
            if x * x + y * y <= a.radius * a.radius * (1.0 + 1e-12) {
                grid.push(frame.slice_point(x, y));
            }
        }
    }
    Ok(match q {
        Some(q) => grid.into_iter().map(|p| (q, p)).collect(),
        None => {
            let r = r.unwrap_or_else(Q::zero);
            grid.into_iter().map(|p| (p, r)).collect()
        }
    })
}

fn cmd_kernel(a: KernelArgs) -> anyhow::Result<()> {
    let frame = frame(&a.frame)?;
    let pairs = kernel_pairs(&a, frame)?;
    let table = match a.kind {
        Kind::Second => {
            let n = a.truncation.unwrap_or(32);
            let mut groups = vec!["q", "r", "k"];
            if a.components {
                groups.extend(["k0", "k1", "k2", "k3"]);
            }
            let mut t = Table::new(&groups, false);
            for &(q, r) in &pairs {
                let mut row = vec![q, r, second_kind_eval(q, r, n)?];
                if a.components {
                    row.extend(second_kind_components(q, r, frame, n)?);
                }
                t.rows.push(row.iter().flat_map(|v| v.to_array()).collect());
            }
            t
        }
        Kind::First => {
            let kernel = match &a.gram {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    let k: FirstKindKernel<f64> = serde_json::from_str(&text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    if a.truncation.is_some_and(|n| n != k.truncation) {
                        return Err(usage(format!(
                            "--truncation differs from the Gram file N = {}",
                            k.truncation
                        )));
                    }
                    k
                }
                None => {
                    let n = a.truncation.unwrap_or(8);
                    let (nr, na, ns) = ball_orders_for_degree(2 * n);
                    gram_build(n, &build_ball_rule(nr, na, ns)?)?
                }
            };
            if let Some(path) = &a.save_gram {
                fs::write(path, pretty(&kernel))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut t = Table::new(&["q", "r", "b"], false);
            for &(q, r) in &pairs {
                t.rows.push(
                    [q, r, first_kind_eval(&kernel, q, r)?]
                        .iter()
                        .flat_map(|v| v.to_array())
                        .collect(),
                );
            }
            t
        }
        Kind::Complex => {
            let kernel = match a.truncation {
                None => ComplexKernel::disk(frame),
                Some(n) => {
                    let (nr, na) = disk_orders_for_degree(2 * n);
                    numeric_kernel_build(&build_disk_rule(nr, na, frame)?, n)?
                }
            };
            let mut groups = vec!["z", "zeta", "k"];
            if a.components {
                groups.extend(["r", "i"]);
            }
            let mut t = Table::new(&groups, true);
            for &(z, zeta) in &pairs {
                let mut row = vec![z, zeta, kernel.eval(z, zeta)?];
                if a.components {
                    let (r, i) = kernel.ri_split(z, zeta)?;
                    row.extend([r, i]);
                }
                t.rows.push(
                    row.iter()
                        .flat_map(|&v| {
                            let c = frame.components(v);
                            [c[0], c[1]]
                        })
                        .collect(),
                );
            }
            t
        }
    };
    let text = match a.format {
        Format::Csv => table.csv(),
        Format::Json => table.json(),
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let suite: Suite = a.suite.parse().map_err(usage)?;
    let tolerances = match a.tol {
        Some(t) if t.is_finite() && t >= 0.0 => Tolerances::uniform(t),
        Some(t) => {
            return Err(usage(format!(
                "--tol must be a nonnegative number, got {t}"
            )))
        }
        None => Tolerances::default(),
    };
    let report = verify::run(&VerifyOptions {
        suite,
        degree: a.degree,
        truncation: a.truncation,
        tolerances,
        mismatch_truncation: a.mismatch_truncation,
        timing: a.timing,
    });
    emit(a.out.as_deref(), &report.to_json())?;
    let failed = report.records.iter().filter(|r| !r.pass).count();
    eprintln!(
        "verify {}: {} of {} identities passed",
        report.suite,
        report.records.len() - failed,
        report.records.len()
    );
    for r in report.records.iter().filter(|r| !r.pass) {
        eprintln!(
            "  FAIL {} (residual {:e}, tolerance {:e})",
            r.id, r.max_residual.0, r.tolerance.0
        );
    }
    Ok(report.pass)
}

fn parse_orders(s: &str, count: usize) -> anyhow::Result<Vec<usize>> {
    let v = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| usage(format!("bad order {t:?}: {e}")))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    if v.len() != count {
        return Err(usage(format!("expected {count} orders, got {}", v.len())));
    }
    Ok(v)
}

fn cmd_rule(a: RuleArgs) -> anyhow::Result<()> {
    if a.format == Format::Json {
        bail!(usage("rules are exported as CSV only"));
    }
    let frame = frame(&a.frame)?;
    let degree = a.degree.unwrap_or(8);
    let text = match a.domain {
        Domain::Disk => {
            let (nr, na) = match &a.orders {
                Some(s) => {
                    let v = parse_orders(s, 2)?;
                    (v[0], v[1])
                }
                None => disk_orders_for_degree(degree),
            };
            build_disk_rule(nr, na, frame)?.to_csv()
        }
        Domain::Ball => {
            let (nr, na, ns) = match &a.orders {
                Some(s) => {
                    let v = parse_orders(s, 3)?;
                    (v[0], v[1], v[2])
                }
                None => ball_orders_for_degree(degree),
            };
            build_ball_rule::<f64>(nr, na, ns)?.to_csv()
        }
        Domain::Rectangle => {
            let (nx, ny) = match &a.orders {
                Some(s) => {
                    let v = parse_orders(s, 2)?;
                    (v[0], v[1])
                }
                None => (degree / 2 + 1, degree / 2 + 1),
            };
            build_rectangle_rule(nx, ny, a.half_width, a.half_height, frame)?.to_csv()
        }
    };
    emit(a.out.as_deref(), &text)
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("QSB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("QSB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Decompose(a) => cmd_decompose(a).map(|()| true),
        Command::Extend(a) => cmd_extend(a).map(|()| true),
        Command::Restrict(a) => cmd_restrict(a).map(|()| true),
        Command::Kernel(a) => cmd_kernel(a).map(|()| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Rule(a) => cmd_rule(a).map(|()| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
