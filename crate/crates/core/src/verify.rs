//! Verification suites: every identity of the library checked on seeded
//! random inputs, collected into a deterministic JSON report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::cbergman::{
    bergman_project, conj_power_sum, disk_kernel_eval, disk_weight, kernel_ri_split,
    numeric_kernel_build, re_im_apply, series_truncation, ComplexKernel,
};
use crate::error::{Error, Result};
use crate::holo::{
    c_anti_decompose, c_pair_decompose, classify, conj_reflect, Classification, HoloSeries,
};
use crate::qalg::{slice_coords, Frame, Quaternion};
use crate::quad::{
    ball_orders_for_degree, build_ball_rule, build_disk_rule, build_rectangle_rule,
    disk_orders_for_degree, integrate_ball, integrate_slice, BallRule, PlanarRule,
};
use crate::sample::{self, SampleRng};
use crate::sbergman::{
    component_reproduce, first_kind_antiregularity_residual, first_kind_eval, gram_build,
    kernel_consistency, m_i_apply, m_i_exact, m_i_pointwise, mi_adjoint_identity,
    second_kind_component_series, second_kind_components, second_kind_eval, slice_reproduce,
    two_stage_reproduce, FirstKindKernel, SECOND_KIND_MIN_TRUNCATION,
};
use crate::slicefn::{
    alpha_beta_of, cr_residual, extend_p, extend_series, fourfold_assemble, fourfold_decompose,
    intrinsic_defect, is_intrinsic, refined_split, restrict_q, split_basis, Intrinsic, SliceSeries,
    CR_STEP,
};

type Q = Quaternion<f64>;

/// Random inputs per identity.
pub const SAMPLES: usize = 20;
/// Extra degrees given to the second kind kernel under `mismatch_truncation`.
pub const MISMATCH_GAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Complex,
    Slice,
    Bergman,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Self::Complex),
            "slice" => Ok(Self::Slice),
            "bergman" => Ok(Self::Bergman),
            "all" => Ok(Self::All),
            other => Err(Error::Parse(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Complex => "complex",
            Self::Slice => "slice",
            Self::Bergman => "bergman",
            Self::All => "all",
        })
    }
}

/// Tolerance per identity class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Coefficient algebra and closed-form pointwise identities.
    pub exact: f64,
    /// Identities that go through a quadrature rule.
    pub quadrature: f64,
    /// Finite-difference checks.
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-11,
            quadrature: 1e-9,
            finite_difference: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            exact: tol,
            quadrature: tol,
            finite_difference: tol,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub degree: usize,
    /// First kind truncation; defaults to `max(degree, 2)`.
    pub truncation: Option<usize>,
    pub tolerances: Tolerances,
    /// Runs the kernel consistency identity with the second kind kernel
    /// truncated past the first kind one.
    pub mismatch_truncation: bool,
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            degree: 5,
            truncation: None,
            tolerances: Tolerances::default(),
            mismatch_truncation: false,
            timing: false,
        }
    }
}

/// Float printed with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub statement: String,
    pub parameters: BTreeMap<String, Value>,
    pub max_residual: Float,
    pub tolerance: Float,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub degree: usize,
    pub truncation: usize,
    pub records: Vec<Record>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<Float>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }
}

struct Runner {
    tol: Tolerances,
    degree: usize,
    truncation: usize,
    mismatch: bool,
    records: Vec<Record>,
}

#[derive(Clone, Copy)]
enum Class {
    Exact,
    Quadrature,
    FiniteDifference,
    /// Counts of failed discrete checks; passes only at zero.
    Count,
}

impl Runner {
    fn tolerance(&self, class: Class) -> f64 {
        match class {
            Class::Exact => self.tol.exact,
            Class::Quadrature => self.tol.quadrature,
            Class::FiniteDifference => self.tol.finite_difference,
            Class::Count => 0.0,
        }
    }

    fn check<F>(&mut self, id: &str, statement: &str, class: Class, params: Value, f: F)
    where
        F: FnOnce(&mut SampleRng) -> Result<f64>,
    {
        let mut rng = sample::rng(sample::seed_for(id));
        let (residual, error) = match f(&mut rng) {
            Ok(r) => (r, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let tolerance = self.tolerance(class);
        let mut parameters = BTreeMap::new();
        if let Value::Object(map) = params {
            parameters.extend(map);
        }
        parameters.insert("degree".into(), json!(self.degree));
        self.records.push(Record {
            id: id.to_string(),
            statement: statement.to_string(),
            parameters,
            max_residual: Float(residual),
            tolerance: Float(tolerance),
            pass: residual <= tolerance,
            error,
        });
    }
}

fn disk_rule(frame: Frame<f64>, degree: usize) -> Result<PlanarRule<f64>> {
    let (a, b) = disk_orders_for_degree(degree);
    build_disk_rule(a.max(32), b.max(64), frame)
}

fn ball_rule(degree: usize) -> Result<BallRule<f64>> {
    let (a, b, c) = ball_orders_for_degree(degree);
    build_ball_rule(a, b, c)
}

fn part(frame: Frame<f64>, q: Q, l: usize) -> Q {
    Q::from_real(frame.components(q)[l])
}

/// Runs the requested suites in fixed order.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let truncation = opts.truncation.unwrap_or(opts.degree.max(2)).max(1);
    let mut r = Runner {
        tol: opts.tolerances,
        degree: opts.degree,
        truncation,
        mismatch: opts.mismatch_truncation,
        records: Vec::new(),
    };
    if matches!(opts.suite, Suite::Complex | Suite::All) {
        complex_suite(&mut r);
    }
    if matches!(opts.suite, Suite::Slice | Suite::All) {
        slice_suite(&mut r);
    }
    if matches!(opts.suite, Suite::Bergman | Suite::All) {
        bergman_suite(&mut r);
    }
    let pass = r.records.iter().all(|rec| rec.pass);
    VerifyReport {
        suite: opts.suite.to_string(),
        degree: opts.degree,
        truncation,
        records: r.records,
        pass,
        wall_time_seconds: opts.timing.then(|| Float(start.elapsed().as_secs_f64())),
    }
}

fn complex_suite(r: &mut Runner) {
    let d = r.degree;
    let samples = json!({ "samples": SAMPLES });

    r.check(
        "c-pair-reconstruction",
        "f = f1 + i f2 with f1, f2 real-coefficient; decomposing f1 returns (f1, 0)",
        Class::Exact,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::holo_series(rng, frame, d);
                let (f1, f2) = c_pair_decompose(&f)?;
                res = res.max(f1.add(&f2.left_mul(frame.i.q())).max_coeff_diff(&f));
                let (g1, g2) = c_pair_decompose(&f1)?;
                res = res.max(g1.max_coeff_diff(&f1)).max(g2.scale());
            }
            Ok(res)
        },
    );

    r.check("c-anti-reconstruction", "f = fc + fa with fc(conj z) = conj fc(z), fa(conj z) = -conj fa(z); both parts are fixed points", Class::Exact, samples.clone(), |rng| {
        let mut res: f64 = 0.0;
        for _ in 0..SAMPLES {
            let frame = sample::frame(rng);
            let f = sample::holo_series(rng, frame, d);
            let (fc, fa) = c_anti_decompose(&f)?;
            res = res.max(fc.add(&fa).max_coeff_diff(&f));
            let (a, b) = c_anti_decompose(&fc)?;
            res = res.max(a.max_coeff_diff(&fc)).max(b.scale());
            let (a, b) = c_anti_decompose(&fa)?;
            res = res.max(a.scale()).max(b.max_coeff_diff(&fa));
        }
        Ok(res)
    });

    r.check(
        "c-classification",
        "parts of the C / anti-C split classify as C and AntiC; generic series as Neither",
        Class::Count,
        samples.clone(),
        |rng| {
            let mut wrong = 0usize;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::holo_series(rng, frame, d);
                let (fc, fa) = c_anti_decompose(&f)?;
                wrong += usize::from(classify(&fc)? != Classification::C);
                wrong += usize::from(classify(&fa)? != Classification::AntiC);
                wrong += usize::from(classify(&f)? != Classification::Neither);
            }
            Ok(wrong as f64)
        },
    );

    r.check(
        "conj-reflect-norm",
        "∫|f|² dσ = ∫|conj f(conj ζ)|² dσ on the disk",
        Class::Quadrature,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, 2 * d)?;
                let f = sample::holo_series(rng, frame, d);
                let g = conj_reflect(&f)?;
                let a = integrate_slice(|z| Ok(Q::from_real(f.eval(z)?.norm_sqr())), &rule)?;
                let b = integrate_slice(|z| Ok(Q::from_real(g.eval(z)?.norm_sqr())), &rule)?;
                res = res.max(a.dist(b));
            }
            Ok(res)
        },
    );

    r.check(
        "c-integral-real",
        "∫f1 dσ = ∫Re f dσ and ∫f2 dσ = ∫Im f dσ, both real",
        Class::Quadrature,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, d)?;
                let f = sample::holo_series(rng, frame, d);
                let (f1, f2) = c_pair_decompose(&f)?;
                let i1 = integrate_slice(|z| f1.eval(z), &rule)?;
                let i2 = integrate_slice(|z| f2.eval(z), &rule)?;
                let re = integrate_slice(|z| Ok(part(frame, f.eval(z)?, 0)), &rule)?;
                let im = integrate_slice(|z| Ok(part(frame, f.eval(z)?, 1)), &rule)?;
                res = res.max(i1.dist(re)).max(i2.dist(im));
            }
            Ok(res)
        },
    );

    r.check(
        "c-inner-products",
        "<f1, g1> real, <f1, i g1> imaginary, max(|f1|, |f2|) <= |f| <= |f1| + |f2|",
        Class::Quadrature,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, 2 * d)?;
                let f = sample::holo_series(rng, frame, d);
                let g = sample::holo_series(rng, frame, d);
                let (f1, f2) = c_pair_decompose(&f)?;
                let (g1, _) = c_pair_decompose(&g)?;
                let ig1 = g1.left_mul(frame.i.q());
                let inner = |a: &HoloSeries<f64>, b: &HoloSeries<f64>| {
                    integrate_slice(|z| Ok(a.eval(z)?.conj() * b.eval(z)?), &rule)
                };
                res = res.max(inner(&f1, &g1)?.vector_norm());
                res = res.max(inner(&f1, &ig1)?.w.abs());
                let n = inner(&f, &f)?.w.sqrt();
                let (n1, n2) = (inner(&f1, &f1)?.w.sqrt(), inner(&f2, &f2)?.w.sqrt());
                res = res.max(n1.max(n2) - n).max(n - n1 - n2);
            }
            Ok(res)
        },
    );

    let re_im_params = json!({ "samples": SAMPLES, "rule": [32, 64] });
    for (id, statement, kind) in [
        (
            "re-im-c",
            "∫R(z,ζ)f(ζ)dσ = Re f(z) and ∫I(z,ζ)f(ζ)dσ = Im f(z) for real-coefficient f",
            0,
        ),
        (
            "re-im-anti-c",
            "∫R(z,ζ)f(ζ)dσ = i Im f(z) and ∫I(z,ζ)f(ζ)dσ = -i Re f(z) for imaginary-coefficient f",
            1,
        ),
        (
            "re-im-general",
            "∫R f dσ = Re fc(z) + i Im fa(z) and ∫I f dσ = Im fc(z) - i Re fa(z) for f = fc + fa",
            2,
        ),
    ] {
        r.check(
            id,
            statement,
            Class::Quadrature,
            re_im_params.clone(),
            |rng| {
                let mut res: f64 = 0.0;
                for s in 0..SAMPLES {
                    let frame = if s % 2 == 0 {
                        Frame::standard()
                    } else {
                        sample::frame(rng)
                    };
                    let rule = build_disk_rule(32, 64, frame)?;
                    let f = sample::holo_series(rng, frame, d);
                    let (fc, fa) = c_anti_decompose(&f)?;
                    let f = match kind {
                        0 => fc.clone(),
                        1 => fa.clone(),
                        _ => f,
                    };
                    let z = sample::slice_point(rng, frame, 0.9);
                    let (ro, io) = re_im_apply(&f, z, &rule)?;
                    let i = frame.i.q();
                    let (vc, va) = (fc.eval(z)?, fa.eval(z)?);
                    let (vc, va) = match kind {
                        0 => (vc, Q::zero()),
                        1 => (Q::zero(), va),
                        _ => (vc, va),
                    };
                    let want_r = part(frame, vc, 0) + i * part(frame, va, 1);
                    let want_i = part(frame, vc, 1) - i * part(frame, va, 0);
                    res = res.max(ro.dist(want_r)).max(io.dist(want_i));
                }
                Ok(res)
            },
        );
    }

    let pairs = json!({ "samples": SAMPLES, "radius": 0.9 });
    r.check(
        "kernel-hermitian",
        "K(z,ζ) = conj K(ζ,z) for the disk kernel",
        Class::Exact,
        pairs.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let (z, w) = (
                    sample::slice_point(rng, frame, 0.9),
                    sample::slice_point(rng, frame, 0.9),
                );
                res = res.max(disk_kernel_eval(z, w)?.dist(disk_kernel_eval(w, z)?.conj()));
            }
            Ok(res)
        },
    );

    r.check("kernel-ri-symmetry", "R(conj z,ζ) = R(z,ζ), I(conj z,ζ) = -I(z,ζ), R(z,w) = conj R(z,conj w), I(z,w) = conj I(z,conj w), R(conj z,conj ζ) = conj R(z,ζ), I(conj z,conj ζ) = -conj I(z,ζ)", Class::Exact, pairs.clone(), |rng| {
        let mut res: f64 = 0.0;
        for _ in 0..SAMPLES {
            let frame = sample::frame(rng);
            let (z, w) = (sample::slice_point(rng, frame, 0.9), sample::slice_point(rng, frame, 0.9));
            let (rr, ii) = kernel_ri_split(z, w, frame)?;
            let (a, b) = kernel_ri_split(z.conj(), w, frame)?;
            res = res.max(a.dist(rr)).max(b.dist(-ii));
            let (a, b) = kernel_ri_split(z, w.conj(), frame)?;
            res = res.max(rr.dist(a.conj())).max(ii.dist(b.conj()));
            let (a, b) = kernel_ri_split(z.conj(), w.conj(), frame)?;
            res = res.max(a.dist(rr.conj())).max(b.dist(-ii.conj()));
            let k = disk_kernel_eval(z, w)?;
            res = res.max((rr + frame.i.q() * ii).dist(k));
        }
        Ok(res)
    });

    r.check(
        "kernel-ri-diagonal",
        "R(z,conj z) - i I(z,z) = R(z,z) + i I(z,conj z)",
        Class::Exact,
        pairs.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let z = sample::slice_point(rng, frame, 0.9);
                let i = frame.i.q();
                let lhs =
                    kernel_ri_split(z, z.conj(), frame)?.0 - i * kernel_ri_split(z, z, frame)?.1;
                let rhs =
                    kernel_ri_split(z, z, frame)?.0 + i * kernel_ri_split(z, z.conj(), frame)?.1;
                res = res.max(lhs.dist(rhs));
            }
            Ok(res)
        },
    );

    r.check(
        "kernel-ri-diagonal-integral",
        "R(z,conj z) - i I(z,z) = ∫(|R(z,ζ)|² - |I(z,ζ)|²)dσ",
        Class::Quadrature,
        json!({ "samples": SAMPLES, "radius": 0.6, "rule": [32, 64], "series_degree": 31 }),
        |rng| {
            let mut res: f64 = 0.0;
            let kernel = ComplexKernel::disk(Frame::standard());
            let rule = build_disk_rule(32, 64, Frame::standard())?;
            for _ in 0..SAMPLES {
                let z = sample::slice_point(rng, Frame::standard(), 0.6);
                let i = Q::e1();
                let lhs = kernel.ri_split(z, z.conj())?.0 - i * kernel.ri_split(z, z)?.1;
                let (r_row, i_row) = kernel.ri_rows(z, 32);
                let rhs = integrate_slice(
                    |w| {
                        Ok(Q::from_real(
                            conj_power_sum(&r_row, w).norm_sqr()
                                - conj_power_sum(&i_row, w).norm_sqr(),
                        ))
                    },
                    &rule,
                )?;
                res = res.max(lhs.dist(rhs));
            }
            Ok(res)
        },
    );

    r.check(
        "kernel-reproduction",
        "∫K(z,ζ)f(ζ)dσ = f(z) for polynomial f",
        Class::Quadrature,
        json!({ "samples": SAMPLES, "radius": 0.5 }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, 2 * d)?;
                let f = sample::holo_series(rng, frame, d);
                let z = sample::slice_point(rng, frame, 0.5);
                let v = integrate_slice(|w| Ok(disk_kernel_eval(z, w)? * f.eval(w)?), &rule)?;
                res = res.max(v.dist(f.eval(z)?));
            }
            Ok(res)
        },
    );

    let nd = d.max(2);
    r.check(
        "numeric-kernel-disk",
        "Gram kernel of the disk at degree N equals Σ_{n<=N} (n+1)/π zⁿ conj(ζ)ⁿ",
        Class::Quadrature,
        json!({ "samples": SAMPLES, "N": nd, "radius": 0.7 }),
        |rng| {
            let frame = Frame::standard();
            let rule = disk_rule(frame, 2 * nd)?;
            let k = numeric_kernel_build(&rule, nd)?;
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let (z, w) = (
                    sample::slice_point(rng, frame, 0.7),
                    sample::slice_point(rng, frame, 0.7),
                );
                let want = (0..=nd).fold(Q::zero(), |acc, n| {
                    acc + (z.powi(n as u32) * w.conj().powi(n as u32)).scale(disk_weight(n))
                });
                res = res.max(k.eval(z, w)?.dist(want));
            }
            Ok(res)
        },
    );

    let nr = d.max(3);
    r.check(
        "numeric-kernel-rectangle",
        "Gram kernel of [-1,1]x[-1/2,1/2] is hermitian and reproduces polynomials of degree <= N",
        Class::Quadrature,
        json!({ "samples": SAMPLES, "N": nr }),
        |rng| {
            let frame = Frame::standard();
            let n = (nr + 2).max(12);
            let rule = build_rectangle_rule(n, n, 1.0, 0.5, frame)?;
            let k = numeric_kernel_build(&rule, nr)?;
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let inside = |rng: &mut SampleRng| {
                    use rand::Rng;
                    frame.slice_point(rng.gen_range(-0.9..0.9), rng.gen_range(-0.45..0.45))
                };
                let (z, w) = (inside(rng), inside(rng));
                res = res.max(k.eval(z, w)?.dist(k.eval(w, z)?.conj()));
                let f = sample::holo_series(rng, frame, nr).with_radius(2.0);
                let v = integrate_slice(|x| Ok(k.eval(z, x)? * f.eval(x)?), &rule)?;
                res = res.max(v.dist(f.eval(z)?));
            }
            Ok(res)
        },
    );

    r.check(
        "bergman-projection",
        "projection of conj ζ is 0, of |ζ|² is 1/2, of a polynomial is itself",
        Class::Quadrature,
        samples,
        |rng| {
            let frame = Frame::standard();
            let rule = disk_rule(frame, 2 * d + 2)?;
            let k = ComplexKernel::disk(frame);
            let mut res = bergman_project(|z: Q| Ok(z.conj()), &rule, &k)?
                .series
                .scale();
            let half = HoloSeries::from_real(frame, &[0.5]);
            res = res.max(
                bergman_project(|z: Q| Ok(Q::from_real(z.norm_sqr())), &rule, &k)?
                    .series
                    .max_coeff_diff(&half),
            );
            for _ in 0..SAMPLES {
                let f = sample::holo_series(rng, frame, d);
                let p = bergman_project(|z| f.eval(z), &rule, &k)?;
                res = res.max(p.series.max_coeff_diff(&f));
                let z = sample::slice_point(rng, frame, 0.9);
                let fz = f.eval(z)?;
                res = res.max((p.r_apply(z)? + frame.i.q() * p.i_apply(z)?).dist(fz));
            }
            Ok(res)
        },
    );
}

fn slice_suite(r: &mut Runner) {
    let d = r.degree;
    let samples = json!({ "samples": SAMPLES });

    r.check("fourfold-reconstruction", "F = F0 + F1 i + F2 j + F3 ij with intrinsic F_l; an intrinsic F decomposes as (F, 0, 0, 0)", Class::Exact, samples.clone(), |rng| {
        let mut res: f64 = 0.0;
        for _ in 0..SAMPLES {
            let frame = sample::frame(rng);
            let f = sample::slice_series(rng, d);
            let parts = fourfold_decompose(&f, frame);
            res = res.max(fourfold_assemble(&parts, frame).max_coeff_diff(&f));
            for p in &parts {
                res = res.max(p.coeffs.iter().fold(0.0, |m, c| m.max(c.vector_norm())));
                let again = fourfold_decompose(p, frame);
                for (m, q) in again.iter().enumerate() {
                    res = res.max(if m == 0 { q.max_coeff_diff(p) } else { q.scale() });
                }
            }
        }
        Ok(res)
    });

    r.check(
        "split-reconstruction",
        "Q_i F = f1 + f2 j with slice-valued f1, f2",
        Class::Exact,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::slice_series(rng, d);
                let (f1, f2) = split_basis(&f, frame);
                let restricted = restrict_q(&f, frame);
                res = res.max(
                    f1.add(&f2.right_mul(frame.j.q()))
                        .max_coeff_diff(&restricted),
                );
                if !(f1.is_slice_valued() && f2.is_slice_valued()) {
                    res = f64::INFINITY;
                }
            }
            Ok(res)
        },
    );

    r.check(
        "refined-split",
        "Q_i F = h0 + h1 i + h2 j + h3 ij with real-coefficient h_l",
        Class::Exact,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::slice_series(rng, d);
                let h = refined_split(&f, frame);
                let sum = (0..4).fold(HoloSeries::zero(frame, 0), |acc, l| {
                    acc.add(&h[l].right_mul(frame.basis(l)))
                });
                res = res.max(sum.max_coeff_diff(&restrict_q(&f, frame)));
                for p in &h {
                    res = res.max(p.coeffs.iter().fold(0.0, |m, c| m.max(c.vector_norm())));
                }
            }
            Ok(res)
        },
    );

    r.check(
        "restrict-extend-identity",
        "P_i Q_i = identity on slice series and Q_i P_i = identity on the slice",
        Class::Exact,
        samples.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::slice_series(rng, d);
                res = res.max(extend_series(&restrict_q(&f, frame)).max_coeff_diff(&f));
                let g = sample::holo_series(rng, frame, d);
                res = res.max(restrict_q(&extend_series(&g), frame).max_coeff_diff(&g));
            }
            Ok(res)
        },
    );

    r.check(
        "representation-formula",
        "P_i[Q_i F](q) = F(q) pointwise",
        Class::Exact,
        json!({ "samples": SAMPLES, "radius": 0.9 }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let f = sample::slice_series(rng, d);
                let q = sample::ball_point(rng, 0.9);
                res = res.max(extend_p(&restrict_q(&f, frame), q)?.dist(f.eval(q)?));
            }
            Ok(res)
        },
    );

    r.check("extension-closed-forms", "P_i[fc](q) = Re fc + I_q Im fc; P_i[fa](q) = (Im fa - I_q Re fa) i; P_i[f](q) = Re f + I_q Im f + (1 + I_q i) fa(x - y i)", Class::Exact, json!({ "samples": SAMPLES, "radius": 0.9 }), |rng| {
        let mut res: f64 = 0.0;
        for _ in 0..SAMPLES {
            let frame = sample::frame(rng);
            let f = sample::holo_series(rng, frame, d);
            let (fc, fa) = c_anti_decompose(&f)?;
            let q = sample::off_slice_point(rng, frame, 0.9);
            let p = slice_coords(q)?;
            let (iq, i) = (p.unit.q(), frame.i.q());
            let at = |g: &HoloSeries<f64>, y: f64| -> Result<(Q, Q)> {
                let v = g.eval_xy(p.x, y)?;
                Ok((part(frame, v, 0), part(frame, v, 1)))
            };
            let (re, im) = at(&fc, p.y)?;
            res = res.max(extend_p(&fc, q)?.dist(re + iq * im));
            let (re, im) = at(&fa, p.y)?;
            res = res.max(extend_p(&fa, q)?.dist((im - iq * re) * i));
            let (re, im) = at(&f, p.y)?;
            let want = re + iq * im + (Q::one() + iq * i) * fa.eval_xy(p.x, -p.y)?;
            res = res.max(extend_p(&f, q)?.dist(want));
        }
        Ok(res)
    });

    r.check(
        "intrinsic-characterization",
        "real coefficients ⇔ F(conj q) = conj F(q) ⇔ α, β real-valued",
        Class::Exact,
        json!({ "samples": SAMPLES, "radius": 0.9 }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let f = sample::real_series(rng, d);
                let g = sample::slice_series(rng, d.max(1));
                let q = sample::ball_point(rng, 0.9);
                res = res.max(intrinsic_defect(&f, q)?);
                let ab = alpha_beta_of(&f);
                let (x, y) = (q.w, q.vector_norm());
                res = res
                    .max(ab.alpha(x, y)?.vector_norm())
                    .max(ab.beta(x, y)?.vector_norm());
                let generic = is_intrinsic(&g) != Intrinsic::Intrinsic;
                let ab = alpha_beta_of(&g);
                let complex_valued =
                    ab.alpha(x, y)?.vector_norm() > 1e-8 || ab.beta(x, y)?.vector_norm() > 1e-8;
                if is_intrinsic(&f) != Intrinsic::Intrinsic || !generic || !complex_valued {
                    res = f64::INFINITY;
                }
            }
            Ok(res)
        },
    );

    r.check(
        "intrinsic-commutation",
        "F(q) G(q) = G(q) F(q) for intrinsic F, G",
        Class::Exact,
        json!({ "samples": SAMPLES, "radius": 0.9 }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let (f, g) = (sample::real_series(rng, d), sample::real_series(rng, d));
                let q = sample::ball_point(rng, 0.9);
                let (a, b) = (f.eval(q)?, g.eval(q)?);
                res = res.max((a * b).dist(b * a));
            }
            Ok(res)
        },
    );

    r.check(
        "cauchy-riemann",
        "∂x α - ∂y β = 0, ∂y α + ∂x β = 0, α even and β odd in y",
        Class::FiniteDifference,
        json!({ "samples": SAMPLES, "step": CR_STEP }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let f = sample::slice_series(rng, d);
                let ab = alpha_beta_of(&f);
                let q = sample::slice_point(rng, Frame::standard(), 0.6);
                let (x, y) = (q.w, q.x);
                let (r1, r2) = cr_residual(&ab, x, y, CR_STEP)?;
                res = res.max(r1.norm()).max(r2.norm());
                res = res.max(ab.alpha(x, -y)?.dist(ab.alpha(x, y)?));
                res = res.max(ab.beta(x, -y)?.dist(-ab.beta(x, y)?));
            }
            Ok(res)
        },
    );

    r.check(
        "second-kind-restriction",
        "K(q,ζ) on one slice equals the disk kernel",
        Class::Exact,
        json!({ "samples": SAMPLES, "radius": 0.9 }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let (q, w) = (
                    sample::slice_point(rng, frame, 0.9),
                    sample::slice_point(rng, frame, 0.9),
                );
                let n = series_truncation(q.norm() * w.norm())?;
                res = res.max(second_kind_eval(q, w, n)?.dist(disk_kernel_eval(q, w)?));
            }
            Ok(res)
        },
    );

    let sn = SECOND_KIND_MIN_TRUNCATION.max(d);
    r.check(
        "second-kind-hermitian",
        "K(q,r) = conj K(r,q)",
        Class::Exact,
        json!({ "samples": SAMPLES, "N": sn }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let (q, w) = (sample::ball_point(rng, 0.9), sample::ball_point(rng, 0.9));
                res = res.max(second_kind_eval(q, w, sn)?.dist(second_kind_eval(w, q, sn)?.conj()));
            }
            Ok(res)
        },
    );

    r.check(
        "second-kind-components",
        "K = K0 + K1 i + K2 j + K3 ij with intrinsic K_l; K1 = K2 = K3 = 0 for real r",
        Class::Exact,
        json!({ "samples": SAMPLES, "N": sn }),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let (q, w) = (sample::ball_point(rng, 0.9), sample::ball_point(rng, 0.9));
                let k = second_kind_components(q, w, frame, sn)?;
                let sum = (0..4).fold(Q::zero(), |acc, l| acc + k[l] * frame.basis(l));
                res = res.max(sum.dist(second_kind_eval(q, w, sn)?));
                for s in second_kind_component_series(w, frame, sn) {
                    res = res.max(s.coeffs.iter().fold(0.0, |m, c| m.max(c.vector_norm())));
                }
                let k = second_kind_components(q, Q::from_real(w.w), frame, sn)?;
                res = res.max(k[1].norm()).max(k[2].norm()).max(k[3].norm());
            }
            Ok(res)
        },
    );

    let reproduce_params = json!({ "samples": SAMPLES, "N": sn, "radius": 0.85 });
    r.check(
        "slice-reproduction",
        "∫ K(q,ζ) F(ζ) dσ over one slice = F(q) for q off that slice",
        Class::Quadrature,
        reproduce_params.clone(),
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, d + sn)?;
                let f = sample::slice_series(rng, d);
                let q = sample::off_slice_point(rng, frame, 0.85);
                res = res.max(slice_reproduce(&f, q, frame, &rule, sn)?.dist(f.eval(q)?));
            }
            Ok(res)
        },
    );

    r.check(
        "component-reproduction",
        "Σ_l ∫ K_l(q,ζ) e_l F(ζ) dσ = F(q)",
        Class::Quadrature,
        reproduce_params,
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, d + sn)?;
                let f = sample::slice_series(rng, d);
                let q = sample::off_slice_point(rng, frame, 0.85);
                let parts = component_reproduce(&f, q, frame, &rule, sn)?;
                let sum = parts.iter().fold(Q::zero(), |a, &b| a + b);
                res = res.max(sum.dist(f.eval(q)?));
            }
            Ok(res)
        },
    );

    r.check(
        "slice-inner-product-real",
        "∫ conj F(ζ) G(ζ) dσ is real for intrinsic F, G",
        Class::Quadrature,
        samples,
        |rng| {
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let frame = sample::frame(rng);
                let rule = disk_rule(frame, 2 * d)?;
                let (f, g) = (sample::real_series(rng, d), sample::real_series(rng, d));
                res = res.max(
                    integrate_slice(|z| Ok(f.eval(z)?.conj() * g.eval(z)?), &rule)?.vector_norm(),
                );
            }
            Ok(res)
        },
    );
}

type Built = Result<(FirstKindKernel<f64>, BallRule<f64>)>;

fn need<F>(built: &Built, rng: &mut SampleRng, f: F) -> Result<f64>
where
    F: FnOnce(&mut SampleRng, &FirstKindKernel<f64>, &BallRule<f64>) -> Result<f64>,
{
    let (k, rule) = built.as_ref().map_err(Clone::clone)?;
    f(rng, k, rule)
}

fn bergman_suite(r: &mut Runner) {
    let d = r.degree;
    let n = r.truncation;
    let pi2 = PI * PI;
    let built: Built = ball_rule(2 * n).and_then(|rule| Ok((gram_build(n, &rule)?, rule)));
    let params = |extra: Value| {
        let mut v = json!({ "N": n });
        if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
            a.extend(b);
        }
        v
    };
    let res = need(&built, &mut sample::rng(0), |_, k, _| {
        let g = &k.gram;
        let mut res: f64 = 0.0;
        for (a, row) in g.iter().enumerate() {
            res = res.max((row[a] - pi2 / (a as f64 + 2.0)).abs());
            if a + 2 < row.len() {
                res = res.max((row[a + 2] + pi2 / (2.0 * a as f64 + 6.0)).abs());
            }
        }
        Ok(res)
    });
    r.check(
        "gram-moments",
        "G_nn = π²/(n+2), G_n,n+2 = -π²/(2n+6); G00 = π²/2, G11 = π²/3, G02 = -π²/6, G22 = π²/4",
        Class::Quadrature,
        params(json!({})),
        |_| res,
    );

    let res = need(&built, &mut sample::rng(0), |_, k, _| {
        let mut res: f64 = 0.0;
        for (a, row) in k.gram.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                let gap = a.abs_diff(b);
                if gap != 0 && gap != 2 {
                    res = res.max(v.abs());
                }
            }
        }
        Ok(res)
    });
    r.check(
        "gram-band",
        "G_nm = 0 unless |n - m| ∈ {0, 2}",
        Class::Quadrature,
        params(json!({})),
        |_| res,
    );

    r.check(
        "first-kind-hermitian",
        "B(q,r) = conj B(r,q)",
        Class::Exact,
        params(json!({ "samples": SAMPLES })),
        |rng| {
            need(&built, rng, |rng, k, _| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let (q, w) = (sample::ball_point(rng, 0.95), sample::ball_point(rng, 0.95));
                    res = res.max(first_kind_eval(k, q, w)?.dist(first_kind_eval(k, w, q)?.conj()));
                }
                Ok(res)
            })
        },
    );

    r.check(
        "first-kind-reproduction",
        "∫ B(q,r) F(r) dμ = F(q) for deg F <= N",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES })),
        |rng| {
            need(&built, rng, |rng, k, rule| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let f = sample::slice_series(rng, n);
                    let q = sample::ball_point(rng, 0.9);
                    let v = integrate_ball(|w| Ok(first_kind_eval(k, q, w)? * f.eval(w)?), rule)?;
                    res = res.max(v.dist(f.eval(q)?));
                }
                Ok(res)
            })
        },
    );

    r.check(
        "first-kind-antiregular",
        "∂x B(q, x + y i) - ∂y B(q, x + y i) i = 0",
        Class::FiniteDifference,
        params(json!({ "samples": SAMPLES, "step": CR_STEP })),
        |rng| {
            need(&built, rng, |rng, k, _| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let frame = sample::frame(rng);
                    let q = sample::ball_point(rng, 0.9);
                    let z = sample::slice_point(rng, Frame::standard(), 0.6);
                    res = res.max(first_kind_antiregularity_residual(
                        k, q, frame, z.w, z.x, CR_STEP,
                    )?);
                }
                Ok(res)
            })
        },
    );

    let second = if r.mismatch { n + MISMATCH_GAP } else { n };
    r.check(
        "kernel-consistency",
        "K(ζ,q) = ∫ B(ζ,r) K(r,q) dμ_r",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES, "radius": 0.5, "second_kind_N": second })),
        |rng| {
            need(&built, rng, |rng, k, _| {
                let rule = ball_rule(n + second)?;
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let (z, q) = (sample::ball_point(rng, 0.5), sample::ball_point(rng, 0.5));
                    res = res.max(kernel_consistency(k, second, &rule, z, q)?);
                }
                Ok(res)
            })
        },
    );

    r.check(
        "m-i-quadrature",
        "M_i[F] coefficients from slice quadrature equal C D a with D = diag(π/(m+1))",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES })),
        |rng| {
            need(&built, rng, |rng, k, _| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let frame = sample::frame(rng);
                    let prule = disk_rule(frame, d + n)?;
                    let f = sample::slice_series(rng, d.min(n));
                    res = res
                        .max(m_i_apply(k, &f, frame, &prule)?.max_coeff_diff(&m_i_exact(k, &f)?));
                }
                Ok(res)
            })
        },
    );

    r.check(
        "m-i-pointwise",
        "∫ B(q,ζ) F(ζ) dσ over the slice equals the M_i[F] series at q",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES })),
        |rng| {
            need(&built, rng, |rng, k, _| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let frame = sample::frame(rng);
                    let prule = disk_rule(frame, d + n)?;
                    let f = sample::slice_series(rng, d.min(n));
                    let q = sample::ball_point(rng, 0.9);
                    res = res.max(
                        m_i_pointwise(k, &f, q, frame, &prule)?.dist(m_i_exact(k, &f)?.eval(q)?),
                    );
                }
                Ok(res)
            })
        },
    );

    r.check(
        "m-i-hand-value",
        "M_i[1](q) = (18 + 12 q²)/(7π) at N = 2",
        Class::Exact,
        json!({ "N": 2, "samples": SAMPLES }),
        |rng| {
            let k = gram_build(2, &ball_rule(4)?)?;
            let prule = disk_rule(Frame::standard(), 2)?;
            let m = m_i_apply(
                &k,
                &SliceSeries::from_real(&[1.0]),
                Frame::standard(),
                &prule,
            )?;
            let mut res: f64 = 0.0;
            for _ in 0..SAMPLES {
                let q = sample::ball_point(rng, 0.95);
                let want = (Q::from_real(18.0) + (q * q).scale(12.0)).scale(1.0 / (7.0 * PI));
                res = res.max(m.eval(q)?.dist(want));
            }
            Ok(res)
        },
    );

    r.check(
        "two-stage-reproduction",
        "∫ K(q,r) M_i[F](r) dμ_r = F(q)",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES, "radius": 0.9 })),
        |rng| {
            need(&built, rng, |rng, k, brule| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let frame = sample::frame(rng);
                    let prule = disk_rule(frame, d + n)?;
                    let f = sample::slice_series(rng, d.min(n));
                    let q = sample::ball_point(rng, 0.9);
                    res = res
                        .max(two_stage_reproduce(&f, q, k, frame, &prule, brule)?.dist(f.eval(q)?));
                }
                Ok(res)
            })
        },
    );

    r.check(
        "m-i-adjoint",
        "∫ conj M_i[F] G dμ = ∫ conj F G dσ for all monomial pairs of degree <= N",
        Class::Quadrature,
        params(json!({})),
        |rng| {
            need(&built, rng, |rng, k, brule| {
                let frame = sample::frame(rng);
                let prule = disk_rule(frame, 2 * n)?;
                let mut res: f64 = 0.0;
                for a in 0..=n {
                    let f = SliceSeries::monomial(a, sample::quaternion(rng, 1.0));
                    for b in 0..=n {
                        let g = SliceSeries::monomial(b, sample::quaternion(rng, 1.0));
                        let (lhs, rhs) = mi_adjoint_identity(&f, &g, k, frame, &prule, brule)?;
                        res = res.max(lhs.dist(rhs));
                    }
                }
                Ok(res)
            })
        },
    );

    r.check(
        "m-i-adjoint-positive",
        "∫ conj M_i[F] F dμ = ∫ |F|² dσ >= 0",
        Class::Quadrature,
        params(json!({ "samples": SAMPLES })),
        |rng| {
            need(&built, rng, |rng, k, brule| {
                let mut res: f64 = 0.0;
                for _ in 0..SAMPLES {
                    let frame = sample::frame(rng);
                    let prule = disk_rule(frame, 2 * n)?;
                    let f = sample::slice_series(rng, d.min(n));
                    let (lhs, rhs) = mi_adjoint_identity(&f, &f, k, frame, &prule, brule)?;
                    let norm =
                        integrate_slice(|z| Ok(Q::from_real(f.eval(z)?.norm_sqr())), &prule)?;
                    res = res
                        .max(lhs.dist(rhs))
                        .max(lhs.vector_norm())
                        .max(-lhs.w)
                        .max(rhs.dist(norm));
                }
                Ok(res)
            })
        },
    );
}
