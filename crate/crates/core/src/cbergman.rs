//! Bergman kernels of Z-invariant planar domains, their splitting into the
//! components `R` and `I` with `K(z, ·) = R(z, ·) + i I(z, ·)`, and the
//! Bergman projection.
//!
//! Kernels are holomorphic in the first variable:
//! `K(z, ζ) = Σ bₘ(z) ζ̄ᵐ` with `bₘ(z) = Σₙ zⁿ C_{nm}`. On the unit disk
//! `C = diag((n + 1)/π)` and `K(z, ζ) = 1/(π(1 − z ζ̄)²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::holo::HoloSeries;
use crate::linalg::{spd_inverse, Matrix};
use crate::qalg::{Frame, Quaternion};
use crate::quad::{integrate_slice, pairwise_sum, PlanarDomain, PlanarRule};
use crate::scalar::Scalar;

/// Pointwise kernel series are refused when `|z||ζ|` exceeds this.
pub const NEAR_BOUNDARY_LIMIT: f64 = 0.9;
/// Starting truncation for pointwise kernel series.
pub const DEFAULT_SERIES_DEGREE: usize = 64;
/// Target tail bound for pointwise kernel series.
pub const SERIES_TAIL_TOL: f64 = 1e-12;
/// Largest admissible imaginary part of a Gram entry (at least `1000 ε`).
pub const GRAM_IMAG_TOL: f64 = 1e-10;

/// `(n + 1)/π`, the disk kernel's monomial weights.
pub fn disk_weight<T: Scalar>(n: usize) -> T {
    T::from_usize_lossy(n + 1) / T::PI()
}

fn out_of_disk<T: Scalar>(q: Quaternion<T>) -> Result<()> {
    let m = q.norm();
    if m >= T::one() {
        return Err(Error::OutOfDomain {
            modulus: m.to_f64().unwrap_or(f64::NAN),
            radius: 1.0,
        });
    }
    Ok(())
}

fn same_slice<T: Scalar>(z: Quaternion<T>, w: Quaternion<T>) -> Result<()> {
    let c = z * w - w * z;
    if c.norm() > T::lit(1e-12) * (T::one() + z.norm() * w.norm()) {
        return Err(Error::FrameMismatch(format!(
            "{z} and {w} lie on different slice planes"
        )));
    }
    Ok(())
}

/// `1/(π(1 − z ζ̄)²)` for `z`, `ζ` on a common slice plane of the unit ball.
pub fn disk_kernel_eval<T: Scalar>(z: Quaternion<T>, zeta: Quaternion<T>) -> Result<Quaternion<T>> {
    out_of_disk(z)?;
    out_of_disk(zeta)?;
    same_slice(z, zeta)?;
    let d = Quaternion::one() - z * zeta.conj();
    let d2 = d * d;
    // |1 - z ζ̄| > 0 inside the disk.
    Ok(d2.inverse().expect("nonzero denominator") / T::PI())
}

/// Smallest truncation `N ≥ DEFAULT_SERIES_DEGREE` with tail bound
/// `(N + 2) ρᴺ⁺¹ / (π (1 − ρ)²)` below [`SERIES_TAIL_TOL`].
pub fn series_truncation<T: Scalar>(rho: T) -> Result<usize> {
    let limit = T::lit(NEAR_BOUNDARY_LIMIT);
    if rho > limit {
        return Err(Error::NearBoundary {
            product: rho.to_f64().unwrap_or(f64::NAN),
            limit: NEAR_BOUNDARY_LIMIT,
        });
    }
    let tol = T::lit(SERIES_TAIL_TOL).max(T::eps());
    let denom = T::PI() * (T::one() - rho) * (T::one() - rho);
    let mut n = DEFAULT_SERIES_DEGREE;
    while T::from_usize_lossy(n + 2) * rho.powi(n as i32 + 1) / denom >= tol {
        n += 1;
    }
    Ok(n)
}

/// Horner in `ζ̄` with coefficients applied on the left of the powers.
pub fn conj_power_sum<T: Scalar>(coeffs: &[Quaternion<T>], zeta: Quaternion<T>) -> Quaternion<T> {
    let zb = zeta.conj();
    coeffs
        .iter()
        .rev()
        .fold(Quaternion::zero(), |acc, &c| acc * zb + c)
}

/// Gram-matrix kernel of a Z-invariant domain over monomials of degree `≤ degree`.
#[derive(Clone, Debug)]
pub struct NumericKernel<T: Scalar> {
    pub rule: PlanarRule<T>,
    pub degree: usize,
    /// `G_{nm} = ∫ ζ̄ⁿ ζᵐ dσ`.
    pub gram: Matrix<T>,
    /// `G⁻¹`.
    pub coeff: Matrix<T>,
}

#[derive(Clone, Debug)]
pub enum ComplexKernel<T: Scalar> {
    DiskClosedForm { frame: Frame<T> },
    NumericGram(NumericKernel<T>),
}

impl<T: Scalar> ComplexKernel<T> {
    pub fn disk(frame: Frame<T>) -> Self {
        Self::DiskClosedForm { frame }
    }

    pub fn frame(&self) -> Frame<T> {
        match self {
            Self::DiskClosedForm { frame } => *frame,
            Self::NumericGram(k) => k.rule.frame,
        }
    }

    /// Highest monomial degree represented, `None` for the closed form.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Self::DiskClosedForm { .. } => None,
            Self::NumericGram(k) => Some(k.degree),
        }
    }

    /// `bₘ(z)` for `m < len`, so that `K(z, ζ) ≈ Σ bₘ(z) ζ̄ᵐ`.
    pub fn row(&self, z: Quaternion<T>, len: usize) -> Vec<Quaternion<T>> {
        match self {
            Self::DiskClosedForm { .. } => {
                let mut p = Quaternion::one();
                (0..len)
                    .map(|m| {
                        let b = p.scale(disk_weight(m));
                        p = p * z;
                        b
                    })
                    .collect()
            }
            Self::NumericGram(k) => {
                let n = k.degree + 1;
                let powers = powers(z, n);
                (0..len)
                    .map(|m| {
                        if m >= n {
                            return Quaternion::zero();
                        }
                        (0..n).fold(Quaternion::zero(), |acc, i| {
                            acc + powers[i].scale(k.coeff[i][m])
                        })
                    })
                    .collect()
            }
        }
    }

    pub fn eval(&self, z: Quaternion<T>, zeta: Quaternion<T>) -> Result<Quaternion<T>> {
        match self {
            Self::DiskClosedForm { .. } => disk_kernel_eval(z, zeta),
            Self::NumericGram(k) => {
                same_slice(z, zeta)?;
                Ok(conj_power_sum(&self.row(z, k.degree + 1), zeta))
            }
        }
    }

    /// Coefficient rows of `R(z, ·)` and `I(z, ·)`: real and `i` parts of `bₘ(z)`.
    pub fn ri_rows(
        &self,
        z: Quaternion<T>,
        len: usize,
    ) -> (Vec<Quaternion<T>>, Vec<Quaternion<T>>) {
        let frame = self.frame();
        self.row(z, len)
            .into_iter()
            .map(|b| {
                let c = frame.components(b);
                (Quaternion::from_real(c[0]), Quaternion::from_real(c[1]))
            })
            .unzip()
    }

    /// `(R(z, ζ), I(z, ζ))`.
    pub fn ri_split(
        &self,
        z: Quaternion<T>,
        zeta: Quaternion<T>,
    ) -> Result<(Quaternion<T>, Quaternion<T>)> {
        let len = match self {
            Self::DiskClosedForm { .. } => {
                out_of_disk(z)?;
                out_of_disk(zeta)?;
                series_truncation(z.norm() * zeta.norm())? + 1
            }
            Self::NumericGram(k) => k.degree + 1,
        };
        same_slice(z, zeta)?;
        let (r, i) = self.ri_rows(z, len);
        Ok((conj_power_sum(&r, zeta), conj_power_sum(&i, zeta)))
    }
}

pub(crate) fn powers<T: Scalar>(z: Quaternion<T>, n: usize) -> Vec<Quaternion<T>> {
    let mut out = Vec::with_capacity(n);
    let mut p = Quaternion::one();
    for _ in 0..n {
        out.push(p);
        p = p * z;
    }
    out
}

/// `(R(z, ζ), I(z, ζ))` of the unit disk kernel, with `Re` and `Im` taken
/// with respect to `frame.i`.
pub fn kernel_ri_split<T: Scalar>(
    z: Quaternion<T>,
    zeta: Quaternion<T>,
    frame: Frame<T>,
) -> Result<(Quaternion<T>, Quaternion<T>)> {
    ComplexKernel::disk(frame).ri_split(z, zeta)
}

/// `G_{nm} = ∫ ζ̄ⁿ ζᵐ dσ`, checked to be real and then symmetrized.
pub fn planar_gram<T: Scalar>(rule: &PlanarRule<T>, degree: usize) -> Result<Matrix<T>> {
    rule.require_degree(2 * degree)?;
    let n = degree + 1;
    let pows: Vec<Vec<Quaternion<T>>> = rule.nodes.iter().map(|&z| powers(z, n)).collect();
    let mut raw = vec![vec![Quaternion::zero(); n]; n];
    for (a, row) in raw.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let terms: Vec<Quaternion<T>> = pows
                .iter()
                .zip(&rule.weights)
                .map(|(p, &w)| (p[a].conj() * p[b]).scale(w))
                .collect();
            *entry = pairwise_sum(&terms);
        }
    }
    real_symmetric(&raw)
}

pub(crate) fn real_symmetric<T: Scalar>(raw: &[Vec<Quaternion<T>>]) -> Result<Matrix<T>> {
    let n = raw.len();
    let tol = T::lit(GRAM_IMAG_TOL).max(T::eps() * T::lit(1e3));
    for (a, row) in raw.iter().enumerate() {
        for (b, e) in row.iter().enumerate() {
            if e.vector_norm() > tol {
                return Err(Error::NonRealGram {
                    row: a,
                    col: b,
                    imaginary: e.vector_norm().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let half = T::lit(0.5);
    Ok((0..n)
        .map(|a| (0..n).map(|b| (raw[a][b].w + raw[b][a].w) * half).collect())
        .collect())
}

/// Bergman kernel of the rule's domain restricted to polynomials of degree `≤ degree`.
pub fn numeric_kernel_build<T: Scalar>(
    rule: &PlanarRule<T>,
    degree: usize,
) -> Result<ComplexKernel<T>> {
    let gram = planar_gram(rule, degree)?;
    let coeff = spd_inverse(&gram)?;
    Ok(ComplexKernel::NumericGram(NumericKernel {
        rule: rule.clone(),
        degree,
        gram,
        coeff,
    }))
}

/// Bergman projection `B g = R g + i I g` expressed in the monomial basis.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct BergmanProjection<T: Scalar> {
    pub series: HoloSeries<T>,
    /// Real parts of the coefficients of `B g`.
    pub re: Vec<T>,
    /// `i`-parts of the coefficients of `B g`.
    pub im: Vec<T>,
}

impl<T: Scalar> BergmanProjection<T> {
    fn split_sum(&self, z: Quaternion<T>, part: usize) -> Result<Quaternion<T>> {
        out_of_disk(z)?;
        let frame = self.series.frame;
        if !frame.in_slice(z, T::lit(1e-12)) {
            return Err(Error::FrameMismatch(format!(
                "{z} is not in C({})",
                frame.i.q()
            )));
        }
        let mut p = Quaternion::one();
        let mut terms = Vec::with_capacity(self.series.coeffs.len());
        for &a in &self.series.coeffs {
            terms.push(a.scale(frame.components(p)[part]));
            p = p * z;
        }
        Ok(pairwise_sum(&terms))
    }

    /// `(R g)(z) = Σ Re(zⁿ) aₙ`.
    pub fn r_apply(&self, z: Quaternion<T>) -> Result<Quaternion<T>> {
        self.split_sum(z, 0)
    }

    /// `(I g)(z) = Σ Im(zⁿ) aₙ`.
    pub fn i_apply(&self, z: Quaternion<T>) -> Result<Quaternion<T>> {
        self.split_sum(z, 1)
    }
}

/// Projects `g` onto the polynomials represented by `kernel`, moments taken
/// with `rule`. The closed-form disk kernel uses degrees up to half the rule's
/// exactness.
pub fn bergman_project<T, G>(
    g: G,
    rule: &PlanarRule<T>,
    kernel: &ComplexKernel<T>,
) -> Result<BergmanProjection<T>>
where
    T: Scalar,
    G: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
{
    let degree = kernel.degree().unwrap_or(rule.exact_degree / 2);
    let frame = kernel.frame();
    let rule = if rule.frame == frame {
        rule.clone()
    } else {
        rule.on_frame(frame)
    };
    let values: Vec<Quaternion<T>> = {
        use rayon::prelude::*;
        rule.nodes
            .par_iter()
            .map(|&z| g(z))
            .collect::<Result<_>>()?
    };
    let n = degree + 1;
    let moments: Vec<Quaternion<T>> = (0..n)
        .map(|m| {
            let terms: Vec<Quaternion<T>> = rule
                .nodes
                .iter()
                .zip(&values)
                .zip(&rule.weights)
                .map(|((&z, &v), &w)| (z.conj().powi(m as u32) * v).scale(w))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let coeffs: Vec<Quaternion<T>> = match kernel {
        ComplexKernel::DiskClosedForm { .. } => moments
            .iter()
            .enumerate()
            .map(|(m, &mu)| mu.scale(disk_weight(m)))
            .collect(),
        ComplexKernel::NumericGram(k) => (0..n)
            .map(|a| {
                (0..n).fold(Quaternion::zero(), |acc, b| {
                    acc + moments[b].scale(k.coeff[a][b])
                })
            })
            .collect(),
    };
    let (re, im) = coeffs
        .iter()
        .map(|&c| {
            let k = frame.components(c);
            (k[0], k[1])
        })
        .unzip();
    Ok(BergmanProjection {
        series: HoloSeries::new(frame, coeffs),
        re,
        im,
    })
}

/// `(∫ R(z, ζ) f(ζ) dσ, ∫ I(z, ζ) f(ζ) dσ)` on the unit disk by quadrature.
pub fn re_im_apply<T: Scalar>(
    f: &HoloSeries<T>,
    z: Quaternion<T>,
    rule: &PlanarRule<T>,
) -> Result<(Quaternion<T>, Quaternion<T>)> {
    if rule.domain != PlanarDomain::UnitDisk {
        return Err(Error::FrameMismatch(
            "disk kernel needs a unit disk rule".into(),
        ));
    }
    re_im_apply_with(&ComplexKernel::disk(f.frame), f, z, rule)
}

/// As [`re_im_apply`] for any kernel whose domain matches the rule.
pub fn re_im_apply_with<T: Scalar>(
    kernel: &ComplexKernel<T>,
    f: &HoloSeries<T>,
    z: Quaternion<T>,
    rule: &PlanarRule<T>,
) -> Result<(Quaternion<T>, Quaternion<T>)> {
    if rule.domain == PlanarDomain::UnitDisk {
        out_of_disk(z)?;
    }
    let frame = kernel.frame();
    if !frame.in_slice(z, T::lit(1e-12)) {
        return Err(Error::FrameMismatch(format!(
            "{z} is not in C({})",
            frame.i.q()
        )));
    }
    let d = f.degree();
    rule.require_degree(2 * d)?;
    // Kernel monomials above deg f are orthogonal to f; keep every product exact.
    let len = match kernel.degree() {
        Some(n) => n + 1,
        None => rule.exact_degree - d + 1,
    };
    let (r_row, i_row) = kernel.ri_rows(z, len);
    let rule = if rule.frame == frame {
        rule.clone()
    } else {
        rule.on_frame(frame)
    };
    let r = integrate_slice(
        |zeta| Ok(conj_power_sum(&r_row, zeta) * f.eval(zeta)?),
        &rule,
    )?;
    let i = integrate_slice(
        |zeta| Ok(conj_power_sum(&i_row, zeta) * f.eval(zeta)?),
        &rule,
    )?;
    Ok((r, i))
}

/// Row-major CSV of a real matrix.
pub fn matrix_csv<T: Scalar>(m: &Matrix<T>) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One CSV row per `(z, ζ)` pair:
/// `z_re,z_im,zeta_re,zeta_im,k_re,k_im,r_re,r_im,i_re,i_im`.
pub fn kernel_grid_csv<T: Scalar>(
    kernel: &ComplexKernel<T>,
    pairs: &[(Quaternion<T>, Quaternion<T>)],
) -> Result<String> {
    let frame = kernel.frame();
    let mut out = String::from("z_re,z_im,zeta_re,zeta_im,k_re,k_im,r_re,r_im,i_re,i_im\n");
    for &(z, zeta) in pairs {
        let k = kernel.eval(z, zeta)?;
        let (r, i) = kernel.ri_split(z, zeta)?;
        let cells: Vec<String> = [z, zeta, k, r, i]
            .iter()
            .flat_map(|&q| {
                let c = frame.components(q);
                [c[0], c[1]]
            })
            .map(|v| format!("{v:.17e}"))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::{c_anti_decompose, c_pair_decompose, classify, Classification};
    use crate::qalg::{complete_frame, ImaginaryUnit};
    use crate::quad::{build_disk_rule, build_rectangle_rule};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type Q = Quaternion<f64>;

    fn fr() -> Frame<f64> {
        Frame::standard()
    }

    fn c(x: f64, y: f64) -> Q {
        fr().slice_point(x, y)
    }

    /// Independent oracle: direct partial sum of `Σ (n+1)/π zⁿ ζ̄ⁿ` in
    /// complex arithmetic.
    fn series_oracle(z: (f64, f64), w: (f64, f64), terms: usize) -> (f64, f64) {
        let p = (z.0 * w.0 + z.1 * w.1, z.1 * w.0 - z.0 * w.1);
        let (mut acc, mut pow) = ((0.0, 0.0), (1.0, 0.0));
        for n in 0..terms {
            let k = (n + 1) as f64 / PI;
            acc = (acc.0 + k * pow.0, acc.1 + k * pow.1);
            pow = (pow.0 * p.0 - pow.1 * p.1, pow.0 * p.1 + pow.1 * p.0);
        }
        acc
    }

    #[test]
    fn disk_kernel_examples() {
        let k = disk_kernel_eval(Q::zero(), c(0.4, -0.3)).unwrap();
        assert!(k.dist(Q::from_real(1.0 / PI)) < 1e-15);
        let z = c(0.5, 0.6);
        let d = disk_kernel_eval(z, z).unwrap();
        assert!(d.vector_norm() < 1e-15 && d.w >= 1.0 / PI);
        let a = disk_kernel_eval(c(0.3, 0.0), c(0.0, 0.5)).unwrap();
        let b = disk_kernel_eval(c(0.0, 0.5), c(0.3, 0.0)).unwrap();
        assert!(a.dist(b.conj()) < 1e-15);
    }

    #[test]
    fn disk_kernel_matches_series_oracle() {
        for &(z, w) in &[
            ((0.3, 0.2), (-0.5, 0.1)),
            ((0.0, 0.7), (0.6, -0.4)),
            ((0.1, 0.0), (0.2, 0.9)),
        ] {
            let k = disk_kernel_eval(c(z.0, z.1), c(w.0, w.1)).unwrap();
            let s = series_oracle(z, w, 400);
            assert!((k.w - s.0).abs() < 1e-12 && (k.x - s.1).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_kernel_errors() {
        assert!(matches!(
            disk_kernel_eval(c(1.0, 0.0), Q::zero()),
            Err(Error::OutOfDomain { .. })
        ));
        let other = Q::new(0.0, 0.0, 0.3, 0.0);
        assert!(matches!(
            disk_kernel_eval(c(0.1, 0.2), other),
            Err(Error::FrameMismatch(_))
        ));
        assert!(matches!(
            kernel_ri_split(c(0.95, 0.0), c(0.99, 0.0), fr()),
            Err(Error::NearBoundary { .. })
        ));
    }

    #[test]
    fn ri_split_recombines_and_is_closed_form() {
        let i = Q::e1();
        for &(z, w) in &[
            (c(0.3, 0.4), c(-0.2, 0.5)),
            (c(0.7, -0.1), c(0.6, 0.6)),
            (c(-0.5, 0.0), c(0.1, -0.8)),
        ] {
            let (r, im) = kernel_ri_split(z, w, fr()).unwrap();
            let k = disk_kernel_eval(z, w).unwrap();
            assert!((r + i * im).dist(k) < 1e-12);
            // R = (K(z, ζ) + K(z̄, ζ))/2
            let kb = disk_kernel_eval(z.conj(), w).unwrap();
            assert!(r.dist((k + kb).scale(0.5)) < 1e-12);
        }
    }

    #[test]
    fn series_truncation_grows_near_boundary() {
        assert_eq!(series_truncation(0.2f64).unwrap(), DEFAULT_SERIES_DEGREE);
        let n = series_truncation(0.9f64).unwrap();
        assert!(n > 200);
        let tail = (n + 2) as f64 * 0.9f64.powi(n as i32 + 1) / (PI * 0.01);
        assert!(tail < SERIES_TAIL_TOL);
    }

    #[test]
    fn ri_symmetries() {
        let samples = [
            (0.3, 0.4, -0.2, 0.5),
            (0.1, -0.6, 0.5, 0.5),
            (-0.7, 0.2, 0.3, -0.1),
        ];
        let i = Q::e1();
        for &(a, b, u, v) in &samples {
            let (z, w) = (c(a, b), c(u, v));
            let (r, im) = kernel_ri_split(z, w, fr()).unwrap();
            let (rb, ib) = kernel_ri_split(z.conj(), w, fr()).unwrap();
            assert!(rb.dist(r) < 1e-12 && ib.dist(-im) < 1e-12);
            let (rw, iw) = kernel_ri_split(z, w.conj(), fr()).unwrap();
            assert!(r.dist(rw.conj()) < 1e-12 && im.dist(iw.conj()) < 1e-12);
            let (rr, ii) = kernel_ri_split(z.conj(), w.conj(), fr()).unwrap();
            assert!(rr.dist(r.conj()) < 1e-12 && ii.dist(-im.conj()) < 1e-12);
            let lhs = kernel_ri_split(z, z.conj(), fr()).unwrap().0
                - i * kernel_ri_split(z, z, fr()).unwrap().1;
            let rhs = kernel_ri_split(z, z, fr()).unwrap().0
                + i * kernel_ri_split(z, z.conj(), fr()).unwrap().1;
            assert!(lhs.dist(rhs) < 1e-12);
        }
        let (_, im) = kernel_ri_split(c(0.4, 0.0), c(0.2, 0.3), fr()).unwrap();
        assert!(im.norm() < 1e-15);
    }

    #[test]
    fn diagonal_identity_against_quadrature() {
        let rule = build_disk_rule(40, 128, fr()).unwrap();
        let i = Q::e1();
        let kernel = ComplexKernel::disk(fr());
        for z in [c(0.5, 0.2), c(-0.3, 0.6)] {
            let lhs =
                kernel.ri_split(z, z.conj()).unwrap().0 - i * kernel.ri_split(z, z).unwrap().1;
            let (r_row, i_row) = kernel.ri_rows(z, 64);
            let rhs = integrate_slice(
                |w| {
                    let r = conj_power_sum(&r_row, w);
                    let s = conj_power_sum(&i_row, w);
                    Ok(Q::from_real(r.norm_sqr() - s.norm_sqr()))
                },
                &rule,
            )
            .unwrap();
            assert!(lhs.dist(rhs) < 1e-12, "{lhs:?} vs {rhs:?}");
        }
    }

    #[test]
    fn projection_examples() {
        let rule = build_disk_rule(16, 32, fr()).unwrap();
        let k = ComplexKernel::disk(fr());
        let p = bergman_project(|z: Q| Ok(z.conj()), &rule, &k).unwrap();
        assert!(p.series.scale() < 1e-14);
        let p = bergman_project(Ok, &rule, &k).unwrap();
        let want = HoloSeries::from_real(fr(), &[0.0, 1.0]);
        assert!(p.series.max_coeff_diff(&want) < 1e-13);
        let p = bergman_project(|z: Q| Ok(Q::from_real(z.norm_sqr())), &rule, &k).unwrap();
        let want = HoloSeries::from_real(fr(), &[0.5]);
        assert!(p.series.max_coeff_diff(&want) < 1e-13);
    }

    #[test]
    fn projection_r_and_i_parts() {
        let rule = build_disk_rule(16, 32, fr()).unwrap();
        let f = HoloSeries::from_complex(fr(), &[(0.2, 0.1), (0.0, -1.0), (0.5, 0.3)]);
        let p = bergman_project(|z| f.eval(z), &rule, &ComplexKernel::disk(fr())).unwrap();
        let z = c(0.3, -0.4);
        let (r, i) = re_im_apply(&f, z, &rule).unwrap();
        assert!(p.r_apply(z).unwrap().dist(r) < 1e-13);
        assert!(p.i_apply(z).unwrap().dist(i) < 1e-13);
        assert!(
            (p.r_apply(z).unwrap() + Q::e1() * p.i_apply(z).unwrap()).dist(f.eval(z).unwrap())
                < 1e-13
        );
        assert_eq!(p.re.len(), p.im.len());
    }

    #[test]
    fn re_im_apply_examples() {
        let rule = build_disk_rule(16, 32, fr()).unwrap();
        let z2 = HoloSeries::from_real(fr(), &[0.0, 0.0, 1.0]);
        let (r, i) = re_im_apply(&z2, c(0.0, 0.5), &rule).unwrap();
        assert!(r.dist(Q::from_real(-0.25)) < 1e-13 && i.norm() < 1e-13);

        let iz = HoloSeries::from_complex(fr(), &[(0.0, 0.0), (0.0, 1.0)]);
        let (r, i) = re_im_apply(&iz, c(0.5, 0.0), &rule).unwrap();
        assert!(r.dist(c(0.0, 0.5)) < 1e-13 && i.norm() < 1e-13);

        let mixed = z2.add(&iz);
        let (r, _) = re_im_apply(&mixed, c(0.0, 0.5), &rule).unwrap();
        assert!(r.dist(Q::from_real(-0.25)) < 1e-13);
    }

    #[test]
    fn re_im_apply_needs_fine_rule() {
        let rule = build_disk_rule(2, 4, fr()).unwrap();
        let f = HoloSeries::from_real(fr(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            re_im_apply(&f, c(0.1, 0.0), &rule),
            Err(Error::RuleTooCoarse { .. })
        ));
    }

    fn re_im_contract(f: &HoloSeries<f64>, z: Q, rule: &PlanarRule<f64>) -> f64 {
        let (r, i) = re_im_apply(f, z, rule).unwrap();
        let (fc, fa) = c_anti_decompose(f).unwrap();
        let frame = f.frame;
        let (vc, va) = (
            frame.components(fc.eval(z).unwrap()),
            frame.components(fa.eval(z).unwrap()),
        );
        let unit = frame.i.q();
        // R: Re f_c + i Im f_a;  I: Im f_c - i Re f_a
        let want_r = Q::from_real(vc[0]) + unit * Q::from_real(va[1]);
        let want_i = Q::from_real(vc[1]) - unit * Q::from_real(va[0]);
        r.dist(want_r).max(i.dist(want_i))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn re_im_contract_holds(
            parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
            x in -0.6f64..0.6, y in -0.6f64..0.6,
        ) {
            let rule = build_disk_rule(16, 32, fr()).unwrap();
            let f = HoloSeries::from_complex(fr(), &parts);
            let (f1, _) = c_pair_decompose(&f).unwrap();
            prop_assert_eq!(classify(&f1).unwrap(), Classification::C);
            prop_assert!(re_im_contract(&f, c(x, y), &rule) < 1e-12);
        }

        #[test]
        fn kernel_hermitian(a in -0.6f64..0.6, b in -0.6f64..0.6, u in -0.6f64..0.6, v in -0.6f64..0.6) {
            let k1 = disk_kernel_eval(c(a, b), c(u, v)).unwrap();
            let k2 = disk_kernel_eval(c(u, v), c(a, b)).unwrap();
            prop_assert!(k1.dist(k2.conj()) < 1e-13);
        }
    }

    #[test]
    fn re_im_on_rotated_frame() {
        let frame = complete_frame(ImaginaryUnit::new(Q::new(0.0, 1.0, -2.0, 2.0)).unwrap());
        let rule = build_disk_rule(12, 24, fr()).unwrap().on_frame(frame);
        let f = HoloSeries::from_complex(frame, &[(0.3, -0.7), (0.2, 0.4), (-1.0, 0.1)]);
        let z = frame.slice_point(0.2, -0.5);
        assert!(re_im_contract(&f, z, &rule) < 1e-12);
    }

    #[test]
    fn numeric_disk_kernel_matches_closed_form_at_its_degree() {
        let rule = build_disk_rule(8, 16, fr()).unwrap();
        let k = numeric_kernel_build(&rule, 6).unwrap();
        if let ComplexKernel::NumericGram(nk) = &k {
            for (n, row) in nk.coeff.iter().enumerate() {
                for (m, &v) in row.iter().enumerate() {
                    let want = if n == m { disk_weight::<f64>(n) } else { 0.0 };
                    assert!((v - want).abs() < 1e-11);
                }
            }
        }
        let z = c(0.3, -0.2);
        let w = c(0.5, 0.4);
        let s = series_oracle((0.3, -0.2), (0.5, 0.4), 7);
        let v = k.eval(z, w).unwrap();
        assert!((v.w - s.0).abs() < 1e-12 && (v.x - s.1).abs() < 1e-12);
    }

    #[test]
    fn rectangle_kernel() {
        let rule = build_rectangle_rule(12, 12, 1.0, 0.5, fr()).unwrap();
        let k = numeric_kernel_build(&rule, 6).unwrap();
        for &(z, w) in &[(c(0.2, 0.1), c(-0.5, 0.3)), (c(0.7, -0.4), c(0.1, 0.2))] {
            let a = k.eval(z, w).unwrap();
            let b = k.eval(w, z).unwrap();
            assert!(a.dist(b.conj()) < 1e-12);
        }
        let f = HoloSeries::from_real(fr(), &[0.0, 0.0, 0.0, 1.0]).with_radius(2.0);
        let p = bergman_project(|z| f.eval(z), &rule, &k).unwrap();
        let z = c(0.2, 0.1);
        assert!(p.series.eval(z).unwrap().dist(z.powi(3)) < 1e-8);
        let via_kernel = integrate_slice(|w| Ok(k.eval(z, w)? * f.eval(w)?), &rule).unwrap();
        assert!(via_kernel.dist(z.powi(3)) < 1e-8);
        let (r, i) = re_im_apply_with(&k, &f, z, &rule).unwrap();
        assert!(r.dist(Q::from_real(z.powi(3).w)) < 1e-9);
        assert!(i.dist(Q::from_real(z.powi(3).x)) < 1e-9);
    }

    #[test]
    fn gram_checks() {
        let rule = build_disk_rule(4, 8, fr()).unwrap();
        assert!(matches!(
            numeric_kernel_build(&rule, 8),
            Err(Error::RuleTooCoarse { .. })
        ));
        let raw = vec![vec![Q::new(1.0, 1e-6, 0.0, 0.0)]];
        assert!(matches!(
            real_symmetric(&raw),
            Err(Error::NonRealGram { .. })
        ));
    }

    #[test]
    fn csv_exports() {
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let s = matrix_csv(&m);
        assert_eq!(s.lines().count(), 2);
        assert!(s.starts_with("1.00000000000000000e0,2.00000000000000000e0"));
        let grid =
            kernel_grid_csv(&ComplexKernel::disk(fr()), &[(Q::zero(), c(0.3, 0.1))]).unwrap();
        let row: Vec<f64> = grid
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row.len(), 10);
        assert!((row[4] - 1.0 / PI).abs() < 1e-15);
    }
}
