//! Slice regular Bergman kernels on the unit ball of quaternions.
//!
//! * Second kind: `K(q, r) = (1/π) Σ (n + 1) qⁿ r̄ⁿ`, the slice extension of
//!   the disk kernel, reproducing from a single slice.
//! * First kind: `B(q, r) = Σ qⁿ C_{nm} r̄ᵐ` with `C = G⁻¹` and
//!   `G_{nm} = ∫ q̄ⁿ qᵐ dμ` over the ball, reproducing for the volume measure.
//! * `M_i[f](q) = ∫ B(q, ζ) f(ζ) dσ` over the slice disk, which the second
//!   kind kernel carries back to `f` under the volume integral.
//!
//! Both kernels are truncated at an explicit degree `N`; every identity here
//! is exact for polynomials when the truncations match.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cbergman::{disk_weight, powers, real_symmetric};
use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, Matrix};
use crate::qalg::{Frame, Quaternion};
use crate::quad::{integrate_ball, integrate_slice, pairwise_sum, BallRule, PlanarRule};
use crate::scalar::Scalar;
use crate::slicefn::SliceSeries;

/// Smallest truncation accepted by [`second_kind_eval`].
pub const SECOND_KIND_MIN_TRUNCATION: usize = 32;
/// Largest `|q||r|` accepted by the second kind kernel.
pub const SECOND_KIND_LIMIT: f64 = 0.9;

fn check_ball<T: Scalar>(q: Quaternion<T>) -> Result<()> {
    let m = q.norm();
    if m >= T::one() {
        return Err(Error::OutOfDomain {
            modulus: m.to_f64().unwrap_or(f64::NAN),
            radius: 1.0,
        });
    }
    Ok(())
}

fn check_product<T: Scalar>(product: T) -> Result<()> {
    if product > T::lit(SECOND_KIND_LIMIT) {
        return Err(Error::NearBoundary {
            product: product.to_f64().unwrap_or(f64::NAN),
            limit: SECOND_KIND_LIMIT,
        });
    }
    Ok(())
}

fn check_truncation(n: usize) -> Result<()> {
    if n < SECOND_KIND_MIN_TRUNCATION {
        return Err(Error::TruncationTooLow {
            truncation: n,
            minimum: SECOND_KIND_MIN_TRUNCATION,
        });
    }
    Ok(())
}

/// `Σ_{n ≤ N} qⁿ (n + 1)/π r̄ⁿ` without domain checks.
pub fn second_kind_truncated<T: Scalar>(
    q: Quaternion<T>,
    r: Quaternion<T>,
    n: usize,
) -> Quaternion<T> {
    let rb = r.conj();
    let (mut pq, mut pr) = (Quaternion::one(), Quaternion::one());
    let mut acc = Quaternion::zero();
    for k in 0..=n {
        acc += (pq * pr).scale(disk_weight(k));
        pq = pq * q;
        pr = pr * rb;
    }
    acc
}

/// Second kind kernel truncated at degree `n ≥ 32`, for `|q||r| ≤ 0.9`.
pub fn second_kind_eval<T: Scalar>(
    q: Quaternion<T>,
    r: Quaternion<T>,
    n: usize,
) -> Result<Quaternion<T>> {
    check_truncation(n)?;
    check_product(q.norm() * r.norm())?;
    Ok(second_kind_truncated(q, r, n))
}

/// The intrinsic pieces `K^ℓ(·, r)` of `K(·, r) = Σ_ℓ K^ℓ(·, r) e_ℓ` as
/// q-series with real coefficients.
pub fn second_kind_component_series<T: Scalar>(
    r: Quaternion<T>,
    frame: Frame<T>,
    n: usize,
) -> [SliceSeries<T>; 4] {
    let comps: Vec<[T; 4]> = powers(r.conj(), n + 1)
        .into_iter()
        .enumerate()
        .map(|(k, p)| frame.components(p.scale(disk_weight(k))))
        .collect();
    std::array::from_fn(|l| {
        let real: Vec<T> = comps.iter().map(|c| c[l]).collect();
        SliceSeries::from_real(&real)
    })
}

fn component_values<T: Scalar>(
    q: Quaternion<T>,
    r: Quaternion<T>,
    frame: Frame<T>,
    n: usize,
) -> [Quaternion<T>; 4] {
    let series = second_kind_component_series(r, frame, n);
    // Real coefficients commute with q; Horner is safe at any |q|.
    series.map(|s| {
        s.coeffs
            .iter()
            .rev()
            .fold(Quaternion::zero(), |acc, &c| q * acc + c)
    })
}

/// `(K⁰, K¹, K², K³)(q, r)` with `K = K⁰ + K¹ i + K² j + K³ ij`.
pub fn second_kind_components<T: Scalar>(
    q: Quaternion<T>,
    r: Quaternion<T>,
    frame: Frame<T>,
    n: usize,
) -> Result<[Quaternion<T>; 4]> {
    check_truncation(n)?;
    check_product(q.norm() * r.norm())?;
    Ok(component_values(q, r, frame, n))
}

fn slice_rule<T: Scalar>(rule: &PlanarRule<T>, frame: Frame<T>) -> PlanarRule<T> {
    if rule.frame == frame {
        rule.clone()
    } else {
        rule.on_frame(frame)
    }
}

fn max_node_modulus<T: Scalar>(rule: &PlanarRule<T>) -> T {
    rule.nodes.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

fn reproduce_checks<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    rule: &PlanarRule<T>,
    n: usize,
) -> Result<()> {
    check_ball(q)?;
    check_truncation(n)?;
    if f.degree() > n {
        return Err(Error::DegreeTooHigh {
            degree: f.degree(),
            truncation: n,
        });
    }
    rule.require_degree(f.degree() + n)?;
    check_product(q.norm() * max_node_modulus(rule))
}

/// `∫ K(q, ζ) f(ζ) dσ` over the slice disk of `frame`; equals `f(q)` for any
/// `q` in the ball when `deg f ≤ n`.
pub fn slice_reproduce<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
    n: usize,
) -> Result<Quaternion<T>> {
    let rule = slice_rule(rule, frame);
    reproduce_checks(f, q, &rule, n)?;
    integrate_slice(
        |zeta| Ok(second_kind_truncated(q, zeta, n) * f.eval(zeta)?),
        &rule,
    )
}

/// `∫ K^ℓ(q, ζ) f(ζ) dσ` for `ℓ = 0..4`.
pub fn component_integrals<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
    n: usize,
) -> Result<[Quaternion<T>; 4]> {
    component_terms(f, q, frame, rule, n, false)
}

/// `∫ K^ℓ(q, ζ) e_ℓ f(ζ) dσ` for `ℓ = 0..4`; these sum to `f(q)`.
pub fn component_reproduce<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
    n: usize,
) -> Result<[Quaternion<T>; 4]> {
    component_terms(f, q, frame, rule, n, true)
}

fn component_terms<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
    n: usize,
    with_basis: bool,
) -> Result<[Quaternion<T>; 4]> {
    let rule = slice_rule(rule, frame);
    reproduce_checks(f, q, &rule, n)?;
    let values: Vec<([Quaternion<T>; 4], Quaternion<T>)> = rule
        .nodes
        .par_iter()
        .map(|&zeta| Ok((component_values(q, zeta, frame, n), f.eval(zeta)?)))
        .collect::<Result<_>>()?;
    Ok(std::array::from_fn(|l| {
        let e = if with_basis {
            frame.basis(l)
        } else {
            Quaternion::one()
        };
        let terms: Vec<Quaternion<T>> = values
            .iter()
            .zip(&rule.weights)
            .map(|((k, fz), &w)| (k[l] * e * *fz).scale(w))
            .collect();
        pairwise_sum(&terms)
    }))
}

/// First kind kernel truncated at degree `N`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FirstKindKernel<T: Scalar> {
    #[serde(rename = "N")]
    pub truncation: usize,
    pub gram: Matrix<T>,
    pub coeff: Matrix<T>,
    #[serde(skip)]
    pub rule: Option<BallRule<T>>,
}

impl<T: Scalar> FirstKindKernel<T> {
    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.truncation {
            return Err(Error::DegreeTooHigh {
                degree,
                truncation: self.truncation,
            });
        }
        Ok(())
    }

    /// `r ↦ B(q, r)` coefficient row: `Σ_n qⁿ C_{nm}`.
    fn row(&self, q: Quaternion<T>) -> Vec<Quaternion<T>> {
        let n = self.truncation + 1;
        let pq = powers(q, n);
        (0..n)
            .map(|m| {
                (0..n).fold(Quaternion::zero(), |acc, a| {
                    acc + pq[a].scale(self.coeff[a][m])
                })
            })
            .collect()
    }

    fn eval_row(row: &[Quaternion<T>], r: Quaternion<T>) -> Quaternion<T> {
        let rb = r.conj();
        row.iter()
            .rev()
            .fold(Quaternion::zero(), |acc, &c| acc * rb + c)
    }
}

/// `G_{nm} = ∫ q̄ⁿ qᵐ dμ` over the ball and `C = G⁻¹`.
pub fn gram_build<T: Scalar>(n: usize, rule: &BallRule<T>) -> Result<FirstKindKernel<T>> {
    rule.require_degree(2 * n)?;
    let size = n + 1;
    let pows: Vec<Vec<Quaternion<T>>> = rule.nodes.par_iter().map(|&q| powers(q, size)).collect();
    let raw: Vec<Vec<Quaternion<T>>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    let terms: Vec<Quaternion<T>> = pows
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, &w)| (p[a].conj() * p[b]).scale(w))
                        .collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect();
    let gram = real_symmetric(&raw)?;
    let coeff = spd_inverse(&gram)?;
    Ok(FirstKindKernel {
        truncation: n,
        gram,
        coeff,
        rule: Some(rule.clone()),
    })
}

/// `B(q, r) = Σ qⁿ C_{nm} r̄ᵐ`.
pub fn first_kind_eval<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    q: Quaternion<T>,
    r: Quaternion<T>,
) -> Result<Quaternion<T>> {
    check_ball(q)?;
    check_ball(r)?;
    Ok(FirstKindKernel::eval_row(&kernel.row(q), r))
}

/// Central-difference residual `|∂ₓF − (∂ᵧF) i|` of `F(x + y i) = B(q, x + y i)`.
pub fn first_kind_antiregularity_residual<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    x: T,
    y: T,
    h: T,
) -> Result<T> {
    let row = kernel.row(q);
    let f = |x: T, y: T| -> Result<Quaternion<T>> {
        let r = frame.slice_point(x, y);
        check_ball(r)?;
        Ok(FirstKindKernel::eval_row(&row, r))
    };
    let two_h = h + h;
    let dx = (f(x + h, y)? - f(x - h, y)?) / two_h;
    let dy = (f(x, y + h)? - f(x, y - h)?) / two_h;
    Ok((dx - dy * frame.i.q()).norm())
}

/// `|K_N(ζ, q) − ∫ B(ζ, r) K_N(r, q) dμ_r|` with the first kind kernel at its
/// own truncation and the second kind kernel at `n`.
pub fn kernel_consistency<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    n: usize,
    rule: &BallRule<T>,
    zeta: Quaternion<T>,
    q: Quaternion<T>,
) -> Result<T> {
    check_ball(zeta)?;
    check_ball(q)?;
    check_product(zeta.norm() * q.norm())?;
    rule.require_degree(kernel.truncation + n)?;
    let row = kernel.row(zeta);
    let integral = integrate_ball(
        |r| Ok(FirstKindKernel::eval_row(&row, r) * second_kind_truncated(r, q, n)),
        rule,
    )?;
    Ok(second_kind_truncated(zeta, q, n).dist(integral))
}

fn m_i_checks<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    f: &SliceSeries<T>,
    rule: &PlanarRule<T>,
) -> Result<()> {
    kernel.check_degree(f.degree())?;
    rule.require_degree(f.degree() + kernel.truncation)
}

/// `M_i[f]` as a slice series: coefficients `C μ` with slice moments
/// `μ_m = ∫ ζ̄ᵐ f(ζ) dσ` taken by quadrature on the slice of `frame`.
pub fn m_i_apply<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    f: &SliceSeries<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
) -> Result<SliceSeries<T>> {
    let rule = slice_rule(rule, frame);
    m_i_checks(kernel, f, &rule)?;
    let size = kernel.truncation + 1;
    let values: Vec<Quaternion<T>> = rule
        .nodes
        .par_iter()
        .map(|&z| f.eval(z))
        .collect::<Result<_>>()?;
    let moments: Vec<Quaternion<T>> = (0..size)
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
    Ok(apply_coeff(kernel, &moments))
}

fn apply_coeff<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    moments: &[Quaternion<T>],
) -> SliceSeries<T> {
    let size = kernel.truncation + 1;
    SliceSeries::new(
        (0..size)
            .map(|a| {
                (0..size).fold(Quaternion::zero(), |acc, b| {
                    acc + moments[b].scale(kernel.coeff[a][b])
                })
            })
            .collect(),
    )
}

/// `M_i[f]` from exact disk moments: coefficients `C · diag(π/(m + 1)) · a`.
pub fn m_i_exact<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    f: &SliceSeries<T>,
) -> Result<SliceSeries<T>> {
    kernel.check_degree(f.degree())?;
    let moments: Vec<Quaternion<T>> = (0..=kernel.truncation)
        .map(|m| {
            f.coeffs
                .get(m)
                .copied()
                .unwrap_or_default()
                .scale(T::one() / disk_weight(m))
        })
        .collect();
    Ok(apply_coeff(kernel, &moments))
}

/// `M_i[f](q) = Σ_k w_k B(q, ζ_k) f(ζ_k)` directly from kernel values.
pub fn m_i_pointwise<T: Scalar>(
    kernel: &FirstKindKernel<T>,
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    frame: Frame<T>,
    rule: &PlanarRule<T>,
) -> Result<Quaternion<T>> {
    check_ball(q)?;
    let rule = slice_rule(rule, frame);
    m_i_checks(kernel, f, &rule)?;
    let row = kernel.row(q);
    integrate_slice(
        |z| Ok(FirstKindKernel::eval_row(&row, z) * f.eval(z)?),
        &rule,
    )
}

/// `∫ K_N(q, r) M_i[f](r) dμ_r` with `N` the first kind truncation; equals `f(q)`.
pub fn two_stage_reproduce<T: Scalar>(
    f: &SliceSeries<T>,
    q: Quaternion<T>,
    kernel: &FirstKindKernel<T>,
    frame: Frame<T>,
    prule: &PlanarRule<T>,
    brule: &BallRule<T>,
) -> Result<Quaternion<T>> {
    check_ball(q)?;
    let n = kernel.truncation;
    brule.require_degree(2 * n)?;
    let m = m_i_apply(kernel, f, frame, prule)?;
    integrate_ball(|r| Ok(second_kind_truncated(q, r, n) * m.eval(r)?), brule)
}

/// `(∫ conj(M_i[f]) g dμ, ∫ conj(f) g dσ)` over the ball and the slice disk.
pub fn mi_adjoint_identity<T: Scalar>(
    f: &SliceSeries<T>,
    g: &SliceSeries<T>,
    kernel: &FirstKindKernel<T>,
    frame: Frame<T>,
    prule: &PlanarRule<T>,
    brule: &BallRule<T>,
) -> Result<(Quaternion<T>, Quaternion<T>)> {
    kernel.check_degree(g.degree())?;
    brule.require_degree(kernel.truncation + g.degree())?;
    let prule = slice_rule(prule, frame);
    prule.require_degree(f.degree() + g.degree())?;
    let m = m_i_apply(kernel, f, frame, &prule)?;
    let lhs = integrate_ball(|r| Ok(m.eval(r)?.conj() * g.eval(r)?), brule)?;
    let rhs = integrate_slice(|z| Ok(f.eval(z)?.conj() * g.eval(z)?), &prule)?;
    Ok((lhs, rhs))
}
