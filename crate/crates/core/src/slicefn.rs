//! Slice regular functions on the unit ball as series `Σ qⁿ aₙ`.
//!
//! `restrict_q` and `extend_series` are the coefficient-level restriction and
//! extension operators between the ball and one slice; `extend_p` is the
//! pointwise representation formula and serves as the cross-check.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holo::{HoloSeries, COEFF_TOL};
use crate::qalg::{slice_coords, Frame, Quaternion};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SliceSeries<T: Scalar> {
    pub radius: T,
    pub coeffs: Vec<Quaternion<T>>,
}

/// Outcome of [`is_intrinsic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Intrinsic {
    Intrinsic,
    AntiIntrinsic,
    Neither,
}

impl<T: Scalar> SliceSeries<T> {
    pub fn new(coeffs: Vec<Quaternion<T>>) -> Self {
        Self {
            radius: T::one(),
            coeffs,
        }
    }

    pub fn with_radius(mut self, radius: T) -> Self {
        assert!(radius > T::zero(), "radius must be positive");
        self.radius = radius;
        self
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&a| Quaternion::from_real(a)).collect())
    }

    /// The monomial `qⁿ a`.
    pub fn monomial(n: usize, a: Quaternion<T>) -> Self {
        let mut coeffs = vec![Quaternion::zero(); n + 1];
        coeffs[n] = a;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Quaternion::zero())
            .unwrap_or(0)
    }

    pub fn scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, q: Quaternion<T>) -> Result<Quaternion<T>> {
        let m = q.norm();
        if m >= self.radius {
            return Err(Error::OutOfDomain {
                modulus: m.to_f64().unwrap_or(f64::NAN),
                radius: self.radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(crate::holo::horner_left(&self.coeffs, q))
    }

    pub fn map_coeffs(&self, f: impl Fn(Quaternion<T>) -> Quaternion<T>) -> Self {
        Self {
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            radius: self.radius.min(other.radius),
            coeffs: (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + other.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        }
    }

    /// `F · a`, again slice regular.
    pub fn right_mul(&self, a: Quaternion<T>) -> Self {
        self.map_coeffs(|c| c * a)
    }

    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).fold(T::zero(), |m, k| {
            let a = self.coeffs.get(k).copied().unwrap_or_default();
            let b = other.coeffs.get(k).copied().unwrap_or_default();
            m.max(a.dist(b))
        })
    }
}

/// Representation formula
/// `P_i[f](x + I y) = ½[(1 + I i) f(x − y i) + (1 − I i) f(x + y i)]`.
///
/// Real points return `f(x)` directly.
pub fn extend_p<T: Scalar>(f: &HoloSeries<T>, at: Quaternion<T>) -> Result<Quaternion<T>> {
    let m = at.norm();
    if m >= f.radius {
        return Err(Error::OutOfDomain {
            modulus: m.to_f64().unwrap_or(f64::NAN),
            radius: f.radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    let p = match slice_coords(at) {
        Ok(p) => p,
        Err(Error::RealInput) => return f.eval_xy(at.w, T::zero()),
        Err(e) => return Err(e),
    };
    let i = f.frame.i.q();
    let ii = p.unit.q() * i;
    let one = Quaternion::one();
    let minus = f.eval_xy(p.x, -p.y)?;
    let plus = f.eval_xy(p.x, p.y)?;
    Ok(((one + ii) * minus + (one - ii) * plus).scale(T::lit(0.5)))
}

/// `P_i` at coefficient level: `Σ zⁿ cₙ ↦ Σ qⁿ cₙ`.
pub fn extend_series<T: Scalar>(f: &HoloSeries<T>) -> SliceSeries<T> {
    SliceSeries {
        radius: f.radius,
        coeffs: f.coeffs.clone(),
    }
}

/// `Q_i`: restriction of `F` to the slice `C(frame.i)`.
pub fn restrict_q<T: Scalar>(f: &SliceSeries<T>, frame: Frame<T>) -> HoloSeries<T> {
    HoloSeries {
        frame,
        radius: f.radius,
        coeffs: f.coeffs.clone(),
    }
}

/// Splitting `Q_i[F] = f₁ + f₂ j` with slice-valued `f₁`, `f₂`.
pub fn split_basis<T: Scalar>(
    f: &SliceSeries<T>,
    frame: Frame<T>,
) -> (HoloSeries<T>, HoloSeries<T>) {
    let mut a = Vec::with_capacity(f.coeffs.len());
    let mut b = Vec::with_capacity(f.coeffs.len());
    for &c in &f.coeffs {
        let k = frame.components(c);
        a.push((k[0], k[1]));
        b.push((k[2], k[3]));
    }
    (
        HoloSeries::from_complex(frame, &a).with_radius(f.radius),
        HoloSeries::from_complex(frame, &b).with_radius(f.radius),
    )
}

/// Refined splitting `Q_i[F] = h₀ + h₁ i + h₂ j + h₃ ij`, each `h_ℓ` with real coefficients.
pub fn refined_split<T: Scalar>(f: &SliceSeries<T>, frame: Frame<T>) -> [HoloSeries<T>; 4] {
    let comps: Vec<[T; 4]> = f.coeffs.iter().map(|&c| frame.components(c)).collect();
    std::array::from_fn(|l| {
        let re: Vec<T> = comps.iter().map(|k| k[l]).collect();
        HoloSeries::from_real(frame, &re).with_radius(f.radius)
    })
}

/// `F = F₀ + F₁ i + F₂ j + F₃ ij` with every `F_ℓ` intrinsic.
pub fn fourfold_decompose<T: Scalar>(f: &SliceSeries<T>, frame: Frame<T>) -> [SliceSeries<T>; 4] {
    refined_split(f, frame).map(|h| extend_series(&h))
}

/// Reassembles `Σ F_ℓ e_ℓ`.
pub fn fourfold_assemble<T: Scalar>(
    parts: &[SliceSeries<T>; 4],
    frame: Frame<T>,
) -> SliceSeries<T> {
    parts
        .iter()
        .enumerate()
        .fold(SliceSeries::new(Vec::new()), |acc, (l, p)| {
            acc.add(&p.right_mul(frame.basis(l)))
        })
}

/// Intrinsic iff all coefficients are real, anti-intrinsic iff all are purely
/// imaginary. The zero series counts as intrinsic.
pub fn is_intrinsic<T: Scalar>(f: &SliceSeries<T>) -> Intrinsic {
    let tol = T::lit(COEFF_TOL) * f.scale();
    if f.coeffs.iter().all(|c| c.vector_norm() <= tol) {
        Intrinsic::Intrinsic
    } else if f.coeffs.iter().all(|c| c.w.abs() <= tol) {
        Intrinsic::AntiIntrinsic
    } else {
        Intrinsic::Neither
    }
}

/// `|F(q̄) − conj F(q)|`, zero for intrinsic `F`.
pub fn intrinsic_defect<T: Scalar>(f: &SliceSeries<T>, q: Quaternion<T>) -> Result<T> {
    Ok(f.eval(q.conj())?.dist(f.eval(q)?.conj()))
}

type PlaneFn<T> = Arc<dyn Fn(T, T) -> Result<Quaternion<T>> + Send + Sync>;

/// The pair `(α, β)` with `F(x + I y) = α(x, y) + I β(x, y)`.
#[derive(Clone)]
pub struct AlphaBeta<T: Scalar> {
    alpha: PlaneFn<T>,
    beta: PlaneFn<T>,
}

impl<T: Scalar> AlphaBeta<T> {
    pub fn new(
        alpha: impl Fn(T, T) -> Result<Quaternion<T>> + Send + Sync + 'static,
        beta: impl Fn(T, T) -> Result<Quaternion<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
        }
    }

    pub fn alpha(&self, x: T, y: T) -> Result<Quaternion<T>> {
        (self.alpha)(x, y)
    }

    pub fn beta(&self, x: T, y: T) -> Result<Quaternion<T>> {
        (self.beta)(x, y)
    }

    /// `α(x, y) + I β(x, y)`.
    pub fn eval(&self, q: Quaternion<T>) -> Result<Quaternion<T>> {
        match slice_coords(q) {
            Ok(p) => Ok(self.alpha(p.x, p.y)? + p.unit.q() * self.beta(p.x, p.y)?),
            Err(Error::RealInput) => self.alpha(q.w, T::zero()),
            Err(e) => Err(e),
        }
    }
}

impl<T: Scalar> std::fmt::Debug for AlphaBeta<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AlphaBeta { .. }")
    }
}

/// `α = ½[F(x+iy) + F(x−iy)]`, `β = −½ i [F(x+iy) − F(x−iy)]` with `i = e1`.
pub fn alpha_beta_of<T: Scalar>(f: &SliceSeries<T>) -> AlphaBeta<T> {
    let fa = Arc::new(f.clone());
    let fb = Arc::clone(&fa);
    let half = T::lit(0.5);
    let e1 = Quaternion::<T>::e1();
    AlphaBeta::new(
        move |x, y| {
            let p = fa.eval(Quaternion::new(x, y, T::zero(), T::zero()))?;
            let m = fa.eval(Quaternion::new(x, -y, T::zero(), T::zero()))?;
            Ok((p + m).scale(half))
        },
        move |x, y| {
            if y == T::zero() {
                return Ok(Quaternion::zero());
            }
            let p = fb.eval(Quaternion::new(x, y, T::zero(), T::zero()))?;
            let m = fb.eval(Quaternion::new(x, -y, T::zero(), T::zero()))?;
            Ok((e1 * (p - m)).scale(-half))
        },
    )
}

/// Default finite-difference step for [`cr_residual`].
pub const CR_STEP: f64 = 1e-5;

/// Central-difference residuals `(∂x α − ∂y β, ∂y α + ∂x β)`.
pub fn cr_residual<T: Scalar>(
    ab: &AlphaBeta<T>,
    x: T,
    y: T,
    h: T,
) -> Result<(Quaternion<T>, Quaternion<T>)> {
    assert!(h > T::zero(), "finite-difference step must be positive");
    let two_h = h + h;
    let dax = (ab.alpha(x + h, y)? - ab.alpha(x - h, y)?) / two_h;
    let day = (ab.alpha(x, y + h)? - ab.alpha(x, y - h)?) / two_h;
    let dbx = (ab.beta(x + h, y)? - ab.beta(x - h, y)?) / two_h;
    let dby = (ab.beta(x, y + h)? - ab.beta(x, y - h)?) / two_h;
    Ok((dax - dby, day + dbx))
}
