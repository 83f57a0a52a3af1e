//! Holomorphic functions on a slice plane `C(i)` as truncated power series,
//! with the conjugation transform `f ↦ Z∘f∘Z` and the C / anti-C splits.
//!
//! A series `Σ zⁿ cₙ` is *slice-valued* when every `cₙ` lies in `span{1, i}`.
//! Quaternion-valued series (`Hol + Hol·j`) are accepted as containers but the
//! planar decompositions reject them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalg::{Frame, Quaternion};
use crate::scalar::Scalar;

/// Relative tolerance used when deciding whether coefficients are real,
/// purely imaginary or confined to the slice plane.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HoloSeries<T: Scalar> {
    pub frame: Frame<T>,
    pub radius: T,
    pub coeffs: Vec<Quaternion<T>>,
}

/// Outcome of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `f(z̄) = conj f(z)`: real coefficients.
    C,
    /// `f(z̄) = -conj f(z)`: purely imaginary coefficients.
    AntiC,
    Neither,
}

impl<T: Scalar> HoloSeries<T> {
    pub fn new(frame: Frame<T>, coeffs: Vec<Quaternion<T>>) -> Self {
        Self {
            frame,
            radius: T::one(),
            coeffs,
        }
    }

    pub fn with_radius(mut self, radius: T) -> Self {
        assert!(radius > T::zero(), "radius must be positive");
        self.radius = radius;
        self
    }

    /// Series with real coefficients `Σ aₙ zⁿ`.
    pub fn from_real(frame: Frame<T>, coeffs: &[T]) -> Self {
        Self::new(
            frame,
            coeffs.iter().map(|&a| Quaternion::from_real(a)).collect(),
        )
    }

    /// Series `Σ (aₙ + bₙ i) zⁿ` from pairs `(aₙ, bₙ)`.
    pub fn from_complex(frame: Frame<T>, coeffs: &[(T, T)]) -> Self {
        Self::new(
            frame,
            coeffs
                .iter()
                .map(|&(a, b)| frame.assemble([a, b, T::zero(), T::zero()]))
                .collect(),
        )
    }

    pub fn zero(frame: Frame<T>, len: usize) -> Self {
        Self::new(frame, vec![Quaternion::zero(); len])
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Quaternion::zero())
            .unwrap_or(0)
    }

    /// Largest coefficient norm; the reference scale for tolerances.
    pub fn scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    fn tol(&self) -> T {
        T::lit(COEFF_TOL) * self.scale()
    }

    pub fn is_slice_valued(&self) -> bool {
        self.slice_violation() <= self.tol()
    }

    fn slice_violation(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &c| {
            let k = self.frame.components(c);
            m.max(k[2].abs()).max(k[3].abs())
        })
    }

    pub fn require_slice_valued(&self) -> Result<()> {
        let v = self.slice_violation();
        if v > self.tol() {
            return Err(Error::NotSliceValued {
                offending: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// `(Re cₙ, Im cₙ)` with respect to the frame's `i`.
    pub fn complex_coeffs(&self) -> Vec<(T, T)> {
        self.coeffs
            .iter()
            .map(|&c| {
                let k = self.frame.components(c);
                (k[0], k[1])
            })
            .collect()
    }

    pub fn eval(&self, z: Quaternion<T>) -> Result<Quaternion<T>> {
        holo_eval(self, z)
    }

    /// Evaluates at `x + y i` with `i` the frame's unit.
    pub fn eval_xy(&self, x: T, y: T) -> Result<Quaternion<T>> {
        holo_eval(self, self.frame.slice_point(x, y))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    + other.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        Self {
            frame: self.frame,
            radius: self.radius.min(other.radius),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map_coeffs(|c| -c))
    }

    pub fn map_coeffs(&self, f: impl Fn(Quaternion<T>) -> Quaternion<T>) -> Self {
        Self {
            frame: self.frame,
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// `a · f`; for `a ∈ C(i)` this is again holomorphic on the slice.
    pub fn left_mul(&self, a: Quaternion<T>) -> Self {
        self.map_coeffs(|c| a * c)
    }

    /// `f · a`.
    pub fn right_mul(&self, a: Quaternion<T>) -> Self {
        self.map_coeffs(|c| c * a)
    }

    /// Largest coefficient distance between two series, padding with zeros.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).fold(T::zero(), |m, k| {
            let a = self.coeffs.get(k).copied().unwrap_or_default();
            let b = other.coeffs.get(k).copied().unwrap_or_default();
            m.max(a.dist(b))
        })
    }
}

/// `Σ zⁿ cₙ` for `z ∈ C(i)`, `|z| < radius`.
///
/// Powers stand to the left of the coefficients so that `Q_i` of a slice
/// regular `Σ qⁿ aₙ` evaluates to the restriction itself. For slice-valued
/// coefficients the order is immaterial.
pub fn holo_eval<T: Scalar>(f: &HoloSeries<T>, z: Quaternion<T>) -> Result<Quaternion<T>> {
    let m = z.norm();
    if m >= f.radius {
        return Err(Error::OutOfDomain {
            modulus: m.to_f64().unwrap_or(f64::NAN),
            radius: f.radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !f.frame.in_slice(z, T::lit(1e-12)) {
        return Err(Error::FrameMismatch(format!(
            "evaluation point {z} is not in the slice plane C({})",
            f.frame.i.q()
        )));
    }
    Ok(horner_left(&f.coeffs, z))
}

/// `Σ zⁿ cₙ` with `z` multiplied from the left.
pub(crate) fn horner_left<T: Scalar>(coeffs: &[Quaternion<T>], z: Quaternion<T>) -> Quaternion<T> {
    coeffs
        .iter()
        .rev()
        .fold(Quaternion::zero(), |acc, &c| z * acc + c)
}

/// `z ↦ conj f(z̄)`, coefficientwise conjugation.
pub fn conj_reflect<T: Scalar>(f: &HoloSeries<T>) -> Result<HoloSeries<T>> {
    f.require_slice_valued()?;
    Ok(f.map_coeffs(|c| c.conj()))
}

/// `f = f₁ + i f₂` with `f₁`, `f₂` real-coefficient series.
pub fn c_pair_decompose<T: Scalar>(f: &HoloSeries<T>) -> Result<(HoloSeries<T>, HoloSeries<T>)> {
    f.require_slice_valued()?;
    let parts = f.complex_coeffs();
    let re: Vec<T> = parts.iter().map(|p| p.0).collect();
    let im: Vec<T> = parts.iter().map(|p| p.1).collect();
    Ok((
        HoloSeries::from_real(f.frame, &re).with_radius(f.radius),
        HoloSeries::from_real(f.frame, &im).with_radius(f.radius),
    ))
}

/// `f = f_c + f_a` with `f_c` satisfying the C-property and `f_a` the anti-C-property.
pub fn c_anti_decompose<T: Scalar>(f: &HoloSeries<T>) -> Result<(HoloSeries<T>, HoloSeries<T>)> {
    let (f1, f2) = c_pair_decompose(f)?;
    Ok((f1, f2.left_mul(f.frame.i.q())))
}

pub fn classify<T: Scalar>(f: &HoloSeries<T>) -> Result<Classification> {
    f.require_slice_valued()?;
    let tol = f.tol();
    let parts = f.complex_coeffs();
    if parts.iter().all(|p| p.1.abs() <= tol) {
        Ok(Classification::C)
    } else if parts.iter().all(|p| p.0.abs() <= tol) {
        Ok(Classification::AntiC)
    } else {
        Ok(Classification::Neither)
    }
}
