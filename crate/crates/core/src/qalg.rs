//! Quaternion arithmetic, imaginary units, orthonormal frames and slice
//! coordinates `q = x + I y`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A quaternion `w + x e1 + y e2 + z e3` with `e1 e2 = e3`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    #[inline]
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub fn from_real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn zero() -> Self {
        Self::from_real(T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::from_real(T::one())
    }

    pub fn e1() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn e2() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn e3() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Builds a quaternion from `[w, x, y, z]`.
    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Quaternionic conjugation `q ↦ q̄`.
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn re(self) -> T {
        self.w
    }

    /// Vector part `q⃗` as a pure quaternion.
    #[inline]
    pub fn vector(self) -> Self {
        Self::new(T::zero(), self.x, self.y, self.z)
    }

    #[inline]
    pub fn vector_norm(self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product in ℝ⁴.
    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> T {
        self.w
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs())
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn is_real(self) -> bool {
        self.x == T::zero() && self.y == T::zero() && self.z == T::zero()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `q^n` by repeated squaring.
    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == T::zero() {
            None
        } else {
            Some(self.conj().scale(T::one() / n))
        }
    }

    /// Distance `|self - other|`.
    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }
}

pub fn quat_mul<T: Scalar>(a: Quaternion<T>, b: Quaternion<T>) -> Quaternion<T> {
    a * b
}

pub fn quat_conj<T: Scalar>(q: Quaternion<T>) -> Quaternion<T> {
    q.conj()
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Quaternion<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> SubAssign for Quaternion<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl<T: Scalar> Mul<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> Div<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Scalar> std::iter::Sum for Quaternion<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Scalar> fmt::Debug for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?} + {:?}e1 + {:?}e2 + {:?}e3)",
            self.w, self.x, self.y, self.z
        )
    }
}

impl<T: Scalar> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.w, self.x, self.y, self.z)
    }
}

impl<T: Scalar> Serialize for Quaternion<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Quaternion<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<T> = Vec::deserialize(d)?;
        match v.len() {
            4 => Ok(Self::new(v[0], v[1], v[2], v[3])),
            3 => Ok(Self::new(T::zero(), v[0], v[1], v[2])),
            n => Err(D::Error::custom(format!(
                "quaternion must have 4 components (or 3 for a pure one), got {n}"
            ))),
        }
    }
}

/// A unit pure quaternion, an element of the sphere 𝕊².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ImaginaryUnit<T: Scalar>(Quaternion<T>);

impl<T: Scalar> ImaginaryUnit<T> {
    /// Normalizes the vector part of `q`. The real part must vanish.
    pub fn new(q: Quaternion<T>) -> Result<Self> {
        if q.w.abs() > T::lit(1e-12) * q.norm().max(T::one()) {
            return Err(Error::Parse(format!(
                "imaginary unit must have zero real part, got {q}"
            )));
        }
        let n = q.vector_norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::RealInput);
        }
        Ok(Self(q.vector() / n))
    }

    pub fn e1() -> Self {
        Self(Quaternion::e1())
    }

    pub fn e2() -> Self {
        Self(Quaternion::e2())
    }

    pub fn e3() -> Self {
        Self(Quaternion::e3())
    }

    #[inline]
    pub fn q(self) -> Quaternion<T> {
        self.0
    }
}

impl<T: Scalar> Neg for ImaginaryUnit<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ImaginaryUnit<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = Quaternion::<T>::deserialize(d)?;
        ImaginaryUnit::new(q).map_err(D::Error::custom)
    }
}

/// `I_q = q⃗ / ‖q⃗‖`.
pub fn imaginary_unit_of<T: Scalar>(q: Quaternion<T>) -> Result<ImaginaryUnit<T>> {
    let n = q.vector_norm();
    if n == T::zero() {
        return Err(Error::RealInput);
    }
    Ok(ImaginaryUnit(q.vector() / n))
}

/// Orthonormal basis `{1, i, j, k = ij}` of ℍ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame<T: Scalar> {
    pub i: ImaginaryUnit<T>,
    pub j: ImaginaryUnit<T>,
    pub k: ImaginaryUnit<T>,
}

impl<T: Scalar> Frame<T> {
    /// The frame `(e1, e2, e3)`.
    pub fn standard() -> Self {
        complete_frame(ImaginaryUnit::e1())
    }

    /// Builds a frame from two orthogonal units; `k = i j`.
    pub fn from_units(i: ImaginaryUnit<T>, j: ImaginaryUnit<T>) -> Result<Self> {
        if i.q().dot(j.q()).abs() > T::lit(1e-10) {
            return Err(Error::FrameMismatch(format!(
                "i = {} and j = {} are not orthogonal",
                i.q(),
                j.q()
            )));
        }
        let k = ImaginaryUnit::new(i.q() * j.q())?;
        Ok(Self { i, j, k })
    }

    /// Basis element `e_ℓ` of `{1, i, j, ij}`.
    pub fn basis(&self, l: usize) -> Quaternion<T> {
        match l {
            0 => Quaternion::one(),
            1 => self.i.q(),
            2 => self.j.q(),
            3 => self.k.q(),
            _ => panic!("frame basis index {l} out of range"),
        }
    }

    /// Real coordinates of `q` in `{1, i, j, ij}`.
    pub fn components(&self, q: Quaternion<T>) -> [T; 4] {
        [q.w, q.dot(self.i.q()), q.dot(self.j.q()), q.dot(self.k.q())]
    }

    pub fn assemble(&self, c: [T; 4]) -> Quaternion<T> {
        Quaternion::from_real(c[0]) + self.i.q() * c[1] + self.j.q() * c[2] + self.k.q() * c[3]
    }

    /// The point `x + i y` of the slice plane `C(i)`.
    pub fn slice_point(&self, x: T, y: T) -> Quaternion<T> {
        Quaternion::from_real(x) + self.i.q() * y
    }

    /// Whether `q` lies in `C(i)` up to `tol` relative to its size.
    pub fn in_slice(&self, q: Quaternion<T>, tol: T) -> bool {
        let c = self.components(q);
        let scale = q.norm().max(T::one());
        c[2].abs() <= tol * scale && c[3].abs() <= tol * scale
    }
}

impl<T: Scalar> Serialize for Frame<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.i, self.j, self.k].serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Frame<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let units: Vec<ImaginaryUnit<T>> = Vec::deserialize(d)?;
        if units.len() != 3 {
            return Err(D::Error::custom(
                "frame must list exactly three units i, j, k",
            ));
        }
        let f = Frame::from_units(units[0], units[1]).map_err(D::Error::custom)?;
        if f.k.q().dist(units[2].q()) > T::lit(1e-9) {
            return Err(D::Error::custom("frame k must equal i j"));
        }
        Ok(f)
    }
}

/// Completes `i` to a frame: `j` is the Gram–Schmidt projection of `e1`
/// away from `i`, or `e2` when `i` is (anti)parallel to `e1`.
pub fn complete_frame<T: Scalar>(i: ImaginaryUnit<T>) -> Frame<T> {
    let e1 = Quaternion::<T>::e1();
    let c = i.q().dot(e1);
    let j = if c.abs() <= T::one() - T::lit(1e-6) {
        let v = e1 - i.q() * c;
        let v = v - i.q() * i.q().dot(v);
        ImaginaryUnit(v / v.norm())
    } else {
        ImaginaryUnit::e2()
    };
    let kq = i.q() * j.q();
    Frame {
        i,
        j,
        k: ImaginaryUnit(kq / kq.norm()),
    }
}

/// `q = x + I y` with `y > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePoint<T: Scalar> {
    pub x: T,
    pub y: T,
    pub unit: ImaginaryUnit<T>,
}

impl<T: Scalar> SlicePoint<T> {
    pub fn to_quaternion(self) -> Quaternion<T> {
        Quaternion::from_real(self.x) + self.unit.q() * self.y
    }
}

pub fn slice_coords<T: Scalar>(q: Quaternion<T>) -> Result<SlicePoint<T>> {
    let unit = imaginary_unit_of(q)?;
    Ok(SlicePoint {
        x: q.w,
        y: q.vector_norm(),
        unit,
    })
}

/// Parses `"w,x,y,z"`, or `"x,y,z"` for a pure quaternion.
pub fn parse_quaternion<T: Scalar>(s: &str) -> Result<Quaternion<T>> {
    let v = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(T::lit)
                .ok_or_else(|| Error::Parse(format!("bad number {t:?} in {s:?}")))
        })
        .collect::<Result<Vec<T>>>()?;
    match v.len() {
        4 => Ok(Quaternion::new(v[0], v[1], v[2], v[3])),
        3 => Ok(Quaternion::new(T::zero(), v[0], v[1], v[2])),
        n => Err(Error::Parse(format!(
            "expected 3 or 4 components, got {n} in {s:?}"
        ))),
    }
}

/// Parses a frame spec `"i=e1"`, `"i=e2"`, `"i=e3"` or `"i=x,y,z"` and
/// completes it with [`complete_frame`].
pub fn parse_frame_spec<T: Scalar>(s: &str) -> Result<Frame<T>> {
    let body = s
        .trim()
        .strip_prefix("i=")
        .ok_or_else(|| Error::Parse(format!("frame spec must start with \"i=\": {s:?}")))?;
    let unit = match body.trim() {
        "e1" => ImaginaryUnit::e1(),
        "e2" => ImaginaryUnit::e2(),
        "e3" => ImaginaryUnit::e3(),
        v => {
            let q: Quaternion<T> = parse_quaternion(v)?;
            if q.w != T::zero() {
                return Err(Error::Parse(format!("frame unit must be pure: {s:?}")));
            }
            let n = q.norm();
            if n == T::zero() {
                return Err(Error::Parse(format!("frame unit is zero: {s:?}")));
            }
            ImaginaryUnit::new(q / n)?
        }
    };
    Ok(complete_frame(unit))
}
