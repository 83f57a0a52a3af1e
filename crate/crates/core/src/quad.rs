//! Quadrature on a slice disk (area measure) and on the unit 4-ball (volume
//! measure).
//!
//! Every rule is closed under conjugation with equal weights, node for node,
//! so that integrals of intrinsic integrands come out real at the level of
//! the quadrature sum rather than only up to quadrature error. Sums are
//! reduced pairwise in node order; parallel evaluation does not change the
//! result.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qalg::{Frame, Quaternion};
use crate::scalar::Scalar;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Nodes are computed for the positive half and mirrored, so the rule is
/// exactly symmetric.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n.div_ceil(2);
    let nt = T::from_usize_lossy(n);
    let pi = T::PI();
    for k in 0..half {
        // k-th largest root; Tricomi initial guess.
        let kt = T::from_usize_lossy(k + 1);
        let mut x = (pi * (kt - T::lit(0.25)) / (nt + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::eps() * T::lit(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
        nodes[k] = -x;
        weights[k] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, T::zero());
        nodes[n / 2] = T::zero();
        weights[n / 2] = T::lit(2.0) / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kt = T::from_usize_lossy(k);
        let p2 = ((kt + kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nt = T::from_usize_lossy(n);
    let d = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Gauss–Legendre on `[0, 1]`.
fn gauss_legendre_unit<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = T::lit(0.5);
    (
        x.into_iter().map(|t| (t + T::one()) * half).collect(),
        w.into_iter().map(|t| t * half).collect(),
    )
}

/// Deterministic pairwise summation in index order.
pub fn pairwise_sum<T: Scalar>(values: &[Quaternion<T>]) -> Quaternion<T> {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(Quaternion::zero(), |a, &b| a + b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn weighted_sum<T, F>(nodes: &[Quaternion<T>], weights: &[T], f: F) -> Result<Quaternion<T>>
where
    T: Scalar,
    F: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
{
    let terms: Vec<Result<Quaternion<T>>> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&q, &w)| f(q).map(|v| v.scale(w)))
        .collect();
    let terms: Vec<Quaternion<T>> = terms.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// Planar domain covered by a [`PlanarRule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanarDomain<T> {
    UnitDisk,
    /// `[-half_width, half_width] × [-half_height, half_height]`.
    Rectangle {
        half_width: T,
        half_height: T,
    },
}

/// Nodes `x + y i` in the slice plane of `frame`, with positive weights.
#[derive(Clone, Debug)]
pub struct PlanarRule<T: Scalar> {
    pub frame: Frame<T>,
    pub domain: PlanarDomain<T>,
    /// Planar coordinates `(x, y)` of every node.
    pub coords: Vec<(T, T)>,
    pub nodes: Vec<Quaternion<T>>,
    pub weights: Vec<T>,
    /// Monomials `ζ̄ᵃ ζᵇ` with `a + b ≤ exact_degree` integrate exactly.
    pub exact_degree: usize,
}

impl<T: Scalar> PlanarRule<T> {
    fn from_coords(
        frame: Frame<T>,
        domain: PlanarDomain<T>,
        coords: Vec<(T, T)>,
        weights: Vec<T>,
        exact_degree: usize,
    ) -> Self {
        let nodes = coords
            .iter()
            .map(|&(x, y)| frame.slice_point(x, y))
            .collect();
        Self {
            frame,
            domain,
            coords,
            nodes,
            weights,
            exact_degree,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> T {
        pairwise_sum(
            &self
                .weights
                .iter()
                .map(|&w| Quaternion::from_real(w))
                .collect::<Vec<_>>(),
        )
        .w
    }

    pub fn require_degree(&self, degree: usize) -> Result<()> {
        if degree > self.exact_degree {
            return Err(Error::RuleTooCoarse {
                required: degree,
                available: self.exact_degree,
            });
        }
        Ok(())
    }

    /// The same rule on another slice plane.
    pub fn on_frame(&self, frame: Frame<T>) -> Self {
        Self::from_coords(
            frame,
            self.domain,
            self.coords.clone(),
            self.weights.clone(),
            self.exact_degree,
        )
    }

    /// CSV with one row per node: `x,y,i1,i2,i3,weight`.
    pub fn to_csv(&self) -> String {
        let i = self.frame.i.q();
        let mut out = String::from("x,y,i1,i2,i3,weight\n");
        for (&(x, y), &w) in self.coords.iter().zip(&self.weights) {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                x, y, i.x, i.y, i.z, w
            ));
        }
        out
    }
}

/// Disk rule: Gauss–Legendre in `r²` times a conjugation-symmetric uniform
/// angular grid.
pub fn build_disk_rule<T: Scalar>(
    n_radial: usize,
    n_angular: usize,
    frame: Frame<T>,
) -> Result<PlanarRule<T>> {
    if n_radial < 1 {
        return Err(Error::BadOrder(format!(
            "n_radial = {n_radial} must be at least 1"
        )));
    }
    if n_angular < 2 || n_angular % 2 == 1 {
        return Err(Error::BadOrder(format!(
            "n_angular = {n_angular} must be even and at least 2"
        )));
    }
    let (s, ws) = gauss_legendre_unit::<T>(n_radial);
    let dtheta = T::TAU() / T::from_usize_lossy(n_angular);
    let half = T::lit(0.5);
    let mut coords = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for (&sk, &wk) in s.iter().zip(&ws) {
        let r = sk.sqrt();
        let w = half * wk * dtheta;
        for a in 0..n_angular / 2 {
            let theta = (T::from_usize_lossy(a) + half) * dtheta;
            let (x, y) = (r * theta.cos(), r * theta.sin());
            coords.push((x, y));
            weights.push(w);
            coords.push((x, -y));
            weights.push(w);
        }
    }
    let exact = (4 * n_radial - 2).min(n_angular - 1);
    Ok(PlanarRule::from_coords(
        frame,
        PlanarDomain::UnitDisk,
        coords,
        weights,
        exact,
    ))
}

/// Tensor Gauss–Legendre rule on an axis-symmetric rectangle.
pub fn build_rectangle_rule<T: Scalar>(
    n_x: usize,
    n_y: usize,
    half_width: T,
    half_height: T,
    frame: Frame<T>,
) -> Result<PlanarRule<T>> {
    if n_x < 1 || n_y < 1 {
        return Err(Error::BadOrder(format!(
            "rectangle orders ({n_x}, {n_y}) must be positive"
        )));
    }
    if !(half_width > T::zero() && half_height > T::zero()) {
        return Err(Error::BadOrder(
            "rectangle half-sides must be positive".into(),
        ));
    }
    let (xs, wx) = gauss_legendre::<T>(n_x);
    let (ys, wy) = gauss_legendre::<T>(n_y);
    let mut coords = Vec::with_capacity(n_x * n_y);
    let mut weights = Vec::with_capacity(n_x * n_y);
    for (&x, &a) in xs.iter().zip(&wx) {
        for (&y, &b) in ys.iter().zip(&wy) {
            coords.push((x * half_width, y * half_height));
            weights.push(a * b * half_width * half_height);
        }
    }
    let exact = 2 * n_x.min(n_y) - 1;
    Ok(PlanarRule::from_coords(
        frame,
        PlanarDomain::Rectangle {
            half_width,
            half_height,
        },
        coords,
        weights,
        exact,
    ))
}

/// `Σ w_k f(ζ_k)` over the nodes of a planar rule.
pub fn integrate_slice<T, F>(f: F, rule: &PlanarRule<T>) -> Result<Quaternion<T>>
where
    T: Scalar,
    F: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
{
    weighted_sum(&rule.nodes, &rule.weights, f)
}

/// `∫ conj f(ζ) g(ζ) dσ`.
pub fn slice_inner<T, F, G>(f: F, g: G, rule: &PlanarRule<T>) -> Result<Quaternion<T>>
where
    T: Scalar,
    F: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
    G: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
{
    integrate_slice(|z| Ok(f(z)?.conj() * g(z)?), rule)
}

/// Product rule on the unit ball `q = x + I y`: Gauss–Legendre in `ρ²`, a
/// uniform angle in the `(x, y)` plane and a Gauss–Legendre × uniform grid
/// on the sphere of imaginary units.
#[derive(Clone, Debug)]
pub struct BallRule<T: Scalar> {
    pub nodes: Vec<Quaternion<T>>,
    pub weights: Vec<T>,
    /// Polynomials in the four real coordinates of total degree
    /// `≤ exact_degree` integrate exactly.
    pub exact_degree: usize,
}

impl<T: Scalar> BallRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> T {
        pairwise_sum(
            &self
                .weights
                .iter()
                .map(|&w| Quaternion::from_real(w))
                .collect::<Vec<_>>(),
        )
        .w
    }

    pub fn require_degree(&self, degree: usize) -> Result<()> {
        if degree > self.exact_degree {
            return Err(Error::RuleTooCoarse {
                required: degree,
                available: self.exact_degree,
            });
        }
        Ok(())
    }

    /// CSV with one row per node: `x,y,i1,i2,i3,weight` where `q = x + I y`, `y ≥ 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,i1,i2,i3,weight\n");
        for (&q, &w) in self.nodes.iter().zip(&self.weights) {
            let y = q.vector_norm();
            let u = if y > T::zero() {
                q.vector() / y
            } else {
                Quaternion::e1()
            };
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                q.w, y, u.x, u.y, u.z, w
            ));
        }
        out
    }
}

/// Disk rule orders `(n_radial, n_angular)` exact to degree `degree`.
pub fn disk_orders_for_degree(degree: usize) -> (usize, usize) {
    (
        (degree + 2).div_ceil(4).max(1),
        (degree + 1).next_multiple_of(2).max(2),
    )
}

/// Orders giving a ball rule exact to total degree `degree`.
pub fn ball_orders_for_degree(degree: usize) -> (usize, usize, usize) {
    let n_radial = (degree + 4).div_ceil(4).max(1);
    let n_angular = (degree + 3 + 1).next_multiple_of(2).max(4);
    let n_sphere = (degree + 1).next_multiple_of(2).max(6);
    (n_radial, n_angular, n_sphere)
}

pub fn build_ball_rule<T: Scalar>(
    n_radial: usize,
    n_angular: usize,
    n_sphere: usize,
) -> Result<BallRule<T>> {
    if n_radial < 1 {
        return Err(Error::BadOrder(format!(
            "n_radial = {n_radial} must be at least 1"
        )));
    }
    if n_angular < 4 || n_angular % 2 == 1 {
        return Err(Error::BadOrder(format!(
            "n_angular = {n_angular} must be even and at least 4"
        )));
    }
    if n_sphere < 6 || n_sphere % 2 == 1 {
        return Err(Error::BadOrder(format!(
            "n_sphere = {n_sphere} must be even and at least 6"
        )));
    }
    let half = T::lit(0.5);

    // Sphere: Gauss–Legendre in cos θ, uniform φ; emitted as ±I pairs.
    let (ct, wt) = gauss_legendre::<T>(n_sphere / 2);
    let dphi = T::TAU() / T::from_usize_lossy(n_sphere);
    let mut sphere = Vec::with_capacity(ct.len() * n_sphere);
    for (&c, &w) in ct.iter().zip(&wt) {
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        for b in 0..n_sphere / 2 {
            let phi = (T::from_usize_lossy(b) + half) * dphi;
            let u = Quaternion::new(T::zero(), s * phi.cos(), s * phi.sin(), c);
            sphere.push((u, w * dphi));
            sphere.push((-u, w * dphi));
        }
    }

    let (s, ws) = gauss_legendre_unit::<T>(n_radial);
    let dtheta = T::TAU() / T::from_usize_lossy(n_angular);
    let mut nodes = Vec::with_capacity(n_radial * n_angular * sphere.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (&sk, &wk) in s.iter().zip(&ws) {
        let rho = sk.sqrt();
        // ρ³ dρ = ½ s ds, and the full (x, y) circle counts every point twice.
        let wr = half * half * wk * sk;
        for a in 0..n_angular {
            let theta = (T::from_usize_lossy(a) + half) * dtheta;
            let (x, y) = (rho * theta.cos(), rho * theta.sin());
            let wa = wr * y * y / sk * dtheta;
            for &(u, wu) in &sphere {
                nodes.push(Quaternion::from_real(x) + u * y);
                weights.push(wa * wu);
            }
        }
    }
    let exact = (4 * n_radial - 4).min(n_angular - 3).min(n_sphere - 1);
    Ok(BallRule {
        nodes,
        weights,
        exact_degree: exact,
    })
}

/// `Σ w_k f(q_k)` over the nodes of a ball rule.
pub fn integrate_ball<T, F>(f: F, rule: &BallRule<T>) -> Result<Quaternion<T>>
where
    T: Scalar,
    F: Fn(Quaternion<T>) -> Result<Quaternion<T>> + Sync,
{
    weighted_sum(&rule.nodes, &rule.weights, f)
}
