//! Small dense real symmetric matrix routines for Gram matrices.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Condition numbers above this are refused.
pub const CONDITION_LIMIT: f64 = 1e12;

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..inner).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: Scalar>(a: &Matrix<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
        })
        .collect()
}

pub fn max_abs_diff<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    let n = a.len();
    let mut m = a.clone();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + m[i][j] * m[i][j]);
        let diag = (0..n).fold(T::zero(), |s, i| s + m[i][i] * m[i][i]);
        if off <= T::eps() * T::eps() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (two * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k][p], m[k][q]);
                    m[k][p] = c * akp - s * akq;
                    m[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * apk - s * aqk;
                    m[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Spectral condition number `max |λ| / min |λ|` of a symmetric matrix.
pub fn condition_number<T: Scalar>(a: &Matrix<T>) -> T {
    let ev = symmetric_eigenvalues(a);
    let (lo, hi) = ev.iter().fold((T::infinity(), T::zero()), |(lo, hi), &l| {
        (lo.min(l.abs()), hi.max(l.abs()))
    });
    if lo == T::zero() {
        T::infinity()
    } else {
        hi / lo
    }
}

/// Inverse of a symmetric positive definite matrix via Cholesky, after a
/// condition check. The result is symmetrized.
pub fn spd_inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.len();
    let cond = condition_number(a);
    let cond64 = cond.to_f64().unwrap_or(f64::INFINITY);
    if !(cond64 <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned {
            condition: cond64,
            limit: CONDITION_LIMIT,
        });
    }
    let mut l = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d = d - l[j][k] * l[j][k];
        }
        if !(d > T::zero()) {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
                limit: CONDITION_LIMIT,
            });
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
    let mut li = vec![vec![T::zero(); n]; n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { T::one() } else { T::zero() };
            for k in c..i {
                s = s - l[i][k] * li[k][c];
            }
            li[i][c] = s / l[i][i];
        }
    }
    let mut inv = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s = (i..n).fold(T::zero(), |acc, k| acc + li[k][i] * li[k][j]);
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    Ok(inv)
}
