//! Fixed order-6 complex matrices and vectors, plus the tolerance policy
//! shared by every predicate in the crate.
//!
//! Indices are 0-based in code. Anything rendered for people (CLI text,
//! JSON reports) uses 1-based row/column labels.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrix order.
pub const N: usize = 6;

/// Approximation policy. Every predicate takes one explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exactness predicates (unitarity, realness, orthogonality).
    pub eq_tol: f64,
    /// Optimizer acceptance.
    pub residual_tol: f64,
    /// Solution deduplication.
    pub cluster_tol: f64,
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            residual_tol: 1e-8,
            cluster_tol: 1e-6,
            rank_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, residual_tol: f64, cluster_tol: f64, rank_tol: f64) -> Result<Self> {
        let t = Self {
            eq_tol,
            residual_tol,
            cluster_tol,
            rank_tol,
        };
        t.validate()?;
        Ok(t)
    }

    /// Defaults with `eq_tol` replaced; `cluster_tol` is raised if needed to keep `eq_tol <= cluster_tol`.
    pub fn with_eq_tol(eq_tol: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(eq_tol, d.residual_tol, d.cluster_tol.max(eq_tol), d.rank_tol)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eq_tol, self.residual_tol, self.cluster_tol, self.rank_tol];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be finite and strictly positive: {self:?}"
            )));
        }
        if self.eq_tol > self.cluster_tol {
            return Err(Error::InvalidInput(format!(
                "eq_tol ({}) must not exceed cluster_tol ({})",
                self.eq_tol, self.cluster_tol
            )));
        }
        Ok(())
    }
}

/// A length-6 complex column vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec6<T: Real>(pub [Complex<T>; N]);

impl<T: Real> Vec6<T> {
    pub fn zeros() -> Self {
        Self([Complex::zero(); N])
    }

    pub fn from_fn(f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self(std::array::from_fn(f))
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(i: usize) -> Self {
        Self::from_fn(|k| if k == i { Complex::one() } else { Complex::zero() })
    }

    /// `(1, …, 1)/√6`.
    pub fn flat() -> Self {
        Self([Complex::new(T::inv_sqrt6(), T::zero()); N])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_fn(|i| self.0[i] * s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex<T>> {
        self.0.iter()
    }
}

impl<T: Real> Index<usize> for Vec6<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.0[i]
    }
}

/// `Σ_i conj(u_i)·v_i`, conjugate-linear in `u`.
pub fn inner<T: Real>(u: &Vec6<T>, v: &Vec6<T>) -> Complex<T> {
    u.0.iter()
        .zip(v.0.iter())
        .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

/// A dense 6×6 complex matrix with an optional label.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat6<T: Real> {
    entries: [[Complex<T>; N]; N],
    pub label: Option<String>,
}

impl<T: Real> Mat6<T> {
    /// Validating constructor; rejects NaN/Inf entries.
    pub fn try_new(entries: [[Complex<T>; N]; N], label: Option<String>) -> Result<Self> {
        for (i, row) in entries.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "entry ({}, {}) is not finite",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { entries, label })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let entries = std::array::from_fn(|i| std::array::from_fn(|j| f(i, j)));
        debug_assert!(entries
            .iter()
            .flatten()
            .all(|z: &Complex<T>| z.re.is_finite() && z.im.is_finite()));
        Self {
            entries,
            label: None,
        }
    }

    pub fn zeros() -> Self {
        Self::from_fn(|_, _| Complex::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    /// The rank-one matrix with every entry `1/√6`.
    pub fn flat() -> Self {
        Self::from_fn(|_, _| Complex::new(T::inv_sqrt6(), T::zero()))
    }

    /// Entries given on the unimodular scale, divided by `√6`.
    pub fn from_unimodular(rows: [[Complex<T>; N]; N]) -> Self {
        let s = T::inv_sqrt6();
        Self::from_fn(|i, j| rows[i][j] * s)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn entries(&self) -> &[[Complex<T>; N]; N] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec6<T> {
        Vec6(self.entries[i])
    }

    pub fn col(&self, j: usize) -> Vec6<T> {
        Vec6::from_fn(|i| self.entries[i][j])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i])
    }

    pub fn map(&self, mut f: impl FnMut(Complex<T>) -> Complex<T>) -> Self {
        Self {
            entries: std::array::from_fn(|i| std::array::from_fn(|j| f(self.entries[i][j]))),
            label: self.label.clone(),
        }
    }

    pub fn mul_vec(&self, v: &Vec6<T>) -> Vec6<T> {
        Vec6::from_fn(|i| {
            (0..N).fold(Complex::zero(), |acc, k| acc + self.entries[i][k] * v.0[k])
        })
    }

    /// Entry-wise max norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Entry-wise max norm of `M·M† − I`.
    pub fn unitarity_residual(&self) -> T {
        let g = self * &self.adjoint();
        g.max_abs_diff(&Self::identity())
    }

    /// Largest deviation of an entry modulus from `1/√6`.
    pub fn modulus_residual(&self) -> T {
        let target = T::inv_sqrt6();
        self.entries
            .iter()
            .flatten()
            .fold(T::zero(), |m, z| m.max((z.norm() - target).abs()))
    }

    /// Combined Hadamard residual: max of the modulus and unitarity residuals.
    pub fn hadamard_residual(&self) -> T {
        self.modulus_residual().max(self.unitarity_residual())
    }

    pub fn is_symmetric(&self, tol: &Tolerances) -> bool {
        self.max_abs_diff(&self.transpose()) < T::of(tol.eq_tol)
    }

    pub fn is_self_adjoint(&self, tol: &Tolerances) -> bool {
        self.max_abs_diff(&self.adjoint()) < T::of(tol.eq_tol)
    }

    /// Precision conversion (e.g. to `f32`); the label is kept.
    pub fn cast<U: Real>(&self) -> Mat6<U> {
        Mat6 {
            entries: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let z = self.entries[i][j];
                    Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64()))
                })
            }),
            label: self.label.clone(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for Mat6<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat6<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[i][j]
    }
}

impl<T: Real> Mul for &Mat6<T> {
    type Output = Mat6<T>;
    fn mul(self, rhs: &Mat6<T>) -> Mat6<T> {
        Mat6::from_fn(|i, j| {
            (0..N).fold(Complex::zero(), |acc, k| acc + self.entries[i][k] * rhs.entries[k][j])
        })
    }
}

/// True iff the entry-wise max norm of `M·M† − I` is below `eq_tol`.
pub fn is_unitary<T: Real>(m: &Mat6<T>, tol: &Tolerances) -> bool {
    m.unitarity_residual() < T::of(tol.eq_tol)
}

/// Unitary with every entry of modulus `1/√6` (within `eq_tol`).
pub fn is_hadamard<T: Real>(m: &Mat6<T>, tol: &Tolerances) -> bool {
    m.modulus_residual() < T::of(tol.eq_tol) && is_unitary(m, tol)
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// The entry treated as real: `|Im(z)·√6| < eq_tol`.
#[inline]
pub fn is_real_entry<T: Real>(z: Complex<T>, tol: &Tolerances) -> bool {
    (z.im * T::sqrt6()).abs() < T::of(tol.eq_tol)
}

/// The entry treated as zero: `|z·√6| < eq_tol`.
#[inline]
pub fn is_zero_entry<T: Real>(z: Complex<T>, tol: &Tolerances) -> bool {
    (z * T::sqrt6()).norm() < T::of(tol.eq_tol)
}
