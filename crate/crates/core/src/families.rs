//! Constructors for the named order-6 Hadamard families.
//!
//! All matrices are returned in unitary normalization (entries of modulus
//! `1/√6`) and dephased: first row and column equal to `1/√6`.

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, is_hadamard, Mat6, Tolerances};
use crate::scalar::Real;

/// Human-readable form of the M6 domain.
pub const M6_DOMAIN: &str = "(π/2, π] ∪ (3π/2, 2π)";

/// Start of the admissible B6(1) arc: `θ ∈ [−π, −θ₀] ∪ [θ₀, π]` with
/// `θ₀ = arccos((√3 − 1)/2)`, the arc listed for this family in the
/// catalogue of complex Hadamard matrices (Bruzda, Tadej, Życzkowski).
pub fn b6_arc_start() -> f64 {
    ((3f64.sqrt() - 1.0) / 2.0).acos()
}

pub const B6_DOMAIN: &str = "[−π, −arccos((√3−1)/2)] ∪ [arccos((√3−1)/2), π] (mod 2π)";

/// Whether `t` lies in the M6 parameter domain.
///
/// `t = 2π` (`a = 1`) is excluded: the family degenerates there.
pub fn m6_admissible(t: f64) -> bool {
    use std::f64::consts::PI;
    (t > PI / 2.0 && t <= PI) || (t > 1.5 * PI && t < 2.0 * PI)
}

/// `n` admissible parameters: `⌈n/2⌉` evenly spaced on `(π/2, π]` (right end
/// included) and `⌊n/2⌋` on the open arc `(3π/2, 2π)`.
pub fn m6_grid(n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    let first = n.div_ceil(2);
    let second = n / 2;
    let arc1 = (1..=first).map(move |k| PI / 2.0 + (PI / 2.0) * k as f64 / first as f64);
    let arc2 = (1..=second).map(move |k| 1.5 * PI + (PI / 2.0) * k as f64 / (second + 1) as f64);
    arc1.chain(arc2).collect()
}

/// Sign choice among the unimodular root pairs of the M6 entry system.
///
/// `bc` fixes `(b, c)` and `(f, g)` together (the orthogonality of rows 3
/// and 5 forces them to agree); `de` fixes `(d, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct M6Branch {
    pub bc: bool,
    pub de: bool,
}

impl M6Branch {
    /// The branch continued from `t = π`: both signs positive.
    pub const PRINCIPAL: Self = Self { bc: true, de: true };

    pub fn all() -> [Self; 4] {
        [
            Self { bc: true, de: true },
            Self { bc: true, de: false },
            Self { bc: false, de: true },
            Self { bc: false, de: false },
        ]
    }

    pub fn id(&self) -> String {
        let s = |b: bool| if b { '+' } else { '-' };
        format!("{}{}", s(self.bc), s(self.de))
    }
}

/// The unimodular entries `a, b, …, g` of an M6 member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct M6Entries<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
    pub e: Complex<T>,
    pub f: Complex<T>,
    pub g: Complex<T>,
    /// `None` when the entries came from the numerical solver.
    pub branch: Option<M6Branch>,
}

impl<T: Real> M6Entries<T> {
    /// The symmetric layout
    ///
    /// ```text
    /// 1   1   1   1   1   1
    /// 1  -1   a   a  -a  -a
    /// 1   a   b   c   d   e
    /// 1   a   c   b   e   d
    /// 1  -a   d   e   f   g
    /// 1  -a   e   d   g   f
    /// ```
    ///
    /// scaled by `1/√6`.
    pub fn assemble(&self) -> Mat6<T> {
        let o = Complex::<T>::one();
        let Self {
            a, b, c, d, e, f, g, ..
        } = *self;
        Mat6::from_unimodular([
            [o, o, o, o, o, o],
            [o, -o, a, a, -a, -a],
            [o, a, b, c, d, e],
            [o, a, c, b, e, d],
            [o, -a, d, e, f, g],
            [o, -a, e, d, g, f],
        ])
    }

    pub fn as_array(&self) -> [Complex<T>; 6] {
        [self.b, self.c, self.d, self.e, self.f, self.g]
    }
}

/// Unimodular `(u, v)` with `u + v = s`: `u, v = (s/2)(1 ± iκ)`, `κ = √(4/|s|² − 1)`.
fn unimodular_pair<T: Real>(s: Complex<T>, positive: bool) -> Option<(Complex<T>, Complex<T>)> {
    let m2 = s.norm_sqr();
    let four = T::of(4.0);
    if m2 == T::zero() || m2 > four {
        return None;
    }
    let kappa = (four / m2 - T::one()).max(T::zero()).sqrt();
    let kappa = if positive { kappa } else { -kappa };
    let half = s * T::of(0.5);
    let i = Complex::<T>::i();
    let one = Complex::<T>::one();
    Some((half * (one + i * kappa), half * (one - i * kappa)))
}

/// Closed-form entries on a given branch.
///
/// The first two rows fix the pair sums `b + c`, `d + e`, `f + g`; each pair
/// is then determined up to the sign choice in `branch`.
pub fn m6_entries_closed_form<T: Real>(a: Complex<T>, branch: M6Branch) -> Option<M6Entries<T>> {
    let one = Complex::<T>::one();
    let two = T::of(2.0);
    let a2 = a * a;
    let s_bc = (a2 - a * two - one) / two;
    let s_de = -(one + a2) / two;
    let s_fg = (a2 + a * two - one) / two;
    let (b, c) = unimodular_pair(s_bc, branch.bc)?;
    let (d, e) = unimodular_pair(s_de, branch.de)?;
    let (f, g) = unimodular_pair(s_fg, branch.bc)?;
    Some(M6Entries {
        a,
        b,
        c,
        d,
        e,
        f,
        g,
        branch: Some(branch),
    })
}

fn m6_parameter_of<T: Real>(a: Complex<T>, tol: &Tolerances) -> Result<f64> {
    let a64 = Complex::new(a.re.as_f64(), a.im.as_f64());
    if (a64.norm() - 1.0).abs() >= tol.eq_tol {
        return Err(Error::InvalidInput(format!("|a| = {} is not 1", a64.norm())));
    }
    // Map arg(a) into (0, 2π]; a = 1 lands on 2π, outside the domain.
    let mut t = a64.arg();
    if t <= 0.0 {
        t += 2.0 * std::f64::consts::PI;
    }
    if !m6_admissible(t) {
        return Err(Error::Domain {
            value: t,
            domain: M6_DOMAIN,
        });
    }
    Ok(t)
}

/// Entries `b..g` making the M6 layout a Hadamard matrix.
///
/// Uses the closed form on [`M6Branch::PRINCIPAL`]; if the reassembled
/// matrix fails [`is_hadamard`], falls back to damped Gauss–Newton.
pub fn solve_m6_entries<T: Real>(a: Complex<T>, tol: &Tolerances) -> Result<M6Entries<T>> {
    m6_parameter_of(a, tol)?;
    if let Some(ent) = m6_entries_closed_form(a, M6Branch::PRINCIPAL) {
        if is_hadamard(&ent.assemble(), tol) {
            return Ok(ent);
        }
    }
    let a64 = Complex::new(a.re.as_f64(), a.im.as_f64());
    let ent = newton::solve(a64, tol, 0)?;
    let cast = |z: Complex<f64>| Complex::new(T::of(z.re), T::of(z.im));
    let out = M6Entries {
        a,
        b: cast(ent.b),
        c: cast(ent.c),
        d: cast(ent.d),
        e: cast(ent.e),
        f: cast(ent.f),
        g: cast(ent.g),
        branch: None,
    };
    if is_hadamard(&out.assemble(), tol) {
        Ok(out)
    } else {
        Err(Error::Solve(format!(
            "no unimodular solution within tolerance at a = {a64}"
        )))
    }
}

/// The symmetric one-parameter family `M6(a)`, `a = e^{it}`.
pub fn m6<T: Real>(t: T, tol: &Tolerances) -> Result<Mat6<T>> {
    let t64 = t.as_f64();
    if !m6_admissible(t64) {
        return Err(Error::Domain {
            value: t64,
            domain: M6_DOMAIN,
        });
    }
    let ent = solve_m6_entries(cis(t), tol)?;
    let branch = ent.branch.map_or_else(|| "newton".to_string(), |b| b.id());
    Ok(ent
        .assemble()
        .with_label(format!("M6(t={t64}) branch {branch}")))
}

/// Damped Gauss–Newton on the M6 orthogonality system, in the six entry angles.
pub mod newton {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const MAX_ITERS: usize = 200;
    const RESTARTS: u64 = 64;

    fn build(a: Complex<f64>, ang: &[f64; 6]) -> M6Entries<f64> {
        let z = |k: usize| Complex::from_polar(1.0, ang[k]);
        M6Entries {
            a,
            b: z(0),
            c: z(1),
            d: z(2),
            e: z(3),
            f: z(4),
            g: z(5),
            branch: None,
        }
    }

    /// Real and imaginary parts of the strict upper triangle of `6·(M·M†) − 6·I`.
    fn residuals(a: Complex<f64>, ang: &[f64; 6]) -> Vec<f64> {
        let m = build(a, ang).assemble();
        let g = &m * &m.adjoint();
        let mut out = Vec::with_capacity(30);
        for i in 0..6 {
            for j in (i + 1)..6 {
                out.push(6.0 * g[(i, j)].re);
                out.push(6.0 * g[(i, j)].im);
            }
        }
        out
    }

    fn norm(r: &[f64]) -> f64 {
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Solves the 6×6 system `A x = b` by Gaussian elimination with partial pivoting.
    fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> Option<[f64; 6]> {
        for col in 0..6 {
            let piv = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-300 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in (col + 1)..6 {
                let f = a[r][col] / a[col][col];
                for k in col..6 {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; 6];
        for r in (0..6).rev() {
            let s: f64 = ((r + 1)..6).map(|k| a[r][k] * x[k]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        Some(x)
    }

    /// One Levenberg–Marquardt run from `start`; returns the final angles and residual norm.
    pub fn refine(a: Complex<f64>, start: [f64; 6]) -> ([f64; 6], f64) {
        let mut x = start;
        let mut r = residuals(a, &x);
        let mut lambda = 1e-3;
        for _ in 0..MAX_ITERS {
            let rn = norm(&r);
            if rn < 1e-14 {
                break;
            }
            // Central-difference Jacobian.
            let h = 1e-7;
            let mut jac = vec![[0.0; 6]; r.len()];
            for k in 0..6 {
                let mut xp = x;
                let mut xm = x;
                xp[k] += h;
                xm[k] -= h;
                let rp = residuals(a, &xp);
                let rm = residuals(a, &xm);
                for (row, (p, m)) in jac.iter_mut().zip(rp.iter().zip(&rm)) {
                    row[k] = (p - m) / (2.0 * h);
                }
            }
            let mut jtj = [[0.0; 6]; 6];
            let mut jtr = [0.0; 6];
            for (row, ri) in jac.iter().zip(&r) {
                for p in 0..6 {
                    jtr[p] += row[p] * ri;
                    for q in 0..6 {
                        jtj[p][q] += row[p] * row[q];
                    }
                }
            }
            let mut accepted = false;
            for _ in 0..20 {
                let mut damped = jtj;
                for (p, row) in damped.iter_mut().enumerate() {
                    row[p] += lambda * (1.0 + jtj[p][p]);
                }
                let Some(step) = solve6(damped, jtr.map(|v| -v)) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand: [f64; 6] = std::array::from_fn(|k| x[k] + step[k]);
                let rc = residuals(a, &cand);
                if norm(&rc) < rn {
                    x = cand;
                    r = rc;
                    lambda = (lambda * 0.3).max(1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        let rn = norm(&r);
        (x, rn)
    }

    /// Multi-start solve; starts are drawn from a ChaCha stream keyed by `seed`.
    pub fn solve(a: Complex<f64>, tol: &Tolerances, seed: u64) -> Result<M6Entries<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::INFINITY;
        for _ in 0..RESTARTS {
            let start: [f64; 6] =
                std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU));
            let (x, rn) = refine(a, start);
            best = best.min(rn);
            if rn < tol.residual_tol {
                let ent = build(a, &x);
                if is_hadamard(&ent.assemble(), tol) {
                    return Ok(ent);
                }
            }
        }
        Err(Error::Solve(format!(
            "Gauss–Newton found no root at a = {a} (best residual {best:e})"
        )))
    }
}

/// Two-parameter affine Fourier family `F6(x1, x2)`.
///
/// `F6 ∘ exp(i R)` with `R` nonzero only on rows 2, 4, 6 and columns
/// 2, 3, 5, 6, where it reads `(x1, x2, x1, x2)`.
pub fn fourier_f6<T: Real>(x1: T, x2: T) -> Mat6<T> {
    let tau = T::of(std::f64::consts::TAU);
    let six = T::of(6.0);
    let shift = |i: usize, j: usize| -> T {
        if i % 2 == 1 {
            match j {
                1 | 4 => x1,
                2 | 5 => x2,
                _ => T::zero(),
            }
        } else {
            T::zero()
        }
    };
    let s = T::inv_sqrt6();
    let x1_64 = x1.as_f64();
    let x2_64 = x2.as_f64();
    Mat6::from_fn(|i, j| {
        let k = ((i * j) % 6) as f64;
        cis(tau * T::of(k) / six + shift(i, j)) * s
    })
    .with_label(format!("F6(x1={x1_64}, x2={x2_64})"))
}

/// Reduces an angle into `(−π, π]`.
fn wrap_pi(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Whether `theta` (taken mod 2π) lies on the B6(1) arc.
pub fn b6_admissible(theta: f64) -> bool {
    wrap_pi(theta).abs() >= b6_arc_start()
}

/// The one-parameter self-adjoint family `B6(θ)` (Beauchamp–Nicoara).
///
/// With `y = e^{iθ}`, `x = (1 + 2y − y²)/(y(−1 + 2y + y²))`, `z` the root of
/// `xy·z² + (2 + x + ȳ)·z + 1 = 0` on the branch `z = m(1 + iκ)` and
/// `t = xyz`:
///
/// ```text
/// 1   1   1   1   1   1
/// 1  -1   z   t  -t  -z
/// 1   z̄   1   x   t   ȳ
/// 1   t̄   x̄   1   y   z
/// 1  -t̄   t̄   ȳ  -1  -ȳ
/// 1  -z̄   y   z̄  -y  -1
/// ```
pub fn b6<T: Real>(theta: T) -> Result<Mat6<T>> {
    let th = theta.as_f64();
    if !th.is_finite() || !b6_admissible(th) {
        return Err(Error::Domain {
            value: th,
            domain: B6_DOMAIN,
        });
    }
    let one = Complex::<T>::one();
    let two = T::of(2.0);
    let y: Complex<T> = cis(T::of(wrap_pi(th)));
    let x = (one + y * two - y * y) / (y * (-one + y * two + y * y));
    let k = one * two + x + y.conj();
    // Unimodular roots z = m(1 ± iκ) around the midpoint m = −k/(2xy).
    let m = -k / (x * y * two);
    let kappa = (T::one() / m.norm_sqr() - T::one()).max(T::zero()).sqrt();
    let z = m * (one + Complex::i() * kappa);
    let t = x * y * z;
    let c = |w: Complex<T>| w.conj();
    Ok(Mat6::from_unimodular([
        [one, one, one, one, one, one],
        [one, -one, z, t, -t, -z],
        [one, c(z), one, x, t, c(y)],
        [one, c(t), c(x), one, y, z],
        [one, -c(t), c(t), c(y), -one, -c(y)],
        [one, -c(z), y, c(z), -y, -one],
    ])
    .with_label(format!("B6(theta={th})")))
}

/// The isolated spectral matrix `S6`, built from cube roots of unity.
pub fn s6<T: Real>() -> Mat6<T> {
    let w: Complex<T> = cis(T::of(std::f64::consts::TAU / 3.0));
    let o = Complex::<T>::one();
    let w2 = w * w;
    Mat6::from_unimodular([
        [o, o, o, o, o, o],
        [o, o, w, w, w2, w2],
        [o, w, o, w2, w2, w],
        [o, w, w2, o, w, w2],
        [o, w2, w2, w, o, w],
        [o, w2, w, w2, w, o],
    ])
    .with_label("S6")
}
