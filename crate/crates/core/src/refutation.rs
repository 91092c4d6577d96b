//! Replays the counterexample to the claim that, in the normalized form
//! with column-2 tail `(−1, s, −s)/√6`, two entries of the third column
//! must vanish.
//!
//! For `H = M6(e^{it})` the transform is fixed: multiply column 2 by `ā`,
//! move rows 3,4,5,6 to the top, and rephase columns 3–6 so row 1 reads
//! `1/√6`. The result has third column
//! `(1, c·b̄, d·b̄, e·b̄, b̄, a·b̄)/√6`, so no entry is zero.

use std::f64::consts::TAU;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equivalence::{apply, is_dephased};
use crate::families::m6;
use crate::linalg::{inner, is_real_entry, Tolerances, Vec6, N};
use crate::{optim, CMat6, ColVec6, Error, Result, TransformRecord};

type C = Complex<f64>;

/// Rows of `M6` placed at positions 1..6 (0-based).
pub const PIPELINE_ROW_ORDER: [usize; N] = [2, 3, 4, 5, 0, 1];

/// Starts tried by [`third_column_witness`].
pub const WITNESS_STARTS: usize = 256;
const WITNESS_ITERS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "LEMMA_CLAIM_REFUTED")]
    Refuted,
    #[serde(rename = "NOT_REFUTED")]
    NotRefuted,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Refuted => "LEMMA_CLAIM_REFUTED",
            Verdict::NotRefuted => "NOT_REFUTED",
        })
    }
}

/// One evaluated assertion of the argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The quantity compared against its tolerance.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub t: f64,
    pub a: C,
    pub hadamard_residual: f64,
    pub is_hadamard_ok: bool,
    /// Dephased, with upper-left 3×2 block `[[1,1],[1,1],[1,−1]]/√6`.
    pub lemma_form_ok: bool,
    pub y: f64,
    pub x: f64,
    /// `√6 ×` rows 4–6 of column 2.
    pub tail: [C; 3],
    /// Tail reads `(−1, s, −s)` in order and `s` matches `ā`.
    pub tail_ok: bool,
    /// `s` as produced by the pipeline.
    pub s: C,
    pub s_expected: C,
    pub s_error: f64,
    pub third_col_moduli: [f64; N],
    pub min_third_col_modulus: f64,
    pub matrix: CMat6,
    pub record: TransformRecord,
    pub replay_residual: f64,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl LemmaReport {
    pub fn refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }
}

/// The fixed transform for `M6(a)` with entry `b = h[2][2]`.
pub fn pipeline_record(h: &CMat6) -> Result<TransformRecord> {
    let a = h[(1, 2)] * 6f64.sqrt();
    let mut col_phases = [C::new(1.0, 0.0); N];
    col_phases[1] = a.conj();
    for (j, p) in col_phases.iter_mut().enumerate().skip(2) {
        let z = h[(PIPELINE_ROW_ORDER[0], j)];
        if z.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("zero entry at row 3, column {}", j + 1)));
        }
        *p = z.conj() / z.norm();
    }
    Ok(TransformRecord {
        row_perm: PIPELINE_ROW_ORDER,
        col_perm: std::array::from_fn(|j| j),
        row_phases: [C::new(1.0, 0.0); N],
        col_phases,
    })
}

/// The three steps applied one at a time, independent of the record.
fn stepwise(h: &CMat6, a: C) -> CMat6 {
    let scaled = CMat6::from_fn(|i, j| if j == 1 { h[(i, j)] * a.conj() } else { h[(i, j)] });
    let permuted = CMat6::from_fn(|i, j| scaled[(PIPELINE_ROW_ORDER[i], j)]);
    CMat6::from_fn(|i, j| {
        if j < 2 {
            permuted[(i, j)]
        } else {
            let z = permuted[(0, j)];
            permuted[(i, j)] * z.conj() / z.norm()
        }
    })
}

/// Builds `M6(e^{it})`, applies the fixed transform, and evaluates every assertion.
pub fn run_counterexample(t: f64, tol: &Tolerances) -> Result<LemmaReport> {
    let h = m6(t, tol)?;
    let a = C::from_polar(1.0, t);
    let record = pipeline_record(&h)?;
    let m = apply(&h, &record);
    let eq = tol.eq_tol;
    let r6 = 6f64.sqrt();

    let hadamard_residual = m.hadamard_residual();
    let is_hadamard_ok = hadamard_residual < eq;

    let y = (m[(1, 1)] * r6).re;
    let x = (m[(2, 1)] * r6).re;
    let block_real = (0..3).all(|i| (0..2).all(|j| is_real_entry(m[(i, j)], tol)));
    let block_err = [(1, 1, 1.0), (2, 1, -1.0)]
        .iter()
        .map(|&(i, j, v)| (m[(i, j)] * r6 - v).norm())
        .fold(0.0, f64::max);
    let lemma_form_ok = is_dephased(&m, tol) && block_real && block_err < eq;

    let tail = [m[(3, 1)] * r6, m[(4, 1)] * r6, m[(5, 1)] * r6];
    let s = tail[1];
    let pattern_err = (tail[0] + 1.0).norm().max((tail[2] + s).norm());
    let s_expected = a.conj();
    let s_error = (s - s_expected).norm();
    let tail_ok = pattern_err < eq && s_error < eq;

    let third_col_moduli: [f64; N] = std::array::from_fn(|i| m[(i, 2)].norm());
    let min_third_col_modulus = third_col_moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 1.0 / r6 - eq;

    let replay_residual = stepwise(&h, a).max_abs_diff(&m);

    let checks = vec![
        Check { name: "transformed matrix is complex Hadamard", passed: is_hadamard_ok, value: hadamard_residual },
        Check { name: "upper-left 3x2 block is [[1,1],[1,1],[1,-1]]", passed: lemma_form_ok, value: block_err },
        Check { name: "column-2 tail is (-1, s, -s)", passed: pattern_err < eq, value: pattern_err },
        Check { name: "s equals conj(a)", passed: s_error < eq, value: s_error },
        Check { name: "third column has no zero entry", passed: min_third_col_modulus > floor, value: min_third_col_modulus },
        Check { name: "transform record replays", passed: replay_residual < eq, value: replay_residual },
    ];
    let verdict = if lemma_form_ok && tail_ok && min_third_col_modulus > floor {
        Verdict::Refuted
    } else {
        Verdict::NotRefuted
    };

    Ok(LemmaReport {
        t,
        a,
        hadamard_residual,
        is_hadamard_ok,
        lemma_form_ok,
        y,
        x,
        tail,
        tail_ok,
        s,
        s_expected,
        s_error,
        third_col_moduli,
        min_third_col_modulus,
        matrix: m,
        record,
        replay_residual,
        checks,
        verdict,
    })
}

/// Canonical representative of `{s, −s}`: `Im ≥ 0`, and `Re ≥ 0` on the real axis.
pub fn canonical_sign(s: C, eq_tol: f64) -> C {
    if s.im.abs() < eq_tol {
        if s.re < 0.0 {
            -s
        } else {
            s
        }
    } else if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Recognizes the multiset `{−1, s, −s}` in three unimodular values.
///
/// Returns `s` canonicalized by [`canonical_sign`], or `None` if the values
/// do not sum to `−1` or do not split as `−1` plus an antipodal pair.
pub fn verify_tail_structure(tail: [C; 3], tol: &Tolerances) -> Result<Option<C>> {
    let eq = tol.eq_tol;
    if let Some(z) = tail.iter().find(|z| !z.is_finite() || (z.norm() - 1.0).abs() >= eq) {
        return Err(Error::InvalidInput(format!("tail value {z} is not unimodular")));
    }
    let sum: C = tail.iter().sum();
    if (sum + 1.0).norm() >= eq {
        return Ok(None);
    }
    for k in 0..3 {
        let p = tail[(k + 1) % 3];
        let q = tail[(k + 2) % 3];
        if (tail[k] + 1.0).norm() < eq && (p + q).norm() < eq {
            return Ok(Some(canonical_sign(p, eq)));
        }
    }
    Ok(None)
}

/// A full-modulus third column orthogonal to `(1,1,1,1,1,1)/√6` and
/// `(1,1,−1,−1,s,−s)/√6`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThirdColumnWitness {
    pub s: C,
    pub v: ColVec6,
    /// `|⟨c1, v⟩|` and `|⟨c2, v⟩|`, computed directly.
    pub residuals: [f64; 2],
    pub start_index: Option<usize>,
}

/// The two columns a third column must be orthogonal to.
pub fn leading_columns(s: C) -> [ColVec6; 2] {
    let r = 1.0 / 6f64.sqrt();
    let one = C::new(1.0, 0.0);
    [
        Vec6::from_fn(|_| C::new(r, 0.0)),
        Vec6([one, one, -one, -one, s, -s]).scale(C::new(r, 0.0)),
    ]
}

impl ThirdColumnWitness {
    /// Verifies `v` directly; `None` if any invariant fails.
    pub fn verify(s: C, v: ColVec6, tol: &Tolerances) -> Option<Self> {
        let [c1, c2] = leading_columns(s);
        let residuals = [inner(&c1, &v).norm(), inner(&c2, &v).norm()];
        let floor = 1.0 / 6f64.sqrt() - tol.eq_tol;
        let ok = residuals.iter().all(|r| *r < tol.residual_tol)
            && v.iter().all(|z| z.norm() > floor && (z.norm_sqr() * 6.0 - 1.0).abs() < tol.eq_tol);
        ok.then_some(Self {
            s,
            v,
            residuals,
            start_index: None,
        })
    }
}

/// `|Σ v'|² + |Σ conj(c2'_k) v'_k|²` on the unimodular scale, with gradient.
fn witness_objective(s: C, phases: &[f64; 5]) -> (f64, [f64; 5]) {
    let one = C::new(1.0, 0.0);
    let coef = [one, one, -one, -one, s.conj(), -s.conj()];
    let e: [C; N] = std::array::from_fn(|k| if k == 0 { one } else { C::from_polar(1.0, phases[k - 1]) });
    let u: C = e.iter().sum();
    let w: C = e.iter().zip(&coef).map(|(z, c)| z * c).sum();
    let value = u.norm_sqr() + w.norm_sqr();
    let grad = std::array::from_fn(|k| {
        let de = C::i() * e[k + 1];
        2.0 * (u.conj() * de).re + 2.0 * (w.conj() * coef[k + 1] * de).re
    });
    (value, grad)
}

/// Multi-start search for a [`ThirdColumnWitness`]; the lowest-index
/// successful start wins.
pub fn third_column_witness(s: C, tol: &Tolerances, seed: u64) -> Result<ThirdColumnWitness> {
    if !s.is_finite() || (s.norm() - 1.0).abs() >= tol.eq_tol {
        return Err(Error::InvalidInput(format!("s = {s} is not unimodular")));
    }
    let runs: Vec<(f64, Option<ThirdColumnWitness>)> = (0..WITNESS_STARTS)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let x0: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.0..TAU));
            let d = optim::minimize(|x| witness_objective(s, x), x0, WITNESS_ITERS, 1e-30);
            let r = 1.0 / 6f64.sqrt();
            let v = Vec6::from_fn(|k| if k == 0 { C::new(r, 0.0) } else { C::from_polar(r, d.x[k - 1]) });
            let w = ThirdColumnWitness::verify(s, v, tol).map(|w| ThirdColumnWitness {
                start_index: Some(idx),
                ..w
            });
            (d.value.sqrt() / 6.0, w)
        })
        .collect();
    let best = runs.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    runs.into_iter()
        .find_map(|r| r.1)
        .ok_or(Error::SearchFailure {
            starts: WITNESS_STARTS,
            best_residual: best,
        })
}
