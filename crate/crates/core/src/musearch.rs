//! Numerical search for vectors unbiased to both the standard basis and a
//! Hadamard matrix `H`, extraction of complete bases among them, and
//! parameter scans over the M6 family.
//!
//! A candidate vector is `v = (1, e^{iφ₁}, …, e^{iφ₅})/√6`. Fixing the first
//! entry removes the global-phase gauge, and the parameterization makes `v`
//! unbiased to the standard basis automatically. What remains is
//! `|⟨h_j, v⟩|² = 1/6` for every column `h_j` of `H`.

use std::f64::consts::TAU;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::families::m6;
use crate::linalg::{inner, Mat6, Tolerances, Vec6, N};
use crate::optim;
use crate::{CMat6, ColVec6};

type C = Complex<f64>;

/// Number of free angles.
pub const FREE: usize = N - 1;

/// Descent stops once the objective is this small; acceptance uses `residual_tol`.
const POLISH_TARGET: f64 = 1e-28;

/// A vector unbiased to `I` and to `H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MUVector {
    /// Free angles in `[0, 2π)`.
    pub phases: [f64; FREE],
    #[serde(skip)]
    pub vector: ColVec6,
    /// `max_j |6·|⟨h_j, v⟩|² − 1|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            starts: 2000,
            max_iters: 500,
            seed: 0,
            tol: Tolerances::default(),
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.starts == 0 || self.max_iters == 0 {
            return Err(crate::Error::InvalidInput(
                "starts and max_iters must be at least 1".into(),
            ));
        }
        self.tol.validate()
    }
}

/// `(1, e^{iφ₁}, …, e^{iφ₅})/√6`.
pub fn vector_from_phases(phases: &[f64; FREE]) -> ColVec6 {
    let s = 1.0 / 6f64.sqrt();
    Vec6::from_fn(|i| {
        if i == 0 {
            C::new(s, 0.0)
        } else {
            C::from_polar(s, phases[i - 1])
        }
    })
}

/// `max_j |6·|⟨h_j, v⟩|² − 1|`, evaluated directly.
pub fn unbiasedness_residual(h: &CMat6, v: &ColVec6) -> f64 {
    (0..N)
        .map(|j| (6.0 * inner(&h.col(j), v).norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `Σ_j (6·|⟨h_j, v⟩|² − 1)²` and its exact gradient in the five free angles.
pub fn mu_objective(h: &CMat6, phases: &[f64; FREE]) -> (f64, [f64; FREE]) {
    let v = vector_from_phases(phases);
    let mut value = 0.0;
    let mut grad = [0.0; FREE];
    for j in 0..N {
        let z = inner(&h.col(j), &v);
        let w = 6.0 * z.norm_sqr() - 1.0;
        value += w * w;
        // d|z|²/dφ_k = 2·Re(conj(z) · conj(h_kj) · i·v_k).
        for k in 1..N {
            let dz = h[(k, j)].conj() * C::i() * v[k];
            grad[k - 1] += 2.0 * w * 6.0 * 2.0 * (z.conj() * dz).re;
        }
    }
    (value, grad)
}

fn wrap(phases: [f64; FREE]) -> [f64; FREE] {
    phases.map(|p| {
        let r = p.rem_euclid(TAU);
        if r >= TAU {
            0.0
        } else {
            r
        }
    })
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Max angular difference between two gauge-fixed phase vectors.
///
/// With the first entry fixed the only leftover symmetry is `2π`
/// periodicity, which [`angular_distance`] accounts for.
pub fn phase_distance(a: &[f64; FREE], b: &[f64; FREE]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| angular_distance(*x, *y))
        .fold(0.0, f64::max)
}

/// Keeps the first of every group closer than `cluster_tol`, after sorting lexicographically.
pub fn dedupe(mut vectors: Vec<MUVector>, cluster_tol: f64) -> Vec<MUVector> {
    vectors.sort_by(|a, b| {
        a.phases
            .iter()
            .zip(&b.phases)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<MUVector> = Vec::new();
    for v in vectors {
        if kept
            .iter()
            .all(|k| phase_distance(&k.phases, &v.phases) >= cluster_tol)
        {
            kept.push(v);
        }
    }
    kept
}

/// Random start for start index `idx`: stream `idx` of a ChaCha8 generator keyed by `seed`.
fn start_point(seed: u64, idx: usize) -> [f64; FREE] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64);
    std::array::from_fn(|_| rng.gen_range(0.0..TAU))
}

/// One descent from start `idx`; `Some` if the end point is accepted.
fn run_start(h: &CMat6, cfg: &OptimConfig, idx: usize) -> Option<MUVector> {
    let x0 = start_point(cfg.seed, idx);
    let d = optim::minimize(|x| mu_objective(h, x), x0, cfg.max_iters, POLISH_TARGET);
    let phases = wrap(d.x);
    let vector = vector_from_phases(&phases);
    let residual = unbiasedness_residual(h, &vector);
    (residual < cfg.tol.residual_tol).then_some(MUVector {
        phases,
        vector,
        residual,
    })
}

/// Multi-start minimization of [`mu_objective`], deduplicated and sorted by phases.
///
/// Counts are lower bounds for the given start budget. Starts run in
/// parallel; results are merged in start order, so output depends only on
/// `cfg`.
pub fn find_mu_vectors(h: &CMat6, cfg: &OptimConfig) -> Vec<MUVector> {
    let accepted: Vec<MUVector> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|idx| run_start(h, cfg, idx))
        .collect();
    dedupe(accepted, cfg.tol.cluster_tol)
}

/// All 6-cliques of the orthogonality graph (`|⟨u, v⟩| < eq_tol`), as
/// increasing index sets into `vectors`.
pub fn extract_bases(vectors: &[MUVector], tol: &Tolerances) -> Vec<[usize; N]> {
    let n = vectors.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && inner(&vectors[i].vector, &vectors[j].vector).norm() < tol.eq_tol)
                .collect()
        })
        .collect();

    fn extend(
        adj: &[Vec<bool>],
        clique: &mut Vec<usize>,
        candidates: &[usize],
        out: &mut Vec<[usize; N]>,
    ) {
        if clique.len() == N {
            out.push(std::array::from_fn(|k| clique[k]));
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            if clique.len() + (candidates.len() - pos) < N {
                break;
            }
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&u| adj[v][u])
                .collect();
            clique.push(v);
            extend(adj, clique, &next, out);
            clique.pop();
        }
    }

    let mut out = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    extend(&adj, &mut Vec::with_capacity(N), &all, &mut out);
    out
}

/// Direct check that `{I, H, B}` are pairwise mutually unbiased.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleCertificate {
    /// `max |⟨b_i, b_j⟩|` over distinct basis vectors, and `max ||b_i|² − 1|`.
    pub orthonormality: f64,
    /// `max |6·|⟨h_j, b_i⟩|² − 1|`.
    pub unbiased_to_h: f64,
    /// `max |6·|b_ik|² − 1|`.
    pub unbiased_to_identity: f64,
    pub valid: bool,
}

pub fn certify_triple(h: &CMat6, basis: &[ColVec6; N], tol: &Tolerances) -> TripleCertificate {
    let mut orth: f64 = 0.0;
    let mut unb_h: f64 = 0.0;
    let mut unb_i: f64 = 0.0;
    for (i, b) in basis.iter().enumerate() {
        orth = orth.max((b.norm_sqr() - 1.0).abs());
        for c in &basis[i + 1..] {
            orth = orth.max(inner(b, c).norm());
        }
        unb_h = unb_h.max(unbiasedness_residual(h, b));
        for z in b.iter() {
            unb_i = unb_i.max((6.0 * z.norm_sqr() - 1.0).abs());
        }
    }
    TripleCertificate {
        orthonormality: orth,
        unbiased_to_h: unb_h,
        unbiased_to_identity: unb_i,
        valid: orth < tol.eq_tol && unb_h < tol.residual_tol && unb_i < tol.residual_tol,
    }
}

/// Assembles the basis at `idx` as matrix columns.
pub fn basis_matrix(vectors: &[MUVector], idx: &[usize; N]) -> CMat6 {
    Mat6::from_fn(|i, j| vectors[idx[j]].vector[i])
}

/// One grid point of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub a: [f64; 2],
    /// `Err` holds the construction error; the row is then marked invalid.
    pub counts: Result<ScanCounts, String>,
    pub starts: usize,
    pub seed: u64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanCounts {
    pub n_mu_vectors: usize,
    pub n_bases: usize,
    pub n_triples: usize,
    /// Bit pattern of the max accepted residual (0 when none accepted).
    #[serde(skip)]
    max_residual_bits: u64,
}

impl ScanCounts {
    pub fn max_residual(&self) -> f64 {
        f64::from_bits(self.max_residual_bits)
    }
}

/// Search, clique extraction, and triple certification for one matrix.
pub fn scan_matrix(h: &CMat6, cfg: &OptimConfig) -> ScanCounts {
    let vectors = find_mu_vectors(h, cfg);
    let bases = extract_bases(&vectors, &cfg.tol);
    let n_triples = bases
        .iter()
        .filter(|idx| {
            let b = idx.map(|k| vectors[k].vector);
            certify_triple(h, &b, &cfg.tol).valid
        })
        .count();
    let max_residual = vectors.iter().map(|v| v.residual).fold(0.0, f64::max);
    ScanCounts {
        n_mu_vectors: vectors.len(),
        n_bases: bases.len(),
        n_triples,
        max_residual_bits: max_residual.to_bits(),
    }
}

/// Scans `M6(e^{it})` over `t_values`, in input order.
///
/// Construction errors are captured per row and do not stop the scan.
pub fn scan_m6(t_values: &[f64], cfg: &OptimConfig) -> Vec<ScanRow> {
    t_values
        .iter()
        .map(|&t| {
            let clock = Instant::now();
            let counts = m6(t, &cfg.tol)
                .map(|h| scan_matrix(&h, cfg))
                .map_err(|e| e.to_string());
            ScanRow {
                t,
                a: [t.cos(), t.sin()],
                counts,
                starts: cfg.starts,
                seed: cfg.seed,
                wall_time: clock.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// Evenly spaced `steps` values from `from` to `to` inclusive (`steps = 1` gives `from`).
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|k| {
                if k == steps - 1 {
                    to
                } else {
                    from + (to - from) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

pub const CSV_HEADER: &str =
    "t,a_re,a_im,n_mu_vectors,n_bases,n_triples,max_residual,starts,seed,wall_time_s";

/// Writes scan rows as CSV. Invalid rows carry `NA` in the count and
/// residual columns. `wall_time_s` is left empty unless `with_timing`, so
/// that repeated runs are byte-identical.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W, with_timing: bool) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let (nv, nb, nt, res) = match &r.counts {
            Ok(c) => (
                c.n_mu_vectors.to_string(),
                c.n_bases.to_string(),
                c.n_triples.to_string(),
                format!("{:e}", c.max_residual()),
            ),
            Err(_) => ("NA".into(), "NA".into(), "NA".into(), "NA".into()),
        };
        let wall = if with_timing {
            format!("{:.3}", r.wall_time)
        } else {
            String::new()
        };
        writeln!(
            w,
            "{},{},{},{nv},{nb},{nt},{res},{},{},{wall}",
            r.t, r.a[0], r.a[1], r.starts, r.seed
        )?;
    }
    Ok(())
}

/// Two-column `t,n_mu_vectors` plot data; invalid rows are skipped.
pub fn write_plot_data<W: Write>(rows: &[ScanRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,n_mu_vectors")?;
    for r in rows {
        if let Ok(c) = &r.counts {
            writeln!(w, "{},{}", r.t, c.n_mu_vectors)?;
        }
    }
    Ok(())
}
