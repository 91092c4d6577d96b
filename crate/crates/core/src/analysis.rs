//! Structural predicates on order-6 matrices: real entries and real
//! submatrices, 2×2 Hadamard submatrices, H2-reducibility, unitary
//! submatrices, rank, and product-vector columns.
//!
//! These are measurements. Nothing here decides whether a matrix can sit in
//! a set of four MU bases.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{is_real_entry, is_zero_entry, Mat6, Tolerances, Vec6, N};
use crate::scalar::Real;
use crate::svd;

/// Real-entry count above which a matrix "exceeds the bound".
pub const REAL_ENTRY_BOUND: usize = 22;

/// Row and column index sets of a submatrix (0-based, strictly increasing).
///
/// Serializes with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubmatrixLoc {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl SubmatrixLoc {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let ok = |v: &[usize]| {
            !v.is_empty() && v.iter().all(|&k| k < N) && v.windows(2).all(|w| w[0] < w[1])
        };
        if !ok(&rows) || !ok(&cols) {
            return Err(Error::InvalidInput(format!(
                "submatrix indices must be strictly increasing in 0..{N}: rows {rows:?}, cols {cols:?}"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// Builds from 1-based indices, as written by people.
    pub fn from_one_based(rows: &[usize], cols: &[usize]) -> Result<Self> {
        let shift = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter()
                .map(|&k| {
                    k.checked_sub(1)
                        .ok_or_else(|| Error::InvalidInput("indices are 1-based".into()))
                })
                .collect()
        };
        Self::new(shift(rows)?, shift(cols)?)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Row-major block entries.
    pub fn extract<T: Real>(&self, h: &Mat6<T>) -> Vec<Complex<T>> {
        self.rows
            .iter()
            .flat_map(|&r| self.cols.iter().map(move |&c| h[(r, c)]))
            .collect()
    }

    pub fn is_superset_of(&self, other: &Self) -> bool {
        other.rows.iter().all(|r| self.rows.contains(r))
            && other.cols.iter().all(|c| self.cols.contains(c))
    }
}

impl Serialize for SubmatrixLoc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct OneBased {
            rows: Vec<usize>,
            cols: Vec<usize>,
        }
        OneBased {
            rows: self.rows.iter().map(|k| k + 1).collect(),
            cols: self.cols.iter().map(|k| k + 1).collect(),
        }
        .serialize(s)
    }
}

impl std::fmt::Display for SubmatrixLoc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let one = |v: &[usize]| {
            v.iter()
                .map(|k| (k + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "rows {{{}}} × cols {{{}}}", one(&self.rows), one(&self.cols))
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn check_shape(p: usize, q: usize) -> Result<()> {
    if (1..=N).contains(&p) && (1..=N).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "submatrix shape {p}×{q} outside 1..={N}"
        )))
    }
}

fn enumerate_blocks<T: Real>(
    h: &Mat6<T>,
    p: usize,
    q: usize,
    mut keep: impl FnMut(&Mat6<T>, &[usize], &[usize]) -> bool,
) -> Vec<SubmatrixLoc> {
    let row_sets = combinations(N, p);
    let col_sets = combinations(N, q);
    let mut out = Vec::new();
    for rows in &row_sets {
        for cols in &col_sets {
            if keep(h, rows, cols) {
                out.push(SubmatrixLoc {
                    rows: rows.clone(),
                    cols: cols.clone(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealEntryCount {
    pub count: usize,
    /// `count > 22`.
    pub exceeds_bound: bool,
}

/// Number of entries with `|Im(h)·√6| < eq_tol`.
pub fn count_real_entries<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> RealEntryCount {
    let count = h
        .entries()
        .iter()
        .flatten()
        .filter(|z| is_real_entry(**z, tol))
        .count();
    RealEntryCount {
        count,
        exceeds_bound: count > REAL_ENTRY_BOUND,
    }
}

/// All `p × q` submatrices whose raw entries are all real.
pub fn find_real_submatrices<T: Real>(
    h: &Mat6<T>,
    p: usize,
    q: usize,
    tol: &Tolerances,
) -> Result<Vec<SubmatrixLoc>> {
    check_shape(p, q)?;
    Ok(enumerate_blocks(h, p, q, |h, rows, cols| {
        rows.iter()
            .all(|&r| cols.iter().all(|&c| is_real_entry(h[(r, c)], tol)))
    }))
}

/// Whether the given entries share one phase mod π (zero entries fit any phase).
fn collinear_mod_pi<T: Real>(entries: impl Iterator<Item = Complex<T>>, tol: &Tolerances) -> bool {
    let mut reference: Option<Complex<T>> = None;
    for z in entries {
        if is_zero_entry(z, tol) {
            continue;
        }
        let u = z / z.norm();
        match reference {
            None => reference = Some(u),
            Some(r) => {
                // u·conj(r) on the unimodular scale must be real.
                if !is_real_entry(u * r.conj() / T::sqrt6(), tol) {
                    return false;
                }
            }
        }
    }
    true
}

/// All `p × q` submatrices that become real after one phase per selected column.
pub fn find_real_submatrices_up_to_rephasing<T: Real>(
    h: &Mat6<T>,
    p: usize,
    q: usize,
    tol: &Tolerances,
) -> Result<Vec<SubmatrixLoc>> {
    check_shape(p, q)?;
    Ok(enumerate_blocks(h, p, q, |h, rows, cols| {
        cols.iter()
            .all(|&c| collinear_mod_pi(rows.iter().map(|&r| h[(r, c)]), tol))
    }))
}

/// Row-orthogonality residual of the 2×2 block on rows `a, b`, cols `c, d`,
/// on the unimodular scale (entries multiplied by `√6`).
fn h2_residual<T: Real>(h: &Mat6<T>, a: usize, b: usize, c: usize, d: usize) -> T {
    let s = T::of(6.0);
    ((h[(a, c)].conj() * h[(b, c)] + h[(a, d)].conj() * h[(b, d)]) * s).norm()
}

fn is_h2_block<T: Real>(h: &Mat6<T>, rows: [usize; 2], cols: [usize; 2], tol: &Tolerances) -> bool {
    h2_residual(h, rows[0], rows[1], cols[0], cols[1]) < T::of(tol.eq_tol)
}

/// Locations of the 2×2 submatrices whose two rows are orthogonal.
///
/// For unimodular entries this is proportionality to an order-2 Hadamard
/// matrix. Non-Hadamard inputs are tested with the same orthogonality
/// predicate.
pub fn h2_submatrices<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Vec<SubmatrixLoc> {
    enumerate_blocks(h, 2, 2, |h, r, c| is_h2_block(h, [r[0], r[1]], [c[0], c[1]], tol))
}

/// Number of 2×2 Hadamard submatrices (out of 225).
pub fn count_h2_submatrices<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> usize {
    h2_submatrices(h, tol).len()
}

/// A partition of `0..6` into three unordered pairs.
pub type PairPartition = [[usize; 2]; 3];

/// The 15 pair partitions of `0..6` in lexicographic order.
pub fn pair_partitions() -> Vec<PairPartition> {
    let mut out = Vec::with_capacity(15);
    for j in 1..N {
        let rest1: Vec<usize> = (1..N).filter(|&k| k != j).collect();
        let first = rest1[0];
        for &l in &rest1[1..] {
            let rest2: Vec<usize> = rest1[1..].iter().copied().filter(|&k| k != l).collect();
            out.push([[0, j], [first, l], [rest2[0], rest2[1]]]);
        }
    }
    out
}

/// Row and column pairings under which all nine 2×2 blocks are Hadamard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct H2Partition {
    pub rows: PairPartition,
    pub cols: PairPartition,
}

impl Serialize for H2Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct OneBased {
            rows: [[usize; 2]; 3],
            cols: [[usize; 2]; 3],
        }
        let one = |p: PairPartition| p.map(|pair| pair.map(|k| k + 1));
        OneBased {
            rows: one(self.rows),
            cols: one(self.cols),
        }
        .serialize(s)
    }
}

/// First (rows outer, columns inner, both lexicographic) pair partition
/// whose nine blocks are all 2×2 Hadamard, if any.
pub fn is_h2_reducible<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Option<H2Partition> {
    let parts = pair_partitions();
    for rows in &parts {
        for cols in &parts {
            let all = rows
                .iter()
                .all(|r| cols.iter().all(|c| is_h2_block(h, *r, *c, tol)));
            if all {
                return Some(H2Partition {
                    rows: *rows,
                    cols: *cols,
                });
            }
        }
    }
    None
}

/// All `k × k` submatrices `S` with `S·S† = c·I`, `c > 0` (pairwise
/// orthogonal rows of equal norm), tested on the unimodular scale.
pub fn find_unitary_submatrices<T: Real>(
    h: &Mat6<T>,
    k: usize,
    tol: &Tolerances,
) -> Result<Vec<SubmatrixLoc>> {
    if !(2..=N).contains(&k) {
        return Err(Error::InvalidInput(format!("k = {k} outside 2..={N}")));
    }
    let eq = T::of(tol.eq_tol);
    let six = T::of(6.0);
    Ok(enumerate_blocks(h, k, k, |h, rows, cols| {
        let dot = |a: usize, b: usize| {
            cols.iter()
                .fold(Complex::<T>::zero(), |s, &c| s + h[(a, c)] * h[(b, c)].conj())
                * six
        };
        let diag: Vec<T> = rows.iter().map(|&r| dot(r, r).re).collect();
        let mean = diag.iter().fold(T::zero(), |s, d| s + *d) / T::of(k as f64);
        if mean <= eq {
            return false;
        }
        diag.iter().all(|d| (*d - mean).abs() < eq)
            && rows.iter().enumerate().all(|(i, &a)| {
                rows[i + 1..].iter().all(|&b| dot(a, b).norm() < eq)
            })
    }))
}

/// Tensor factorization `C⁶ = C^rows ⊗ C^cols` used to reshape a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factorization {
    #[serde(rename = "2x3")]
    TwoByThree,
    #[serde(rename = "3x2")]
    ThreeByTwo,
}

impl Factorization {
    pub const ALL: [Self; 2] = [Self::TwoByThree, Self::ThreeByTwo];

    pub fn shape(self) -> (usize, usize) {
        match self {
            Self::TwoByThree => (2, 3),
            Self::ThreeByTwo => (3, 2),
        }
    }
}

impl std::str::FromStr for Factorization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2x3" => Ok(Self::TwoByThree),
            "3x2" => Ok(Self::ThreeByTwo),
            _ => Err(Error::InvalidInput(format!("unknown factorization {s:?}"))),
        }
    }
}

/// Whether `v`, reshaped row-major to the factorization, has rank one:
/// `σ₂ < rank_tol · σ₁`.
pub fn is_product_vector<T: Real>(v: &Vec6<T>, fac: Factorization, tol: &Tolerances) -> bool {
    let (r, c) = fac.shape();
    let sv = svd::singular_values(&v.0, r, c);
    sv[0] > T::zero() && sv[1] < T::of(tol.rank_tol) * sv[0]
}

/// A row order and factorization under which at least three columns are product vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductTriple {
    /// Source row placed at each position (1-based when serialized).
    #[serde(serialize_with = "one_based")]
    pub row_perm: [usize; N],
    pub factorization: Factorization,
    #[serde(serialize_with = "one_based_vec")]
    pub columns: Vec<usize>,
}

fn one_based<S: Serializer>(p: &[usize; N], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.map(|k| k + 1).serialize(s)
}

fn one_based_vec<S: Serializer>(p: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.iter().map(|k| k + 1).collect::<Vec<_>>().serialize(s)
}

/// All 720 permutations of `0..6` in lexicographic order.
pub fn permutations6() -> Vec<[usize; N]> {
    let mut out = Vec::with_capacity(720);
    let mut p: [usize; N] = std::array::from_fn(|i| i);
    loop {
        out.push(p);
        // Next lexicographic permutation.
        let Some(i) = (0..N - 1).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..N).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Most product columns over all row orders and factorizations, with a witness.
pub fn max_product_columns<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> (usize, Option<ProductTriple>) {
    let mut best = (0usize, None);
    for perm in permutations6() {
        for fac in Factorization::ALL {
            let columns: Vec<usize> = (0..N)
                .filter(|&j| {
                    let v = Vec6::from_fn(|i| h[(perm[i], j)]);
                    is_product_vector(&v, fac, tol)
                })
                .collect();
            if columns.len() > best.0 {
                best = (
                    columns.len(),
                    Some(ProductTriple {
                        row_perm: perm,
                        factorization: fac,
                        columns,
                    }),
                );
            }
        }
    }
    best
}

/// First (lexicographic permutation, 2×3 before 3×2) witness of three simultaneous product columns.
pub fn find_product_triple<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Option<ProductTriple> {
    for perm in permutations6() {
        for fac in Factorization::ALL {
            let columns: Vec<usize> = (0..N)
                .filter(|&j| {
                    let v = Vec6::from_fn(|i| h[(perm[i], j)]);
                    is_product_vector(&v, fac, tol)
                })
                .collect();
            if columns.len() >= 3 {
                return Some(ProductTriple {
                    row_perm: perm,
                    factorization: fac,
                    columns,
                });
            }
        }
    }
    None
}

/// Whether some row permutation and factorization make three columns product vectors.
pub fn product_triple_exists<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> bool {
    find_product_triple(h, tol).is_some()
}

/// Numerical rank of the submatrix at `loc`.
pub fn submatrix_rank<T: Real>(h: &Mat6<T>, loc: &SubmatrixLoc, tol: &Tolerances) -> usize {
    let (p, q) = loc.shape();
    svd::numerical_rank(&loc.extract(h), p, q, tol.rank_tol)
}

/// Numerical rank of an arbitrary row-major block.
pub fn block_rank<T: Real>(entries: &[Complex<T>], rows: usize, cols: usize, tol: &Tolerances) -> usize {
    svd::numerical_rank(entries, rows, cols, tol.rank_tol)
}

/// The 3×2 block `[[1, 1], [1, y], [1, x]]/√6`, row-major.
pub fn lemma_block<T: Real>(y: i8, x: i8) -> [Complex<T>; 6] {
    let s = T::inv_sqrt6();
    let c = |v: f64| Complex::new(T::of(v) * s, T::zero());
    [c(1.0), c(1.0), c(1.0), c(y as f64), c(1.0), c(x as f64)]
}

/// Everything [`analyze`] measures on one matrix.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub label: Option<String>,
    pub is_hadamard: bool,
    pub real_entry_count: usize,
    pub exceeds_bound: bool,
    pub real_3x2_raw: Vec<SubmatrixLoc>,
    pub real_3x2_rephased: Vec<SubmatrixLoc>,
    pub h2_submatrix_count: usize,
    pub h2_reducible_partition: Option<H2Partition>,
    pub unitary_3x3: Vec<SubmatrixLoc>,
    pub product_triple_found: bool,
    pub product_triple: Option<ProductTriple>,
}

/// Report sections selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Full,
    Real,
    H2,
    Product,
}

/// Runs every predicate and collects the results.
pub fn analyze<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> AnalysisReport {
    let rc = count_real_entries(h, tol);
    let witness = find_product_triple(h, tol);
    AnalysisReport {
        label: h.label.clone(),
        is_hadamard: crate::linalg::is_hadamard(h, tol),
        real_entry_count: rc.count,
        exceeds_bound: rc.exceeds_bound,
        real_3x2_raw: find_real_submatrices(h, 3, 2, tol).expect("valid shape"),
        real_3x2_rephased: find_real_submatrices_up_to_rephasing(h, 3, 2, tol).expect("valid shape"),
        h2_submatrix_count: count_h2_submatrices(h, tol),
        h2_reducible_partition: is_h2_reducible(h, tol),
        unitary_3x3: find_unitary_submatrices(h, 3, tol).expect("valid k"),
        product_triple_found: witness.is_some(),
        product_triple: witness,
    }
}
