//! Hadamard equivalence: permutations and rephasings with an audit trail,
//! dephasing, and normalization into the real-3×2 "lemma form".

use num_complex::Complex;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{cis, is_real_entry, is_zero_entry, Mat6, Tolerances, N};
use crate::scalar::Real;

/// `diag(row_phases) · P_row · H · P_col · diag(col_phases)`.
///
/// Entry-wise: `out[i][j] = row_phases[i] · H[row_perm[i]][col_perm[j]] · col_phases[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRecord<T: Real> {
    pub row_perm: [usize; N],
    pub col_perm: [usize; N],
    pub row_phases: [Complex<T>; N],
    pub col_phases: [Complex<T>; N],
}

impl<T: Real> Default for TransformRecord<T> {
    fn default() -> Self {
        Self::identity()
    }
}

fn is_permutation(p: &[usize; N]) -> bool {
    let mut seen = [false; N];
    p.iter().all(|&k| k < N && !std::mem::replace(&mut seen[k], true))
}

fn unit<T: Real>(z: Complex<T>) -> Complex<T> {
    let n = z.norm();
    if n == T::zero() {
        Complex::one()
    } else {
        z / n
    }
}

impl<T: Real> TransformRecord<T> {
    pub fn identity() -> Self {
        Self {
            row_perm: std::array::from_fn(|i| i),
            col_perm: std::array::from_fn(|i| i),
            row_phases: [Complex::one(); N],
            col_phases: [Complex::one(); N],
        }
    }

    pub fn permutation(row_perm: [usize; N], col_perm: [usize; N]) -> Self {
        Self {
            row_perm,
            col_perm,
            ..Self::identity()
        }
    }

    pub fn rephasing(row_phases: [Complex<T>; N], col_phases: [Complex<T>; N]) -> Self {
        Self {
            row_phases,
            col_phases,
            ..Self::identity()
        }
    }

    /// Checks that both permutations are bijections and all phases are unimodular.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if !is_permutation(&self.row_perm) || !is_permutation(&self.col_perm) {
            return Err(Error::InvalidInput("record holds an invalid permutation".into()));
        }
        let eq = T::of(tol.eq_tol);
        let bad = self
            .row_phases
            .iter()
            .chain(self.col_phases.iter())
            .any(|z| (z.norm() - T::one()).abs() >= eq);
        if bad {
            return Err(Error::InvalidInput("record holds a non-unimodular phase".into()));
        }
        Ok(())
    }

    /// The record equivalent to applying `self` and then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            row_perm: std::array::from_fn(|i| self.row_perm[next.row_perm[i]]),
            col_perm: std::array::from_fn(|j| self.col_perm[next.col_perm[j]]),
            row_phases: std::array::from_fn(|i| next.row_phases[i] * self.row_phases[next.row_perm[i]]),
            col_phases: std::array::from_fn(|j| next.col_phases[j] * self.col_phases[next.col_perm[j]]),
        }
    }

    /// Uniformly random permutations and phases.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut row_perm: [usize; N] = std::array::from_fn(|i| i);
        let mut col_perm: [usize; N] = std::array::from_fn(|i| i);
        row_perm.shuffle(rng);
        col_perm.shuffle(rng);
        let tau = std::f64::consts::TAU;
        let mut phase = || cis(T::of(rng.gen_range(0.0..tau)));
        let row_phases = std::array::from_fn(|_| phase());
        let col_phases = std::array::from_fn(|_| phase());
        Self {
            row_perm,
            col_perm,
            row_phases,
            col_phases,
        }
    }

    pub fn is_pure_permutation(&self) -> bool {
        self.row_phases
            .iter()
            .chain(self.col_phases.iter())
            .all(|z| *z == Complex::one())
    }
}

/// Applies `r` to `h`. Entry moduli are unchanged for unimodular phases.
pub fn apply<T: Real>(h: &Mat6<T>, r: &TransformRecord<T>) -> Mat6<T> {
    let mut out = Mat6::from_fn(|i, j| {
        r.row_phases[i] * h[(r.row_perm[i], r.col_perm[j])] * r.col_phases[j]
    });
    out.label = h.label.clone();
    out
}

/// Rephasing that makes the first row and column of `h` equal to `|h_ij|`.
fn dephasing_record<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Result<TransformRecord<T>> {
    for k in 0..N {
        if is_zero_entry(h[(k, 0)], tol) || is_zero_entry(h[(0, k)], tol) {
            return Err(Error::InvalidInput(
                "zero entry in the first row or column; cannot dephase".into(),
            ));
        }
    }
    let row_phases: [Complex<T>; N] = std::array::from_fn(|i| unit(h[(i, 0)].conj()));
    let col_phases = std::array::from_fn(|j| unit((row_phases[0] * h[(0, j)]).conj()));
    Ok(TransformRecord::rephasing(row_phases, col_phases))
}

/// Dephases `h`: first row and first column become real positive.
///
/// For a Hadamard input they equal `1/√6` within `eq_tol`.
pub fn dephase<T: Real>(h: &Mat6<T>) -> Result<(Mat6<T>, TransformRecord<T>)> {
    dephase_with(h, &Tolerances::default())
}

/// [`dephase`] with an explicit zero-entry tolerance.
pub fn dephase_with<T: Real>(
    h: &Mat6<T>,
    tol: &Tolerances,
) -> Result<(Mat6<T>, TransformRecord<T>)> {
    let rec = dephasing_record(h, tol)?;
    Ok((apply(h, &rec), rec))
}

/// Whether the first row and column are within `eq_tol` of `1/√6`.
pub fn is_dephased<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> bool {
    let target = Complex::new(T::inv_sqrt6(), T::zero());
    let eq = T::of(tol.eq_tol);
    (0..N).all(|k| (h[(0, k)] - target).norm() < eq && (h[(k, 0)] - target).norm() < eq)
}

/// Normalized shape with a dephased matrix whose upper-left 3×2 block is
/// real: `[[1, 1], [1, y], [1, x]]/√6` with `y, x ∈ {±1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaForm<T: Real> {
    pub matrix: Mat6<T>,
    pub y: i8,
    pub x: i8,
    /// The `s` in the column-2 tail `(−1, s, −s)/√6`; `None` for the rank-one block.
    pub s: Option<Complex<T>>,
    pub record: TransformRecord<T>,
    /// Set when only the rank-one block `(y, x) = (1, 1)` is reachable.
    pub rank_one: bool,
    /// 0-based source columns placed at positions 1 and 2.
    pub source_cols: [usize; 2],
    /// 0-based source rows placed at positions 1, 2, 3.
    pub source_rows: [usize; 3],
}

impl<T: Real> LemmaForm<T> {
    /// Checks every structural claim of the form against `source`.
    pub fn check(&self, source: &Mat6<T>, tol: &Tolerances) -> std::result::Result<(), String> {
        let eq = T::of(tol.eq_tol);
        let m = &self.matrix;
        let replay = apply(source, &self.record);
        if replay.max_abs_diff(m) >= eq {
            return Err("record does not replay".into());
        }
        if !is_dephased(m, tol) {
            return Err("matrix is not dephased".into());
        }
        let s6 = T::sqrt6();
        let want = |z: Complex<T>, v: f64| (z * s6 - Complex::new(T::of(v), T::zero())).norm() < eq;
        if !(want(m[(1, 1)], self.y as f64) && want(m[(2, 1)], self.x as f64)) {
            return Err("upper-left block does not match (y, x)".into());
        }
        if self.rank_one != (self.y == 1 && self.x == 1) {
            return Err("rank-one flag inconsistent with (y, x)".into());
        }
        if !self.rank_one && (self.y, self.x) != (1, -1) {
            return Err("non-rank-one form not normalized to (1, -1)".into());
        }
        if let Some(s) = self.s {
            if (s.norm() - T::one()).abs() >= eq {
                return Err("s is not unimodular".into());
            }
            let tail = [m[(3, 1)] * s6, m[(4, 1)] * s6, m[(5, 1)] * s6];
            let ok = (tail[0] + Complex::one()).norm() < eq
                && (tail[1] - s).norm() < eq
                && (tail[2] + s).norm() < eq;
            if !ok {
                return Err("column-2 tail is not (-1, s, -s)".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cols: [usize; 2],
    rows: [usize; 3],
    y: i8,
    x: i8,
}

impl Candidate {
    fn key(&self) -> ([usize; 2], [usize; 3]) {
        (self.cols, self.rows)
    }
}

/// Sign of a unimodular `z` known to be real: `+1` or `−1`.
fn real_sign<T: Real>(z: Complex<T>) -> i8 {
    if z.re >= T::zero() {
        1
    } else {
        -1
    }
}

/// Every (ordered column pair, ordered row triple) whose dephased 3×2 block is real.
fn lemma_candidates<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Vec<Candidate> {
    let mut out = Vec::new();
    for c1 in 0..N {
        for c2 in 0..N {
            if c1 == c2 {
                continue;
            }
            // Column-2 entries after dephasing against column c1, per row.
            let ratio: [Option<Complex<T>>; N] = std::array::from_fn(|r| {
                let (p, q) = (h[(r, c1)], h[(r, c2)]);
                (!is_zero_entry(p, tol) && !is_zero_entry(q, tol)).then(|| unit(q / p))
            });
            for r1 in 0..N {
                let Some(base) = ratio[r1] else { continue };
                // y/x on the unimodular scale; realness test as for entries scaled by 1/√6.
                let rel = |r: usize| ratio[r].map(|z| z / base);
                let real = |z: Complex<T>| is_real_entry(z / T::sqrt6(), tol);
                for r2 in 0..N {
                    if r2 == r1 {
                        continue;
                    }
                    let Some(yv) = rel(r2).filter(|z| real(*z)) else { continue };
                    for r3 in 0..N {
                        if r3 == r1 || r3 == r2 {
                            continue;
                        }
                        let Some(xv) = rel(r3).filter(|z| real(*z)) else { continue };
                        out.push(Candidate {
                            cols: [c1, c2],
                            rows: [r1, r2, r3],
                            y: real_sign(yv),
                            x: real_sign(xv),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Searches for an equivalent dephased matrix whose upper-left 3×2 block is
/// real.
///
/// Every ordered column pair and ordered row triple is tried (dephasing
/// against the chosen first row and column fixes all phases). Among blocks
/// that are not rank one, which after reordering rows always reach
/// `(y, x) = (1, −1)`, the lexicographically smallest `(cols, rows)` wins.
/// If only rank-one blocks exist the smallest one is returned with
/// `rank_one` set. The remaining rows are ordered so that the column-2
/// tail reads `(−1, s, −s)`.
pub fn to_lemma_form<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Option<LemmaForm<T>> {
    let cands = lemma_candidates(h, tol);
    let pick = cands
        .iter()
        .filter(|c| (c.y, c.x) == (1, -1))
        .min_by_key(|c| c.key())
        .or_else(|| {
            cands
                .iter()
                .filter(|c| (c.y, c.x) == (1, 1))
                .min_by_key(|c| c.key())
        })
        .copied()?;

    let [c1, c2] = pick.cols;
    let [r1, r2, r3] = pick.rows;
    let rank_one = (pick.y, pick.x) == (1, 1);

    let base = unit(h[(r1, c2)] / h[(r1, c1)]);
    let tail_value = |r: usize| unit(h[(r, c2)] / h[(r, c1)]) / base;
    let mut rest: Vec<usize> = (0..N).filter(|r| !pick.rows.contains(r)).collect();
    if let Some(pos) = rest
        .iter()
        .position(|&r| (tail_value(r) + Complex::one()).norm() < T::of(tol.eq_tol))
    {
        let r = rest.remove(pos);
        rest.insert(0, r);
    }
    let row_perm = [r1, r2, r3, rest[0], rest[1], rest[2]];
    let mut col_perm = [c1, c2, 0, 0, 0, 0];
    for (slot, c) in (2..N).zip((0..N).filter(|c| *c != c1 && *c != c2)) {
        col_perm[slot] = c;
    }

    let perm = TransformRecord::permutation(row_perm, col_perm);
    let permuted = apply(h, &perm);
    let deph = dephasing_record(&permuted, tol).ok()?;
    let record = perm.then(&deph);
    let matrix = apply(h, &record);
    let s = (!rank_one).then(|| unit(matrix[(4, 1)]));

    let form = LemmaForm {
        matrix,
        y: pick.y,
        x: pick.x,
        s,
        record,
        rank_one,
        source_cols: pick.cols,
        source_rows: pick.rows,
    };
    debug_assert!(
        !crate::linalg::is_hadamard(h, tol) || form.check(h, tol).is_ok(),
        "lemma form invariants: {:?}",
        form.check(h, tol)
    );
    Some(form)
}

/// Equivalence fingerprint: for every pivot `(r, c)`, dephase against row
/// `r` and column `c` and collect the phases of the remaining 25 entries.
///
/// These are the products `h_ij h_rc / (h_ic h_rj)`, so the sorted multiset is
/// invariant under permutations and rephasings. Angles are in `[0, 2π)`.
pub fn dephased_fingerprint<T: Real>(h: &Mat6<T>, tol: &Tolerances) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(N * N * 25);
    for r in 0..N {
        for c in 0..N {
            for i in (0..N).filter(|&i| i != r) {
                for j in (0..N).filter(|&j| j != c) {
                    let z = h[(i, j)] * h[(r, c)] / (h[(i, c)] * h[(r, j)]);
                    let mut a = z.arg().as_f64().rem_euclid(tau);
                    if tau - a < tol.cluster_tol {
                        a = 0.0;
                    }
                    out.push(a);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Whether two matrices have the same fingerprint within `cluster_tol`.
pub fn fingerprints_match<T: Real>(a: &Mat6<T>, b: &Mat6<T>, tol: &Tolerances) -> bool {
    let (fa, fb) = (dephased_fingerprint(a, tol), dephased_fingerprint(b, tol));
    fa.iter().zip(&fb).all(|(x, y)| (x - y).abs() < tol.cluster_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{b6, fourier_f6, m6, s6};
    use crate::linalg::is_hadamard;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_record_is_noop() {
        let f = fourier_f6::<f64>(0.3, 1.1);
        assert_eq!(apply(&f, &TransformRecord::identity()), f);
    }

    #[test]
    fn double_row_swap_is_noop() {
        let f = fourier_f6::<f64>(0.3, 1.1);
        let mut p = [0, 1, 2, 3, 4, 5];
        p.swap(0, 1);
        let r = TransformRecord::permutation(p, [0, 1, 2, 3, 4, 5]);
        assert_eq!(apply(&apply(&f, &r), &r), f);
    }

    #[test]
    fn conj_a_on_column_two_makes_lower_left_real() {
        let t = 2.0 * PI / 3.0;
        let m = m6(t, &tol()).unwrap();
        let mut cols = [C::new(1.0, 0.0); 6];
        cols[1] = C::from_polar(1.0, -t);
        let out = apply(&m, &TransformRecord::rephasing([C::new(1.0, 0.0); 6], cols));
        for r in 2..6 {
            for c in 0..2 {
                assert!(crate::linalg::is_real_entry(out[(r, c)], &tol()), "({r},{c})");
            }
        }
    }

    #[test]
    fn dephase_examples() {
        let f = fourier_f6::<f64>(0.0, 0.0);
        let (d, _) = dephase(&f).unwrap();
        assert!(d.max_abs_diff(&f) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rec = TransformRecord::<f64>::random(&mut rng);
        rec.row_perm = [0, 1, 2, 3, 4, 5];
        rec.col_perm = [0, 1, 2, 3, 4, 5];
        let (d, r) = dephase(&apply(&f, &rec)).unwrap();
        assert!(d.max_abs_diff(&f) < 1e-14);
        assert!(apply(&apply(&f, &rec), &r).max_abs_diff(&d) < 1e-15);

        let m = m6(2.0 * PI / 3.0, &tol()).unwrap();
        let (d, _) = dephase(&m).unwrap();
        assert!(d.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn dephase_rejects_zero_entries() {
        let id = Mat6::<f64>::identity();
        assert!(matches!(dephase(&id), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = b6::<f64>(2.0).unwrap();
        for _ in 0..20 {
            let a = TransformRecord::<f64>::random(&mut rng);
            let b = TransformRecord::<f64>::random(&mut rng);
            let seq = apply(&apply(&h, &a), &b);
            assert!(apply(&h, &a.then(&b)).max_abs_diff(&seq) < 1e-14);
        }
    }

    #[test]
    fn lemma_form_for_m6() {
        let t = 2.0 * PI / 3.0;
        let m = m6(t, &tol()).unwrap();
        let lf = to_lemma_form(&m, &tol()).expect("M6 has a real 3x2 block");
        assert_eq!((lf.y, lf.x), (1, -1));
        assert!(!lf.rank_one);
        assert_eq!(lf.source_cols, [0, 1]);
        assert_eq!(lf.source_rows, [2, 3, 4]);
        let s = lf.s.unwrap();
        assert!((s - C::from_polar(1.0, -t)).norm() < 1e-9);
        lf.check(&m, &tol()).unwrap();
    }

    #[test]
    fn lemma_form_replays_on_fourier() {
        let f = fourier_f6::<f64>(0.0, 0.0);
        if let Some(lf) = to_lemma_form(&f, &tol()) {
            lf.check(&f, &tol()).unwrap();
        }
    }

    /// Brute force over ordered column pairs and row triples, written
    /// independently of the candidate enumeration.
    fn brute_force_has_real_block(h: &Mat6<f64>, eq: f64) -> bool {
        for c1 in 0..6 {
            for c2 in 0..6 {
                for r1 in 0..6 {
                    for r2 in 0..6 {
                        for r3 in 0..6 {
                            let distinct = c1 != c2 && r1 != r2 && r1 != r3 && r2 != r3;
                            if !distinct {
                                continue;
                            }
                            let block = |r: usize| {
                                h[(r, c2)] * h[(r1, c1)] / (h[(r, c1)] * h[(r1, c2)])
                            };
                            if block(r2).im.abs() < eq && block(r3).im.abs() < eq {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn perturbed_fourier_has_no_lemma_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut absent = 0;
        for _ in 0..20 {
            // Perturb inner phases: breaks every collinearity, Hadamard or not.
            let f = fourier_f6::<f64>(0.0, 0.0);
            let mut g = f.clone();
            for i in 1..6 {
                for j in 1..6 {
                    g[(i, j)] *= cis(rng.gen_range(-0.2..0.2));
                }
            }
            let ours = to_lemma_form(&g, &tol()).is_some();
            assert_eq!(ours, brute_force_has_real_block(&g, 1e-9));
            if !ours {
                absent += 1;
            }
        }
        assert!(absent > 0);
    }

    #[test]
    fn s6_and_fourier_are_not_equivalent() {
        let t = tol();
        assert!(!fingerprints_match(&s6::<f64>(), &fourier_f6::<f64>(0.0, 0.0), &t));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = fourier_f6::<f64>(0.0, 0.0);
        let g = apply(&f, &TransformRecord::random(&mut rng));
        assert!(fingerprints_match(&f, &g, &t));
        assert!(is_hadamard(&g, &t));
    }

    #[test]
    fn validate_rejects_bad_records() {
        let mut r = TransformRecord::<f64>::identity();
        r.row_perm = [0, 0, 2, 3, 4, 5];
        assert!(r.validate(&tol()).is_err());
        let mut r = TransformRecord::<f64>::identity();
        r.col_phases[2] = C::new(2.0, 0.0);
        assert!(r.validate(&tol()).is_err());
        assert!(TransformRecord::<f64>::identity().validate(&tol()).is_ok());
    }
}
