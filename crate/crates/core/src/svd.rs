//! Singular values of small dense complex matrices (one-sided Jacobi).

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

/// Singular values of the row-major `rows × cols` matrix `a`, in descending order.
///
/// Returns `min(rows, cols)` values.
pub fn singular_values<T: Real>(a: &[Complex<T>], rows: usize, cols: usize) -> Vec<T> {
    assert_eq!(a.len(), rows * cols, "shape mismatch");
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // Orthogonalize the shorter side: columns of A, or of A† when A is wide.
    let (m, n) = if cols <= rows { (rows, cols) } else { (cols, rows) };
    let mut work: Vec<Vec<Complex<T>>> = (0..n)
        .map(|k| {
            (0..m)
                .map(|i| {
                    if cols <= rows {
                        a[i * cols + k]
                    } else {
                        a[k * cols + i].conj()
                    }
                })
                .collect()
        })
        .collect();

    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&work[p], &work[q]);
                    let alpha = cp.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let beta = cq.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let gamma = cp
                        .iter()
                        .zip(cq.iter())
                        .fold(Complex::<T>::zero(), |s, (x, y)| s + x.conj() * y);
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = work[p][i];
                    let y = work[q][i] * phase.conj();
                    work[p][i] = x * c - y * s;
                    work[q][i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = work
        .iter()
        .map(|c| c.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    sv
}

/// Numerical rank: number of singular values above `rank_tol · σ_max` (0 for the zero matrix).
pub fn numerical_rank<T: Real>(a: &[Complex<T>], rows: usize, cols: usize, rank_tol: f64) -> usize {
    let sv = singular_values(a, rows, cols);
    let Some(&top) = sv.first() else { return 0 };
    if top == T::zero() {
        return 0;
    }
    let cutoff = T::of(rank_tol) * top;
    sv.iter().filter(|&&s| s > cutoff).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<C> {
        (0..rows * cols)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn matches_nalgebra_on_random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for rows in 1..=6 {
            for cols in 1..=6 {
                for _ in 0..5 {
                    let a = random(&mut rng, rows, cols);
                    let ours = singular_values(&a, rows, cols);
                    let m = DMatrix::from_row_slice(rows, cols, &a);
                    let mut theirs: Vec<f64> = m.singular_values().iter().copied().collect();
                    theirs.sort_by(|x, y| y.partial_cmp(x).unwrap());
                    assert_eq!(ours.len(), theirs.len());
                    for (x, y) in ours.iter().zip(&theirs) {
                        assert!((x - y).abs() < 1e-12, "{rows}x{cols}: {ours:?} vs {theirs:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = [C::new(1.0, 0.5), C::new(-0.3, 2.0)];
        let v = [C::new(0.2, -1.0), C::new(1.0, 1.0), C::new(0.0, 3.0)];
        let a: Vec<C> = u.iter().flat_map(|x| v.iter().map(move |y| x * y)).collect();
        assert_eq!(numerical_rank(&a, 2, 3, 1e-9), 1);
        let tall: Vec<C> = v.iter().flat_map(|y| u.iter().map(move |x| x * y)).collect();
        assert_eq!(numerical_rank(&tall, 3, 2, 1e-9), 1);
        let sv = singular_values(&a, 2, 3);
        assert!(sv[1] < 1e-14 * sv[0]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = vec![C::new(0.0, 0.0); 6];
        assert_eq!(numerical_rank(&a, 3, 2, 1e-9), 0);
    }

    #[test]
    fn works_in_f32() {
        let a: Vec<Complex<f32>> = vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(2.0, 0.0),
        ];
        let sv = singular_values(&a, 2, 2);
        assert!((sv[0] - 2.0).abs() < 1e-6 && (sv[1] - 1.0).abs() < 1e-6);
    }
}
