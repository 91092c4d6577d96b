//! Gradient descent with backtracking line search over a fixed number of
//! free angles.

/// Outcome of one descent run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descent<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub iters: usize,
}

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 50;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 10.0;

fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` (returning value and gradient) from `x0`.
///
/// Each iteration moves along the negative gradient. The trial step is the
/// Barzilai–Borwein length from the previous iterate pair (clamped to
/// `[1e-12, 10]`), shrunk until the Armijo condition holds. Stops when the
/// value drops below `target`, the gradient vanishes, the line search
/// fails, or after `max_iters` iterations.
pub fn minimize<const D: usize>(
    f: impl Fn(&[f64; D]) -> (f64, [f64; D]),
    x0: [f64; D],
    max_iters: usize,
    target: f64,
) -> Descent<D> {
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut step = 1e-2;
    let mut iters = 0;
    while iters < max_iters && fx > target {
        let gg = dot(&g, &g);
        if gg == 0.0 || !gg.is_finite() {
            break;
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand: [f64; D] = std::array::from_fn(|k| x[k] - alpha * g[k]);
            let (fc, gc) = f(&cand);
            if fc <= fx - ARMIJO * alpha * gg {
                accepted = Some((cand, fc, gc));
                break;
            }
            alpha *= SHRINK;
        }
        let Some((xn, fxn, gn)) = accepted else { break };
        iters += 1;
        let s: [f64; D] = std::array::from_fn(|k| xn[k] - x[k]);
        let y: [f64; D] = std::array::from_fn(|k| gn[k] - g[k]);
        let sy = dot(&s, &y);
        step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(STEP_MIN, STEP_MAX)
        } else {
            (alpha * 2.0).min(STEP_MAX)
        };
        x = xn;
        fx = fxn;
        g = gn;
    }
    Descent { x, value: fx, iters }
}
