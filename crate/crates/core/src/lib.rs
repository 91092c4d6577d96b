//! Verification and search toolkit for order-6 complex Hadamard matrices
//! and mutually unbiased (MU) bases.
//!
//! The matrix layer ([`linalg`], [`equivalence`], [`analysis`], and the
//! closed-form constructors in [`families`]) is generic over the real
//! scalar through [`Real`]. The optimizer-backed parts ([`musearch`],
//! [`refutation`]) and the JSON format in [`io`] work in `f64`.
//!
//! ```
//! use mub6_core::{families, linalg::is_hadamard, Tolerances};
//!
//! let tol = Tolerances::default();
//! let m = families::m6(2.0 * std::f64::consts::PI / 3.0, &tol).unwrap();
//! assert!(is_hadamard(&m, &tol));
//! ```

pub mod analysis;
pub mod equivalence;
pub mod error;
pub mod families;
pub mod io;
pub mod linalg;
pub mod musearch;
pub mod optim;
pub mod refutation;
pub mod scalar;
pub mod svd;

pub use error::{Error, Result};
pub use linalg::{Mat6, Tolerances, Vec6};
pub use scalar::Real;

/// Complex scalar in double precision.
pub type C64 = num_complex::Complex<f64>;

/// 6×6 complex matrix, double precision.
pub type CMat6 = Mat6<f64>;
/// 6×6 complex matrix, single precision.
pub type CMat6f32 = Mat6<f32>;

/// Length-6 complex vector, double precision.
pub type ColVec6 = Vec6<f64>;
/// Length-6 complex vector, single precision.
pub type ColVec6f32 = Vec6<f32>;

pub type TransformRecord = equivalence::TransformRecord<f64>;
pub type LemmaForm = equivalence::LemmaForm<f64>;
