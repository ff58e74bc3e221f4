//! Numerical quantum optics in a truncated Fock basis.
//!
//! Conventions used throughout: `x_theta = a e^{-i theta} + a^dag e^{i theta}` (vacuum variance 1),
//! phase-space points `alpha = (x + i y)/2`, conjugate variables `lambda = u + i v`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod error;
pub mod hilbert;
pub mod homodyne;
pub mod linalg;
pub mod phase_space;
pub mod photon_stats;
pub mod tomography;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
