use super::elements::displacement_elements;
use super::{CharGrid, QuasiProbGrid};
use crate::error::{Error, Result};
use crate::hilbert::{Cutoff, DensityMatrix, Modes};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default bound on `|chi|` along the grid edge for a Glauber reconstruction.
pub const GLAUBER_BOUNDARY_TOL: f64 = 1e-2;

/// `rho = (1/pi) sum chi(lambda) D(-lambda) dlambda^2` with the default boundary tolerance.
pub fn glauber_reconstruct(chi: &CharGrid, cutoff: Cutoff) -> Result<DensityMatrix> {
    glauber_reconstruct_with(chi, cutoff, GLAUBER_BOUNDARY_TOL)
}

/// Glauber reconstruction requiring `max |chi|` on the grid edge to be at most `boundary_tol`.
/// The result is Hermitized; its trace defect is recorded as the tail deficit.
pub fn glauber_reconstruct_with(chi: &CharGrid, cutoff: Cutoff, boundary_tol: f64) -> Result<DensityMatrix> {
    let g = chi.grid();
    let n = g.points();
    let p = chi.ordering().value();
    let sym = |k: usize, l: usize| {
        let lam = g.point(k, l);
        chi.values()[(k, l)] * (-p * lam.norm_sqr() / 2.0).exp()
    };
    let edge = (0..n)
        .flat_map(|i| [(0, i), (n - 1, i), (i, 0), (i, n - 1)])
        .map(|(k, l)| sym(k, l).norm())
        .fold(0.0, f64::max);
    if edge > boundary_tol {
        return Err(Error::GridTooSmall(format!(
            "|chi| reaches {edge:.3e} on the grid boundary (tolerance {boundary_tol:.1e}); enlarge the lambda-grid"
        )));
    }
    let d = cutoff.dim();
    let w = g.spacing().powi(2) / PI;
    let rho = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = DMatrix::<C64>::zeros(d, d);
            for l in 0..n {
                let c = sym(k, l);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let disp = displacement_elements(-g.point(k, l), d, d);
                acc += disp * (c * w);
            }
            acc
        })
        .reduce(|| DMatrix::zeros(d, d), |a, b| a + b);
    let rho = (&rho + rho.adjoint()).scale(0.5);
    let deficit = 1.0 - rho.trace().re;
    Ok(DensityMatrix::from_parts(rho, cutoff, Modes::Single, deficit))
}

/// Operand of the characteristic-function trace rule.
#[derive(Clone, Copy, Debug)]
pub enum CharOperand<'a> {
    Samples(&'a CharGrid),
    /// The identity operator, whose characteristic function is `pi delta^2(lambda)`.
    Identity,
}

/// `Tr[A B] = (1/pi) sum chi_A(lambda) chi_B(-lambda) dlambda^2`. The orderings must sum to zero.
pub fn trace_rule_char(a: CharOperand<'_>, b: CharOperand<'_>) -> Result<C64> {
    match (a, b) {
        (CharOperand::Identity, CharOperand::Identity) => {
            Err(Error::Domain("trace of the identity is infinite".into()))
        }
        (CharOperand::Samples(x), CharOperand::Identity) | (CharOperand::Identity, CharOperand::Samples(x)) => {
            let n = x.grid().points();
            Ok(x.values()[(n / 2, n / 2)])
        }
        (CharOperand::Samples(x), CharOperand::Samples(y)) => {
            if !x.grid().same_as(y.grid()) {
                return Err(Error::DimensionMismatch("trace rule on different lambda-grids".into()));
            }
            if (x.ordering().value() + y.ordering().value()).abs() > 1e-15 {
                return Err(Error::Domain("trace rule needs orderings p and -p".into()));
            }
            let n = x.grid().points();
            let mut acc = C64::new(0.0, 0.0);
            // index k maps to -lambda at N - k; k = 0 has no partner on the grid
            for k in 1..n {
                for l in 1..n {
                    acc += x.values()[(k, l)] * y.values()[(n - k, n - l)];
                }
            }
            Ok(acc * x.grid().spacing().powi(2) / PI)
        }
    }
}

/// `Tr[A B] = pi sum W_A W_B dalpha^2` for two Wigner grids.
pub fn trace_rule_wigner(a: &QuasiProbGrid, b: &QuasiProbGrid) -> Result<f64> {
    if !a.grid().same_as(b.grid()) {
        return Err(Error::DimensionMismatch("trace rule on different grids".into()));
    }
    if a.ordering().value() != 0.0 || b.ordering().value() != 0.0 {
        return Err(Error::Domain("the Wigner trace rule needs p = 0 grids".into()));
    }
    let s: f64 = a.values().iter().zip(b.values().iter()).map(|(x, y)| x * y).sum();
    Ok(PI * s * a.grid().spacing().powi(2))
}
