use super::{Cutoff, DensityMatrix, Ket, Modes, State};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Truncated single-mode ladder operators.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: DMatrix<C64>,
    pub adag: DMatrix<C64>,
    pub n: DMatrix<C64>,
}

impl Ladder {
    /// `x_theta = a e^{-i theta} + a^dag e^{i theta}`.
    pub fn quadrature(&self, theta: f64) -> DMatrix<C64> {
        let ph = C64::from_polar(1.0, theta);
        self.a.map(|z| z * ph.conj()) + self.adag.map(|z| z * ph)
    }
}

pub fn ladder_matrices(cutoff: Cutoff) -> Ladder {
    let d = cutoff.dim();
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let n = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| C64::new(i as f64, 0.0)));
    Ladder { a, adag, n }
}

pub fn quadrature(cutoff: Cutoff, theta: f64) -> DMatrix<C64> {
    ladder_matrices(cutoff).quadrature(theta)
}

/// One factor of a two-mode system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Lifts a single-mode operator onto the two-mode space.
pub fn embed(op: &DMatrix<C64>, which: Subsystem) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(op.nrows(), op.ncols());
    match which {
        Subsystem::A => op.kronecker(&id),
        Subsystem::B => id.kronecker(op),
    }
}

/// `n_a + n_b` on the two-mode space.
pub fn number_total(cutoff: Cutoff) -> DMatrix<C64> {
    let l = ladder_matrices(cutoff);
    embed(&l.n, Subsystem::A) + embed(&l.n, Subsystem::B)
}

/// Tensor product of two single-mode states with equal cutoffs.
pub fn tensor(a: &State, b: &State) -> Result<State> {
    if a.modes() != Modes::Single || b.modes() != Modes::Single {
        return Err(Error::DimensionMismatch("tensor expects two single-mode states".into()));
    }
    if a.cutoff() != b.cutoff() {
        return Err(Error::DimensionMismatch(format!("mixed cutoffs {} and {}", a.cutoff().dim(), b.cutoff().dim())));
    }
    let cutoff = a.cutoff();
    let deficit = 1.0 - (1.0 - a.tail_deficit()) * (1.0 - b.tail_deficit());
    Ok(match (a, b) {
        (State::Pure(x), State::Pure(y)) => {
            State::Pure(Ket::from_parts(x.amps().kronecker(y.amps()), cutoff, Modes::Two, deficit))
        }
        _ => State::Mixed(DensityMatrix::from_parts(a.density().kronecker(&b.density()), cutoff, Modes::Two, deficit)),
    })
}

/// Reduced state of subsystem `keep` (the other mode is traced out).
pub fn partial_trace(state: &State, keep: Subsystem) -> Result<DensityMatrix> {
    if state.modes() != Modes::Two {
        return Err(Error::DimensionMismatch("partial trace needs a two-mode state".into()));
    }
    let d = state.cutoff().dim();
    let mut out = DMatrix::<C64>::zeros(d, d);
    match state {
        State::Pure(k) => {
            // amplitude matrix C[na][nb]
            let c = DMatrix::from_fn(d, d, |i, j| k.amps()[i * d + j]);
            out = match keep {
                Subsystem::A => &c * c.adjoint(),
                Subsystem::B => c.transpose() * c.conjugate(),
            };
        }
        State::Mixed(m) => {
            let e = m.elems();
            for i in 0..d {
                for j in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += match keep {
                            Subsystem::A => e[(i * d + k, j * d + k)],
                            Subsystem::B => e[(k * d + i, k * d + j)],
                        };
                    }
                    out[(i, j)] = acc;
                }
            }
        }
    }
    Ok(DensityMatrix::from_parts(out, state.cutoff(), Modes::Single, state.tail_deficit()))
}
