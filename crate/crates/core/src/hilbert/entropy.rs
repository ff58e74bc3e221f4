use super::{partial_trace, Modes, State, Subsystem};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

const HBAR: f64 = 1.054_571_817e-34;
const K_B: f64 = 1.380_649e-23;

fn entropy_of(m: &DMatrix<C64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum()
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(state: &State) -> f64 {
    match state {
        State::Pure(_) => 0.0,
        State::Mixed(d) => entropy_of(d.elems()),
    }
}

/// `S(rho_A) + S(rho_B) - S(rho_AB)` for a globally pure two-mode state.
pub fn excess_entropy(state: &State) -> Result<f64> {
    if state.modes() != Modes::Two {
        return Err(Error::DimensionMismatch("excess entropy needs a two-mode state".into()));
    }
    let purity = state.purity();
    if purity < 1.0 - 1e-6 {
        return Err(Error::Precondition(format!("excess entropy requires a pure state (purity {purity:.8})")));
    }
    let sa = von_neumann_entropy(&State::Mixed(partial_trace(state, Subsystem::A)?));
    let sb = von_neumann_entropy(&State::Mixed(partial_trace(state, Subsystem::B)?));
    Ok(sa + sb - von_neumann_entropy(state))
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)`.
pub fn planck_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !(temperature > 0.0) {
        return Err(Error::Domain(format!("need omega > 0 and T > 0, got omega={omega}, T={temperature}")));
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}
