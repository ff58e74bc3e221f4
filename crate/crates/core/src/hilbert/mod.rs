//! Truncated Fock-space states and operators for one and two bosonic modes.
//!
//! Two-mode vectors use row-major ordering on `(n_a, n_b)`: index `n_a * D + n_b`.

mod entropy;
mod io;
mod ops;
mod tails;

pub use entropy::{excess_entropy, planck_occupation, von_neumann_entropy};
pub use io::{state_digest, state_from_json, state_to_json};
pub use ops::{embed, ladder_matrices, number_total, partial_trace, quadrature, tensor, Ladder, Subsystem};
pub use tails::{suggest_cutoff, tail_probability, StateFamily};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Maximum probability a constructor may discard beyond the cutoff.
pub const TAIL_TOL: f64 = 1e-10;
/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted in a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

/// Number of retained Fock levels per mode, `D >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cutoff(usize);

impl Cutoff {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("cutoff dimension must be >= 2, got {dim}")));
        }
        Ok(Cutoff(dim))
    }

    pub fn dim(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modes {
    Single,
    Two,
}

impl Modes {
    /// Dimension of the Hilbert space for a per-mode cutoff.
    pub fn space_dim(self, cutoff: Cutoff) -> usize {
        match self {
            Modes::Single => cutoff.dim(),
            Modes::Two => cutoff.dim() * cutoff.dim(),
        }
    }
}

/// Pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
    cutoff: Cutoff,
    modes: Modes,
    tail_deficit: f64,
}

impl Ket {
    /// Validates an amplitude vector; its norm deficiency becomes the tail deficit.
    pub fn new(amps: DVector<C64>, cutoff: Cutoff, modes: Modes) -> Result<Self> {
        check_len(amps.len(), cutoff, modes)?;
        let deficit = 1.0 - amps.norm_squared();
        if deficit.abs() > TAIL_TOL {
            return Err(Error::Precondition(format!("ket norm deficiency {deficit:.3e} exceeds {TAIL_TOL:.0e}")));
        }
        Ok(Ket { amps, cutoff, modes, tail_deficit: deficit.max(0.0) })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amps: DVector<C64>, cutoff: Cutoff, modes: Modes) -> Result<Self> {
        check_len(amps.len(), cutoff, modes)?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Ket { amps: amps.unscale(norm), cutoff, modes, tail_deficit: 0.0 })
    }

    pub(crate) fn from_parts(amps: DVector<C64>, cutoff: Cutoff, modes: Modes, tail_deficit: f64) -> Self {
        Ket { amps, cutoff, modes, tail_deficit }
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dimensions {} and {}",
                self.amps.len(),
                other.amps.len()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            elems: &self.amps * self.amps.adjoint(),
            cutoff: self.cutoff,
            modes: self.modes,
            tail_deficit: self.tail_deficit,
        }
    }
}

/// Mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    elems: DMatrix<C64>,
    cutoff: Cutoff,
    modes: Modes,
    tail_deficit: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace.
    pub fn new(elems: DMatrix<C64>, cutoff: Cutoff, modes: Modes) -> Result<Self> {
        let n = modes.space_dim(cutoff);
        if elems.nrows() != n || elems.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, expected {n}x{n}",
                elems.nrows(),
                elems.ncols()
            )));
        }
        let herm = crate::linalg::max_abs(&(&elems - elems.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::Precondition(format!("matrix is not Hermitian (defect {herm:.3e})")));
        }
        let eig = nalgebra::SymmetricEigen::new(elems.clone());
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::Precondition(format!("matrix has eigenvalue {min:.3e} < 0")));
        }
        let deficit = 1.0 - elems.trace().re;
        if deficit.abs() > TAIL_TOL {
            return Err(Error::Precondition(format!("trace deficiency {deficit:.3e} exceeds {TAIL_TOL:.0e}")));
        }
        Ok(DensityMatrix { elems, cutoff, modes, tail_deficit: deficit.max(0.0) })
    }

    pub(crate) fn from_parts(elems: DMatrix<C64>, cutoff: Cutoff, modes: Modes, tail_deficit: f64) -> Self {
        DensityMatrix { elems, cutoff, modes, tail_deficit }
    }

    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }
}

/// A state in either representation.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl From<Ket> for State {
    fn from(k: Ket) -> Self {
        State::Pure(k)
    }
}

impl From<DensityMatrix> for State {
    fn from(d: DensityMatrix) -> Self {
        State::Mixed(d)
    }
}

impl State {
    pub fn cutoff(&self) -> Cutoff {
        match self {
            State::Pure(k) => k.cutoff,
            State::Mixed(d) => d.cutoff,
        }
    }

    pub fn modes(&self) -> Modes {
        match self {
            State::Pure(k) => k.modes,
            State::Mixed(d) => d.modes,
        }
    }

    pub fn tail_deficit(&self) -> f64 {
        match self {
            State::Pure(k) => k.tail_deficit,
            State::Mixed(d) => d.tail_deficit,
        }
    }

    pub fn space_dim(&self) -> usize {
        self.modes().space_dim(self.cutoff())
    }

    /// Density matrix elements (computed for pure states).
    pub fn density(&self) -> DMatrix<C64> {
        match self {
            State::Pure(k) => &k.amps * k.amps.adjoint(),
            State::Mixed(d) => d.elems.clone(),
        }
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        match self {
            State::Pure(k) => k.to_density(),
            State::Mixed(d) => d.clone(),
        }
    }

    /// `Tr[rho A]`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        let n = self.space_dim();
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state space has dimension {n}",
                op.nrows(),
                op.ncols()
            )));
        }
        Ok(match self {
            State::Pure(k) => k.amps.dotc(&(op * &k.amps)),
            State::Mixed(d) => {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += d.elems[(i, j)] * op[(j, i)];
                    }
                }
                acc
            }
        })
    }

    /// Expectation of a Hermitian operator; fails if the imaginary part exceeds 1e-10.
    pub fn expectation_real(&self, op: &DMatrix<C64>) -> Result<f64> {
        let v = self.expectation(op)?;
        if v.im.abs() > 1e-10 {
            return Err(Error::Precondition(format!(
                "expectation has imaginary part {:.3e}; operator is not Hermitian",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// `<A^2> - <A>^2` for a Hermitian operator.
    pub fn variance(&self, op: &DMatrix<C64>) -> Result<f64> {
        let m1 = self.expectation_real(op)?;
        let m2 = self.expectation_real(&(op * op))?;
        Ok(m2 - m1 * m1)
    }

    pub fn purity(&self) -> f64 {
        match self {
            State::Pure(k) => k.amps.norm_squared().powi(2),
            State::Mixed(d) => {
                let e = &d.elems;
                e.iter().map(|z| z.norm_sqr()).sum()
            }
        }
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, psi: &Ket) -> Result<f64> {
        let proj = psi.amps.clone();
        let n = self.space_dim();
        if proj.len() != n {
            return Err(Error::DimensionMismatch(format!("ket dimension {} vs state dimension {n}", proj.len())));
        }
        Ok(match self {
            State::Pure(k) => k.amps.dotc(&proj).norm_sqr(),
            State::Mixed(d) => proj.dotc(&(&d.elems * &proj)).re,
        })
    }
}

fn check_len(len: usize, cutoff: Cutoff, modes: Modes) -> Result<()> {
    let n = modes.space_dim(cutoff);
    if len != n {
        return Err(Error::DimensionMismatch(format!("vector length {len}, expected {n}")));
    }
    Ok(())
}

fn check_tail(dim: usize, family: StateFamily) -> Result<f64> {
    let tail = tail_probability(family, dim);
    if tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall { dim, tail, tol: TAIL_TOL, suggested: suggest_cutoff(family) });
    }
    Ok(tail)
}

/// Fock state `|n>`.
pub fn make_fock(n: usize, cutoff: Cutoff) -> Result<Ket> {
    let d = cutoff.dim();
    if n >= d {
        return Err(Error::CutoffViolation { n, dim: d });
    }
    let mut amps = DVector::zeros(d);
    amps[n] = C64::new(1.0, 0.0);
    Ok(Ket::from_parts(amps, cutoff, Modes::Single, 0.0))
}

/// Coherent state `|alpha>`.
pub fn make_coherent(alpha: C64, cutoff: Cutoff) -> Result<Ket> {
    let d = cutoff.dim();
    check_tail(d, StateFamily::Coherent { mean: alpha.norm_sqr() })?;
    let mut amps = DVector::zeros(d);
    amps[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..d {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    let deficit = (1.0 - amps.norm_squared()).max(0.0);
    Ok(Ket::from_parts(amps, cutoff, Modes::Single, deficit))
}

/// Thermal state with mean photon number `n_th`.
pub fn make_thermal(n_th: f64, cutoff: Cutoff) -> Result<DensityMatrix> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::Domain(format!("thermal mean photon number must be >= 0, got {n_th}")));
    }
    let d = cutoff.dim();
    check_tail(d, StateFamily::Thermal { mean: n_th })?;
    let mut elems = DMatrix::zeros(d, d);
    let ratio = n_th / (1.0 + n_th);
    let mut p = 1.0 / (1.0 + n_th);
    let mut total = 0.0;
    for n in 0..d {
        elems[(n, n)] = C64::new(p, 0.0);
        total += p;
        p *= ratio;
    }
    Ok(DensityMatrix::from_parts(elems, cutoff, Modes::Single, (1.0 - total).max(0.0)))
}

/// Squeezed vacuum `S(xi)|0>` with `xi = r e^{i psi}`.
pub fn make_squeezed_vacuum(xi: C64, cutoff: Cutoff) -> Result<Ket> {
    let d = cutoff.dim();
    let r = xi.norm();
    check_tail(d, StateFamily::SqueezedVacuum { r })?;
    let mu = r.cosh();
    let nu = C64::from_polar(r.sinh(), xi.arg());
    let step = nu / (2.0 * mu);
    let mut amps = DVector::zeros(d);
    let mut c = C64::new(mu.powf(-0.5), 0.0);
    amps[0] = c;
    let mut n = 1usize;
    while 2 * n < d {
        let k = 2 * n;
        c = c * step * ((k * (k - 1)) as f64).sqrt() / n as f64;
        amps[k] = c;
        n += 1;
    }
    let deficit = (1.0 - amps.norm_squared()).max(0.0);
    Ok(Ket::from_parts(amps, cutoff, Modes::Single, deficit))
}

/// Twin-beam state `sqrt(1-|l|^2) sum_n l^n |n>|n>`, `l = e^{i psi} tanh r`.
pub fn make_twin_beam(xi: C64, cutoff: Cutoff) -> Result<Ket> {
    let d = cutoff.dim();
    let r = xi.norm();
    check_tail(d, StateFamily::TwinBeam { r })?;
    let lam = C64::from_polar(r.tanh(), xi.arg());
    let mut amps = DVector::zeros(d * d);
    let mut c = C64::new((1.0 - lam.norm_sqr()).sqrt(), 0.0);
    for n in 0..d {
        amps[n * d + n] = c;
        c *= lam;
    }
    let deficit = (1.0 - amps.norm_squared()).max(0.0);
    Ok(Ket::from_parts(amps, cutoff, Modes::Two, deficit))
}
