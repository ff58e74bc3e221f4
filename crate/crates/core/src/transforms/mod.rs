//! Truncated unitaries: displacement, squeezing, beam splitting, phase shifts.
//!
//! Exponentials are taken on a padded space `D' = D + pad` and cropped back to `D`,
//! so truncation artefacts sit in the discarded rows and columns.

mod factorized;

pub use factorized::{
    beam_splitter_su2, displacement_antinormal, displacement_normal, squeezer_su11, two_mode_squeezer_su11,
};

use crate::error::{Error, Result};
use crate::hilbert::{
    embed, ladder_matrices, suggest_cutoff, tail_probability, Cutoff, DensityMatrix, Ket, Modes, State, StateFamily,
    Subsystem, TAIL_TOL,
};
use crate::linalg::expm_sparse;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Norm defect above which `apply` fails in strict mode.
pub const STRICT_DEFECT: f64 = 1e-6;
/// Column-norm leakage below which a basis column counts as trusted. Heisenberg and
/// unitarity defects on trusted columns are bounded by roughly this value times sqrt(D).
const LEAKAGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Nominal {
    Displacement { alpha: C64 },
    Squeezer { xi: C64 },
    TwoModeSqueezer { xi: C64 },
    BeamSplitter { zeta: C64 },
    PhaseShift { theta: f64 },
}

#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    elems: DMatrix<C64>,
    nominal: Nominal,
    cutoff: Cutoff,
    modes: Modes,
    pad: usize,
}

impl UnitaryMatrix {
    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn nominal(&self) -> Nominal {
        self.nominal
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn construction_pad(&self) -> usize {
        self.pad
    }

    pub fn pad_guard(&self) -> usize {
        self.pad / 2
    }

    /// Per-mode levels below `D - pad_guard`.
    pub fn guarded_dim(&self) -> usize {
        self.cutoff.dim().saturating_sub(self.pad_guard())
    }

    /// Largest `G <= guarded_dim` such that every basis column with all mode
    /// occupations below `G` keeps its norm to within 1e-10 after cropping.
    pub fn trusted_dim(&self) -> usize {
        let d = self.cutoff.dim();
        let leak = |j: usize| 1.0 - self.elems.column(j).norm_squared();
        let mut g = 0;
        while g < self.guarded_dim() {
            let ok = match self.modes {
                Modes::Single => leak(g) <= LEAKAGE_TOL,
                Modes::Two => (0..=g).all(|k| leak(g * d + k) <= LEAKAGE_TOL && leak(k * d + g) <= LEAKAGE_TOL),
            };
            if !ok {
                break;
            }
            g += 1;
        }
        g
    }

    /// `max |(U^dag U - 1)_{ij}|` over trusted indices.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.trusted_dim();
        let idx = self.trusted_indices(g);
        let cols = self.elems.select_columns(&idx);
        let prod = cols.adjoint() * &cols;
        let mut worst: f64 = 0.0;
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(id, 0.0)).norm());
            }
        }
        worst
    }

    fn trusted_indices(&self, g: usize) -> Vec<usize> {
        let d = self.cutoff.dim();
        match self.modes {
            Modes::Single => (0..g).collect(),
            Modes::Two => (0..g).flat_map(|a| (0..g).map(move |b| a * d + b)).collect(),
        }
    }

    /// Worst deviation of the Heisenberg-evolved annihilators `U^dag a U` (and `U^dag b U`)
    /// from their exact linear images, over the trusted subspace.
    pub fn heisenberg_defect(&self) -> f64 {
        self.heisenberg_defect_on(self.trusted_dim())
    }

    /// As [`Self::heisenberg_defect`] on per-mode levels `< g`.
    pub fn heisenberg_defect_on(&self, g: usize) -> f64 {
        let l = ladder_matrices(self.cutoff);
        let (a, adag) = (&l.a, &l.adag);
        let u = &self.elems;
        let pairs: Vec<(DMatrix<C64>, DMatrix<C64>)> = match (self.nominal, self.modes) {
            (Nominal::Displacement { alpha }, _) => {
                vec![(a.clone(), a + DMatrix::<C64>::identity(a.nrows(), a.ncols()).map(|z| z * alpha))]
            }
            (Nominal::Squeezer { xi }, _) => {
                let (mu, nu) = mu_nu(xi);
                vec![(a.clone(), a.map(|z| z * mu) + adag.map(|z| z * nu))]
            }
            (Nominal::PhaseShift { theta }, _) => {
                vec![(a.clone(), a.map(|z| z * C64::from_polar(1.0, -theta)))]
            }
            (Nominal::TwoModeSqueezer { xi }, _) => {
                let (mu, nu) = mu_nu(xi);
                let (aa, ab) = (embed(a, Subsystem::A), embed(a, Subsystem::B));
                let (aad, abd) = (embed(adag, Subsystem::A), embed(adag, Subsystem::B));
                vec![
                    (aa.clone(), aa.map(|z| z * mu) + abd.map(|z| z * nu)),
                    (ab.clone(), ab.map(|z| z * mu) + aad.map(|z| z * nu)),
                ]
            }
            (Nominal::BeamSplitter { zeta }, _) => {
                let (phi, th) = (zeta.norm(), zeta.arg());
                let (aa, ab) = (embed(a, Subsystem::A), embed(a, Subsystem::B));
                let e = C64::from_polar(phi.sin(), th);
                vec![
                    (aa.clone(), aa.map(|z| z * phi.cos()) + ab.map(|z| z * e)),
                    (ab.clone(), ab.map(|z| z * phi.cos()) - aa.map(|z| z * e.conj())),
                ]
            }
        };
        let idx = self.trusted_indices(g);
        let cols = u.select_columns(&idx);
        let mut worst: f64 = 0.0;
        for (op, image) in pairs {
            let evolved = cols.adjoint() * (&op * &cols);
            for (p, &i) in idx.iter().enumerate() {
                for (q, &j) in idx.iter().enumerate() {
                    worst = worst.max((evolved[(p, q)] - image[(i, j)]).norm());
                }
            }
        }
        worst
    }
}

/// `(mu, nu) = (cosh r, e^{i psi} sinh r)` for `xi = r e^{i psi}`.
pub fn mu_nu(xi: C64) -> (f64, C64) {
    let r = xi.norm();
    (r.cosh(), C64::from_polar(r.sinh(), xi.arg()))
}

fn pad_for(param: f64, d: usize) -> usize {
    8usize.max((4.0 * param * (d as f64).sqrt()).ceil() as usize)
}

fn check_family(d: usize, family: StateFamily) -> Result<()> {
    let tail = tail_probability(family, d);
    if tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall { dim: d, tail, tol: TAIL_TOL, suggested: suggest_cutoff(family) });
    }
    Ok(())
}

fn crop_single(full: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    full.view((0, 0), (d, d)).into_owned()
}

fn crop_two(full: &DMatrix<C64>, dp: usize, d: usize) -> DMatrix<C64> {
    let map = |i: usize| (i / d) * dp + i % d;
    DMatrix::from_fn(d * d, d * d, |i, j| full[(map(i), map(j))])
}

fn sq(n: usize) -> f64 {
    (n as f64).sqrt()
}

/// Displacement `exp(alpha a^dag - alpha^* a)`.
pub fn displacement(alpha: C64, cutoff: Cutoff) -> Result<UnitaryMatrix> {
    let d = cutoff.dim();
    check_family(d, StateFamily::Coherent { mean: alpha.norm_sqr() })?;
    let pad = pad_for(alpha.norm(), d);
    let dp = d + pad;
    let mut t = Vec::with_capacity(2 * dp);
    for n in 0..dp - 1 {
        t.push((n + 1, n, alpha * sq(n + 1)));
        t.push((n, n + 1, -alpha.conj() * sq(n + 1)));
    }
    Ok(UnitaryMatrix {
        elems: crop_single(&expm_sparse(dp, &t), d),
        nominal: Nominal::Displacement { alpha },
        cutoff,
        modes: Modes::Single,
        pad,
    })
}

/// Single-mode squeezer `exp[(xi a^dag^2 - xi^* a^2)/2]`.
pub fn squeezer(xi: C64, cutoff: Cutoff) -> Result<UnitaryMatrix> {
    let d = cutoff.dim();
    check_family(d, StateFamily::SqueezedVacuum { r: xi.norm() })?;
    let pad = pad_for(xi.norm(), d);
    let dp = d + pad;
    let mut t = Vec::with_capacity(2 * dp);
    for n in 0..dp - 2 {
        let s = sq((n + 1) * (n + 2)) / 2.0;
        t.push((n + 2, n, xi * s));
        t.push((n, n + 2, -xi.conj() * s));
    }
    Ok(UnitaryMatrix {
        elems: crop_single(&expm_sparse(dp, &t), d),
        nominal: Nominal::Squeezer { xi },
        cutoff,
        modes: Modes::Single,
        pad,
    })
}

/// Two-mode squeezer `exp(xi a^dag b^dag - xi^* a b)`.
pub fn two_mode_squeezer(xi: C64, cutoff: Cutoff) -> Result<UnitaryMatrix> {
    let d = cutoff.dim();
    check_family(d, StateFamily::TwinBeam { r: xi.norm() })?;
    let pad = pad_for(xi.norm(), d);
    let dp = d + pad;
    let idx = |a: usize, b: usize| a * dp + b;
    let mut t = Vec::new();
    for na in 0..dp - 1 {
        for nb in 0..dp - 1 {
            let s = sq((na + 1) * (nb + 1));
            t.push((idx(na + 1, nb + 1), idx(na, nb), xi * s));
            t.push((idx(na, nb), idx(na + 1, nb + 1), -xi.conj() * s));
        }
    }
    Ok(UnitaryMatrix {
        elems: crop_two(&expm_sparse(dp * dp, &t), dp, d),
        nominal: Nominal::TwoModeSqueezer { xi },
        cutoff,
        modes: Modes::Two,
        pad,
    })
}

/// Beam splitter `exp(zeta a^dag b - zeta^* a b^dag)`, `zeta = phi e^{i theta}`.
pub fn beam_splitter(zeta: C64, cutoff: Cutoff) -> Result<UnitaryMatrix> {
    let d = cutoff.dim();
    let pad = pad_for(zeta.norm(), d);
    let dp = d + pad;
    let idx = |a: usize, b: usize| a * dp + b;
    let mut t = Vec::new();
    for na in 0..dp - 1 {
        for nb in 1..dp {
            // a^dag b : (na, nb) -> (na+1, nb-1)
            let s = sq((na + 1) * nb);
            t.push((idx(na + 1, nb - 1), idx(na, nb), zeta * s));
            t.push((idx(na, nb), idx(na + 1, nb - 1), -zeta.conj() * s));
        }
    }
    Ok(UnitaryMatrix {
        elems: crop_two(&expm_sparse(dp * dp, &t), dp, d),
        nominal: Nominal::BeamSplitter { zeta },
        cutoff,
        modes: Modes::Two,
        pad,
    })
}

/// Phase shifter `exp(-i theta n)`; exact on the truncated space.
pub fn phase_shift(theta: f64, cutoff: Cutoff) -> UnitaryMatrix {
    let d = cutoff.dim();
    let diag = DVector::from_fn(d, |n, _| C64::from_polar(1.0, -theta * n as f64));
    UnitaryMatrix {
        elems: DMatrix::from_diagonal(&diag),
        nominal: Nominal::PhaseShift { theta },
        cutoff,
        modes: Modes::Single,
        pad: 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ApplyMode {
    #[default]
    Strict,
    Lenient,
}

/// Result of applying a unitary: the renormalized state and the norm lost to truncation.
#[derive(Clone, Debug)]
pub struct Applied {
    pub state: State,
    pub norm_defect: f64,
}

/// `U|psi>` or `U rho U^dag` in strict mode.
pub fn apply(u: &UnitaryMatrix, state: &State) -> Result<State> {
    apply_with(u, state, ApplyMode::Strict).map(|a| a.state)
}

/// Applies `u`, rescales the output to the input norm and reports the norm defect.
/// In strict mode a defect above 1e-6 is an error.
pub fn apply_with(u: &UnitaryMatrix, state: &State, mode: ApplyMode) -> Result<Applied> {
    if u.modes != state.modes() || u.cutoff != state.cutoff() {
        return Err(Error::DimensionMismatch(format!(
            "unitary on {:?} modes with D={} applied to {:?} state with D={}",
            u.modes,
            u.cutoff.dim(),
            state.modes(),
            state.cutoff().dim()
        )));
    }
    let (out, before, after) = match state {
        State::Pure(k) => {
            let v = &u.elems * k.amps();
            let (b, a) = (k.amps().norm_squared(), v.norm_squared());
            (State::Pure(Ket::from_parts(v.scale((b / a).sqrt()), k.cutoff(), k.modes(), k.tail_deficit())), b, a)
        }
        State::Mixed(d) => {
            let m = &u.elems * d.elems() * u.elems.adjoint();
            let m = (&m + m.adjoint()).scale(0.5);
            let (b, a) = (d.elems().trace().re, m.trace().re);
            (State::Mixed(DensityMatrix::from_parts(m.scale(b / a), d.cutoff(), d.modes(), d.tail_deficit())), b, a)
        }
    };
    let norm_defect = before - after;
    if mode == ApplyMode::Strict && norm_defect.abs() > STRICT_DEFECT {
        return Err(Error::Truncation { defect: norm_defect, limit: STRICT_DEFECT });
    }
    Ok(Applied { state: out, norm_defect })
}
