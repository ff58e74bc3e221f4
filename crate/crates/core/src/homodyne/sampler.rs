use super::{axis_half_width, check_eta, gaussian_smear, harmonics, smearing_variance, HomodyneDataset};
use crate::error::{Error, Result};
use crate::hilbert::{state_digest, State};
use crate::phase_space::single_mode_density;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::PI;

/// Frozen identifier of the random stream: ChaCha20 seeded through `seed_from_u64`.
pub const RNG_ID: &str = "chacha20-rand_chacha-0.9";
/// Points of the inverse-CDF grid.
pub const SAMPLER_GRID_POINTS: usize = 1 << 14;

/// Local-oscillator phases of a homodyne run.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseSchedule {
    /// `count` phases drawn uniformly from `[0, pi)`, one per record.
    Uniform { count: usize },
    /// One record per listed phase, each in `[0, pi)`.
    Fixed(Vec<f64>),
}

impl PhaseSchedule {
    pub fn len(&self) -> usize {
        match self {
            PhaseSchedule::Uniform { count } => *count,
            PhaseSchedule::Fixed(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Inverse-CDF sampler of the efficiency-smeared `p(x; theta)`.
///
/// The cumulative harmonics `C_k(x_j)` are tabulated once; the CDF at a phase is
/// `C_0 + 2 Re sum_k e^{-ik theta} C_k`, inverted by bisection over the grid and
/// linear interpolation inside the bracketing cell.
pub struct HomodyneSampler {
    xs: Vec<f64>,
    // cumulative harmonics, [x][k]
    cum: Vec<Vec<C64>>,
    eta: f64,
    digest: String,
}

impl HomodyneSampler {
    pub fn new(state: &State, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        let rho = single_mode_density(state)?;
        let half = axis_half_width(state, eta)?;
        let n = SAMPLER_GRID_POINTS;
        let dx = 2.0 * half / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|j| -half + j as f64 * dx).collect();
        let mut h = harmonics(&rho, &xs);
        let d = rho.nrows();
        if eta < 1.0 {
            let delta2 = smearing_variance(eta);
            for k in 0..d {
                let col: Vec<C64> = h.iter().map(|row| row[k]).collect();
                for (row, v) in h.iter_mut().zip(gaussian_smear(&col, dx, delta2)) {
                    row[k] = v;
                }
            }
        }
        let mut cum = vec![vec![C64::new(0.0, 0.0); d]; n];
        for j in 1..n {
            for k in 0..d {
                cum[j][k] = cum[j - 1][k] + (h[j - 1][k] + h[j][k]) * (0.5 * dx);
            }
        }
        let mass = cum[n - 1][0].re;
        if 1.0 - state.tail_deficit() - mass > super::AXIS_MASS_TOL {
            return Err(Error::AxisTooSmall { mass, tol: super::AXIS_MASS_TOL });
        }
        Ok(HomodyneSampler { xs, cum, eta, digest: state_digest(state) })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn state_digest(&self) -> &str {
        &self.digest
    }

    fn cdf_at(&self, j: usize, step: C64) -> f64 {
        super::combine_with_step(&self.cum[j], step)
    }

    /// Quantile of the smeared `p(x; theta)` at probability level `u` in `[0, 1)`.
    pub fn quantile(&self, theta: f64, u: f64) -> f64 {
        let step = C64::from_polar(1.0, -theta);
        let n = self.xs.len();
        let total = self.cdf_at(n - 1, step);
        let target = u * total;
        let (mut lo, mut hi) = (0usize, n - 1);
        let (mut flo, mut fhi) = (0.0, total);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let f = self.cdf_at(mid, step);
            if f <= target {
                lo = mid;
                flo = f;
            } else {
                hi = mid;
                fhi = f;
            }
        }
        let t = if fhi > flo { ((target - flo) / (fhi - flo)).clamp(0.0, 1.0) } else { 0.5 };
        self.xs[lo] + t * (self.xs[hi] - self.xs[lo])
    }

    /// Draws one record per scheduled phase from a ChaCha20 stream seeded with `seed`.
    /// Uniform schedules draw the phase and then the outcome from the same stream.
    pub fn sample(&self, schedule: &PhaseSchedule, seed: u64) -> Result<HomodyneDataset> {
        if schedule.is_empty() {
            return Err(Error::Precondition("a homodyne run needs at least one record".into()));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut records = Vec::with_capacity(schedule.len());
        match schedule {
            PhaseSchedule::Uniform { count } => {
                for _ in 0..*count {
                    let theta = PI * rng.random::<f64>();
                    let x = self.quantile(theta, rng.random::<f64>());
                    records.push((theta, x));
                }
            }
            PhaseSchedule::Fixed(thetas) => {
                for &theta in thetas {
                    if !(0.0..PI).contains(&theta) {
                        return Err(Error::Domain(format!("phase {theta} outside [0, pi)")));
                    }
                    let x = self.quantile(theta, rng.random::<f64>());
                    records.push((theta, x));
                }
            }
        }
        HomodyneDataset::new(records, self.eta, seed, self.digest.clone())
    }
}

/// Builds a sampler for `state` and draws `schedule` with `seed`.
pub fn sample_homodyne(state: &State, schedule: &PhaseSchedule, eta: f64, seed: u64) -> Result<HomodyneDataset> {
    HomodyneSampler::new(state, eta)?.sample(schedule, seed)
}
