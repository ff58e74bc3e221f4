//! Quadrature statistics, efficiency smearing, seeded homodyne traces and the
//! finite local-oscillator detector model.

mod dataset;
mod sampler;
mod summary;
#[cfg(test)]
mod tests;

pub use dataset::{DatasetHeader, HomodyneDataset};
pub use sampler::{sample_homodyne, HomodyneSampler, PhaseSchedule, RNG_ID, SAMPLER_GRID_POINTS};
pub use summary::{trace_summary, BinStat, QuadratureFit, TraceSummary};

use crate::error::{Error, Result};
use crate::hilbert::{ladder_matrices, State};
use crate::phase_space::marginal::trapezoid;
use crate::phase_space::single_mode_density;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Largest tolerated mass deficiency of a sampled pdf.
pub const AXIS_MASS_TOL: f64 = 1e-4;

/// `p(x; theta)` sampled on `xs`, after detection with efficiency `efficiency`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraturePdf {
    pub theta: f64,
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
    pub efficiency: f64,
}

impl QuadraturePdf {
    pub fn mass(&self) -> f64 {
        trapezoid(&self.xs, &self.density)
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let f: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, p)| (x - m).powi(2) * p).collect();
        trapezoid(&self.xs, &f) / self.mass()
    }

    fn raw_moment(&self, k: i32) -> f64 {
        let f: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, p)| x.powi(k) * p).collect();
        trapezoid(&self.xs, &f)
    }

    /// Cumulative distribution at `x` by trapezoid integration and linear interpolation.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (xw, pw) in self.xs.windows(2).zip(self.density.windows(2)) {
            if x <= xw[0] {
                break;
            }
            if x < xw[1] {
                let t = (x - xw[0]) / (xw[1] - xw[0]);
                let px = pw[0] + t * (pw[1] - pw[0]);
                return acc + 0.5 * (x - xw[0]) * (pw[0] + px);
            }
            acc += 0.5 * (xw[1] - xw[0]) * (pw[0] + pw[1]);
        }
        acc
    }

    /// Trapezoid L1 distance to `other` sampled on the same axis.
    pub fn l1_distance(&self, other: &[f64]) -> Result<f64> {
        if other.len() != self.xs.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {} samples", other.len(), self.xs.len())));
        }
        let d: Vec<f64> = self.density.iter().zip(other).map(|(a, b)| (a - b).abs()).collect();
        Ok(trapezoid(&self.xs, &d))
    }
}

/// Oscillator eigenfunctions `psi_0..psi_{count-1}` at `x` in the `x = a + a^dag` convention,
/// `psi_n = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x/sqrt2) e^{-x^2/4}`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut psi = vec![0.0; count];
    if count == 0 {
        return psi;
    }
    psi[0] = (2.0 * PI).powf(-0.25) * (-x * x / 4.0).exp();
    if count > 1 {
        psi[1] = x * psi[0];
    }
    for n in 1..count.saturating_sub(1) {
        psi[n + 1] = (x * psi[n] - (n as f64).sqrt() * psi[n - 1]) / ((n + 1) as f64).sqrt();
    }
    psi
}

/// `A_k(x) = sum_n rho_{n+k,n} psi_{n+k}(x) psi_n(x)` for `k = 0..D`, so that
/// `p(x; theta) = A_0 + 2 Re sum_{k>0} e^{-i k theta} A_k`. Indexed `[x][k]`.
pub(crate) fn harmonics(rho: &DMatrix<C64>, xs: &[f64]) -> Vec<Vec<C64>> {
    let d = rho.nrows();
    xs.par_iter()
        .map(|&x| {
            let psi = hermite_functions(x, d);
            (0..d).map(|k| (0..d - k).map(|n| rho[(n + k, n)] * (psi[n + k] * psi[n])).sum()).collect()
        })
        .collect()
}

pub(crate) fn combine_with_step(h: &[C64], step: C64) -> f64 {
    let mut ph = C64::new(1.0, 0.0);
    let mut acc = h[0].re;
    for a in &h[1..] {
        ph *= step;
        acc += 2.0 * (ph * a).re;
    }
    acc
}

/// Exact `p(x; theta)` of a single-mode state on `xs`. Errors if more than
/// `AXIS_MASS_TOL` of the probability falls outside the axis.
pub fn quadrature_pdf(state: &State, theta: f64, xs: &[f64]) -> Result<QuadraturePdf> {
    check_axis(xs)?;
    let rho = single_mode_density(state)?;
    let d = rho.nrows();
    let density: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let psi = hermite_functions(x, d);
            let step = C64::from_polar(1.0, -theta);
            let mut p = 0.0;
            for m in 0..d {
                let mut ph = C64::new(1.0, 0.0);
                // n >= m contributes twice through Hermiticity, n = m once
                let mut row = rho[(m, m)].re * psi[m];
                for n in m + 1..d {
                    ph *= step;
                    row += 2.0 * (rho[(n, m)] * ph).re * psi[n];
                }
                p += row * psi[m];
            }
            p.max(0.0)
        })
        .collect();
    let pdf = QuadraturePdf { theta, xs: xs.to_vec(), density, efficiency: 1.0 };
    check_mass(&pdf, 1.0 - state.tail_deficit())?;
    Ok(pdf)
}

fn check_axis(xs: &[f64]) -> Result<()> {
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("x-axis must have at least two increasing points".into()));
    }
    Ok(())
}

fn check_mass(pdf: &QuadraturePdf, expected: f64) -> Result<()> {
    let mass = pdf.mass();
    if expected - mass > AXIS_MASS_TOL {
        return Err(Error::AxisTooSmall { mass, tol: AXIS_MASS_TOL });
    }
    Ok(())
}

/// Symmetric axis wide enough for every quadrature of `state` at efficiency `eta`:
/// half-width `2|<a>| + 8 sqrt(1 + 2<n> + 2|<a^2>| + (1-eta)/eta)`.
pub fn default_axis(state: &State, eta: f64, points: usize) -> Result<Vec<f64>> {
    check_eta(eta)?;
    let half = axis_half_width(state, eta)?;
    let h = 2.0 * half / (points - 1) as f64;
    Ok((0..points).map(|j| -half + j as f64 * h).collect())
}

pub(crate) fn axis_half_width(state: &State, eta: f64) -> Result<f64> {
    let rho = single_mode_density(state)?;
    let l = ladder_matrices(state.cutoff());
    let tr = |op: &DMatrix<C64>| (&rho * op).trace();
    let a = tr(&l.a).norm();
    let a2 = tr(&(&l.a * &l.a)).norm();
    let n = tr(&l.n).re;
    Ok(2.0 * a + 8.0 * (1.0 + 2.0 * n + 2.0 * a2 + (1.0 - eta) / eta).sqrt())
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("efficiency must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// Efficiency smearing variance `(1 - eta) / eta`.
pub fn smearing_variance(eta: f64) -> f64 {
    (1.0 - eta) / eta
}

/// Convolution of `pdf` with a zero-mean Gaussian of variance `(1 - eta)/eta`, applied as a
/// Fourier multiplier on a zero-padded copy of the uniform x-axis.
pub fn smear_efficiency(pdf: &QuadraturePdf, eta: f64) -> Result<QuadraturePdf> {
    check_eta(eta)?;
    let mut out = pdf.clone();
    if eta == 1.0 {
        return Ok(out);
    }
    let dx = uniform_spacing(&pdf.xs)?;
    let delta2 = smearing_variance(eta);
    let input: Vec<C64> = pdf.density.iter().map(|&p| C64::new(p, 0.0)).collect();
    out.density = gaussian_smear(&input, dx, delta2).iter().map(|z| z.re.max(0.0)).collect();
    let total = 1.0 / pdf.efficiency - 1.0 + delta2;
    out.efficiency = 1.0 / (1.0 + total);
    check_mass(&out, pdf.mass())?;
    Ok(out)
}

pub(crate) fn uniform_spacing(xs: &[f64]) -> Result<f64> {
    check_axis(xs)?;
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if xs.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.max(1.0)) {
        return Err(Error::Precondition("efficiency smearing needs a uniform x-axis".into()));
    }
    Ok(dx)
}

/// Circular convolution with `N(0, delta2)` on a grid padded to at least twice its length.
pub(crate) fn gaussian_smear(values: &[C64], dx: f64, delta2: f64) -> Vec<C64> {
    let n = values.len();
    let p = (2 * n).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); p];
    buf[..n].copy_from_slice(values);
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(p).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let ks = if k <= p / 2 { k as f64 } else { k as f64 - p as f64 };
        let w = 2.0 * PI * ks / (p as f64 * dx);
        *z *= (-delta2 * w * w / 2.0).exp() / p as f64;
    }
    planner.plan_fft_inverse(p).process(&mut buf);
    buf.truncate(n);
    buf
}

/// Balanced detection with a coherent local oscillator of amplitude `z`: the normalized
/// difference current `I` has `<I> = <x_theta>` and `<I^2> = <x_theta^2> + <n>/z^2`.
pub fn balanced_detector_moments(state: &State, z: f64, theta: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("local oscillator amplitude must be positive, got {z}")));
    }
    let rho = single_mode_density(state)?;
    let l = ladder_matrices(state.cutoff());
    let x = l.quadrature(theta);
    let mean = (&rho * &x).trace().re;
    let second = (&rho * &x * &x).trace().re;
    let n = (&rho * &l.n).trace().re;
    Ok((mean, second + n / (z * z)))
}
