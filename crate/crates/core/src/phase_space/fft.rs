use super::elements::{single_mode_density, trace_rho_displacement};
use super::{CharGrid, OrderingParam, PhaseGrid, QuasiProbGrid};
use crate::error::{Error, Result};
use crate::hilbert::State;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// `|chi|` below which a radial band counts as decayed.
pub const DECAY_TOL: f64 = 1e-9;
/// `|chi|` above which a positively ordered characteristic function is treated as divergent.
pub const OVERFLOW_GUARD: f64 = 1e6;
/// Radial width of the band that must lie below `DECAY_TOL`.
const DECAY_BAND: f64 = 0.5;
/// For `p > 0`, round-off amplified by `exp(p|lambda|^2/2)` can lift `|chi|` off its true
/// decay before `DECAY_TOL` is reached. A ring minimum below this level followed by growth
/// is accepted as the cut.
pub const NOISE_LIMITED_TOL: f64 = 1e-7;

/// Samples `chi(lambda, p)` at every node of `lambda_grid`.
pub fn sample_char(state: &State, lambda_grid: &PhaseGrid, p: OrderingParam) -> Result<CharGrid> {
    let rho = single_mode_density(state)?;
    let values = char_values(&rho, lambda_grid, p.value(), f64::INFINITY);
    CharGrid::new(values, *lambda_grid, p)
}

fn char_values(rho: &DMatrix<C64>, g: &PhaseGrid, p: f64, radius: f64) -> DMatrix<C64> {
    let n = g.points();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            (0..n)
                .map(|l| {
                    let lam = g.point(k, l);
                    if lam.norm() > radius {
                        C64::new(0.0, 0.0)
                    } else {
                        trace_rho_displacement(rho, lam) * (p * lam.norm_sqr() / 2.0).exp()
                    }
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |k, l| rows[k][l])
}

/// `W(alpha, p)` on `grid` by a discrete 2-D Fourier transform of `chi(lambda, p)` sampled on
/// the conjugate grid. Samples beyond the first radial band where `|chi| < DECAY_TOL` are
/// zeroed. For `p > 0` a characteristic function that never decays, or exceeds
/// `OVERFLOW_GUARD`, means the distribution is singular.
pub fn quasi_prob_fft(state: &State, grid: &PhaseGrid, p: OrderingParam) -> Result<QuasiProbGrid> {
    let rho = single_mode_density(state)?;
    let lg = grid.conjugate();
    let pv = p.value();
    let inscribed = lg.half_width();
    // beyond this radius truncated-state displacement traces are negligible
    let support = 2.0 * (rho.nrows() as f64).sqrt() + 12.0;
    let radius = if pv > 0.0 { inscribed * 2f64.sqrt() } else { support.min(inscribed * 2f64.sqrt()) };
    let mut chi = char_values(&rho, &lg, pv, radius);

    let cut = decay_radius(&chi, &lg, radius.min(inscribed), pv > 0.0);
    let n = grid.points();
    match cut {
        Some(rc) => {
            for k in 0..n {
                for l in 0..n {
                    if lg.point(k, l).norm() >= rc {
                        chi[(k, l)] = C64::new(0.0, 0.0);
                    }
                }
            }
        }
        None if pv > 0.0 => {
            return Err(Error::SingularP(format!(
                "chi(lambda, {pv}) does not decay within |lambda| <= {inscribed:.3}; \
                 the distribution is a derivative-of-delta series, not a function"
            )))
        }
        None => {
            return Err(Error::GridTooSmall(format!(
                "chi(lambda, {pv}) has not decayed below {DECAY_TOL:.0e} within the conjugate \
                 half-width {inscribed:.3}; increase the grid points or decrease the half-width"
            )))
        }
    }
    let peak = chi.iter().map(|z| z.norm()).map(|v| if v.is_nan() { f64::INFINITY } else { v }).fold(0.0, f64::max);
    if pv > 0.0 && peak > OVERFLOW_GUARD {
        return Err(Error::SingularP(format!(
            "max |chi(lambda, {pv})| = {peak:.3e} exceeds the overflow guard {OVERFLOW_GUARD:.0e}"
        )));
    }

    let transformed = shifted_dft2(&chi);
    let scale = (lg.spacing() / PI).powi(2);
    let mut residue: f64 = 0.0;
    let values = DMatrix::from_fn(n, n, |i, j| {
        let z = transformed[(i, j)] * scale;
        residue = residue.max(z.im.abs());
        z.re
    });
    let mut out = QuasiProbGrid::new(values, *grid, p)?;
    out.imag_residue = residue;
    Ok(out)
}

/// Smallest radius from which a band of width `DECAY_BAND` stays below `DECAY_TOL`,
/// searched within `limit`. With `noise_limited`, falls back to the deepest ring minimum
/// when it lies below `NOISE_LIMITED_TOL` and the profile rises after it.
fn decay_radius(chi: &DMatrix<C64>, lg: &PhaseGrid, limit: f64, noise_limited: bool) -> Option<f64> {
    let width = lg.spacing();
    let rings = (limit / width).floor() as usize;
    if rings == 0 {
        return None;
    }
    let mut ring_max = vec![0.0f64; rings + 1];
    let n = lg.points();
    for k in 0..n {
        for l in 0..n {
            let r = lg.point(k, l).norm();
            if r < limit {
                let b = (r / width) as usize;
                // overflowed samples (inf or NaN) never count as decayed
                let v = chi[(k, l)].norm();
                ring_max[b] = ring_max[b].max(if v.is_finite() { v } else { f64::INFINITY });
            }
        }
    }
    let band = (DECAY_BAND / width).ceil() as usize;
    let mut run = 0;
    for b in 0..rings {
        if ring_max[b] < DECAY_TOL {
            run += 1;
            if run >= band {
                return Some((b + 1 - run) as f64 * width);
            }
        } else {
            run = 0;
        }
    }
    if !noise_limited {
        return None;
    }
    let (best, &floor) = ring_max[..rings].iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let rises = ring_max[best + 1..rings].iter().any(|&m| m > 10.0 * floor);
    let fell = ring_max[0] > 1e3 * floor;
    (floor < NOISE_LIMITED_TOL && rises && fell).then(|| (best + 1) as f64 * width)
}

/// `out[jr][ji] = sum_{k,l} x[k][l] exp{2 pi i [(k-c)(ji-c) - (l-c)(jr-c)] / N}`, `c = N/2`.
fn shifted_dft2(x: &DMatrix<C64>) -> DMatrix<C64> {
    let n = x.nrows();
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // rows: k fixed, transform over l
    let mut rows: Vec<Vec<C64>> = (0..n).map(|k| (0..n).map(|l| x[(k, l)] * sign(k + l)).collect()).collect();
    rows.par_iter_mut().for_each(|r| fwd.process(r));
    // columns: jr fixed, transform over k
    let mut cols: Vec<Vec<C64>> = (0..n).map(|jr| (0..n).map(|k| rows[k][jr]).collect()).collect();
    cols.par_iter_mut().for_each(|c| inv.process(c));
    DMatrix::from_fn(n, n, |jr, ji| cols[jr][ji] * sign(jr + ji))
}

/// Converts `W(., p)` to `W(., q)` for `q < p` by convolving with the Gaussian
/// `2/(pi s) exp(-2|alpha - beta|^2 / s)`, `s = p - q`, applied separably.
pub fn ordering_convolution(w: &QuasiProbGrid, q: OrderingParam) -> Result<QuasiProbGrid> {
    let s = w.ordering().value() - q.value();
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "target ordering {} must be below the source ordering {}",
            q.value(),
            w.ordering().value()
        )));
    }
    let g = w.grid();
    let n = g.points();
    let h = g.spacing();
    let raw: Vec<f64> = (0..n).map(|k| (-2.0 * (k as f64 * h).powi(2) / s).exp()).collect();
    let total = raw[0] + 2.0 * raw[1..].iter().sum::<f64>();
    let kernel: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let src = w.values();
    // along the real axis
    let pass1: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| (0..n).map(|k| kernel[i.abs_diff(k)] * src[(k, j)]).sum()).collect())
        .collect();
    // along the imaginary axis
    let pass2: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| (0..n).map(|k| kernel[j.abs_diff(k)] * pass1[i][k]).sum()).collect())
        .collect();
    QuasiProbGrid::new(DMatrix::from_fn(n, n, |i, j| pass2[i][j]), *g, q)
}
