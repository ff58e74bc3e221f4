use super::HomodyneDataset;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;

/// Sample statistics of the records whose phase falls in `[theta_lo, theta_hi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinStat {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub count: usize,
    pub mean: f64,
    /// Unbiased; `NaN` for fewer than two records.
    pub variance: f64,
}

/// Fit of `E[x | theta] = a cos(theta) + b sin(theta)` and
/// `E[x^2 | theta] = c0 + c2 cos(2 theta) + s2 sin(2 theta)` over all records, by least squares
/// reweighted with the Gaussian variances of `x` and `x^2` at each phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureFit {
    pub a: f64,
    pub b: f64,
    pub c0: f64,
    pub c2: f64,
    pub s2: f64,
}

impl QuadratureFit {
    pub fn mean(&self, theta: f64) -> f64 {
        self.a * theta.cos() + self.b * theta.sin()
    }

    pub fn variance(&self, theta: f64) -> f64 {
        self.c0 + self.c2 * (2.0 * theta).cos() + self.s2 * (2.0 * theta).sin() - self.mean(theta).powi(2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub bins: Vec<BinStat>,
    pub fit: QuadratureFit,
    pub theta_min_variance: f64,
    pub min_variance: f64,
    pub max_variance: f64,
    /// `10 log10(1 / min_variance)`, relative to the vacuum variance 1.
    pub max_squeezing_db: f64,
    pub max_antisqueezing_db: f64,
}

const SCAN_POINTS: usize = 7200;
const REWEIGHT_ROUNDS: usize = 3;

/// Per-bin means and variances over `bins` equal phase bins of `[0, pi)`, plus the
/// harmonic fit from which the extreme quadrature variances are read.
pub fn trace_summary(ds: &HomodyneDataset, bins: usize) -> Result<TraceSummary> {
    if bins == 0 {
        return Err(Error::Precondition("need at least one phase bin".into()));
    }
    if ds.len() < 5 {
        return Err(Error::InsufficientData(format!("{} records cannot fit five coefficients", ds.len())));
    }
    let width = PI / bins as f64;
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for &(t, x) in ds.records() {
        groups[((t / width) as usize).min(bins - 1)].push(x);
    }
    let bins: Vec<BinStat> = groups
        .iter()
        .enumerate()
        .map(|(i, xs)| {
            let n = xs.len();
            let mean = if n > 0 { xs.iter().sum::<f64>() / n as f64 } else { f64::NAN };
            let variance =
                if n > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { f64::NAN };
            BinStat { theta_lo: i as f64 * width, theta_hi: (i + 1) as f64 * width, count: n, mean, variance }
        })
        .collect();

    let mut fit = QuadratureFit { a: 0.0, b: 0.0, c0: 1.0, c2: 0.0, s2: 0.0 };
    let mut weighted = false;
    // Gaussian-model reweighting: Var(x) = v, Var(x^2) = 2v^2 + 4 mu^2 v
    for _ in 0..=REWEIGHT_ROUNDS {
        let prev = fit.clone();
        let floor = 1e-3 * (prev.c0 + prev.c2.hypot(prev.s2)).abs().max(1e-12);
        let var = |t: f64| if weighted { prev.variance(t).max(floor) } else { 1.0 };
        let first = least_squares(ds, |t| vec![t.cos(), t.sin()], |x| x, |t| 1.0 / var(t))?;
        let second = least_squares(
            ds,
            |t| vec![1.0, (2.0 * t).cos(), (2.0 * t).sin()],
            |x| x * x,
            |t| {
                let v = var(t);
                1.0 / (2.0 * v * v + 4.0 * prev.mean(t).powi(2) * v)
            },
        )?;
        fit = QuadratureFit { a: first[0], b: first[1], c0: second[0], c2: second[1], s2: second[2] };
        weighted = true;
    }
    let (mut tmin, mut vmin, mut vmax) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..SCAN_POINTS {
        let t = PI * i as f64 / SCAN_POINTS as f64;
        let v = fit.variance(t);
        if v < vmin {
            vmin = v;
            tmin = t;
        }
        vmax = vmax.max(v);
    }
    if !(vmin > 0.0) {
        return Err(Error::UndefinedStatistic(format!("fitted minimum variance {vmin} is not positive")));
    }
    Ok(TraceSummary {
        bins,
        fit,
        theta_min_variance: tmin,
        min_variance: vmin,
        max_variance: vmax,
        max_squeezing_db: -10.0 * vmin.log10(),
        max_antisqueezing_db: 10.0 * vmax.log10(),
    })
}

fn least_squares(
    ds: &HomodyneDataset,
    basis: impl Fn(f64) -> Vec<f64>,
    target: impl Fn(f64) -> f64,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let k = basis(0.0).len();
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for &(t, x) in ds.records() {
        let f = basis(t);
        let y = target(x);
        let w = weight(t);
        for i in 0..k {
            rhs[i] += w * f[i] * y;
            for j in 0..k {
                gram[(i, j)] += w * f[i] * f[j];
            }
        }
    }
    let sol = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InsufficientData("phases do not determine the harmonic fit".into()))?;
    Ok(sol.iter().copied().collect())
}
