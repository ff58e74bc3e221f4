use super::QuasiProbGrid;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// A probability density sampled on an x-axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPdf {
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
}

impl SampledPdf {
    /// Trapezoid mass.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.xs, &self.density)
    }

    pub fn mean(&self) -> f64 {
        let f: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, p)| x * p).collect();
        trapezoid(&self.xs, &f) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let f: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, p)| (x - m).powi(2) * p).collect();
        trapezoid(&self.xs, &f) / self.mass()
    }
}

pub(crate) fn trapezoid(xs: &[f64], f: &[f64]) -> f64 {
    xs.windows(2).zip(f.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Quadrature marginal `p(x; theta)` of a Wigner grid on its native x-axis `x_j = 2 alpha_j`.
pub fn marginal(w: &QuasiProbGrid, theta: f64) -> Result<SampledPdf> {
    let xs: Vec<f64> = w.grid().axis_values().iter().map(|a| 2.0 * a).collect();
    marginal_at(w, theta, &xs)
}

/// `p(x; theta) = int dy W_xy(x cos t - y sin t, x sin t + y cos t)` with `W_xy = W_alpha / 4`,
/// by bilinear interpolation and a midpoint sum over `y` at the grid's x-spacing.
pub fn marginal_at(w: &QuasiProbGrid, theta: f64, xs: &[f64]) -> Result<SampledPdf> {
    if w.ordering().value() != 0.0 {
        return Err(Error::Domain(format!(
            "marginals need the Wigner function (p = 0), got p = {}",
            w.ordering().value()
        )));
    }
    let g = w.grid();
    let ys: Vec<f64> = g.axis_values().iter().map(|a| 2.0 * a).collect();
    let dy = 2.0 * g.spacing();
    let (c, s) = (theta.cos(), theta.sin());
    let density = xs
        .iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let (xr, yr) = (x * c - y * s, x * s + y * c);
                    w.interpolate(C64::new(xr / 2.0, yr / 2.0)) / 4.0
                })
                .sum::<f64>()
                * dy
        })
        .collect();
    Ok(SampledPdf { xs: xs.to_vec(), density })
}
