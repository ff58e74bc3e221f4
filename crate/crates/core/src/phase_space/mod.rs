//! Characteristic functions, quasi-probability distributions and their transforms.
//!
//! Phase-space points are `alpha = (x + i y)/2` with `x`, `y` the quadrature eigenvalues;
//! characteristic-function arguments are `lambda = u + i v`.

mod elements;
mod fft;
mod glauber;
mod io;
pub(crate) mod marginal;

pub(crate) use elements::single_mode_density;
pub use elements::{
    char_fn, char_fn_squeezed_closed_form, displacement_elements, q_function, wigner_direct, SqueezedChar,
};
pub use fft::{ordering_convolution, quasi_prob_fft, sample_char, DECAY_TOL, NOISE_LIMITED_TOL, OVERFLOW_GUARD};
pub use glauber::{
    glauber_reconstruct, glauber_reconstruct_with, trace_rule_char, trace_rule_wigner, CharOperand,
    GLAUBER_BOUNDARY_TOL,
};
pub use io::{read_grid_csv, write_grid_csv, GridSidecar};
pub use marginal::{marginal, marginal_at, SampledPdf};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Tolerance on the Riemann-sum normalization of quasi-probability grids.
pub const GRID_TOL: f64 = 1e-4;

/// Ordering parameter `p` in `[-1, 1]`: 1 normal (P), 0 symmetric (Wigner), -1 antinormal (Q).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingParam(f64);

impl OrderingParam {
    pub const P: OrderingParam = OrderingParam(1.0);
    pub const WIGNER: OrderingParam = OrderingParam(0.0);
    pub const Q: OrderingParam = OrderingParam(-1.0);

    pub fn new(p: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("ordering parameter {p} outside [-1, 1]")));
        }
        Ok(OrderingParam(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Square grid of `N x N` points with axis values `(j - N/2) * 2L/N`, so the origin is a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    half_width: f64,
    points: usize,
}

impl PhaseGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain(format!("grid half-width must be positive, got {half_width}")));
        }
        if points < 16 || !points.is_multiple_of(2) {
            return Err(Error::Domain(format!("grid points must be even and >= 16, got {points}")));
        }
        Ok(PhaseGrid { half_width, points })
    }

    /// Grid sized by the rule `L >= 3 + 2 sqrt(<n>)`.
    pub fn for_mean_photons(mean_photons: f64, points: usize) -> Result<Self> {
        PhaseGrid::new(3.0 + 2.0 * mean_photons.max(0.0).sqrt(), points)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn axis(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.spacing()
    }

    pub fn axis_values(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.axis(j)).collect()
    }

    /// Reciprocal grid for the discrete transform: `L' = pi N / (4 L)`, spacing `pi / (2 L)`.
    pub fn conjugate(&self) -> PhaseGrid {
        PhaseGrid { half_width: PI * self.points as f64 / (4.0 * self.half_width), points: self.points }
    }

    /// Point `(i, j)` as a complex number `axis(i) + i axis(j)`.
    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.axis(i), self.axis(j))
    }

    fn same_as(&self, other: &PhaseGrid) -> bool {
        self.points == other.points && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// Quasi-probability samples `W(alpha, p)` indexed `[re index, im index]` (density per `d^2 alpha`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiProbGrid {
    values: DMatrix<f64>,
    grid: PhaseGrid,
    ordering: OrderingParam,
    imag_residue: f64,
}

impl QuasiProbGrid {
    pub fn new(values: DMatrix<f64>, grid: PhaseGrid, ordering: OrderingParam) -> Result<Self> {
        if values.nrows() != grid.points || values.ncols() != grid.points {
            return Err(Error::DimensionMismatch(format!(
                "values are {}x{}, grid has {} points per axis",
                values.nrows(),
                values.ncols(),
                grid.points
            )));
        }
        Ok(QuasiProbGrid { values, grid, ordering, imag_residue: 0.0 })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn ordering(&self) -> OrderingParam {
        self.ordering
    }

    /// Largest discarded imaginary part from the transform.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// Riemann sum `sum W Delta^2`.
    pub fn mass(&self) -> f64 {
        self.values.sum() * self.grid.spacing().powi(2)
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, alpha: C64) -> f64 {
        let n = self.grid.points;
        let h = self.grid.spacing();
        let fr = alpha.re / h + (n / 2) as f64;
        let fi = alpha.im / h + (n / 2) as f64;
        if !(fr >= 0.0 && fi >= 0.0 && fr <= (n - 1) as f64 && fi <= (n - 1) as f64) {
            return 0.0;
        }
        let (i0, j0) = ((fr.floor() as usize).min(n - 2), (fi.floor() as usize).min(n - 2));
        let (tr, ti) = (fr - i0 as f64, fi - j0 as f64);
        let v = &self.values;
        (1.0 - tr) * (1.0 - ti) * v[(i0, j0)]
            + tr * (1.0 - ti) * v[(i0 + 1, j0)]
            + (1.0 - tr) * ti * v[(i0, j0 + 1)]
            + tr * ti * v[(i0 + 1, j0 + 1)]
    }
}

/// Characteristic-function samples on a `lambda`-grid, indexed `[u index, v index]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharGrid {
    values: DMatrix<C64>,
    grid: PhaseGrid,
    ordering: OrderingParam,
}

impl CharGrid {
    pub fn new(values: DMatrix<C64>, grid: PhaseGrid, ordering: OrderingParam) -> Result<Self> {
        if values.nrows() != grid.points || values.ncols() != grid.points {
            return Err(Error::DimensionMismatch("characteristic samples do not match the grid".into()));
        }
        Ok(CharGrid { values, grid, ordering })
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn ordering(&self) -> OrderingParam {
        self.ordering
    }
}

#[cfg(test)]
mod tests;
