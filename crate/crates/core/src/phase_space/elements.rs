//! Pointwise phase-space functions built from exact Fock-basis displacement elements.

use crate::error::{Error, Result};
use crate::hilbert::{Modes, State};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// `<m|D(lambda)|n>` for `m < rows`, `n < cols`, via
/// `D_{m,0} = e^{-|l|^2/2} l^m / sqrt(m!)` and
/// `D_{m,n} = (sqrt(m) D_{m-1,n-1} - l^* D_{m,n-1}) / sqrt(n)`.
pub fn displacement_elements(lambda: C64, rows: usize, cols: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return out;
    }
    let mut col = first_column(lambda, rows);
    out.set_column(0, &col);
    for n in 1..cols {
        col = next_column(lambda, &col, n);
        out.set_column(n, &col);
    }
    out
}

fn first_column(lambda: C64, rows: usize) -> DVector<C64> {
    let mut col = DVector::zeros(rows);
    col[0] = C64::new((-lambda.norm_sqr() / 2.0).exp(), 0.0);
    for m in 1..rows {
        col[m] = col[m - 1] * lambda / (m as f64).sqrt();
    }
    col
}

fn next_column(lambda: C64, prev: &DVector<C64>, n: usize) -> DVector<C64> {
    let rows = prev.len();
    let lc = lambda.conj();
    let inv = 1.0 / (n as f64).sqrt();
    let mut col = DVector::zeros(rows);
    col[0] = -lc * prev[0] * inv;
    for m in 1..rows {
        col[m] = ((m as f64).sqrt() * prev[m - 1] - lc * prev[m]) * inv;
    }
    col
}

/// `Tr[rho D(lambda)] = sum_{m,n} rho_{nm} D_{mn}`, evaluated column by column.
pub(crate) fn trace_rho_displacement(rho: &DMatrix<C64>, lambda: C64) -> C64 {
    let d = rho.nrows();
    let mut col = first_column(lambda, d);
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..d {
        if n > 0 {
            col = next_column(lambda, &col, n);
        }
        for m in 0..d {
            acc += rho[(n, m)] * col[m];
        }
    }
    acc
}

pub(crate) fn single_mode_density(state: &State) -> Result<DMatrix<C64>> {
    if state.modes() != Modes::Single {
        return Err(Error::Unsupported("phase-space functions of two-mode states".into()));
    }
    Ok(state.density())
}

/// p-ordered characteristic function `Tr[rho D(lambda)] e^{p |lambda|^2 / 2}`.
pub fn char_fn(state: &State, lambda: C64, p: f64) -> Result<C64> {
    let rho = single_mode_density(state)?;
    Ok(trace_rho_displacement(&rho, lambda) * (p * lambda.norm_sqr() / 2.0).exp())
}

/// Gaussian characteristic function of the squeezed vacuum `S(r)|0>` with real `r`,
/// with a flag for the ordering range in which it is unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezedChar {
    pub value: C64,
    pub unbounded: bool,
}

/// `exp[-(e^{-2r} - p) u^2/2 - (e^{2r} - p) v^2/2]` for `lambda = u + i v`.
/// `unbounded` is set when `p > e^{-2r}`.
pub fn char_fn_squeezed_closed_form(r: f64, lambda: C64, p: f64) -> SqueezedChar {
    let (u, v) = (lambda.re, lambda.im);
    let e = (2.0 * r).exp();
    let value = (-(1.0 / e - p) * u * u / 2.0 - (e - p) * v * v / 2.0).exp();
    SqueezedChar { value: C64::new(value, 0.0), unbounded: p > (-2.0 * r.abs()).exp() }
}

/// Quasi-probability `W(alpha, p)` from the displaced-number-state series
/// `2/(pi(1-p)) sum_n s^n <n|D^dag(alpha) rho D(alpha)|n>`, `s = -(1+p)/(1-p)`.
/// For `p = 0` the parity form `(2/pi) Tr[rho D(2 alpha) Pi]` is used.
pub fn wigner_direct(state: &State, alpha: C64, p: f64) -> Result<f64> {
    if !(p < 1.0) || p < -1.0 {
        return Err(Error::Domain(format!("ordering p = {p} outside [-1, 1)")));
    }
    let rho = single_mode_density(state)?;
    if p == 0.0 {
        return Ok(wigner_parity(&rho, alpha));
    }
    let d = rho.nrows();
    let s = -(1.0 + p) / (1.0 - p);
    let spread = (alpha.norm() + (d as f64).sqrt()).powi(2);
    let ln_s = s.abs().ln();
    let mut col = first_column(alpha, d);
    let mut sum = 0.0;
    let mut quiet = 0;
    let max_terms = d + 20_000;
    for n in 0..max_terms {
        if n > 0 {
            col = next_column(alpha, &col, n);
        }
        let q = col.dotc(&(&rho * &col)).re.max(0.0);
        if s == 0.0 {
            sum = q;
            break;
        }
        let term = if q > 0.0 {
            let mag = (n as f64 * ln_s + q.ln()).exp();
            if n % 2 == 1 && s < 0.0 {
                -mag
            } else {
                mag
            }
        } else {
            0.0
        };
        sum += term;
        if n >= d && (n as f64) > spread {
            if term.abs() < 1e-18 {
                quiet += 1;
                if quiet >= 5 {
                    return Ok(2.0 / (std::f64::consts::PI * (1.0 - p)) * sum);
                }
            } else {
                quiet = 0;
            }
        }
        if n + 1 == max_terms {
            return Err(Error::Domain(format!(
                "displaced-number series for p = {p} did not converge at |alpha| = {}",
                alpha.norm()
            )));
        }
    }
    Ok(2.0 / (std::f64::consts::PI * (1.0 - p)) * sum)
}

fn wigner_parity(rho: &DMatrix<C64>, alpha: C64) -> f64 {
    let d = rho.nrows();
    let disp = displacement_elements(2.0 * alpha, d, d);
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..d {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..d {
            acc += sign * rho[(m, n)] * disp[(n, m)];
        }
    }
    2.0 / std::f64::consts::PI * acc.re
}

/// Husimi function `<alpha|rho|alpha> / pi`.
pub fn q_function(state: &State, alpha: C64) -> Result<f64> {
    let rho = single_mode_density(state)?;
    let col = first_column(alpha, rho.nrows());
    Ok(col.dotc(&(&rho * &col)).re.max(0.0) / std::f64::consts::PI)
}
