//! Pattern-function estimation of operator averages from homodyne data.
//!
//! Kernels use `x_theta = a e^{-i theta} + a^dag e^{i theta}` and correct for detection
//! efficiency `eta`, so that averaging `R(x_k, theta_k)` over uniformly phased records
//! estimates the ensemble average of the target.


use crate::error::{Error, Result};
use crate::hilbert::{ladder_matrices, State};
use crate::homodyne::HomodyneDataset;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Highest Hermite degree `n + m` accepted for `(a^dag)^n a^m`.
pub const MAX_DEGREE: u32 = 4;
/// Records per leaf of the summation tree.
const CHUNK: usize = 1024;

/// Operator whose average is estimated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// `a`
    A,
    /// `a^2`
    A2,
    /// `x_phi`
    Quadrature(f64),
    /// `x_phi^2`
    QuadratureSq(f64),
    /// `a^dag a`
    Number,
    /// `(a^dag a)^2`
    NumberSq,
    /// `(a^dag)^n a^m`
    Normal { n: u32, m: u32 },
}

impl Target {
    pub fn is_hermitian(&self) -> bool {
        match *self {
            Target::A | Target::A2 => false,
            Target::Normal { n, m } => n == m,
            _ => true,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Target::Normal { n, m } if n + m > MAX_DEGREE => Err(Error::Unsupported(format!(
                "(a^dag)^{n} a^{m} has degree {} above {MAX_DEGREE}; its estimator variance diverges at finite efficiency",
                n + m
            ))),
            Target::Quadrature(p) | Target::QuadratureSq(p) if !p.is_finite() => {
                Err(Error::Unsupported(format!("quadrature phase {p} is not finite")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::A => write!(f, "a"),
            Target::A2 => write!(f, "a2"),
            Target::Quadrature(p) => write!(f, "x:{p}"),
            Target::QuadratureSq(p) => write!(f, "x2:{p}"),
            Target::Number => write!(f, "n"),
            Target::NumberSq => write!(f, "n2"),
            Target::Normal { n, m } => write!(f, "normal:{n},{m}"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    /// Accepts `a`, `a2`, `x:PHI`, `x2:PHI`, `n`, `n2` and `normal:N,M`.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::Unsupported(format!("unknown target '{s}'; expected a, a2, x:PHI, x2:PHI, n, n2 or normal:N,M"));
        let t = match s.trim() {
            "a" => Target::A,
            "a2" => Target::A2,
            "n" => Target::Number,
            "n2" => Target::NumberSq,
            other => {
                if let Some(p) = other.strip_prefix("x2:") {
                    Target::QuadratureSq(p.parse().map_err(|_| bad())?)
                } else if let Some(p) = other.strip_prefix("x:") {
                    Target::Quadrature(p.parse().map_err(|_| bad())?)
                } else if let Some(nm) = other.strip_prefix("normal:") {
                    let (n, m) = nm.split_once(',').ok_or_else(bad)?;
                    Target::Normal { n: n.trim().parse().map_err(|_| bad())?, m: m.trim().parse().map_err(|_| bad())? }
                } else {
                    return Err(bad());
                }
            }
        };
        t.validate()?;
        Ok(t)
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A target paired with the efficiency it corrects for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorKernel {
    target: Target,
    eta: f64,
}

impl EstimatorKernel {
    pub fn new(target: Target, eta: f64) -> Result<Self> {
        target.validate()?;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("efficiency must lie in (0, 1], got {eta}")));
        }
        Ok(EstimatorKernel { target, eta })
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Physicists' Hermite polynomial `H_k(y)`.
fn hermite_poly(k: u32, y: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    if k == 0 {
        return h0;
    }
    for j in 1..k {
        let h2 = 2.0 * y * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `e^{i(m-n) theta} H_{n+m}(sqrt(eta/2) x) / [(2 eta)^{(n+m)/2} C(n+m, n)]`.
pub fn generic_kernel(n: u32, m: u32, eta: f64, x: f64, theta: f64) -> C64 {
    let k = n + m;
    let mag = hermite_poly(k, (eta / 2.0).sqrt() * x) / ((2.0 * eta).powf(k as f64 / 2.0) * binomial(k, n));
    C64::from_polar(mag, (m as f64 - n as f64) * theta)
}

/// `R_eta[target](x, theta)`; the catalogued rows use their closed forms.
pub fn kernel_eval(kernel: &EstimatorKernel, x: f64, theta: f64) -> C64 {
    let eta = kernel.eta;
    let re = |v: f64| C64::new(v, 0.0);
    match kernel.target {
        Target::A => C64::from_polar(x, theta),
        Target::A2 => C64::from_polar(x * x - 1.0 / eta, 2.0 * theta),
        Target::Quadrature(phi) => re(2.0 * x * (theta - phi).cos()),
        Target::QuadratureSq(phi) => re((x * x - 1.0 / eta) * (1.0 + 2.0 * (2.0 * (theta - phi)).cos()) + 1.0),
        Target::Number => re((x * x - 1.0 / eta) / 2.0),
        Target::NumberSq => {
            let x2 = x * x;
            re(x2 * x2 / 6.0 - (2.0 - eta) / (2.0 * eta) * x2 + (1.0 - eta) / (2.0 * eta * eta))
        }
        Target::Normal { n, m } => generic_kernel(n, m, eta, x, theta),
    }
}

/// One row of the kernel table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub target: &'static str,
    pub operator: &'static str,
    pub kernel: &'static str,
}

/// Closed-form kernels, followed by the generic normally ordered form.
pub fn kernel_catalog() -> Vec<CatalogEntry> {
    let e = |target, operator, kernel| CatalogEntry { target, operator, kernel };
    vec![
        e("a", "a", "e^{i theta} x"),
        e("a2", "a^2", "e^{2i theta} (x^2 - 1/eta)"),
        e("x:PHI", "x_phi", "2 x cos(theta - phi)"),
        e("x2:PHI", "x_phi^2", "(x^2 - 1/eta) {1 + 2 cos[2(theta - phi)]} + 1"),
        e("n", "a^dag a", "(x^2 - 1/eta) / 2"),
        e("n2", "(a^dag a)^2", "x^4/6 - (2 - eta)/(2 eta) x^2 + (1 - eta)/(2 eta^2)"),
        e(
            "normal:N,M",
            "(a^dag)^N a^M, N + M <= 4",
            "e^{i(M-N) theta} H_{N+M}(sqrt(eta/2) x) / [(2 eta)^{(N+M)/2} C(N+M, N)]",
        ),
    ]
}

/// Average of `target` in `state`, from normally ordered ladder products so that the
/// truncated operators are exact on the cutoff space.
pub fn exact_expectation(state: &State, target: Target) -> Result<C64> {
    target.validate()?;
    let l = ladder_matrices(state.cutoff());
    let pow =
        |op: &DMatrix<C64>, k: u32| (0..k).fold(DMatrix::<C64>::identity(op.nrows(), op.nrows()), |acc, _| acc * op);
    let normal = |n: u32, m: u32| pow(&l.adag, n) * pow(&l.a, m);
    let id = DMatrix::<C64>::identity(l.a.nrows(), l.a.nrows());
    let op = match target {
        Target::A => normal(0, 1),
        Target::A2 => normal(0, 2),
        Target::Quadrature(phi) => normal(0, 1) * C64::from_polar(1.0, -phi) + normal(1, 0) * C64::from_polar(1.0, phi),
        Target::QuadratureSq(phi) => {
            normal(0, 2) * C64::from_polar(1.0, -2.0 * phi)
                + normal(2, 0) * C64::from_polar(1.0, 2.0 * phi)
                + normal(1, 1) * C64::new(2.0, 0.0)
                + id
        }
        Target::Number => normal(1, 1),
        Target::NumberSq => normal(2, 2) + normal(1, 1),
        Target::Normal { n, m } => normal(n, m),
    };
    state.expectation(&op)
}

/// Sample mean of a kernel over a dataset with 1-sigma errors per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Estimate {
    pub target: Target,
    pub value_re: f64,
    pub value_im: f64,
    /// Standard error of `value_re`.
    pub std_error: f64,
    pub std_error_im: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub eta: f64,
}

impl Estimate {
    pub fn value(&self) -> C64 {
        C64::new(self.value_re, self.value_im)
    }

    /// Distance to `truth` in units of the per-component standard errors (the larger of the two).
    /// A component with zero spread counts as matching when it agrees to round-off.
    pub fn sigmas_from(&self, truth: C64) -> f64 {
        let roundoff = 1e-12 * (1.0 + truth.norm());
        let z = |d: f64, s: f64| {
            if s > 0.0 {
                d.abs() / s
            } else if d.abs() <= roundoff {
                0.0
            } else {
                f64::INFINITY
            }
        };
        z(self.value_re - truth.re, self.std_error).max(z(self.value_im - truth.im, self.std_error_im))
    }
}

/// Sum with a fixed tree: sequential over chunks of `CHUNK`, then pairwise over chunk sums.
/// The result does not depend on the thread count.
fn tree_sum(v: &[f64]) -> f64 {
    let mut level: Vec<f64> = v.par_chunks(CHUNK).map(|c| c.iter().sum()).collect();
    while level.len() > 1 {
        level = level.chunks(2).map(|p| p.iter().sum()).collect();
    }
    level.first().copied().unwrap_or(0.0)
}

fn mean_and_error(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = tree_sum(v) / n;
    let dev: Vec<f64> = v.par_iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (tree_sum(&dev) / (n - 1.0) / n).sqrt())
}

/// `(1/M) sum_k R(x_k, theta_k)` with unbiased-variance standard errors.
pub fn estimate(ds: &HomodyneDataset, kernel: &EstimatorKernel) -> Result<Estimate> {
    if (ds.eta() - kernel.eta).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "kernel efficiency {} differs from the dataset efficiency {}",
            kernel.eta,
            ds.eta()
        )));
    }
    if ds.len() < 2 {
        return Err(Error::InsufficientData(format!("{} record(s); a standard error needs at least 2", ds.len())));
    }
    let vals: Vec<C64> = ds.records().par_iter().map(|&(t, x)| kernel_eval(kernel, x, t)).collect();
    let re: Vec<f64> = vals.iter().map(|z| z.re).collect();
    let im: Vec<f64> = vals.iter().map(|z| z.im).collect();
    let (value_re, std_error) = mean_and_error(&re);
    let (value_im, std_error_im) = mean_and_error(&im);
    Ok(Estimate { target: kernel.target, value_re, value_im, std_error, std_error_im, m: ds.len(), eta: kernel.eta })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceScan {
    pub rows: Vec<Estimate>,
    /// Slope of `log std_error` against `log M` over rows with `M >= SLOPE_MIN_M`;
    /// `None` with fewer than two such rows.
    pub slope: Option<f64>,
}

/// Smallest prefix length entering the convergence slope.
pub const SLOPE_MIN_M: usize = 1000;

/// Estimates on the dataset prefixes listed in `checkpoints`.
pub fn convergence_scan(
    ds: &HomodyneDataset,
    kernel: &EstimatorKernel,
    checkpoints: &[usize],
) -> Result<ConvergenceScan> {
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("checkpoints must be strictly increasing".into()));
    }
    let rows = checkpoints.iter().map(|&m| estimate(&ds.prefix(m)?, kernel)).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.m >= SLOPE_MIN_M && r.std_error > 0.0)
        .map(|r| ((r.m as f64).ln(), r.std_error.ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(ConvergenceScan { rows, slope })
}
