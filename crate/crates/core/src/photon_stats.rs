//! Photon-number statistics, moment generating functions and detection loss.

use crate::error::{Error, Result};
use crate::hilbert::{Modes, State};
use std::io::Write;

/// Probabilities above this negativity are treated as roundoff and clamped.
const NEGATIVITY_FLOOR: f64 = -1e-12;
/// Finite-difference step for MGF derivative cross-checks.
pub const MGF_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
    tail_deficit: f64,
}

impl PhotonDistribution {
    pub fn new(probs: Vec<f64>, tail_deficit: f64) -> Result<Self> {
        let mut probs = probs;
        for (n, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < NEGATIVITY_FLOOR {
                return Err(Error::Precondition(format!("p({n}) = {p} is not a probability")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_deficit;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("probabilities plus tail deficit sum to {total}, not 1")));
        }
        Ok(PhotonDistribution { probs, tail_deficit })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    /// `sum_n n^k p(n)`.
    pub fn moment(&self, k: u32) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| (n as f64).powi(k as i32) * p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs.iter().enumerate().map(|(n, p)| (n as f64 - m).powi(2) * p).sum()
    }

    /// `sum_n (1 - mu)^n p(n)` for any real `mu`.
    fn generating(&self, mu: f64) -> f64 {
        let s = 1.0 - mu;
        // Horner from the top
        self.probs.iter().rev().fold(0.0, |acc, p| acc * s + p)
    }

    /// CSV with header `n,p`; values use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,p")?;
        for (n, p) in self.probs.iter().enumerate() {
            writeln!(w, "{n},{p}")?;
        }
        Ok(())
    }
}

/// Diagonal of a single-mode state in the number basis.
pub fn photon_distribution(state: &State) -> Result<PhotonDistribution> {
    if state.modes() != Modes::Single {
        return Err(Error::DimensionMismatch(
            "photon distribution of a two-mode state: take a partial trace first".into(),
        ));
    }
    let probs: Vec<f64> = match state {
        State::Pure(k) => k.amps().iter().map(|z| z.norm_sqr()).collect(),
        State::Mixed(d) => (0..d.elems().nrows()).map(|n| d.elems()[(n, n)].re).collect(),
    };
    let total: f64 = probs.iter().sum();
    PhotonDistribution::new(probs, (1.0 - total).max(0.0))
}

/// `M(mu) = sum_n (1 - mu)^n p(n)`, `0 <= mu <= 2`.
pub fn mgf(dist: &PhotonDistribution, mu: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&mu) {
        return Err(Error::Domain(format!("mgf argument {mu} outside [0, 2]")));
    }
    Ok(dist.generating(mu))
}

/// A moment generating function available as a callable, e.g. a closed form.
pub struct MgfCurve {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MgfCurve {
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MgfCurve { f: Box::new(f) }
    }

    pub fn from_distribution(dist: &PhotonDistribution) -> Self {
        let d = dist.clone();
        MgfCurve::from_fn(move |mu| d.generating(mu))
    }

    pub fn eval(&self, mu: f64) -> f64 {
        (self.f)(mu)
    }

    /// k-th derivative at `mu` by central differences with one Richardson step.
    fn derivative(&self, k: u32, mu: f64) -> f64 {
        let f = |x: f64| self.eval(x);
        let central = |h: f64| -> f64 {
            match k {
                0 => f(mu),
                1 => (f(mu + h) - f(mu - h)) / (2.0 * h),
                2 => (f(mu + h) - 2.0 * f(mu) + f(mu - h)) / (h * h),
                3 => (f(mu + 2.0 * h) - 2.0 * f(mu + h) + 2.0 * f(mu - h) - f(mu - 2.0 * h)) / (2.0 * h.powi(3)),
                4 => (f(mu + 2.0 * h) - 4.0 * f(mu + h) + 6.0 * f(mu) - 4.0 * f(mu - h) + f(mu - 2.0 * h)) / h.powi(4),
                _ => unreachable!(),
            }
        };
        let (coarse, fine) = (central(MGF_STEP), central(MGF_STEP / 2.0));
        (4.0 * fine - coarse) / 3.0
    }
}

fn check_order(m: u32) -> Result<()> {
    if m > 4 {
        return Err(Error::Unsupported(format!("finite-difference derivative of order {m} (maximum 4)")));
    }
    Ok(())
}

/// `<n^m>` from derivatives of the MGF at `mu = 0`:
/// `[(mu-1) d/dmu]^m M = sum_k S(m,k) (-1)^k M^(k)(0)` with Stirling numbers `S(m,k)`.
pub fn mgf_moment(dist: &PhotonDistribution, m: u32) -> Result<f64> {
    check_order(m)?;
    const STIRLING2: [&[f64]; 5] =
        [&[1.0], &[0.0, 1.0], &[0.0, 1.0, 1.0], &[0.0, 1.0, 3.0, 1.0], &[0.0, 1.0, 7.0, 6.0, 1.0]];
    let curve = MgfCurve::from_distribution(dist);
    Ok(STIRLING2[m as usize]
        .iter()
        .enumerate()
        .map(|(k, s)| if *s == 0.0 { 0.0 } else { s * (-1f64).powi(k as i32) * curve.derivative(k as u32, 0.0) })
        .sum())
}

/// `p(n) = (-1)^n / n! d^n M / dmu^n` at `mu = 1`.
pub fn mgf_recover_pn(curve: &MgfCurve, n: u32) -> Result<f64> {
    check_order(n)?;
    let fact: f64 = (1..=n).map(f64::from).product();
    Ok((-1f64).powi(n as i32) / fact * curve.derivative(n, 1.0))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

/// Detected distribution after Bernoulli loss with efficiency `eta`.
pub fn bernoulli_loss(dist: &PhotonDistribution, eta: f64) -> Result<PhotonDistribution> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("efficiency {eta} outside [0, 1]")));
    }
    let p = &dist.probs;
    let d = p.len();
    let mut out = vec![0.0; d];
    if eta == 1.0 {
        out.clone_from(p);
    } else if eta == 0.0 {
        out[0] = p.iter().sum();
    } else {
        let lf = ln_factorials(d);
        let (le, lq) = (eta.ln(), (1.0 - eta).ln());
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = (m..d)
                .map(|l| {
                    let lb = lf[l] - lf[m] - lf[l - m] + m as f64 * le + (l - m) as f64 * lq;
                    lb.exp() * p[l]
                })
                .sum();
        }
    }
    Ok(PhotonDistribution { probs: out, tail_deficit: dist.tail_deficit })
}

fn positive_mean(dist: &PhotonDistribution) -> Result<f64> {
    let m = dist.mean();
    if m <= 1e-15 {
        return Err(Error::UndefinedStatistic("mean photon number is zero (vacuum input)".into()));
    }
    Ok(m)
}

/// Fano factor `Var(n) / <n>`.
pub fn fano(dist: &PhotonDistribution) -> Result<f64> {
    let m = positive_mean(dist)?;
    Ok(dist.variance() / m)
}

/// Mandel parameter `F - 1`.
pub fn mandel_q(dist: &PhotonDistribution) -> Result<f64> {
    Ok(fano(dist)? - 1.0)
}

/// `g2(0) = (<n^2> - <n>) / <n>^2`.
pub fn g2_zero(dist: &PhotonDistribution) -> Result<f64> {
    let m = positive_mean(dist)?;
    Ok((dist.moment(2) - m) / (m * m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    Normal,
    Antinormal,
    Symmetric,
}

/// Ordered powers of the number operator as polynomials in `n`:
/// normal `n`, `n(n-1)`; antinormal `n+1`, `(n+1)(n+2)`; symmetric `n+1/2`, `n^2+n+1/2`.
pub fn ordered_number_expectation(state: &State, ordering: Ordering, power: u32) -> Result<f64> {
    let dist = photon_distribution(state)?;
    let f: fn(f64) -> f64 = match (ordering, power) {
        (Ordering::Normal, 1) => |n| n,
        (Ordering::Normal, 2) => |n| n * (n - 1.0),
        (Ordering::Antinormal, 1) => |n| n + 1.0,
        (Ordering::Antinormal, 2) => |n| (n + 1.0) * (n + 2.0),
        (Ordering::Symmetric, 1) => |n| n + 0.5,
        (Ordering::Symmetric, 2) => |n| n * n + n + 0.5,
        _ => return Err(Error::Unsupported(format!("ordered power {power} (supported: 1, 2)"))),
    };
    Ok(dist.probs.iter().enumerate().map(|(n, p)| f(n as f64) * p).sum())
}

/// Normal-ordered variance `<:n^2:> - <n>^2`.
pub fn normal_ordered_variance(state: &State) -> Result<f64> {
    let n2 = ordered_number_expectation(state, Ordering::Normal, 2)?;
    let n1 = ordered_number_expectation(state, Ordering::Normal, 1)?;
    Ok(n2 - n1 * n1)
}
