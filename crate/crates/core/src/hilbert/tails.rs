//! Closed-form photon-number tails used to validate and suggest cutoffs.

use super::TAIL_TOL;

/// State families with known photon-number tails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateFamily {
    Fock {
        n: usize,
    },
    Coherent {
        mean: f64,
    },
    Thermal {
        mean: f64,
    },
    SqueezedVacuum {
        r: f64,
    },
    /// Tail of one mode; both modes share it.
    TwinBeam {
        r: f64,
    },
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn poisson_tail(mean: f64, dim: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut term = (-mean + dim as f64 * mean.ln() - ln_factorial(dim)).exp();
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64) > mean && (term < sum * 1e-17 || term < 1e-300) {
            break;
        }
    }
    sum
}

fn squeezed_tail(r: f64, dim: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let t2 = r.tanh().powi(2);
    let n0 = dim.div_ceil(2);
    // p(2n) = (t^2/4)^n (2n)! / (n!)^2 / cosh r
    let mut term = (n0 as f64 * (t2 / 4.0).ln() + ln_factorial(2 * n0) - 2.0 * ln_factorial(n0) - r.cosh().ln()).exp();
    let mut sum = 0.0;
    let mut n = n0;
    loop {
        sum += term;
        term *= t2 * (2 * n + 1) as f64 / (2 * n + 2) as f64;
        n += 1;
        if term < sum * 1e-17 || term < 1e-300 {
            break;
        }
    }
    sum
}

/// Probability discarded by keeping Fock levels `0..dim`.
pub fn tail_probability(family: StateFamily, dim: usize) -> f64 {
    match family {
        StateFamily::Fock { n } => {
            if n < dim {
                0.0
            } else {
                1.0
            }
        }
        StateFamily::Coherent { mean } => poisson_tail(mean, dim),
        StateFamily::Thermal { mean } => (mean / (mean + 1.0)).powi(dim as i32),
        StateFamily::SqueezedVacuum { r } => squeezed_tail(r.abs(), dim),
        StateFamily::TwinBeam { r } => r.abs().tanh().powi(2 * dim as i32),
    }
}

/// Smallest cutoff whose tail is within the constructor tolerance.
pub fn suggest_cutoff(family: StateFamily) -> usize {
    let mut d = 2;
    while tail_probability(family, d) > TAIL_TOL {
        d += 1;
    }
    d
}
