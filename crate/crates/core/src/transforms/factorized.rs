//! Disentangled (normal-ordered) forms of the unitaries, used as independent oracles.
//!
//! Each factor is a finite power series of a nilpotent truncated operator, so the
//! normal-ordered products have exact matrix elements on the truncated space.

use super::mu_nu;
use crate::hilbert::{embed, ladder_matrices, Cutoff, Subsystem};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

fn exp_nilpotent(x: &DMatrix<C64>) -> DMatrix<C64> {
    let n = x.nrows();
    let zero = C64::new(0.0, 0.0);
    // ladder monomials are very sparse: multiply column by column
    let nonzeros: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| x[(i, j)] != zero)
        .map(|(i, j)| (i, j, x[(i, j)]))
        .collect();
    let mut out = DMatrix::<C64>::identity(n, n);
    let mut term = out.clone();
    for k in 1..=n {
        let mut next = DMatrix::<C64>::zeros(n, n);
        for &(i, j, v) in &nonzeros {
            let f = v / k as f64;
            for r in 0..n {
                next[(r, j)] += term[(r, i)] * f;
            }
        }
        term = next;
        if term.iter().all(|z| *z == zero) {
            break;
        }
        out += &term;
    }
    out
}

fn diag(n: usize, f: impl Fn(usize) -> C64) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| f(i)))
}

/// `e^{-|l|^2/2} e^{l a^dag} e^{-l^* a}`.
pub fn displacement_normal(lambda: C64, cutoff: Cutoff) -> DMatrix<C64> {
    let l = ladder_matrices(cutoff);
    let up = exp_nilpotent(&l.adag.map(|z| z * lambda));
    let down = exp_nilpotent(&l.a.map(|z| -z * lambda.conj()));
    (up * down).scale((-lambda.norm_sqr() / 2.0).exp())
}

/// `e^{|l|^2/2} e^{-l^* a} e^{l a^dag}`; only approximate near the truncation edge.
pub fn displacement_antinormal(lambda: C64, cutoff: Cutoff) -> DMatrix<C64> {
    let l = ladder_matrices(cutoff);
    let up = exp_nilpotent(&l.adag.map(|z| z * lambda));
    let down = exp_nilpotent(&l.a.map(|z| -z * lambda.conj()));
    (down * up).scale((lambda.norm_sqr() / 2.0).exp())
}

/// `exp[(nu/2mu) a^dag^2] mu^{-(n+1/2)} exp[-(nu^*/2mu) a^2]`.
pub fn squeezer_su11(xi: C64, cutoff: Cutoff) -> DMatrix<C64> {
    let (mu, nu) = mu_nu(xi);
    let l = ladder_matrices(cutoff);
    let g = nu / (2.0 * mu);
    let up = exp_nilpotent(&(&l.adag * &l.adag).map(|z| z * g));
    let down = exp_nilpotent(&(&l.a * &l.a).map(|z| -z * g.conj()));
    let mid = diag(cutoff.dim(), |n| C64::new(mu.powf(-(n as f64 + 0.5)), 0.0));
    up * mid * down
}

/// `exp[(nu/mu) a^dag b^dag] mu^{-(n_a+n_b+1)} exp[-(nu^*/mu) a b]`.
pub fn two_mode_squeezer_su11(xi: C64, cutoff: Cutoff) -> DMatrix<C64> {
    let (mu, nu) = mu_nu(xi);
    let d = cutoff.dim();
    let l = ladder_matrices(cutoff);
    let g = nu / mu;
    let ab = embed(&l.a, Subsystem::A) * embed(&l.a, Subsystem::B);
    let abd = embed(&l.adag, Subsystem::A) * embed(&l.adag, Subsystem::B);
    let up = exp_nilpotent(&abd.map(|z| z * g));
    let down = exp_nilpotent(&ab.map(|z| -z * g.conj()));
    let mid = diag(d * d, |i| C64::new(mu.powf(-((i / d + i % d) as f64 + 1.0)), 0.0));
    up * mid * down
}

/// `exp[tau a^dag b] (cos^2 phi)^{-(n_a-n_b)/2} exp[-tau^* a b^dag]`, `tau = e^{i theta} tan phi`.
/// Exact on number blocks with `n_a + n_b < D`.
pub fn beam_splitter_su2(zeta: C64, cutoff: Cutoff) -> DMatrix<C64> {
    let (phi, theta) = (zeta.norm(), zeta.arg());
    let d = cutoff.dim();
    let l = ladder_matrices(cutoff);
    let tau = C64::from_polar(phi.tan(), theta);
    let adb = embed(&l.adag, Subsystem::A) * embed(&l.a, Subsystem::B);
    let abd = embed(&l.a, Subsystem::A) * embed(&l.adag, Subsystem::B);
    let up = exp_nilpotent(&adb.map(|z| z * tau));
    let down = exp_nilpotent(&abd.map(|z| -z * tau.conj()));
    let c2 = phi.cos().powi(2);
    let mid = diag(d * d, |i| {
        let diff = (i / d) as f64 - (i % d) as f64;
        C64::new(c2.powf(-diff / 2.0), 0.0)
    });
    up * mid * down
}
