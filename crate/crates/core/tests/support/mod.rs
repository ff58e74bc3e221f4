//! Seeded property checks shared by the `properties` and `acceptance` targets.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use qoptics::hilbert::*;
use qoptics::homodyne::*;
use qoptics::phase_space::*;
use qoptics::photon_stats::*;
use qoptics::tomography::*;
use qoptics::transforms::*;
use std::f64::consts::PI;

fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn cut(d: usize) -> Cutoff {
    Cutoff::new(d).unwrap()
}

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn ok<T>(r: qoptics::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

type Check = fn(u64) -> Result<(), String>;

/// Name and body of every invariant suite.
pub const SUITES: &[(&str, Check)] = &[
    ("hilbert", hilbert_props),
    ("transforms", transform_props),
    ("photon_stats", photon_props),
    ("phase_space", phase_space_props),
    ("homodyne", homodyne_props),
    ("tomography", tomography_props),
];

fn run<S: Strategy>(
    seed: u64,
    cases: u32,
    s: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(seed, cases).run(&s, f).map_err(|e| e.to_string())
}

pub fn hilbert_props(seed: u64) -> Result<(), String> {
    run(seed, 24, complex(2.0), |alpha| {
        let s = State::from(ok(make_coherent(alpha, cut(40)))?);
        let l = ladder_matrices(cut(40));
        prop_assert!((ok(s.expectation(&l.a))? - alpha).norm() < 1e-8);
        let back = ok(state_from_json(&state_to_json(&s, None)))?;
        prop_assert_eq!(state_digest(&back), state_digest(&s));
        Ok(())
    })?;
    run(seed ^ 1, 16, 0.0..2.0f64, |n| {
        let s = State::from(ok(make_thermal(n, cut(80)))?);
        prop_assert!((s.density().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(ok(DensityMatrix::new(s.density(), cut(80), Modes::Single)).is_ok());
        prop_assert!((s.purity() - 1.0 / (2.0 * n + 1.0)).abs() < 1e-9);
        Ok(())
    })?;
    run(seed ^ 2, 8, 0.1..0.6f64, |r| {
        let tb = State::from(ok(make_twin_beam(C64::new(r, 0.0), cut(30)))?);
        let a = ok(partial_trace(&tb, Subsystem::A))?;
        let th = ok(make_thermal(r.sinh().powi(2), cut(30)))?;
        prop_assert!((a.elems() - th.elems()).camax() < 1e-9);
        Ok(())
    })
}

pub fn transform_props(seed: u64) -> Result<(), String> {
    run(seed, 16, complex(1.5), |alpha| {
        let d = cut(40);
        let vac = State::from(ok(make_fock(0, d))?);
        let out = ok(apply(&ok(displacement(alpha, d))?, &vac))?;
        let coh = ok(make_coherent(alpha, d))?;
        prop_assert!(ok(out.fidelity_with(&coh))? > 1.0 - 1e-9);
        Ok(())
    })?;
    run(seed ^ 1, 16, (complex(1.5), 0usize..3, 0usize..3), |(zeta, n, m)| {
        let d = cut(6);
        let inp = ok(tensor(&State::from(ok(make_fock(n, d))?), &State::from(ok(make_fock(m, d))?)))?;
        let out = ok(apply(&ok(beam_splitter(zeta, d))?, &inp))?;
        let total = ok(out.expectation_real(&number_total(d)))?;
        prop_assert!((total - (n + m) as f64).abs() < 1e-10);
        Ok(())
    })?;
    run(seed ^ 2, 16, (complex(1.5), 0.0..2.0 * PI), |(alpha, theta)| {
        let d = cut(40);
        let s = State::from(ok(make_coherent(alpha, d))?);
        let out = ok(apply(&phase_shift(theta, d), &s))?;
        let want = ok(make_coherent(alpha * C64::from_polar(1.0, -theta), d))?;
        prop_assert!(ok(out.fidelity_with(&want))? > 1.0 - 1e-12);
        Ok(())
    })
}

pub fn photon_props(seed: u64) -> Result<(), String> {
    let dist = proptest::collection::vec(0.0..1.0f64, 2..30);
    run(seed, 32, (dist, 0.0..1.0f64, 0.0..2.0f64), |(w, eta, mu)| {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-3);
        let d = ok(PhotonDistribution::new(w.iter().map(|v| v / total).collect(), 0.0))?;
        let lost = ok(bernoulli_loss(&d, eta))?;
        prop_assert!((ok(mgf(&lost, mu))? - ok(mgf(&d, eta * mu))?).abs() < 1e-10);
        prop_assert!((lost.mean() - eta * d.mean()).abs() < 1e-10);
        prop_assert!((lost.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let curve = MgfCurve::from_distribution(&d);
        prop_assert!(curve.eval(0.0) <= 1.0 + 1e-12 && curve.eval(0.5) <= curve.eval(0.0) + 1e-12);
        Ok(())
    })
}

pub fn phase_space_props(seed: u64) -> Result<(), String> {
    run(seed, 24, (complex(1.5), complex(2.5), 0.0..1.0f64), |(alpha, beta, n)| {
        let coh = State::from(ok(make_coherent(alpha, cut(40)))?);
        let w = ok(wigner_direct(&coh, beta, 0.0))?;
        prop_assert!((w - 2.0 / PI * (-2.0 * (beta - alpha).norm_sqr()).exp()).abs() < 1e-9);
        let th = State::from(ok(make_thermal(n, cut(80)))?);
        let q = ok(q_function(&th, beta))?;
        prop_assert!(q >= 0.0);
        prop_assert!((q - (-beta.norm_sqr() / (n + 1.0)).exp() / (PI * (n + 1.0))).abs() < 1e-9);
        let chi = ok(char_fn(&th, alpha, 0.0))?;
        prop_assert!((chi.re - (-(1.0 + 2.0 * n) * alpha.norm_sqr() / 2.0).exp()).abs() < 1e-9);
        Ok(())
    })
}

pub fn homodyne_props(seed: u64) -> Result<(), String> {
    let xs: Vec<f64> = (0..801).map(|j| -20.0 + 0.05 * j as f64).collect();
    run(seed, 16, (complex(1.5), 0.0..PI, 0.3..1.0f64), |(alpha, theta, eta)| {
        let s = State::from(ok(make_coherent(alpha, cut(40)))?);
        let p = ok(quadrature_pdf(&s, theta, &xs))?;
        let q = ok(quadrature_pdf(&s, theta + 2.0 * PI, &xs))?;
        let r = ok(quadrature_pdf(&s, theta + PI, &xs))?;
        for j in 0..xs.len() {
            prop_assert!((p.density[j] - q.density[j]).abs() < 1e-12);
            prop_assert!((r.density[j] - p.density[xs.len() - 1 - j]).abs() < 1e-12);
        }
        let sm = ok(smear_efficiency(&p, eta))?;
        prop_assert!((sm.mass() - p.mass()).abs() < 1e-8);
        prop_assert!((sm.variance() - p.variance() - smearing_variance(eta)).abs() < 1e-6);
        Ok(())
    })?;
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let sampler = HomodyneSampler::new(&vac, 0.9).unwrap();
    run(seed ^ 1, 8, any::<u64>(), |s| {
        let ds = ok(sampler.sample(&PhaseSchedule::Uniform { count: 300 }, s))?;
        let bytes = ds.to_bytes();
        let back = ok(HomodyneDataset::read(bytes.as_slice()))?;
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(ok(sampler.sample(&PhaseSchedule::Uniform { count: 300 }, s))?, ds);
        Ok(())
    })
}

pub fn tomography_props(seed: u64) -> Result<(), String> {
    run(seed, 64, (-6.0..6.0f64, 0.0..PI, 0.2..1.0f64, 0.0..PI), |(x, t, eta, phi)| {
        let g = |n, m| generic_kernel(n, m, eta, x, t);
        let k = |target| ok(EstimatorKernel::new(target, eta)).map(|k| kernel_eval(&k, x, t));
        let tol = 1e-10 * (1.0 + x.powi(4) / (eta * eta));
        prop_assert!((k(Target::Number)? - g(1, 1)).norm() < tol);
        prop_assert!((k(Target::NumberSq)? - g(2, 2) - g(1, 1)).norm() < tol);
        prop_assert!((k(Target::A2)? - g(0, 2)).norm() < tol);
        let e = C64::from_polar(1.0, -phi);
        let quad = g(0, 2) * e * e + g(2, 0) * (e * e).conj() + g(1, 1) * 2.0 + 1.0;
        prop_assert!((k(Target::QuadratureSq(phi))? - quad).norm() < tol);
        // Hermitian targets have real kernels
        let hermitian = k(Target::Normal { n: 2, m: 2 })?;
        prop_assert!(hermitian.im.abs() < tol);
        Ok(())
    })
}
