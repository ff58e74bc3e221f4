use super::*;
use crate::hilbert::{make_coherent, make_fock, make_squeezed_vacuum, make_thermal, Cutoff};
use crate::phase_space::{marginal_at, quasi_prob_fft, OrderingParam, PhaseGrid};
use std::f64::consts::FRAC_PI_2;

fn cut(d: usize) -> Cutoff {
    Cutoff::new(d).unwrap()
}

fn axis(half: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| -half + 2.0 * half * j as f64 / (n - 1) as f64).collect()
}

#[test]
fn hermite_functions_match_polynomial_form() {
    let herm = |n: usize, y: f64| match n {
        0 => 1.0,
        1 => 2.0 * y,
        2 => 4.0 * y * y - 2.0,
        3 => 8.0 * y.powi(3) - 12.0 * y,
        _ => 16.0 * y.powi(4) - 48.0 * y * y + 12.0,
    };
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
    for &x in &[-3.1, -0.4, 0.0, 1.7, 4.2] {
        let psi = hermite_functions(x, 5);
        for n in 0..5 {
            let want = (2.0 * PI).powf(-0.25) / (2f64.powi(n as i32) * fact[n]).sqrt()
                * herm(n, x / 2f64.sqrt())
                * (-x * x / 4.0).exp();
            assert!((psi[n] - want).abs() < 1e-14);
        }
    }
}

#[test]
fn hermite_functions_are_orthonormal_at_high_order() {
    let xs = axis(60.0, 24001);
    let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, 301)).collect();
    assert!(table.iter().flatten().all(|v| v.is_finite()));
    for &(n, m) in &[(0, 0), (5, 5), (300, 300), (299, 300), (3, 7)] {
        let f: Vec<f64> = table.iter().map(|p| p[n] * p[m]).collect();
        let want = if n == m { 1.0 } else { 0.0 };
        assert!((trapezoid(&xs, &f) - want).abs() < 1e-10, "{n} {m}");
    }
}

#[test]
fn canonical_quadrature_moments() {
    let xs = axis(12.0, 2401);
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let p = quadrature_pdf(&vac, 0.3, &xs).unwrap();
    assert!((p.mass() - 1.0).abs() < 1e-9);
    assert!(p.mean().abs() < 1e-12);
    assert!((p.variance() - 1.0).abs() < 1e-9);

    let coh = State::from(make_coherent(C64::new(1.0, 0.0), cut(30)).unwrap());
    let p = quadrature_pdf(&coh, 0.0, &xs).unwrap();
    assert!((p.mean() - 2.0).abs() < 1e-9);
    assert!((p.variance() - 1.0).abs() < 1e-9);

    // phase convention: <x_theta> = 2 Re(alpha e^{-i theta})
    let alpha = C64::new(0.7, -0.9);
    let coh = State::from(make_coherent(alpha, cut(30)).unwrap());
    for th in [0.4, 1.3, 2.9] {
        let p = quadrature_pdf(&coh, th, &xs).unwrap();
        assert!((p.mean() - 2.0 * (alpha * C64::from_polar(1.0, -th)).re).abs() < 1e-9);
    }

    for n in [0.5, 2.0] {
        let th = State::from(make_thermal(n, cut(120)).unwrap());
        let p = quadrature_pdf(&th, 1.0, &axis(20.0, 4001)).unwrap();
        assert!(p.mean().abs() < 1e-10);
        assert!((p.variance() - (2.0 * n + 1.0)).abs() < 1e-8);
    }

    let r: f64 = 0.5;
    let sq = State::from(make_squeezed_vacuum(C64::new(r, 0.0), cut(60)).unwrap());
    let p0 = quadrature_pdf(&sq, 0.0, &xs).unwrap();
    let p1 = quadrature_pdf(&sq, FRAC_PI_2, &xs).unwrap();
    assert!((p0.variance() - (2.0 * r).exp()).abs() < 1e-8);
    assert!((p1.variance() - (-2.0 * r).exp()).abs() < 1e-8);
}

#[test]
fn phase_periodicity_and_parity() {
    let xs = axis(10.0, 401);
    let s = State::from(make_coherent(C64::new(0.6, 0.8), cut(40)).unwrap());
    let mixed = State::from(make_thermal(0.4, cut(60)).unwrap());
    for st in [&s, &mixed] {
        for th in [0.2, 1.1] {
            let a = quadrature_pdf(st, th, &xs).unwrap();
            let b = quadrature_pdf(st, th + 2.0 * PI, &xs).unwrap();
            let c = quadrature_pdf(st, th + PI, &xs).unwrap();
            for j in 0..xs.len() {
                assert!((a.density[j] - b.density[j]).abs() < 1e-12);
                assert!((c.density[j] - a.density[xs.len() - 1 - j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn narrow_axis_is_rejected() {
    let coh = State::from(make_coherent(C64::new(2.0, 0.0), cut(40)).unwrap());
    assert!(matches!(quadrature_pdf(&coh, 0.0, &axis(3.0, 301)), Err(Error::AxisTooSmall { .. })));
    assert!(quadrature_pdf(&coh, 0.0, &[1.0]).is_err());
    assert!(quadrature_pdf(&coh, 0.0, &[1.0, 0.5]).is_err());
}

#[test]
fn pdf_matches_wigner_marginal() {
    let s = State::from(make_squeezed_vacuum(C64::new(0.5, 0.0), cut(60)).unwrap());
    let w = quasi_prob_fft(&s, &PhaseGrid::new(6.0, 256).unwrap(), OrderingParam::WIGNER).unwrap();
    let xs = axis(10.0, 401);
    for th in [0.0, 0.8] {
        let m = marginal_at(&w, th, &xs).unwrap();
        let p = quadrature_pdf(&s, th, &xs).unwrap();
        assert!(p.l1_distance(&m.density).unwrap() < 1e-3);
    }
}

#[test]
fn efficiency_smearing() {
    let xs = axis(16.0, 3201);
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let p = quadrature_pdf(&vac, 0.0, &xs).unwrap();
    assert_eq!(smear_efficiency(&p, 1.0).unwrap(), p);
    let half = smear_efficiency(&p, 0.5).unwrap();
    assert!((half.variance() - 2.0).abs() < 1e-8);
    assert!((half.mass() - p.mass()).abs() < 1e-8);
    assert!((half.efficiency - 0.5).abs() < 1e-15);
    // composing two stages adds the smearing variances
    let twice = smear_efficiency(&half, 0.5).unwrap();
    assert!((twice.variance() - 3.0).abs() < 1e-8);
    assert!((twice.efficiency - 1.0 / 3.0).abs() < 1e-15);

    let r: f64 = 0.5;
    let sq = State::from(make_squeezed_vacuum(C64::new(r, 0.0), cut(60)).unwrap());
    for (th, var) in [(FRAC_PI_2, (-2.0 * r).exp()), (0.0, (2.0 * r).exp())] {
        let p = quadrature_pdf(&sq, th, &xs).unwrap();
        let s = smear_efficiency(&p, 0.8).unwrap();
        assert!((s.variance() - p.variance() - 0.25).abs() < 1e-6);
        assert!((s.variance() - var - 0.25).abs() < 1e-6);
        assert!((s.mass() - p.mass()).abs() < 1e-8);
        assert!(s.density.iter().all(|&v| v >= 0.0));
    }
    for bad in [0.0, -0.1, 1.2, f64::NAN] {
        assert!(matches!(smear_efficiency(&p, bad), Err(Error::Domain(_))));
    }
}

#[test]
fn detector_moments_with_finite_oscillator() {
    let coh = State::from(make_coherent(C64::new(1.0, 0.0), cut(30)).unwrap());
    let (m, s) = balanced_detector_moments(&coh, 10.0, 0.0).unwrap();
    assert!((m - 2.0).abs() < 1e-10);
    assert!((s - 5.01).abs() < 1e-9);
    let (_, far) = balanced_detector_moments(&coh, 1e6, 0.0).unwrap();
    assert!((far - 5.0).abs() < 1e-9);
    let th = State::from(make_thermal(1.0, cut(60)).unwrap());
    let (m, s) = balanced_detector_moments(&th, 2.0, 0.7).unwrap();
    assert!(m.abs() < 1e-12);
    assert!((s - 3.25).abs() < 1e-9);
    assert!(balanced_detector_moments(&th, 0.0, 0.0).is_err());
}

#[test]
fn sampler_quantiles_follow_the_pdf() {
    let coh = State::from(make_coherent(C64::new(0.5, 0.5), cut(30)).unwrap());
    let s = HomodyneSampler::new(&coh, 0.8).unwrap();
    let xs = axis(12.0, 4001);
    for th in [0.1, 1.4, 2.8] {
        let p = smear_efficiency(&quadrature_pdf(&coh, th, &xs).unwrap(), 0.8).unwrap();
        for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
            let x = s.quantile(th, u);
            assert!((p.cdf(x) - u).abs() < 1e-5, "{th} {u}");
        }
    }
}

#[test]
fn datasets_are_deterministic_and_round_trip() {
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let sched = PhaseSchedule::Uniform { count: 500 };
    let a = sample_homodyne(&vac, &sched, 0.9, 7).unwrap();
    let b = sample_homodyne(&vac, &sched, 0.9, 7).unwrap();
    let c = sample_homodyne(&vac, &sched, 0.9, 8).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_ne!(a.records(), c.records());
    assert_eq!(a.rng_id(), RNG_ID);
    assert!(a.records().iter().all(|&(t, _)| (0.0..PI).contains(&t)));

    let bytes = a.to_bytes();
    let back = HomodyneDataset::read(std::io::Cursor::new(&bytes)).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.to_bytes(), bytes);
    let tagged = a.clone().with_config_digest("feed");
    let back = HomodyneDataset::read(std::io::Cursor::new(tagged.to_bytes())).unwrap();
    assert_eq!(back.config_digest(), Some("feed"));

    let fixed = sample_homodyne(&vac, &PhaseSchedule::Fixed(vec![0.0, 1.0, 3.0]), 1.0, 1).unwrap();
    assert_eq!(fixed.records().iter().map(|r| r.0).collect::<Vec<_>>(), vec![0.0, 1.0, 3.0]);
    assert!(sample_homodyne(&vac, &PhaseSchedule::Fixed(vec![PI]), 1.0, 1).is_err());
    assert!(sample_homodyne(&vac, &PhaseSchedule::Uniform { count: 0 }, 1.0, 1).is_err());
}

#[test]
fn malformed_dataset_files_are_rejected() {
    let good = "# {\"eta\":1.0,\"seed\":1,\"M\":2,\"state_digest\":\"x\",\"rng_id\":\"r\"}\ntheta,x\n0.1,0.5\n0.2,-1\n";
    assert!(HomodyneDataset::read(good.as_bytes()).is_ok());
    let cases = [
        good.replace("\"M\":2", "\"M\":3"),
        good.replace("theta,x", "x,theta"),
        good.replace("0.2,-1", "3.5,-1"),
        good.replace("0.2,-1", "0.2,abc"),
        good.replace("\"eta\":1.0", "\"eta\":1.5"),
        good.replace("\"rng_id\":\"r\"", "\"rng_id\":\"r\",\"extra\":1"),
        good.replacen("# ", "", 1),
    ];
    for bad in cases {
        assert!(matches!(HomodyneDataset::read(bad.as_bytes()), Err(Error::Data(_))), "{bad}");
    }
}

#[test]
fn trace_summary_of_coherent_and_squeezed_runs() {
    let coh = State::from(make_coherent(C64::new(1.0, 0.0), cut(30)).unwrap());
    let ds = sample_homodyne(&coh, &PhaseSchedule::Uniform { count: 20000 }, 1.0, 3).unwrap();
    let sum = trace_summary(&ds, 10).unwrap();
    for b in &sum.bins {
        let mid = 0.5 * (b.theta_lo + b.theta_hi);
        // bins are 18 degrees wide, so the bin mean is 2 cos(mid) times sinc(width/2)
        let w = b.theta_hi - b.theta_lo;
        let want = 2.0 * mid.cos() * (w / 2.0).sin() / (w / 2.0);
        assert!((b.mean - want).abs() < 5.0 * (b.variance / b.count as f64).sqrt() + 1e-3);
    }
    assert!((sum.fit.a - 2.0).abs() < 0.05 && sum.fit.b.abs() < 0.05);
    assert!(sum.max_squeezing_db.abs() < 0.2);

    let r = 1f64.asinh();
    let sq = State::from(make_squeezed_vacuum(C64::new(r, 0.0), cut(100)).unwrap());
    let ds = sample_homodyne(&sq, &PhaseSchedule::Uniform { count: 20000 }, 1.0, 5).unwrap();
    let sum = trace_summary(&ds, 20).unwrap();
    assert!((sum.max_squeezing_db - 10.0 * (2.0 * r).exp().log10()).abs() < 0.4);
    assert!((sum.theta_min_variance - FRAC_PI_2).abs() < 0.05);
}
