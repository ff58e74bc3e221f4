use super::*;
use crate::hilbert::{ladder_matrices, make_coherent, make_fock, make_squeezed_vacuum, make_thermal, Cutoff, State};
use crate::transforms::{apply, displacement, squeezer};
use std::f64::consts::FRAC_PI_2;

fn cut(d: usize) -> Cutoff {
    Cutoff::new(d).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn laguerre(n: usize, x: f64) -> f64 {
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let l2 = ((2 * k + 1) as f64 - x) * l1 / (k + 1) as f64 - k as f64 * l0 / (k + 1) as f64;
        l0 = l1;
        l1 = l2;
    }
    l1
}

fn fock_wigner(n: usize, a: C64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    2.0 * sign / PI * (-2.0 * a.norm_sqr()).exp() * laguerre(n, 4.0 * a.norm_sqr())
}

#[test]
fn displacement_elements_match_padded_exponential() {
    let lam = c(1.1, -0.7);
    let u = displacement(lam, cut(40)).unwrap();
    let e = displacement_elements(lam, 40, 40);
    for i in 0..20 {
        for j in 0..20 {
            assert!((u.elems()[(i, j)] - e[(i, j)]).norm() < 1e-10, "{i} {j}");
        }
    }
}

#[test]
fn char_fn_closed_forms() {
    let vac = State::from(make_fock(0, cut(10)).unwrap());
    let th = State::from(make_thermal(0.8, cut(150)).unwrap());
    for &lam in &[c(0.0, 0.0), c(0.4, 0.2), c(-1.3, 0.9)] {
        for &p in &[-1.0, 0.0, 0.5, 1.0] {
            let want = (-(1.0 - p) * lam.norm_sqr() / 2.0).exp();
            assert!((char_fn(&vac, lam, p).unwrap() - want).norm() < 1e-14);
            let want = (-(1.0 + 1.6 - p) * lam.norm_sqr() / 2.0).exp();
            assert!((char_fn(&th, lam, p).unwrap() - want).norm() < 1e-9);
        }
    }
    let sq = State::from(make_squeezed_vacuum(c(0.3, 0.2), cut(40)).unwrap());
    assert!((char_fn(&sq, c(0.0, 0.0), 0.7).unwrap() - 1.0).norm() < 1e-9);
}

#[test]
fn squeezed_closed_form_matches_trace() {
    let r = 0.5;
    let sq = State::from(make_squeezed_vacuum(c(r, 0.0), cut(80)).unwrap());
    for k in 0..13 {
        for l in 0..13 {
            let lam = c(-3.0 + 0.5 * k as f64, -3.0 + 0.5 * l as f64);
            if lam.norm() > 3.0 {
                continue;
            }
            for p in [-1.0, 0.0, 0.3] {
                let closed = char_fn_squeezed_closed_form(r, lam, p).value;
                let traced = char_fn(&sq, lam, p).unwrap();
                assert!((closed - traced).norm() < 1e-6, "{lam} {p}");
            }
        }
    }
    let flag = |p| char_fn_squeezed_closed_form(r, c(0.0, 0.0), p).unbounded;
    assert!(!flag(0.36));
    assert!(flag(0.37));
    assert!((char_fn_squeezed_closed_form(0.0, c(1.0, 1.0), 0.0).value.re - (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn vacuum_wigner_by_fft() {
    let vac = State::from(make_fock(0, cut(10)).unwrap());
    let g = PhaseGrid::new(4.0, 256).unwrap();
    let w = quasi_prob_fft(&vac, &g, OrderingParam::WIGNER).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..256 {
        for j in 0..256 {
            let a = g.point(i, j);
            worst = worst.max((w.values()[(i, j)] - 2.0 / PI * (-2.0 * a.norm_sqr()).exp()).abs());
        }
    }
    assert!(worst < 1e-6, "{worst}");
    assert!((w.mass() - 1.0).abs() < 1e-10);
    assert!(w.imag_residue() < 1e-9);
    assert!((w.max() - 2.0 / PI).abs() < 1e-9);
}

#[test]
fn fock_wigner_by_fft_matches_laguerre() {
    let g = PhaseGrid::new(4.0, 128).unwrap();
    for n in 0..3 {
        let s = State::from(make_fock(n, cut(8)).unwrap());
        let w = quasi_prob_fft(&s, &g, OrderingParam::WIGNER).unwrap();
        for i in 0..128 {
            for j in 0..128 {
                let want = fock_wigner(n, g.point(i, j));
                assert!((w.values()[(i, j)] - want).abs() < 1e-5, "n={n} {i} {j} {} {want}", w.values()[(i, j)]);
            }
        }
    }
    let one = State::from(make_fock(1, cut(4)).unwrap());
    let w = quasi_prob_fft(&one, &g, OrderingParam::WIGNER).unwrap();
    assert!(w.min() <= -0.31);
    assert!((wigner_direct(&one, c(0.0, 0.0), 0.0).unwrap() + 2.0 / PI).abs() < 1e-14);
}

#[test]
fn thermal_p_function_is_gaussian() {
    let nth = 1.0;
    let th = State::from(make_thermal(nth, cut(40)).unwrap());
    let g = PhaseGrid::new(5.0, 128).unwrap();
    let w = quasi_prob_fft(&th, &g, OrderingParam::P).unwrap();
    for i in 0..128 {
        for j in 0..128 {
            let a = g.point(i, j);
            let want = (-a.norm_sqr() / nth).exp() / (PI * nth);
            assert!((w.values()[(i, j)] - want).abs() < 1e-6);
        }
    }
}

#[test]
fn overflowed_char_samples_do_not_fake_decay() {
    // at |lambda| ~ 40 the P weight exp(|lambda|^2/2) overflows to inf and NaN
    let th = State::from(make_thermal(1.0, cut(34)).unwrap());
    let g = PhaseGrid::new(5.0, 256).unwrap();
    assert!(g.conjugate().half_width() > 38.0);
    let w = quasi_prob_fft(&th, &g, OrderingParam::P).unwrap();
    assert!((w.mass() - 1.0).abs() < 1e-6);
    assert!((w.max() - 1.0 / PI).abs() < 1e-6);
}

#[test]
fn singular_p_is_diagnosed() {
    let g = PhaseGrid::new(4.0, 64).unwrap();
    for s in [
        State::from(make_fock(1, cut(5)).unwrap()),
        State::from(make_coherent(c(1.0, 0.0), cut(30)).unwrap()),
        State::from(make_squeezed_vacuum(c(0.5, 0.0), cut(40)).unwrap()),
    ] {
        assert!(matches!(quasi_prob_fft(&s, &g, OrderingParam::P), Err(Error::SingularP(_))));
    }
}

#[test]
fn coarse_grid_is_rejected() {
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let g = PhaseGrid::new(20.0, 16).unwrap();
    assert!(matches!(quasi_prob_fft(&vac, &g, OrderingParam::WIGNER), Err(Error::GridTooSmall(_))));
    assert!(PhaseGrid::new(4.0, 15).is_err());
    assert!(PhaseGrid::new(4.0, 14).is_err());
    assert!(PhaseGrid::new(-1.0, 32).is_err());
    assert!(OrderingParam::new(1.5).is_err());
}

#[test]
fn direct_series_special_values() {
    let vac = State::from(make_fock(0, cut(6)).unwrap());
    assert!((wigner_direct(&vac, c(0.0, 0.0), 0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    assert!(matches!(wigner_direct(&vac, c(0.0, 0.0), 1.0), Err(Error::Domain(_))));
    // p = -1 series equals the Husimi function
    let states = [
        State::from(make_coherent(c(1.2, -0.4), cut(40)).unwrap()),
        State::from(make_thermal(0.7, cut(100)).unwrap()),
        State::from(make_squeezed_vacuum(c(0.4, 0.3), cut(50)).unwrap()),
    ];
    for s in &states {
        for &a in &[c(0.0, 0.0), c(1.5, 0.5), c(-0.7, 2.2)] {
            let q = q_function(s, a).unwrap();
            assert!((wigner_direct(s, a, -1.0).unwrap() - q).abs() < 1e-8);
        }
    }
    // Husimi of a number state
    let s = State::from(make_fock(3, cut(10)).unwrap());
    for &a in &[c(0.3, 0.1), c(1.7, -0.2)] {
        let want = (-a.norm_sqr()).exp() * a.norm_sqr().powi(3) / (PI * 6.0);
        assert!((q_function(&s, a).unwrap() - want).abs() < 1e-14);
    }
    assert!((q_function(&vac, c(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn intermediate_orderings_of_fock_state() {
    // W(alpha, p) of |1>: Gaussian smoothing of the Wigner function gives
    // 2/(pi(1-p)) e^{-2|a|^2/(1-p)} [ (4|a|^2/(1-p) - 1) ... ] -- use the convolution oracle instead
    let s = State::from(make_fock(1, cut(4)).unwrap());
    let g = PhaseGrid::new(4.0, 128).unwrap();
    let w0 = quasi_prob_fft(&s, &g, OrderingParam::WIGNER).unwrap();
    let q = OrderingParam::new(-0.5).unwrap();
    let conv = ordering_convolution(&w0, q).unwrap();
    for &(i, j) in &[(64, 64), (70, 60), (80, 90), (50, 64)] {
        let d = wigner_direct(&s, g.point(i, j), -0.5).unwrap();
        assert!((conv.values()[(i, j)] - d).abs() < 1e-4);
    }
    // p in (0, 1) converges for displaced arguments too
    let p = 0.4;
    let s = State::from(make_thermal(0.5, cut(60)).unwrap());
    let a = c(0.8, -0.3);
    let n = 0.5 + (1.0 - p) / 2.0;
    let want = (-a.norm_sqr() / n).exp() / (PI * n);
    assert!((wigner_direct(&s, a, p).unwrap() - want).abs() < 1e-7, "{} {want}", wigner_direct(&s, a, p).unwrap());
}

#[test]
fn fft_and_direct_agree() {
    let states = [
        State::from(make_coherent(c(0.6, 0.3), cut(30)).unwrap()),
        State::from(make_squeezed_vacuum(c(0.4, 0.0), cut(40)).unwrap()),
        State::from(make_thermal(0.5, cut(50)).unwrap()),
    ];
    let g = PhaseGrid::new(5.0, 128).unwrap();
    for s in &states {
        for p in [OrderingParam::Q, OrderingParam::WIGNER] {
            let w = quasi_prob_fft(s, &g, p).unwrap();
            for i in (16..112).step_by(7) {
                for j in (16..112).step_by(5) {
                    let d = wigner_direct(s, g.point(i, j), p.value()).unwrap();
                    assert!((w.values()[(i, j)] - d).abs() < 1e-5);
                }
            }
            assert!((w.mass() - 1.0).abs() < GRID_TOL);
        }
    }
}

#[test]
fn wigner_to_q_by_convolution() {
    let s = State::from(make_fock(1, cut(4)).unwrap());
    let g = PhaseGrid::new(4.0, 256).unwrap();
    let w = quasi_prob_fft(&s, &g, OrderingParam::WIGNER).unwrap();
    let q = ordering_convolution(&w, OrderingParam::Q).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..256 {
        for j in 0..256 {
            worst = worst.max((q.values()[(i, j)] - q_function(&s, g.point(i, j)).unwrap()).abs());
        }
    }
    assert!(worst < 1e-4, "{worst}");
    assert!(q.min() > -1e-10);
    assert!(matches!(ordering_convolution(&w, OrderingParam::P), Err(Error::Domain(_))));
    assert!(matches!(ordering_convolution(&w, OrderingParam::WIGNER), Err(Error::Domain(_))));
}

#[test]
fn convolution_broadens_and_tends_to_identity() {
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let g = PhaseGrid::new(6.0, 128).unwrap();
    let w = quasi_prob_fft(&vac, &g, OrderingParam::WIGNER).unwrap();
    let second_moment = |grid: &QuasiProbGrid| -> f64 {
        let h = grid.grid().spacing();
        let mut acc = 0.0;
        for i in 0..128 {
            acc += grid.values().row(i).sum() * grid.grid().axis(i).powi(2);
        }
        acc * h * h
    };
    let base = second_moment(&w);
    for s in [0.5, 1.0] {
        let q = OrderingParam::new(-s).unwrap();
        let wide = ordering_convolution(&w, q).unwrap();
        // variance of Re(alpha) grows by s/4 (i.e. by s/2 per... in x = 2 Re alpha units, s)
        assert!((second_moment(&wide) - base - s / 4.0).abs() < 1e-6);
    }
    let near = ordering_convolution(&w, OrderingParam::new(-1e-7).unwrap()).unwrap();
    let diff = (near.values() - w.values()).amax();
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn glauber_round_trips() {
    let lg = PhaseGrid::new(5.0, 128).unwrap();
    let d = cut(20);
    let cases: Vec<(Ket, f64)> = vec![
        (make_fock(0, d).unwrap(), 1e-4),
        (make_fock(2, d).unwrap(), 1e-3),
        (make_squeezed_vacuum(c(0.4, 0.0), cut(24)).unwrap(), 1e-3),
    ];
    for (k, tol) in cases {
        let s = State::from(k.clone());
        let chi = sample_char(&s, &lg, OrderingParam::WIGNER).unwrap();
        let rho = glauber_reconstruct(&chi, k.cutoff()).unwrap();
        let f = State::from(rho).fidelity_with(&k).unwrap();
        assert!(f >= 1.0 - tol, "fidelity {f}");
    }
    let s = State::from(make_fock(2, d).unwrap());
    let chi = sample_char(&s, &lg, OrderingParam::WIGNER).unwrap();
    assert!(matches!(glauber_reconstruct_with(&chi, d, 1e-6), Err(Error::GridTooSmall(_))));
}

use crate::hilbert::Ket;

#[test]
fn trace_rules() {
    let g = PhaseGrid::new(5.0, 128).unwrap();
    let th = State::from(make_thermal(1.0, cut(40)).unwrap());
    let w = quasi_prob_fft(&th, &g, OrderingParam::WIGNER).unwrap();
    assert!((trace_rule_wigner(&w, &w).unwrap() - 1.0 / 3.0).abs() < 1e-4);

    let v = State::from(make_fock(0, cut(4)).unwrap());
    let one = State::from(make_fock(1, cut(4)).unwrap());
    let wv = quasi_prob_fft(&v, &g, OrderingParam::WIGNER).unwrap();
    let w1 = quasi_prob_fft(&one, &g, OrderingParam::WIGNER).unwrap();
    assert!(trace_rule_wigner(&wv, &w1).unwrap().abs() < 1e-6);

    let lg = PhaseGrid::new(6.0, 128).unwrap();
    let chi = sample_char(&th, &lg, OrderingParam::WIGNER).unwrap();
    assert!((trace_rule_char(CharOperand::Samples(&chi), CharOperand::Identity).unwrap() - 1.0).norm() < 1e-9);
    let purity = trace_rule_char(CharOperand::Samples(&chi), CharOperand::Samples(&chi)).unwrap();
    assert!((purity - 1.0 / 3.0).norm() < 1e-4);
    assert!(trace_rule_char(CharOperand::Identity, CharOperand::Identity).is_err());
    let other = sample_char(&th, &PhaseGrid::new(5.0, 128).unwrap(), OrderingParam::WIGNER).unwrap();
    assert!(trace_rule_char(CharOperand::Samples(&chi), CharOperand::Samples(&other)).is_err());
    let q = quasi_prob_fft(&th, &g, OrderingParam::Q).unwrap();
    assert!(trace_rule_wigner(&q, &w).is_err());
}

#[test]
fn marginals_of_canonical_states() {
    let g = PhaseGrid::new(4.0, 256).unwrap();
    let vac = State::from(make_fock(0, cut(4)).unwrap());
    let w = quasi_prob_fft(&vac, &g, OrderingParam::WIGNER).unwrap();
    for th in [0.0, 0.7, FRAC_PI_2] {
        let m = marginal(&w, th).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-6);
        assert!(m.mean().abs() < 1e-3);
        assert!((m.variance() - 1.0).abs() < 1e-3);
    }
    let coh = State::from(make_coherent(c(1.3, 0.0), cut(40)).unwrap());
    let w = quasi_prob_fft(&coh, &PhaseGrid::for_mean_photons(1.69, 256).unwrap(), OrderingParam::WIGNER).unwrap();
    assert!((marginal(&w, 0.0).unwrap().mean() - 2.6).abs() < 1e-3);
    let r: f64 = 0.5;
    let sq = State::from(make_squeezed_vacuum(c(r, 0.0), cut(60)).unwrap());
    let w = quasi_prob_fft(&sq, &PhaseGrid::new(6.0, 512).unwrap(), OrderingParam::WIGNER).unwrap();
    assert!((marginal(&w, 0.0).unwrap().variance() - (2.0 * r).exp()).abs() < 1e-2);
    assert!((marginal(&w, FRAC_PI_2).unwrap().variance() - (-2.0 * r).exp()).abs() < 1e-2);
    let q = quasi_prob_fft(&vac, &g, OrderingParam::Q).unwrap();
    assert!(marginal(&q, 0.0).is_err());
}

#[test]
fn covariance_under_displacement_and_squeezing() {
    let d = cut(40);
    let s = State::from(make_fock(1, d).unwrap());
    let beta = c(0.5, -0.3);
    let moved = apply(&displacement(beta, d).unwrap(), &s).unwrap();
    for &a in &[c(0.2, 0.1), c(0.9, -0.6), c(-0.4, 0.3)] {
        let lhs = wigner_direct(&moved, a, 0.0).unwrap();
        let rhs = wigner_direct(&s, a - beta, 0.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-6);
    }
    let r: f64 = 0.3;
    let dd = cut(80);
    let s = State::from(make_fock(1, dd).unwrap());
    let sq = apply(&squeezer(c(r, 0.0), dd).unwrap(), &s).unwrap();
    for &a in &[c(0.2, 0.1), c(0.6, -0.4), c(-0.3, 0.5)] {
        let lhs = wigner_direct(&sq, a, 0.0).unwrap();
        let rhs = wigner_direct(&s, a * r.cosh() - a.conj() * r.sinh(), 0.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-4);
    }
}

#[test]
fn ordered_moments_three_ways() {
    // grid moments vs ordered operator products vs derivatives of chi
    let d = cut(60);
    let s = State::from(make_thermal(1.0, d).unwrap());
    let disp = displacement(c(0.4, 0.2), d).unwrap();
    let s = apply(&disp, &s).unwrap();
    let l = ladder_matrices(d);
    let g = PhaseGrid::new(5.0, 128).unwrap();
    let h = 1e-3;
    for p in [1.0, 0.0, -1.0] {
        let w = quasi_prob_fft(&s, &g, OrderingParam::new(p).unwrap()).unwrap();
        let mut m01 = C64::new(0.0, 0.0);
        let mut m11 = 0.0;
        let mut m02 = C64::new(0.0, 0.0);
        for i in 0..128 {
            for j in 0..128 {
                let a = g.point(i, j);
                let v = w.values()[(i, j)];
                m01 += a * v;
                m11 += a.norm_sqr() * v;
                m02 += a * a * v;
            }
        }
        let area = g.spacing().powi(2);
        let (m01, m11, m02) = (m01 * area, m11 * area, m02 * area);
        let a_mean = s.expectation(&l.a).unwrap();
        let a2 = s.expectation(&(&l.a * &l.a)).unwrap();
        let n_mean = s.expectation_real(&l.n).unwrap();
        let ordered_11 = n_mean + (1.0 - p) / 2.0;
        assert!((m01 - a_mean).norm() < 1e-3);
        assert!((m02 - a2).norm() < 1e-3);
        assert!((m11 - ordered_11).abs() < 1e-3);
        // derivatives: <a> = -(d_u + i d_v) chi / 2, <{a^dag a}_p> = -(d_uu + d_vv) chi / 4
        let chi = |u: f64, v: f64| char_fn(&s, c(u, v), p).unwrap();
        let du = (chi(h, 0.0) - chi(-h, 0.0)) / (2.0 * h);
        let dv = (chi(0.0, h) - chi(0.0, -h)) / (2.0 * h);
        let lap = (chi(h, 0.0) + chi(-h, 0.0) + chi(0.0, h) + chi(0.0, -h) - chi(0.0, 0.0) * 4.0) / (h * h);
        assert!((-(du + C64::i() * dv) / 2.0 - a_mean).norm() < 1e-3);
        assert!((-lap / 4.0 - ordered_11).norm() < 1e-3);
    }
}

#[test]
fn grid_csv_round_trip() {
    let s = State::from(make_fock(1, cut(4)).unwrap());
    let g = PhaseGrid::new(3.0, 16).unwrap();
    let w = quasi_prob_fft(&s, &g, OrderingParam::WIGNER);
    // a 16-point grid on L=3 has a conjugate half-width below the decay radius
    assert!(w.is_err());
    let g = PhaseGrid::new(3.0, 32).unwrap();
    let w = quasi_prob_fft(&s, &g, OrderingParam::WIGNER).unwrap();
    let mut buf = Vec::new();
    write_grid_csv(&w, &mut buf).unwrap();
    let side = GridSidecar::for_grid(&w, "abc");
    let text = serde_json::to_string(&side).unwrap();
    let side2: GridSidecar = serde_json::from_str(&text).unwrap();
    let back = read_grid_csv(std::io::Cursor::new(&buf), &side2).unwrap();
    assert_eq!(back.values(), w.values());
    assert!(text.contains("\"L\":3.0") && text.contains("\"N\":32"));
}
