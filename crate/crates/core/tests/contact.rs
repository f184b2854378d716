mod common;

use common::*;
use wavelimit::profiles::{contact_profile, solve_contact_selfsimilar, Diffusivity, Model, ProfileConfig, WaveAnsatz};
use wavelimit::{solve_pattern, ThermoState};

#[test]
fn equal_temperatures_give_a_flat_wave() {
    let t = solve_contact_selfsimilar(0.8, 0.8, Diffusivity::Constant(1.0), 10.0).unwrap();
    assert!(t.theta_hat.iter().all(|&v| v == 0.8));
    assert!(t.theta_hat_prime.iter().all(|&v| v == 0.0));

    let g = fluid();
    let s = ThermoState::new(1.0, 0.3, 0.8).unwrap();
    let p = solve_pattern(s, s, &g).unwrap();
    let cfg = ProfileConfig::new(1e-2, 1.0, Model::NavierStokes, p).unwrap();
    let table = solve_contact_selfsimilar(0.8, 0.8, cfg.diffusivity(&g), 10.0).unwrap();
    for &(t, x) in &[(0.0, 0.0), (1.0, -0.3), (2.0, 0.05)] {
        let c = contact_profile(t, x, &cfg, &g, &table).unwrap();
        assert_eq!(c, ThermoState { v: g.r * 0.8 / p.p_mid, u: 0.3, theta: 0.8 });
    }
}

#[test]
fn shooting_matches_relaxation_at_the_center() {
    for (tl, tr) in [(1.0, 1.2), (1.2, 1.0)] {
        let t = solve_contact_selfsimilar(tl, tr, Diffusivity::Constant(1.0), 10.0).unwrap();
        let oracle = relaxation_midpoint(tl, tr, 1.0);
        let (mid, _) = t.eval(0.0);
        assert!((mid - oracle).abs() < 1e-6, "{mid} vs {oracle}");
    }
}

#[test]
fn tail_is_gaussian() {
    let t = solve_contact_selfsimilar(1.0, 1.2, Diffusivity::Constant(1.0), 10.0).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for k in 0..=60 {
        let eta = 2.0 + 6.0 * k as f64 / 60.0;
        x.push(eta * eta);
        y.push((t.eval(eta).0 - 1.2).abs().ln());
    }
    let (slope, _, r2) = linfit(&x, &y);
    assert!(-slope > 0.0, "c0 = {}", -slope);
    assert!(r2 > 0.99, "R² = {r2}");
}

/// Velocity of the viscous contact at its center at t = 0, with Θ̂'(0) from the relaxation oracle.
#[test]
fn contact_velocity_at_center() {
    let g = fluid();
    let (l, r) = sample_states();
    let p = solve_pattern(l, r, &g).unwrap();
    let eps = 1e-2;
    let a = WaveAnsatz::new(ProfileConfig::new(eps, 1.0, Model::NavierStokes, p).unwrap(), g).unwrap();
    let Diffusivity::Constant(coef) = a.cfg.diffusivity(&g) else { panic!("fluid model has a constant diffusivity") };
    let slope = |n: usize| {
        let prof = relaxation_contact(p.star.theta, p.starstar.theta, coef, 10.0, n);
        let h = 20.0 / n as f64;
        ((prof[n / 2 + 1].1 - prof[n / 2 - 1].1) / (2.0 * h), prof[n / 2].1)
    };
    let (d1, m1) = slope(4000);
    let (d2, m2) = slope(8000);
    let thp = (4.0 * d2 - d1) / 3.0;
    let th = (4.0 * m2 - m1) / 3.0;
    let expect_u = p.starstar.u + a.cfg.kappa() * (g.gamma - 1.0) / (g.r * g.gamma) * thp / eps.sqrt() / th;
    let c = a.contact(0.0, 0.0).unwrap();
    assert!((c.u - expect_u).abs() < 1e-6, "{} vs {expect_u}", c.u);
    assert!((c.v - g.r * th / p.p_mid).abs() < 1e-6);
}

/// Distance to the jump decays like exp(-C₀x²/(ε(1+t))).
#[test]
fn profile_approaches_the_jump() {
    let g = fluid();
    let (l, r) = sample_states();
    let p = solve_pattern(l, r, &g).unwrap();
    let a = WaveAnsatz::new(ProfileConfig::new(1e-3, 1.0, Model::NavierStokes, p).unwrap(), g).unwrap();
    let t = 1.0;
    let s = (a.cfg.eps * (1.0 + t)).sqrt();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for k in 0..=40 {
        let eta = 1.0 + 5.0 * k as f64 / 40.0;
        let c = a.contact(t, eta * s).unwrap();
        let d = (c.theta - p.starstar.theta).abs();
        // stay above the table's own accuracy
        if d > 1e-9 {
            x.push(eta * eta);
            y.push(d.ln());
        }
    }
    assert!(x.len() >= 10);
    let (slope, _, r2) = linfit(&x, &y);
    assert!(-slope > 0.0 && r2 > 0.99, "C0 = {}, R² = {r2}", -slope);
    let delta = (p.starstar.theta - p.star.theta).abs();
    assert!((a.contact(t, -7.0 * s).unwrap().theta - p.star.theta).abs() < delta);
}
