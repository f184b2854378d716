mod common;

use common::*;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use wavelimit::gas::Family;
use wavelimit::profiles::{
    ansatz_residuals, burgers_exact, burgers_smooth, burgers_smooth_sample, rarefaction_sample, Model, ProfileConfig,
    WaveAnsatz,
};
use wavelimit::{solve_pattern, ThermoState};

fn sample_ansatz(eps: f64) -> WaveAnsatz {
    let (l, r) = sample_states();
    let g = fluid();
    let p = solve_pattern(l, r, &g).unwrap();
    WaveAnsatz::new(ProfileConfig::new(eps, 1.0, Model::NavierStokes, p).unwrap(), g).unwrap()
}

#[test]
fn burgers_examples() {
    assert_eq!(burgers_smooth(0.0, 0.0, 0.3, -1.0, 2.0).unwrap(), 0.5);
    assert_eq!(burgers_smooth(0.0, 1e3, 0.3, -1.0, 2.0).unwrap(), 2.0);
    let w = burgers_smooth(1.5, 0.3, 0.25, -1.0, 1.0).unwrap();
    assert!((w - burgers_oracle(1.5, 0.3, 0.25, -1.0, 1.0)).abs() < 1e-12);
    assert_eq!(burgers_exact(2.0, 1.0, -1.0, 1.0).unwrap(), 0.5);
    assert_eq!(burgers_exact(1.0, -5.0, -1.0, 1.0).unwrap(), -1.0);
    assert!(burgers_smooth(1.0, 0.0, 0.1, 1.0, 1.0).is_err());
    assert!(burgers_smooth(1.0, 0.0, 0.0, -1.0, 1.0).is_err());
}

/// Strictly between the end speeds, nondecreasing in x. Samples are placed
/// through their foot points so the tanh is not saturated in floating point.
#[test]
fn smoothed_wave_is_bounded_and_monotone() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut count = 0;
    for _ in 0..100 {
        let wm = rng.gen_range(-2.0..1.0);
        let wp = wm + rng.gen_range(0.05..2.0);
        let sigma = 10f64.powf(rng.gen_range(-3.0..0.0));
        let t = rng.gen_range(0.0..5.0);
        let mut pts: Vec<(f64, f64)> = (0..100)
            .map(|_| {
                let x0 = sigma * rng.gen_range(-15.0..15.0);
                let w0 = 0.5 * (wp + wm) + 0.5 * (wp - wm) * (x0 / sigma).tanh();
                let x = x0 + w0 * t;
                (x, burgers_smooth(t, x, sigma, wm, wp).unwrap())
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in &pts {
            assert!(wm < w.1 && w.1 < wp, "w = {} outside ({wm}, {wp})", w.1);
        }
        for pair in pts.windows(2) {
            assert!(pair[1].1 >= pair[0].1 - 1e-15);
        }
        count += pts.len();
    }
    assert_eq!(count, 10_000);
}

/// Exponential tails behind each edge of the fan.
#[test]
fn smoothed_wave_tails() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..5000 {
        let wm = rng.gen_range(-2.0..1.0);
        let wp = wm + rng.gen_range(0.05..2.0);
        let sigma = 10f64.powf(rng.gen_range(-2.0..0.0));
        let t = rng.gen_range(0.01..5.0);
        let d = sigma * rng.gen_range(0.0..10.0);
        let tol = 1e-14;
        let left = burgers_smooth_sample(t, wm * t - d, sigma, wm, wp).unwrap();
        let env = (wp - wm) * (-2.0 * d / sigma).exp();
        assert!((left.w - wm).abs() <= env + tol);
        assert!(left.w_x.abs() <= 2.0 * env / sigma + tol / sigma);
        let right = burgers_smooth_sample(t, wp * t + d, sigma, wm, wp).unwrap();
        assert!((right.w - wp).abs() <= env + tol);
        assert!(right.w_x.abs() <= 2.0 * env / sigma + tol / sigma);
    }
}

fn sup_gap(t: f64, sigma: f64) -> f64 {
    let (wm, wp) = (-1.0, 1.0);
    let mut sup: f64 = 0.0;
    for edge in [wm * t, wp * t] {
        let n = 4000;
        for k in 0..=n {
            let x = edge - 30.0 * sigma + 60.0 * sigma * k as f64 / n as f64;
            let d = (burgers_smooth(t, x, sigma, wm, wp).unwrap() - burgers_exact(t, x, wm, wp).unwrap()).abs();
            sup = sup.max(d);
        }
    }
    sup
}

/// Sup gap to the centered fan against (σ/t)(ln(1+t) + |ln σ|).
#[test]
fn smoothing_error_envelope() {
    let t = 1.0;
    let cs: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&s: &f64| sup_gap(t, s) / (s / t * ((1.0 + t).ln() + s.ln().abs())))
        .collect();
    let hi = cs.iter().copied().fold(f64::MIN, f64::max);
    let lo = cs.iter().copied().fold(f64::MAX, f64::min);
    assert!(lo > 0.0 && hi <= 1.0, "{cs:?}");
    assert!(hi / lo < 2.0, "{cs:?}");
}

#[test]
fn rarefaction_far_field_and_entropy() {
    let a = sample_ansatz(1e-3);
    let p = a.cfg.pattern;
    let g = a.params;
    let t = 1e3;
    let far1 = a.rarefaction(t, 1.5 * p.fan1.0 * (t + a.cfg.t0), Family::One).unwrap();
    assert!(far1.max_diff(&p.left) < 1e-6);
    let far3 = a.rarefaction(t, 1.5 * p.fan3.1 * (t + a.cfg.t0), Family::Three).unwrap();
    assert!(far3.max_diff(&p.right) < 1e-6);
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let t = rng.gen_range(0.0..3.0);
        let x = rng.gen_range(-4.0..4.0);
        let s1 = a.rarefaction(t, x, Family::One).unwrap();
        assert!((s1.entropy(&g) - p.left.entropy(&g)).abs() < 1e-10);
        let s3 = a.rarefaction(t, x, Family::Three).unwrap();
        assert!((s3.entropy(&g) - p.right.entropy(&g)).abs() < 1e-10);
    }
}

#[test]
fn rarefaction_point_against_oracle() {
    let a = sample_ansatz(1e-3);
    let p = a.cfg.pattern;
    let g = a.params;
    let (t, x) = (1.0, -0.4);
    let w = burgers_oracle(t + a.cfg.t0, x, a.cfg.sigma, p.fan1.0, p.fan1.1);
    let k = isentrope(&p.left, &g);
    let v = bisect(|v| -lambda(v, k, &g) - w, p.left.v, p.star.v, 1e-15);
    let expect = state_on_isentrope(v, curve_u(v, &p.left, 1, &g), k, &g);
    let got = a.rarefaction(t, x, Family::One).unwrap();
    assert!(got.max_diff(&expect) < 1e-9, "{got:?} vs {expect:?}");
}

#[test]
fn velocity_increases_through_both_fans() {
    let a = sample_ansatz(1e-2);
    for &t in &[0.0, 0.5, 2.0] {
        for k in 0..4000 {
            let x = -4.0 + 8.0 * k as f64 / 3999.0;
            for (fam, anchor) in [(Family::One, a.cfg.pattern.left), (Family::Three, a.cfg.pattern.right)] {
                let (_, d) = rarefaction_sample(t, x, fam, &anchor, &a.cfg, &a.params).unwrap();
                let w = wavelimit::profiles::family_speeds(&a.cfg.pattern, fam);
                let tt = t + a.cfg.t0;
                let near = x > w.0 * tt - 5.0 * a.cfg.sigma && x < w.1 * tt + 5.0 * a.cfg.sigma;
                // far tails may underflow to exactly zero
                assert!(d[1] >= 0.0 && (!near || d[1] > 0.0), "U_x = {} at t = {t}, x = {x}", d[1]);
            }
        }
    }
}

/// L^p norms of U_x of the 1-wave: L¹ stays at the wave strength, L^∞ decays like 1/(t+t0).
#[test]
fn derivative_norms_scale_with_time() {
    let a = sample_ansatz(1e-3);
    let p = a.cfg.pattern;
    let anchor = p.left;
    let ts = [4.0, 8.0, 16.0, 32.0, 64.0];
    let (mut l1, mut linf) = (Vec::new(), Vec::new());
    for &t in &ts {
        let tt = t + a.cfg.t0;
        let lo = p.fan1.0 * tt - 20.0 * a.cfg.sigma;
        let hi = p.fan1.1 * tt + 20.0 * a.cfg.sigma;
        let ux = |x: f64| rarefaction_sample(t, x, Family::One, &anchor, &a.cfg, &a.params).unwrap().1[1];
        l1.push(quad(ux, lo, hi, 400));
        let sup = (0..=4000).map(|k| ux(lo + (hi - lo) * k as f64 / 4000.0)).fold(0.0, f64::max);
        linf.push(sup);
    }
    let lt: Vec<f64> = ts.iter().map(|t| (t + a.cfg.t0).ln()).collect();
    let (s1, _, _) = linfit(&lt, &l1.iter().map(|v| v.ln()).collect::<Vec<_>>());
    let (sinf, _, _) = linfit(&lt, &linf.iter().map(|v| v.ln()).collect::<Vec<_>>());
    assert!(s1.abs() < 0.1, "L1 exponent {s1}");
    assert!((sinf + 1.0).abs() < 0.1, "Linf exponent {sinf}");
    assert!((l1[0] - (p.star.u - p.left.u)).abs() < 1e-6);
}

#[test]
fn superposition_far_field_and_degenerate() {
    let a = sample_ansatz(1e-3);
    let p = a.cfg.pattern;
    let t = 1.0;
    let x_far = 3.0 * p.fan1.0 * (t + a.cfg.t0);
    assert!(a.superpose(t, x_far).unwrap().max_diff(&p.left) < 1e-6);
    assert!(a.superpose(t, -x_far * 2.0).unwrap().max_diff(&p.right) < 1e-6);

    let g = fluid();
    let s = ThermoState::new(0.9, 0.1, 1.3).unwrap();
    let flat = solve_pattern(s, s, &g).unwrap();
    let b = WaveAnsatz::new(ProfileConfig::new(1e-2, 1.0, Model::NavierStokes, flat).unwrap(), g).unwrap();
    for &x in &[-3.0, -0.1, 0.0, 0.7] {
        assert!(b.superpose(1.0, x).unwrap().max_diff(&s) < 1e-14);
    }
}

#[test]
fn superposition_point_is_sum_of_parts() {
    let a = sample_ansatz(1e-3);
    let p = a.cfg.pattern;
    let (t, x) = (1.0, 0.0);
    let r1 = a.rarefaction(t, x, Family::One).unwrap();
    let r3 = a.rarefaction(t, x, Family::Three).unwrap();
    let cd = a.contact(t, x).unwrap();
    let s = a.superpose(t, x).unwrap();
    assert!((s.v - (r1.v + cd.v + r3.v - p.star.v - p.starstar.v)).abs() < 1e-14);
    assert!((s.u - (r1.u + cd.u + r3.u - p.star.u - p.starstar.u)).abs() < 1e-14);
    assert!((s.theta - (r1.theta + cd.theta + r3.theta - p.star.theta - p.starstar.theta)).abs() < 1e-14);
}

#[test]
fn residuals_vanish_for_constant_state() {
    let g = fluid();
    let s = ThermoState::new(1.1, 0.2, 0.9).unwrap();
    let flat = solve_pattern(s, s, &g).unwrap();
    let a = WaveAnsatz::new(ProfileConfig::new(1e-2, 1.0, Model::NavierStokes, flat).unwrap(), g).unwrap();
    let dx = a.cfg.sigma / 10.0;
    let xs: Vec<f64> = (0..200).map(|i| -1.0 + i as f64 * dx).collect();
    let r = ansatz_residuals(&a, &xs, 1.0).unwrap();
    assert!(r.q1.iter().chain(&r.q2).all(|q| q.abs() < 1e-12));
}

/// Interaction terms sampled between the waves fall off faster than any power of ε.
/// Below ε = 1e-2 they are already at round-off.
#[test]
fn interaction_decays_super_polynomially() {
    let t = 1.0;
    let mut vals = Vec::new();
    let eps = [1e-1, 3e-2, 1e-2];
    for &e in &eps {
        let a = sample_ansatz(e);
        let x = 0.5 * a.cfg.pattern.fan1.1 * (t + a.cfg.t0);
        let parts = wavelimit::profiles::residual_parts(&a, t, x, None).unwrap();
        vals.push(parts.interaction[0].abs().max(parts.interaction[1].abs()).max(1e-300));
    }
    // local log-log slopes must steepen
    let s1 = (vals[1] / vals[0]).ln() / (eps[1] / eps[0]).ln();
    let s2 = (vals[2] / vals[1]).ln() / (eps[2] / eps[1]).ln();
    assert!(s1 > 1.0 && s2 > s1, "slopes {s1}, {s2}; values {vals:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smooth_matches_characteristic_oracle(t in 0.0f64..4.0, x in -5.0f64..5.0, ls in -3.0f64..0.0,
                                            wm in -2.0f64..1.0, dw in 0.01f64..2.0) {
        let sigma = 10f64.powf(ls);
        let w = burgers_smooth(t, x, sigma, wm, wm + dw).unwrap();
        prop_assert!((w - burgers_oracle(t, x, sigma, wm, wm + dw)).abs() <= 1e-10);
    }
}
