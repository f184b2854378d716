//! Exact Riemann solution made of a 1-rarefaction, a contact discontinuity and a
//! 3-rarefaction, in Lagrangian and Eulerian coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, FailedFamily, Result};
use crate::gas::{Family, GasParams, ThermoState};
use crate::numerics::{brent, GaussRule};

/// Solved R1-CD-R3 structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePattern {
    pub left: ThermoState,
    pub right: ThermoState,
    /// Intermediate state left of the contact.
    pub star: ThermoState,
    /// Intermediate state right of the contact.
    pub starstar: ThermoState,
    /// (λ₁ at left, λ₁ at star).
    pub fan1: (f64, f64),
    /// (λ₃ at starstar, λ₃ at right).
    pub fan3: (f64, f64),
    /// Always 0: the contact is fixed at x = 0 in mass coordinates.
    pub contact_speed: f64,
    /// Common pressure across the contact.
    pub p_mid: f64,
}

impl WavePattern {
    /// Temperature jump across the contact.
    pub fn contact_strength(&self) -> f64 {
        (self.starstar.theta - self.star.theta).abs()
    }

    pub fn is_constant(&self) -> bool {
        self.left == self.right
    }

    /// Largest |characteristic speed| over the pattern.
    pub fn max_speed(&self) -> f64 {
        self.fan1.0.abs().max(self.fan3.1.abs())
    }
}

/// p·v^γ along the isentrope through `anchor`.
#[inline]
pub(crate) fn isentrope_k(anchor: &ThermoState, params: &GasParams) -> f64 {
    anchor.pressure(params) * anchor.v.powf(params.gamma)
}

/// Temperature at volume `v` on the isentrope through `anchor`.
#[inline]
pub(crate) fn isentrope_theta(v: f64, anchor: &ThermoState, params: &GasParams) -> f64 {
    isentrope_k(anchor, params) * v.powf(1.0 - params.gamma) / params.r
}

/// Volume at which the characteristic speed on the isentrope through `anchor` equals `w`.
#[inline]
pub(crate) fn volume_for_speed(w: f64, anchor: &ThermoState, params: &GasParams) -> f64 {
    let k = isentrope_k(anchor, params);
    (params.gamma * k / (w * w)).powf(1.0 / (params.gamma + 1.0))
}

/// u on the integral curve through `anchor`, without the admissibility check.
#[inline]
pub(crate) fn integral_curve_u(v: f64, anchor: &ThermoState, family: Family, params: &GasParams) -> f64 {
    let g = params.gamma;
    let ca = params.sound_speed(anchor.theta);
    let c = params.sound_speed(isentrope_theta(v, anchor, params));
    anchor.u + family.sign() * 2.0 / (g - 1.0) * (c - ca)
}

/// State at volume `v` on the rarefaction curve through `anchor`.
pub(crate) fn curve_state(v: f64, anchor: &ThermoState, family: Family, params: &GasParams) -> ThermoState {
    ThermoState {
        v,
        u: integral_curve_u(v, anchor, family, params),
        theta: isentrope_theta(v, anchor, params),
    }
}

/// Velocity on the `family` rarefaction curve through `anchor`.
///
/// The anchor is the state nearer the contact; the admissible side is `v ≤ anchor.v`.
pub fn rarefaction_u(v: f64, anchor: &ThermoState, family: Family, params: &GasParams) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("specific volume must be positive, got {v}")));
    }
    if v > anchor.v * (1.0 + 1e-14) {
        return Err(Error::domain(format!(
            "v = {v} lies on the compressive side of the rarefaction curve (anchor v = {})",
            anchor.v
        )));
    }
    Ok(integral_curve_u(v, anchor, family, params))
}

/// Solves for the two intermediate states by a root find in the common pressure.
pub fn solve_pattern(left: ThermoState, right: ThermoState, params: &GasParams) -> Result<WavePattern> {
    let left = ThermoState::new(left.v, left.u, left.theta)?;
    let right = ThermoState::new(right.v, right.u, right.theta)?;
    let g = params.gamma;
    let pl = left.pressure(params);
    let pr = right.pressure(params);
    let cl = params.sound_speed(left.theta);
    let cr = params.sound_speed(right.theta);

    let star_at = |pm: f64| {
        let v = left.v * (pl / pm).powf(1.0 / g);
        curve_state(v, &left, Family::One, params)
    };
    let starstar_at = |pm: f64| {
        let v = right.v * (pr / pm).powf(1.0 / g);
        curve_state(v, &right, Family::Three, params)
    };
    let gap = |pm: f64| star_at(pm).u - starstar_at(pm).u;

    let f_vacuum = left.u + 2.0 * cl / (g - 1.0) - (right.u - 2.0 * cr / (g - 1.0));
    if f_vacuum <= 0.0 {
        return Err(Error::Vacuum);
    }

    let pmin = pl.min(pr);
    let scale = 1.0 + cl.max(cr) + left.u.abs().max(right.u.abs());
    let f_top = gap(pmin);
    let pm = if f_top.abs() <= 1e-14 * scale {
        pmin
    } else if f_top > 0.0 {
        let pmax = pl.max(pr);
        let family = if gap(pmax) > 0.0 {
            FailedFamily::Both
        } else if pl < pr {
            FailedFamily::One
        } else {
            FailedFamily::Three
        };
        return Err(Error::NotRarefactionContact { family });
    } else {
        let mut lo = 0.5 * pmin;
        let mut guard = 0;
        while gap(lo) <= 0.0 {
            lo *= 0.5;
            guard += 1;
            if guard > 2000 || lo == 0.0 {
                return Err(Error::internal("pressure bracket search underflowed"));
            }
        }
        brent(gap, lo, pmin, 0.0, 1e-15, 500)?
    };

    let star = if pm == pl { left } else { star_at(pm) };
    let starstar = if pm == pr { right } else { starstar_at(pm) };
    let l = |s: &ThermoState| params.lagrangian_sound_speed(s.v, s.theta);
    Ok(WavePattern {
        left,
        right,
        star,
        starstar,
        fan1: (-l(&left), -l(&star)),
        fan3: (l(&starstar), l(&right)),
        contact_speed: 0.0,
        p_mid: pm,
    })
}

/// Riemann solution at (t, x) in mass coordinates. At x = 0 the right-of-contact value is returned.
pub fn eval_riemann(pattern: &WavePattern, t: f64, x: f64, params: &GasParams) -> Result<ThermoState> {
    if !(t > 0.0) {
        return Err(Error::usage(format!("Riemann evaluation needs t > 0, got {t}")));
    }
    Ok(eval_similarity(pattern, x / t, x < 0.0, params))
}

pub(crate) fn eval_similarity(p: &WavePattern, xi: f64, left_of_contact: bool, params: &GasParams) -> ThermoState {
    if left_of_contact {
        if xi < p.fan1.0 {
            p.left
        } else if xi < p.fan1.1 {
            curve_state(volume_for_speed(xi, &p.left, params), &p.left, Family::One, params)
        } else {
            p.star
        }
    } else if xi < p.fan3.0 {
        p.starstar
    } else if xi < p.fan3.1 {
        curve_state(volume_for_speed(xi, &p.right, params), &p.right, Family::Three, params)
    } else {
        p.right
    }
}

/// Wave-region boundaries in the Eulerian frame, as speeds X/t.
fn eulerian_edges(p: &WavePattern, params: &GasParams) -> [f64; 5] {
    let c = |s: &ThermoState| params.sound_speed(s.theta);
    let um = p.star.u;
    [
        p.left.u - c(&p.left),
        p.star.u - c(&p.star),
        um,
        p.starstar.u + c(&p.starstar),
        p.right.u + c(&p.right),
    ]
}

/// Riemann solution at Eulerian position `big_x`, with the contact starting at the origin.
pub fn eval_riemann_eulerian(pattern: &WavePattern, t: f64, big_x: f64, params: &GasParams) -> Result<ThermoState> {
    if !(t > 0.0) {
        return Err(Error::usage(format!("Riemann evaluation needs t > 0, got {t}")));
    }
    Ok(eval_eulerian_similarity(pattern, big_x / t, params))
}

fn eval_eulerian_similarity(p: &WavePattern, xi: f64, params: &GasParams) -> ThermoState {
    let g = params.gamma;
    let e = eulerian_edges(p, params);
    let from_c = |c: f64, u: f64, anchor: &ThermoState| {
        let theta = c * c / (g * params.r);
        let k = isentrope_k(anchor, params);
        let v = (params.r * theta / k).powf(1.0 / (1.0 - g));
        ThermoState { v, u, theta }
    };
    if xi < e[0] {
        p.left
    } else if xi < e[1] {
        let j = p.left.u + 2.0 * params.sound_speed(p.left.theta) / (g - 1.0);
        let c = (g - 1.0) / (g + 1.0) * (j - xi);
        from_c(c, xi + c, &p.left)
    } else if xi < e[2] {
        p.star
    } else if xi < e[3] {
        p.starstar
    } else if xi < e[4] {
        let j = p.right.u - 2.0 * params.sound_speed(p.right.theta) / (g - 1.0);
        let c = (g - 1.0) / (g + 1.0) * (xi - j);
        from_c(c, xi - c, &p.right)
    } else {
        p.right
    }
}

/// Mass coordinate of Eulerian position `big_x`: ∫ ρ dX from the contact to `big_x`.
pub fn lagrangian_label(pattern: &WavePattern, t: f64, big_x: f64, params: &GasParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::usage(format!("Riemann evaluation needs t > 0, got {t}")));
    }
    let e = eulerian_edges(pattern, params);
    let x0 = pattern.star.u * t;
    let (a, b, sign) = if big_x >= x0 { (x0, big_x, 1.0) } else { (big_x, x0, -1.0) };
    let mut cuts: Vec<f64> = vec![a];
    cuts.extend(e.iter().map(|s| s * t).filter(|&c| c > a && c < b));
    cuts.push(b);
    let rule = GaussRule::new(24);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        total += rule.integrate(lo, hi, |y| 1.0 / eval_eulerian_similarity(pattern, y / t, params).v);
    }
    Ok(sign * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> (WavePattern, GasParams) {
        let g = GasParams::fluid(5.0 / 3.0).unwrap();
        let l = ThermoState::new(1.0, -0.5, 1.0).unwrap();
        let r = ThermoState::new(1.2, 0.5, 1.1).unwrap();
        (solve_pattern(l, r, &g).unwrap(), g)
    }

    /// Pattern built outward from a chosen middle state.
    fn built(gamma: f64, pm: f64, th1: f64, th2: f64, um: f64, r1: f64, r3: f64) -> (ThermoState, ThermoState, GasParams) {
        let g = GasParams::fluid(gamma).unwrap();
        let star = ThermoState::new(th1 / pm, um, th1).unwrap();
        let ss = ThermoState::new(th2 / pm, um, th2).unwrap();
        let vl = star.v * r1;
        let vr = ss.v * r3;
        (curve_state(vl, &star, Family::One, &g), curve_state(vr, &ss, Family::Three, &g), g)
    }

    #[test]
    fn degenerate_pattern() {
        let g = GasParams::fluid(1.4).unwrap();
        let s = ThermoState::new(1.3, 0.2, 0.8).unwrap();
        let p = solve_pattern(s, s, &g).unwrap();
        assert_eq!(p.star, s);
        assert_eq!(p.starstar, s);
        assert!(p.is_constant());
        for &x in &[-2.0, -0.1, 0.0, 0.3, 5.0] {
            assert_eq!(eval_riemann(&p, 1.0, x, &g).unwrap(), s);
        }
    }

    #[test]
    fn sample_pattern_shape() {
        let (p, g) = sample();
        assert!(p.fan1.0 < p.fan1.1 && p.fan1.1 < 0.0);
        assert!(0.0 < p.fan3.0 && p.fan3.0 < p.fan3.1);
        assert!((p.star.u - p.starstar.u).abs() < 1e-12);
        assert!((p.star.pressure(&g) - p.starstar.pressure(&g)).abs() < 1e-12);
        assert!(p.p_mid < p.left.pressure(&g) && p.p_mid < p.right.pressure(&g));
    }

    #[test]
    fn compressive_data_rejected() {
        let g = GasParams::fluid(1.4).unwrap();
        let l = ThermoState::new(1.0, 0.5, 1.0).unwrap();
        let r = ThermoState::new(1.0, -0.5, 1.0).unwrap();
        match solve_pattern(l, r, &g) {
            Err(Error::NotRarefactionContact { family }) => assert_eq!(family, FailedFamily::Both),
            other => panic!("expected rejection, got {other:?}"),
        }
        // high left pressure pushes the 3-wave into compression
        let l = ThermoState::new(0.2, 0.0, 3.0).unwrap();
        let r = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        match solve_pattern(l, r, &g) {
            Err(Error::NotRarefactionContact { family }) => assert_eq!(family, FailedFamily::Three),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn vacuum_rejected() {
        let g = GasParams::fluid(1.4).unwrap();
        let l = ThermoState::new(1.0, -20.0, 1.0).unwrap();
        let r = ThermoState::new(1.0, 20.0, 1.0).unwrap();
        assert!(matches!(solve_pattern(l, r, &g), Err(Error::Vacuum)));
    }

    #[test]
    fn rarefaction_u_side_and_anchor() {
        let g = GasParams::fluid(5.0 / 3.0).unwrap();
        let a = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(rarefaction_u(1.0, &a, Family::One, &g).unwrap(), 0.0);
        assert!(rarefaction_u(1.1, &a, Family::One, &g).is_err());
        let u1 = rarefaction_u(0.8, &a, Family::One, &g).unwrap();
        let u3 = rarefaction_u(0.8, &a, Family::Three, &g).unwrap();
        assert!(u1 < 0.0 && u3 > 0.0);
        assert!((u1 + u3).abs() < 1e-15);
    }

    #[test]
    fn fan_edges_hit_states() {
        let (p, g) = sample();
        let t = 1.7;
        let s = eval_riemann(&p, t, p.fan1.1 * t, &g).unwrap();
        assert!(s.max_diff(&p.star) < 1e-10);
        let s = eval_riemann(&p, t, p.fan1.0 * t, &g).unwrap();
        assert!(s.max_diff(&p.left) < 1e-10);
        let s = eval_riemann(&p, t, p.fan3.0 * t, &g).unwrap();
        assert!(s.max_diff(&p.starstar) < 1e-10);
        assert_eq!(eval_riemann(&p, t, 0.0, &g).unwrap(), p.starstar);
        assert!(eval_riemann(&p, 0.0, 1.0, &g).is_err());
    }

    #[test]
    fn eulerian_matches_lagrangian() {
        let (p, g) = sample();
        let t = 1.3;
        for k in 0..60 {
            let big_x = -2.5 + 5.0 * k as f64 / 59.0;
            let x = lagrangian_label(&p, t, big_x, &g).unwrap();
            let se = eval_riemann_eulerian(&p, t, big_x, &g).unwrap();
            if x.abs() < 1e-9 {
                continue;
            }
            let sl = eval_riemann(&p, t, x, &g).unwrap();
            assert!(se.max_diff(&sl) < 1e-9, "X = {big_x}: {se:?} vs {sl:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pattern_invariants(gamma in prop::sample::select(vec![1.4, 5.0 / 3.0]),
                              pm in 0.2f64..2.0, th1 in 0.3f64..2.0, th2 in 0.3f64..2.0,
                              um in -1.0f64..1.0, r1 in 0.3f64..1.0, r3 in 0.3f64..1.0,
                              t in 0.1f64..10.0, c in 0.1f64..10.0, k2 in -3i32..4) {
            let (l, r, g) = built(gamma, pm, th1, th2, um, r1, r3);
            let p = solve_pattern(l, r, &g).unwrap();
            prop_assert!((p.star.u - p.starstar.u).abs() <= 1e-10);
            prop_assert!((p.star.pressure(&g) - p.starstar.pressure(&g)).abs() <= 1e-10);
            prop_assert!((p.star.entropy(&g) - l.entropy(&g)).abs() <= 1e-10);
            prop_assert!((p.starstar.entropy(&g) - r.entropy(&g)).abs() <= 1e-10);
            prop_assert!((p.p_mid - pm).abs() <= 1e-10 * pm);

            let (sl, sr) = (l.entropy(&g), r.entropy(&g));
            for k in 0..41 {
                let x = -3.0 * t + 6.0 * t * k as f64 / 40.0;
                let a = eval_riemann(&p, t, x, &g).unwrap();
                // power-of-two scalings keep x/t bit-identical
                let c2 = 2f64.powi(k2);
                let b = eval_riemann(&p, c2 * t, c2 * x, &g).unwrap();
                prop_assert_eq!(a, b);
                let b = eval_riemann(&p, c * t, c * x, &g).unwrap();
                prop_assert!(a.max_diff(&b) <= 1e-12);
                let s = a.entropy(&g);
                let target = if x < 0.0 { sl } else { sr };
                prop_assert!((s - target).abs() <= 1e-10);
            }
            let d = 1e-10;
            for edge in [p.fan1.0, p.fan1.1, p.fan3.0, p.fan3.1] {
                let a = eval_riemann(&p, t, (edge - d) * t, &g).unwrap();
                let b = eval_riemann(&p, t, (edge + d) * t, &g).unwrap();
                prop_assert!(a.max_diff(&b) <= 1e-8);
            }
        }
    }
}
