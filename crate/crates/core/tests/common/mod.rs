//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use wavelimit::{GasParams, ThermoState};

pub fn sample_states() -> (ThermoState, ThermoState) {
    (
        ThermoState::new(1.0, -0.5, 1.0).unwrap(),
        ThermoState::new(1.2, 0.5, 1.1).unwrap(),
    )
}

pub fn fluid() -> GasParams {
    GasParams::fluid(5.0 / 3.0).unwrap()
}

/// Composite 10-point Gauss-Legendre on `panels` equal panels.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_0,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let m = a + (k as f64 + 0.5) * h;
        for i in 0..5 {
            let d = 0.5 * h * X[i];
            s += W[i] * (f(m - d) + f(m + d));
        }
    }
    0.5 * h * s
}

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "oracle bracket lost");
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * (1.0 + mid.abs()) {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// p·v^γ of a state.
pub fn isentrope(s: &ThermoState, g: &GasParams) -> f64 {
    g.r * s.theta / s.v * s.v.powf(g.gamma)
}

/// Lagrangian sound speed √(γ p / v) on the isentrope K.
pub fn lambda(v: f64, k: f64, g: &GasParams) -> f64 {
    (g.gamma * k * v.powf(-g.gamma) / v).sqrt()
}

/// u at volume `v` on the rarefaction curve through `anchor`, by quadrature of λ.
pub fn curve_u(v: f64, anchor: &ThermoState, family: u32, g: &GasParams) -> f64 {
    let k = isentrope(anchor, g);
    let sign = if family == 1 { -1.0 } else { 1.0 };
    anchor.u - sign * quad(|e| lambda(e, k, g), anchor.v, v, 16)
}

pub fn state_on_isentrope(v: f64, u: f64, k: f64, g: &GasParams) -> ThermoState {
    let p = k * v.powf(-g.gamma);
    ThermoState { v, u, theta: p * v / g.r }
}

/// Intermediate states by a scan of the middle pressure followed by bisection,
/// with rarefaction curves integrated numerically.
pub fn brute_force_pattern(left: &ThermoState, right: &ThermoState, g: &GasParams) -> Option<(ThermoState, ThermoState)> {
    let kl = isentrope(left, g);
    let kr = isentrope(right, g);
    let pl = g.r * left.theta / left.v;
    let pr = g.r * right.theta / right.v;
    let pmax = pl.min(pr);
    let vol = |k: f64, p: f64| (k / p).powf(1.0 / g.gamma);
    let gap = |p: f64| curve_u(vol(kl, p), left, 1, g) - curve_u(vol(kr, p), right, 3, g);
    let n = 2000;
    let mut prev: Option<(f64, f64)> = None;
    for i in (1..=n).rev() {
        let p = pmax * i as f64 / n as f64;
        let f = gap(p);
        if let Some((pp, fp)) = prev {
            if fp * f <= 0.0 {
                let pm = bisect(gap, p, pp, 1e-15);
                let vs = vol(kl, pm);
                let vss = vol(kr, pm);
                let us = curve_u(vs, left, 1, g);
                return Some((state_on_isentrope(vs, us, kl, g), state_on_isentrope(vss, us, kr, g)));
            }
        }
        prev = Some((p, f));
    }
    None
}

/// Solution of w = x/t-type characteristic equation x = x₀ + w_σ(x₀)·t by bisection.
pub fn burgers_oracle(t: f64, x: f64, sigma: f64, wm: f64, wp: f64) -> f64 {
    let w0 = |x0: f64| 0.5 * (wp + wm) + 0.5 * (wp - wm) * (x0 / sigma).tanh();
    if t == 0.0 {
        return w0(x);
    }
    let wmax = wm.abs().max(wp.abs());
    let x0 = bisect(|x0| x0 + w0(x0) * t - x, x - wmax * t - 10.0 * sigma, x + wmax * t + 10.0 * sigma, 1e-15);
    w0(x0)
}

pub fn burgers_exact_oracle(t: f64, x: f64, wm: f64, wp: f64) -> f64 {
    (x / t).clamp(wm, wp)
}

/// Steady state of the self-similar form of Θ_t = a(Θ_x/Θ)_x, Θ_s = (η/2)Θ_η + a(ln Θ)_ηη,
/// reached by implicit pseudo-time marching from a tanh profile on [-l, l] with n intervals.
pub fn relaxation_contact(theta_l: f64, theta_r: f64, a: f64, l: f64, n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * l / n as f64;
    let eta: Vec<f64> = (0..=n).map(|i| -l + i as f64 * h).collect();
    let mut th: Vec<f64> = eta
        .iter()
        .map(|e| 0.5 * (theta_l + theta_r) + 0.5 * (theta_r - theta_l) * e.tanh())
        .collect();
    th[0] = theta_l;
    th[n] = theta_r;
    let m = n - 1;
    let mut ds = 1e-3;
    for _ in 0..400 {
        // residual and Jacobian of F(Θ) = (η/2)D1Θ + a D2 lnΘ, backward Euler in pseudo time
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let mut res_norm: f64 = 0.0;
        for k in 0..m {
            let i = k + 1;
            let c = eta[i] / (4.0 * h);
            let d = a / (h * h);
            let f = c * (th[i + 1] - th[i - 1]) + d * (th[i + 1].ln() - 2.0 * th[i].ln() + th[i - 1].ln());
            res_norm = res_norm.max(f.abs());
            rhs[k] = f;
            diag[k] = 1.0 / ds + 2.0 * d / th[i];
            lower[k] = c - d / th[i - 1];
            upper[k] = -c - d / th[i + 1];
        }
        if res_norm < 1e-13 {
            break;
        }
        // (I/ds - J) δ = F, Thomas algorithm
        for k in 1..m {
            let w = lower[k] / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        let mut delta = vec![0.0; m];
        delta[m - 1] = rhs[m - 1] / diag[m - 1];
        for k in (0..m - 1).rev() {
            delta[k] = (rhs[k] - upper[k] * delta[k + 1]) / diag[k];
        }
        for k in 0..m {
            th[k + 1] += delta[k];
        }
        ds = (ds * 2.0).min(1e8);
    }
    eta.into_iter().zip(th).collect()
}

/// Θ̂(0) from two relaxation grids combined by Richardson extrapolation.
pub fn relaxation_midpoint(theta_l: f64, theta_r: f64, a: f64) -> f64 {
    let mid = |n: usize| relaxation_contact(theta_l, theta_r, a, 10.0, n)[n / 2].1;
    let coarse = mid(4000);
    let fine = mid(8000);
    (4.0 * fine - coarse) / 3.0
}

/// Least-squares slope, intercept and R² of y against x.
pub fn linfit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (slope, icpt, 1.0 - ss_res / ss_tot)
}

/// A random R1-CD-R3 pair built forward from the left state, so the intermediate
/// states are known by construction.
pub fn random_pair(rng: &mut impl rand::Rng, g: &GasParams) -> (ThermoState, ThermoState, ThermoState, ThermoState) {
    let left = ThermoState::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
    let pl = g.r * left.theta / left.v;
    let pm = pl * rng.gen_range(0.3..0.95);
    let kl = isentrope(&left, g);
    let vs = (kl / pm).powf(1.0 / g.gamma);
    let us = curve_u(vs, &left, 1, g);
    let star = state_on_isentrope(vs, us, kl, g);
    let th2 = rng.gen_range(0.5..2.0) * star.theta;
    let starstar = ThermoState { v: g.r * th2 / pm, u: us, theta: th2 };
    let kr = isentrope(&starstar, g);
    let pr = pm * rng.gen_range(1.05..3.0);
    let vr = (kr / pr).powf(1.0 / g.gamma);
    // on the 3-curve through the right state, u grows from starstar to right
    let ur = us + quad(|e| lambda(e, kr, g), vr, starstar.v, 16);
    let right = state_on_isentrope(vr, ur, kr, g);
    (left, right, star, starstar)
}
