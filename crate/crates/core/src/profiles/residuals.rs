//! Residuals Q₁, Q₂ left when the ansatz is substituted into the dissipative system.
//!
//! Derivatives use fourth-order centered differences; second-order terms are
//! differences of differenced fluxes, a 9-point stencil overall.

use serde::{Deserialize, Serialize};

use super::{Model, WaveAnsatz};
use crate::error::{Error, Result};
use crate::gas::{Family, ThermoState};
use crate::numerics::d1_centered4;

/// Residual fields on a grid at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub t: f64,
    pub x: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

/// Pointwise residual of the superposition and of each wave alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParts {
    pub total: [f64; 2],
    pub r1: [f64; 2],
    pub cd: [f64; 2],
    pub r3: [f64; 2],
    /// total minus the three single-wave residuals.
    pub interaction: [f64; 2],
}

#[derive(Clone, Copy)]
enum Part {
    Total,
    R1,
    Cd,
    R3,
}

fn eval_part(a: &WaveAnsatz, part: Part, t: f64, x: f64) -> Result<ThermoState> {
    match part {
        Part::Total => a.superpose_unchecked(t, x),
        Part::R1 => a.rarefaction(t, x, Family::One),
        Part::Cd => Ok(a.contact_unchecked(t, x)),
        Part::R3 => a.rarefaction(t, x, Family::Three),
    }
}

fn d1_forward4(f: [f64; 5], h: f64) -> f64 {
    (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
}

/// Default stencil step: resolves both σ and the contact width.
pub fn default_stencil_step(a: &WaveAnsatz, t: f64) -> f64 {
    let w = (a.cfg.eps * (1.0 + t)).sqrt();
    (a.cfg.sigma.min(w) / 32.0).max(1e-6)
}

fn residual_of(a: &WaveAnsatz, part: Part, t: f64, x: f64, h: f64) -> Result<[f64; 2]> {
    let cfg = &a.cfg;
    let g = a.params.gamma;
    let r = a.params.r;
    let eps = cfg.eps;

    let mut s = [ThermoState { v: 1.0, u: 0.0, theta: 1.0 }; 9];
    for (k, slot) in s.iter_mut().enumerate() {
        *slot = eval_part(a, part, t, x + (k as f64 - 4.0) * h)?;
    }
    let (visc, heat): (Box<dyn Fn(&ThermoState) -> f64>, Box<dyn Fn(&ThermoState) -> f64>) = match cfg.model {
        Model::NavierStokes => {
            let kappa = cfg.kappa();
            (Box::new(move |_| eps), Box::new(move |_| kappa))
        }
        Model::Kinetic => {
            let (mu0, la0) = (cfg.mu0, cfg.lambda0);
            (
                Box::new(move |st: &ThermoState| 4.0 / 3.0 * eps * mu0 * st.theta.sqrt()),
                Box::new(move |st: &ThermoState| eps * la0 * st.theta.sqrt()),
            )
        }
    };
    let mut fu = [0.0; 5];
    let mut ft = [0.0; 5];
    let mut p = [0.0; 5];
    for j in 0..5 {
        let c = j + 2;
        let ux = d1_centered4([s[c - 2].u, s[c - 1].u, s[c].u, s[c + 1].u, s[c + 2].u], h);
        let tx = d1_centered4(
            [s[c - 2].theta, s[c - 1].theta, s[c].theta, s[c + 1].theta, s[c + 2].theta],
            h,
        );
        fu[j] = visc(&s[c]) * ux / s[c].v;
        ft[j] = heat(&s[c]) * tx / s[c].v;
        p[j] = r * s[c].theta / s[c].v;
    }
    let mid = s[4];
    let ux0 = d1_centered4([s[2].u, s[3].u, s[4].u, s[5].u, s[6].u], h);
    let p0 = p[2];

    let speed = cfg.pattern.max_speed().max(1e-3);
    let ht = h / speed;
    let centered = t >= 2.0 * ht;
    let mut tu = [0.0; 5];
    let mut tt = [0.0; 5];
    for m in 0..5 {
        let tm = if centered { t + (m as f64 - 2.0) * ht } else { t + m as f64 * ht };
        let st = eval_part(a, part, tm, x)?;
        tu[m] = st.u;
        tt[m] = st.theta;
    }
    let (u_t, th_t) = if centered {
        (d1_centered4(tu, ht), d1_centered4(tt, ht))
    } else {
        (d1_forward4(tu, ht), d1_forward4(tt, ht))
    };

    let q1 = u_t + d1_centered4(p, h) - d1_centered4(fu, h);
    let q2 = r / (g - 1.0) * th_t + p0 * ux0 - d1_centered4(ft, h) - visc(&mid) * ux0 * ux0 / mid.v;
    Ok([q1, q2])
}

/// Residual split at one point; `h` defaults to [`default_stencil_step`].
pub fn residual_parts(a: &WaveAnsatz, t: f64, x: f64, h: Option<f64>) -> Result<ResidualParts> {
    if !(t >= 0.0) {
        return Err(Error::usage(format!("residuals need t >= 0, got {t}")));
    }
    let h = h.unwrap_or_else(|| default_stencil_step(a, t));
    let total = residual_of(a, Part::Total, t, x, h)?;
    let r1 = residual_of(a, Part::R1, t, x, h)?;
    let cd = residual_of(a, Part::Cd, t, x, h)?;
    let r3 = residual_of(a, Part::R3, t, x, h)?;
    let interaction = [
        total[0] - r1[0] - cd[0] - r3[0],
        total[1] - r1[1] - cd[1] - r3[1],
    ];
    Ok(ResidualParts { total, r1, cd, r3, interaction })
}

/// Q₁, Q₂ of the superposed ansatz on a uniform grid resolving σ with at least 8 points.
pub fn ansatz_residuals(a: &WaveAnsatz, grid: &[f64], t: f64) -> Result<Residuals> {
    if !(t >= 0.0) {
        return Err(Error::usage(format!("residuals need t >= 0, got {t}")));
    }
    if grid.len() < 2 {
        return Err(Error::usage("residual grid needs at least two points"));
    }
    let dx = grid[1] - grid[0];
    if !(dx > 0.0) {
        return Err(Error::usage("residual grid must be increasing"));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.max(1.0) {
            return Err(Error::usage("residual grid must be uniform"));
        }
    }
    let need = a.cfg.sigma / 8.0;
    if dx > need * (1.0 + 1e-12) {
        let span = grid[grid.len() - 1] - grid[0];
        return Err(Error::usage(format!(
            "grid spacing {dx} does not resolve sigma = {}: need dx <= {need} (at least {} points over this span)",
            a.cfg.sigma,
            (span / need).ceil() as usize + 1
        )));
    }
    let h = dx.min(default_stencil_step(a, t));
    let mut q1 = Vec::with_capacity(grid.len());
    let mut q2 = Vec::with_capacity(grid.len());
    for &x in grid {
        let q = residual_of(a, Part::Total, t, x, h)?;
        q1.push(q[0]);
        q2.push(q[1]);
    }
    Ok(Residuals { t, x: grid.to_vec(), q1, q2 })
}
