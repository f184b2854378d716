//! Approximate wave pattern: smoothed rarefactions, viscous contact wave and their superposition.

pub mod burgers;
pub mod contact;
pub mod residuals;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{Family, GasParams, ThermoState};
use crate::riemann::{curve_state, volume_for_speed, WavePattern};

pub use burgers::{burgers_exact, burgers_smooth, burgers_smooth_sample, BurgersSample};
pub use contact::{clamp_warnings, default_half_width, solve_contact_selfsimilar, ContactWaveTable, Diffusivity};
pub use residuals::{ansatz_residuals, residual_parts, ResidualParts, Residuals};

/// Which dissipative system the ansatz approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    NavierStokes,
    Kinetic,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "navier_stokes" | "ns" => Ok(Model::NavierStokes),
            "kinetic" | "bgk" => Ok(Model::Kinetic),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Lower bound on ν = κ/ε.
pub const NU_MIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub eps: f64,
    /// Time shift of the rarefactions, ε^{1/5} by default.
    pub t0: f64,
    /// Smoothing width of the rarefactions, ε^{2/5} by default.
    pub sigma: f64,
    /// Set when t0 or sigma were chosen by hand.
    pub shifts_overridden: bool,
    /// κ/ε for the Navier-Stokes model.
    pub nu: f64,
    /// Kinetic transport coefficients μ = μ₀√θ, λ = λ₀√θ.
    pub mu0: f64,
    pub lambda0: f64,
    pub model: Model,
    pub pattern: WavePattern,
}

impl ProfileConfig {
    pub fn new(eps: f64, nu: f64, model: Model, pattern: WavePattern) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        if !(nu >= NU_MIN) {
            return Err(Error::domain(format!("nu must be at least {NU_MIN}, got {nu}")));
        }
        Ok(ProfileConfig {
            eps,
            t0: eps.powf(0.2),
            sigma: eps.powf(0.4),
            shifts_overridden: false,
            nu,
            mu0: 1.0,
            lambda0: 1.0,
            model,
            pattern,
        })
    }

    pub fn with_shifts(mut self, t0: f64, sigma: f64) -> Result<Self> {
        if !(t0 >= 0.0 && sigma > 0.0) {
            return Err(Error::domain(format!("need t0 >= 0 and sigma > 0, got {t0}, {sigma}")));
        }
        self.t0 = t0;
        self.sigma = sigma;
        self.shifts_overridden = true;
        Ok(self)
    }

    pub fn with_transport(mut self, mu0: f64, lambda0: f64) -> Result<Self> {
        if !(mu0 > 0.0 && lambda0 > 0.0) {
            return Err(Error::domain("transport coefficients must be positive"));
        }
        self.mu0 = mu0;
        self.lambda0 = lambda0;
        Ok(self)
    }

    pub fn kappa(&self) -> f64 {
        self.nu * self.eps
    }

    /// Diffusivity of the contact-wave equation for this model.
    pub fn diffusivity(&self, params: &GasParams) -> Diffusivity {
        let p = self.pattern.p_mid;
        match self.model {
            Model::NavierStokes => {
                let g = params.gamma;
                Diffusivity::Constant(self.nu * p * (g - 1.0) / (params.r * params.r * g))
            }
            Model::Kinetic => Diffusivity::InverseSqrt(0.9 * p * self.lambda0),
        }
    }
}

/// Speed range (w₋, w₊) of a rarefaction family in the pattern.
pub fn family_speeds(pattern: &WavePattern, family: Family) -> (f64, f64) {
    match family {
        Family::One => pattern.fan1,
        Family::Three => pattern.fan3,
    }
}

fn is_degenerate(w: (f64, f64)) -> bool {
    !(w.1 - w.0 > 1e-14 * (1.0 + w.0.abs()))
}

/// Approximate rarefaction of the given family at (t, x); `anchor` is the end state whose
/// isentrope the wave follows.
pub fn rarefaction_profile(
    t: f64,
    x: f64,
    family: Family,
    anchor: &ThermoState,
    cfg: &ProfileConfig,
    params: &GasParams,
) -> Result<ThermoState> {
    Ok(rarefaction_sample(t, x, family, anchor, cfg, params)?.0)
}

/// State and x-derivatives (V_x, U_x, Θ_x) of an approximate rarefaction.
pub fn rarefaction_sample(
    t: f64,
    x: f64,
    family: Family,
    anchor: &ThermoState,
    cfg: &ProfileConfig,
    params: &GasParams,
) -> Result<(ThermoState, [f64; 3])> {
    let w = family_speeds(&cfg.pattern, family);
    let inner = match family {
        Family::One => cfg.pattern.star,
        Family::Three => cfg.pattern.starstar,
    };
    if is_degenerate(w) {
        return Ok((inner, [0.0; 3]));
    }
    let b = burgers_smooth_sample(t + cfg.t0, x, cfg.sigma, w.0, w.1)?;
    let v = volume_for_speed(b.w, anchor, params);
    let s = curve_state(v, anchor, family, params);
    let g = params.gamma;
    let v_x = -2.0 * v / ((g + 1.0) * b.w) * b.w_x;
    let u_x = -b.w * v_x;
    let th_x = (1.0 - g) * s.theta / v * v_x;
    Ok((s, [v_x, u_x, th_x]))
}

/// Viscous contact wave at (t, x).
pub fn contact_profile(
    t: f64,
    x: f64,
    cfg: &ProfileConfig,
    params: &GasParams,
    table: &ContactWaveTable,
) -> Result<ThermoState> {
    if !(t >= 0.0) {
        return Err(Error::usage(format!("contact profile needs t >= 0, got {t}")));
    }
    Ok(contact_state(t, x, cfg, params, table))
}

pub(crate) fn contact_state(t: f64, x: f64, cfg: &ProfileConfig, params: &GasParams, table: &ContactWaveTable) -> ThermoState {
    let p = cfg.pattern.p_mid;
    let um = cfg.pattern.starstar.u;
    let eps = cfg.eps;
    let scale = (eps * (1.0 + t)).sqrt();
    let eta = x / scale;
    let (th, thp) = table.eval(eta);
    let th_x = thp / scale;
    let th_t = -eta * thp / (2.0 * (1.0 + t));
    match cfg.model {
        Model::NavierStokes => {
            let g = params.gamma;
            let r = params.r;
            ThermoState {
                v: r * th / p,
                u: um + cfg.kappa() * (g - 1.0) / (r * g) * th_x / th,
                theta: th + eps * (r * g - cfg.nu * (g - 1.0)) / (g * p) * th_t,
            }
        }
        Model::Kinetic => {
            let sq = th.sqrt();
            let a = 0.9 * p * cfg.lambda0 / sq;
            ThermoState {
                v: 2.0 * th / (3.0 * p),
                u: um + 2.0 * eps * a / (3.0 * p) * th_x,
                theta: th
                    + 2.0 * eps / (3.0 * p) * th_t * (4.0 / 3.0 * cfg.mu0 * sq - 0.6 * cfg.lambda0 * sq),
            }
        }
    }
}

/// The three wave profiles and their superposition, with a solved contact table.
#[derive(Debug, Clone)]
pub struct WaveAnsatz {
    pub cfg: ProfileConfig,
    pub params: GasParams,
    pub table: ContactWaveTable,
}

impl WaveAnsatz {
    pub fn new(cfg: ProfileConfig, params: GasParams) -> Result<Self> {
        if cfg.model == Model::Kinetic && (params.r - 2.0 / 3.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "kinetic model requires R = 2/3, got {}",
                params.r
            )));
        }
        let diff = cfg.diffusivity(&params);
        let (tl, tr) = (cfg.pattern.star.theta, cfg.pattern.starstar.theta);
        let table = solve_contact_selfsimilar(tl, tr, diff, default_half_width(tl, tr, diff))?;
        Ok(WaveAnsatz { cfg, params, table })
    }

    /// Reuses a contact table; it depends on the pattern and ν but not on ε.
    pub fn with_table(cfg: ProfileConfig, params: GasParams, table: ContactWaveTable) -> Self {
        WaveAnsatz { cfg, params, table }
    }

    pub fn rarefaction(&self, t: f64, x: f64, family: Family) -> Result<ThermoState> {
        let anchor = match family {
            Family::One => self.cfg.pattern.left,
            Family::Three => self.cfg.pattern.right,
        };
        rarefaction_profile(t, x, family, &anchor, &self.cfg, &self.params)
    }

    pub fn contact(&self, t: f64, x: f64) -> Result<ThermoState> {
        contact_profile(t, x, &self.cfg, &self.params, &self.table)
    }

    pub(crate) fn contact_unchecked(&self, t: f64, x: f64) -> ThermoState {
        contact_state(t, x, &self.cfg, &self.params, &self.table)
    }

    /// Superposed pattern R1 + CD + R3 minus the two intermediate states.
    pub fn superpose(&self, t: f64, x: f64) -> Result<ThermoState> {
        if !(t >= 0.0) {
            return Err(Error::usage(format!("ansatz needs t >= 0, got {t}")));
        }
        self.superpose_unchecked(t, x)
    }

    pub(crate) fn superpose_unchecked(&self, t: f64, x: f64) -> Result<ThermoState> {
        let r1 = self.rarefaction(t, x, Family::One)?;
        let cd = self.contact_unchecked(t, x);
        let r3 = self.rarefaction(t, x, Family::Three)?;
        let a = self.cfg.pattern.star;
        let b = self.cfg.pattern.starstar;
        Ok(ThermoState {
            v: cd.v + (r1.v - a.v) + (r3.v - b.v),
            u: cd.u + (r1.u - a.u) + (r3.u - b.u),
            theta: cd.theta + (r1.theta - a.theta) + (r3.theta - b.theta),
        })
    }
}

/// Free-function form of [`WaveAnsatz::superpose`].
pub fn superpose(t: f64, x: f64, ansatz: &WaveAnsatz) -> Result<ThermoState> {
    ansatz.superpose(t, x)
}
