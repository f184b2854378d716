//! Compressible Navier-Stokes in mass coordinates: grid, state, initial data and error metric.

mod scheme;

pub use scheme::{run, run_with, step, ConservationLedger, Forcing, RunOutput, Solver};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::profiles::{WaveAnsatz, NU_MIN};
use crate::riemann::{eval_riemann, WavePattern};

/// Uniform cell-centered grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::usage(format!("grid needs at least 16 cells, got {n}")));
        }
        if !(x_max > x_min) {
            return Err(Error::usage(format!("empty domain [{x_min}, {x_max}]")));
        }
        Ok(Grid { x_min, x_max, n, dx: (x_max - x_min) / n as f64 })
    }

    /// Grid with spacing at most `dx` on [x_min, x_max].
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::usage(format!("grid spacing must be positive, got {dx}")));
        }
        let n = ((x_max - x_min) / dx).ceil() as usize;
        Self::new(x_min, x_max, n.max(16))
    }

    /// Domain that keeps every wave of the ansatz away from the boundary until `t_end`:
    /// the outer fan edges stretched by 1.5 (or shifted by t0, if larger) plus 10σ.
    pub fn for_ansatz(ansatz: &WaveAnsatz, t_end: f64, dx: f64) -> Result<Self> {
        let p = &ansatz.cfg.pattern;
        let sigma = ansatz.cfg.sigma;
        let tt = (1.5 * t_end).max(t_end + ansatz.cfg.t0);
        let contact = ansatz.table.half_width() * (ansatz.cfg.eps * (1.0 + t_end)).sqrt();
        let x_min = (p.fan1.0 * tt).min(-contact) - 10.0 * sigma;
        let x_max = (p.fan3.1 * tt).max(contact) + 10.0 * sigma;
        Self::with_spacing(x_min, x_max, dx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Cell values of (v, u, θ) at time t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub grid: Grid,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
}

impl FieldState {
    pub fn constant(grid: Grid, s: ThermoState) -> Self {
        FieldState {
            t: 0.0,
            grid,
            v: vec![s.v; grid.n],
            u: vec![s.u; grid.n],
            theta: vec![s.theta; grid.n],
        }
    }

    pub fn state(&self, i: usize) -> ThermoState {
        ThermoState { v: self.v[i], u: self.u[i], theta: self.theta[i] }
    }

    pub fn min_v(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_theta(&self) -> f64 {
        self.theta.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps: f64,
    /// κ/ε.
    pub nu: f64,
    pub params: GasParams,
    pub cfl: f64,
    pub diff_safety: f64,
    pub t_end: f64,
    /// Abort when a step's invariant drift exceeds this.
    pub drift_tol: f64,
}

impl SolverConfig {
    pub fn new(eps: f64, nu: f64, params: GasParams, t_end: f64) -> Result<Self> {
        let c = SolverConfig {
            eps,
            nu,
            params,
            cfl: 0.4,
            diff_safety: 0.4,
            t_end,
            drift_tol: 1e-12,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.nu >= NU_MIN) {
            return Err(Error::domain(format!("nu must be at least {NU_MIN}, got {}", self.nu)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::domain(format!("cfl must lie in (0, 0.9], got {}", self.cfl)));
        }
        if !(self.diff_safety > 0.0 && self.diff_safety <= 0.5) {
            return Err(Error::domain(format!(
                "diff_safety must lie in (0, 0.5], got {}",
                self.diff_safety
            )));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::domain(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.nu * self.eps
    }
}

/// Samples the superposed ansatz at t = 0 on the cell centers.
pub fn init_from_ansatz(grid: Grid, ansatz: &WaveAnsatz) -> Result<FieldState> {
    let mut st = FieldState::constant(grid, ansatz.cfg.pattern.left);
    for i in 0..grid.n {
        let s = ansatz.superpose(0.0, grid.x(i))?;
        st.v[i] = s.v;
        st.u[i] = s.u;
        st.theta[i] = s.theta;
    }
    Ok(st)
}

/// True when (t, x) lies in the measurement set |x|/√(1+t) ≥ h·ε^α.
#[inline]
pub fn in_sigma_h(t: f64, x: f64, h: f64, alpha: f64, eps: f64) -> bool {
    x.abs() / (1.0 + t).sqrt() >= h * eps.powf(alpha)
}

/// Largest componentwise deviation from the Riemann solution over cells in the measurement set.
pub fn sup_error_on_sigma(
    snapshot: &FieldState,
    pattern: &WavePattern,
    params: &GasParams,
    h: f64,
    alpha: f64,
    eps: f64,
) -> Result<f64> {
    let t = snapshot.t;
    if !(h > 0.0) || !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::usage(format!("need h > 0 and 0 < alpha < 1/2, got h = {h}, alpha = {alpha}")));
    }
    if !(t >= h) {
        return Err(Error::usage(format!("snapshot time {t} precedes the initial layer t >= h = {h}")));
    }
    let mut worst: Option<f64> = None;
    for i in 0..snapshot.grid.n {
        let x = snapshot.grid.x(i);
        if !in_sigma_h(t, x, h, alpha, eps) {
            continue;
        }
        let exact = eval_riemann(pattern, t, x, params)?;
        let d = snapshot.state(i).max_diff(&exact);
        worst = Some(worst.map_or(d, |w: f64| w.max(d)));
    }
    worst.ok_or_else(|| Error::usage("measurement set does not meet the grid"))
}
