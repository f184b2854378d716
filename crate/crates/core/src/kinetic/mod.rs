//! Discrete-velocity BGK model in the reduced (g, h) form.
//!
//! For a distribution f(x, ξ) with no transverse bulk velocity only two marginals
//! matter: `g = ∫∫ f dξ₂dξ₃` and `h = ∫∫ (ξ₂² + ξ₃²)/2 · f dξ₂dξ₃`. The BGK
//! equation closes on this pair, and the five collision invariants reduce to
//! (ρ, ρu₁, ρ(E + u₁²/2)). Arrays are stored cell-major: `g[i * nv + k]` is
//! node k of cell i.

mod bgk;
mod micro;

pub use bgk::{
    bgk_run, eulerian_grid_for, init_kinetic, sup_distance_on_sigma, velocity_grid_for, BgkConfig, BgkLedger, BgkOutput,
    KineticRun,
};
pub use micro::{
    chi_gram, project_macro, project_micro, weighted_distance, weighted_distance_parts, GlobalMaxwellian,
    MacroProjector,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::ThermoState;
use crate::ns::Grid;

/// Gas constant of the kinetic normalization.
pub const KINETIC_R: f64 = 2.0 / 3.0;

/// Uniform ξ₁ nodes with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub center: f64,
    pub extent: f64,
}

impl VelocityGrid {
    pub fn new(center: f64, extent: f64, count: usize) -> Result<Self> {
        if count < 8 {
            return Err(Error::usage(format!("velocity grid needs at least 8 nodes, got {count}")));
        }
        if !(extent > 0.0 && extent.is_finite() && center.is_finite()) {
            return Err(Error::usage(format!("bad velocity extent {extent} around {center}")));
        }
        let h = 2.0 * extent / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count).map(|k| center - extent + k as f64 * h).collect();
        let mut weights = vec![h; count];
        weights[0] *= 0.5;
        weights[count - 1] *= 0.5;
        Ok(VelocityGrid { nodes, weights, center, extent })
    }

    /// Grid covering every state in `states` with 12 thermal widths of margin, checked by
    /// [`VelocityGrid::validate`].
    pub fn for_states(states: &[ThermoState], count: usize) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::usage("velocity grid needs at least one state"));
        }
        let umin = states.iter().map(|s| s.u).fold(f64::INFINITY, f64::min);
        let umax = states.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max);
        let tmin = states.iter().map(|s| s.theta).fold(f64::INFINITY, f64::min);
        let tmax = states.iter().map(|s| s.theta).fold(f64::NEG_INFINITY, f64::max);
        let extent = 0.5 * (umax - umin) + 12.0 * (KINETIC_R * tmax).sqrt();
        let grid = Self::new(0.5 * (umin + umax), extent, count)?;
        grid.validate((umin, umax), (tmin, tmax))?;
        Ok(grid)
    }

    /// Checks that Maxwellian moments are reproduced to 1e-8 over the given ranges.
    pub fn validate(&self, u_range: (f64, f64), theta_range: (f64, f64)) -> Result<()> {
        let mut g = vec![0.0; self.len()];
        let mut h = vec![0.0; self.len()];
        for &u in &[u_range.0, 0.5 * (u_range.0 + u_range.1), u_range.1] {
            for &th in &[theta_range.0, theta_range.1] {
                fill_maxwellian(1.0, u, th, &self.nodes, &mut g, &mut h);
                let m = reduced_moments(&self.weights, &self.nodes, &g, &h);
                let exact = [1.0, u, th + 0.5 * u * u];
                let second: f64 = self.nodes.iter().zip(&self.weights).zip(&g).map(|((x, w), gk)| w * x * x * gk).sum();
                let err = (0..3)
                    .map(|j| (m[j] - exact[j]).abs())
                    .fold((second - (KINETIC_R * th + u * u)).abs(), f64::max);
                if !(err <= 1e-8) {
                    return Err(Error::domain(format!(
                        "velocity grid [{:.3}, {:.3}] with {} nodes misses Maxwellian moments by {err:e} at u = {u}, theta = {th}",
                        self.center - self.extent,
                        self.center + self.extent,
                        self.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_speed(&self) -> f64 {
        self.nodes[0].abs().max(self.nodes[self.len() - 1].abs())
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }
}

/// Reduced Maxwellian pair (g_M, h_M) at one node, R = 2/3.
pub fn maxwellian(rho: f64, u1: f64, theta: f64, xi: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && theta > 0.0) {
        return Err(Error::domain(format!("Maxwellian needs rho, theta > 0, got {rho}, {theta}")));
    }
    let rt = KINETIC_R * theta;
    let g = rho / (2.0 * std::f64::consts::PI * rt).sqrt() * (-(xi - u1) * (xi - u1) / (2.0 * rt)).exp();
    Ok((g, rt * g))
}

/// Fills g, h with the Maxwellian on uniformly spaced `nodes`.
///
/// Uses the recurrence exp(-(ξ+dξ-u)²/2Rθ) = exp(-(ξ-u)²/2Rθ)·q, with q updated by a
/// constant factor, walking outward from the node nearest u; four exponentials per call.
pub(crate) fn fill_maxwellian(rho: f64, u: f64, theta: f64, nodes: &[f64], g: &mut [f64], h: &mut [f64]) {
    let n = nodes.len();
    let rt = KINETIC_R * theta;
    let d = nodes[1] - nodes[0];
    let amp = rho / (2.0 * std::f64::consts::PI * rt).sqrt();
    let c = ((u - nodes[0]) / d).round().clamp(0.0, (n - 1) as f64) as usize;
    let z = nodes[c] - u;
    let gc = amp * (-z * z / (2.0 * rt)).exp();
    let step2 = (-d * d / rt).exp();
    g[c] = gc;
    // the upward and downward walks are independent chains, interleaved
    let (mut up, mut down) = (gc, gc);
    let mut qu = (-(2.0 * z * d + d * d) / (2.0 * rt)).exp();
    let mut qd = (-(-2.0 * z * d + d * d) / (2.0 * rt)).exp();
    for j in 1..n {
        up *= qu;
        qu *= step2;
        down *= qd;
        qd *= step2;
        if c + j < n {
            g[c + j] = up;
        }
        if j <= c {
            g[c - j] = down;
        }
    }
    for k in 0..n {
        h[k] = rt * g[k];
    }
}

/// (ρ, ρu₁, ρ(E + u₁²/2)) of one reduced pair.
#[inline]
pub(crate) fn reduced_moments(w: &[f64], xi: &[f64], g: &[f64], h: &[f64]) -> [f64; 3] {
    // four partial sums per moment to break the dependency chain
    let mut m = [[0.0f64; 4]; 3];
    let n = w.len();
    let full = n - n % 4;
    for k0 in (0..full).step_by(4) {
        for l in 0..4 {
            let k = k0 + l;
            let wg = w[k] * g[k];
            m[0][l] += wg;
            m[1][l] += wg * xi[k];
            m[2][l] += 0.5 * wg * xi[k] * xi[k] + w[k] * h[k];
        }
    }
    for k in full..n {
        let wg = w[k] * g[k];
        m[0][0] += wg;
        m[1][0] += wg * xi[k];
        m[2][0] += 0.5 * wg * xi[k] * xi[k] + w[k] * h[k];
    }
    m.map(|a| (a[0] + a[1]) + (a[2] + a[3]))
}

/// (ρ, u₁, θ) from the conserved moments.
pub fn primitive(m: [f64; 3]) -> Result<(f64, f64, f64)> {
    let rho = m[0];
    if !(rho > 0.0) {
        return Err(Error::domain(format!("non-positive density {rho}")));
    }
    let u = m[1] / rho;
    let theta = (m[2] / rho - 0.5 * u * u) / (1.5 * KINETIC_R);
    if !(theta > 0.0) {
        return Err(Error::domain(format!("non-positive temperature {theta}")));
    }
    Ok((rho, u, theta))
}

/// Distribution on an Eulerian grid at time t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticField {
    pub t: f64,
    pub grid: Grid,
    pub velocity: VelocityGrid,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl KineticField {
    /// Same Maxwellian in every cell.
    pub fn uniform(grid: Grid, velocity: VelocityGrid, rho: f64, u: f64, theta: f64) -> Result<Self> {
        maxwellian(rho, u, theta, 0.0)?;
        let nv = velocity.len();
        let mut gm = vec![0.0; nv];
        let mut hm = vec![0.0; nv];
        fill_maxwellian(rho, u, theta, &velocity.nodes, &mut gm, &mut hm);
        let g = gm.repeat(grid.n);
        let h = hm.repeat(grid.n);
        Ok(KineticField { t: 0.0, grid, velocity, g, h })
    }

    /// The reduced pair of one cell.
    pub fn cell(&self, i: usize) -> (&[f64], &[f64]) {
        let nv = self.velocity.len();
        (&self.g[i * nv..(i + 1) * nv], &self.h[i * nv..(i + 1) * nv])
    }

    pub fn cell_vecs(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let (g, h) = self.cell(i);
        (g.to_vec(), h.to_vec())
    }

    pub fn set_cell(&mut self, i: usize, g: &[f64], h: &[f64]) {
        let nv = self.velocity.len();
        self.g[i * nv..(i + 1) * nv].copy_from_slice(g);
        self.h[i * nv..(i + 1) * nv].copy_from_slice(h);
    }

    /// Cell moments as a Lagrangian-style state (v = 1/ρ, u₁, θ).
    pub fn state(&self, i: usize) -> Result<ThermoState> {
        let (rho, u, theta) = primitive(moments(self, i))?;
        Ok(ThermoState { v: 1.0 / rho, u, theta })
    }
}

/// Conserved moments (ρ, ρu₁, ρ(E + u₁²/2)) of one cell.
pub fn moments(field: &KineticField, cell: usize) -> [f64; 3] {
    let (g, h) = field.cell(cell);
    reduced_moments(&field.velocity.weights, &field.velocity.nodes, g, h)
}
