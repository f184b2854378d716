//! Splitting scheme for f_t + ξ₁ f_X = (M[f] - f)/ε on an Eulerian grid: first-order
//! upwind transport, then the relaxation integrated exactly over the step.

use serde::{Deserialize, Serialize};

use super::{fill_maxwellian, maxwellian, primitive, reduced_moments, weighted_distance, GlobalMaxwellian, KineticField, VelocityGrid};
use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::ns::{in_sigma_h, Grid};
use crate::numerics::{GaussRule, Neumaier};
use crate::profiles::WaveAnsatz;
use crate::riemann::{eval_riemann_eulerian, lagrangian_label, WavePattern};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgkConfig {
    /// Relaxation time; `f64::INFINITY` switches relaxation off.
    pub eps: f64,
    /// max |ξ|·dt/dx.
    pub cfl: f64,
    pub t_end: f64,
    /// Abort when a step's invariant drift exceeds this.
    pub drift_tol: f64,
}

impl BgkConfig {
    pub fn new(eps: f64, t_end: f64) -> Result<Self> {
        let c = BgkConfig { eps, cfl: 0.8, t_end, drift_tol: 1e-12 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::domain(format!("kinetic cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::domain(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgkLedger {
    pub steps: usize,
    /// Largest per-step |ΔΣ - dt·(boundary flux)| / max(1, |Σ|) for (ρ, ρu₁, ρ(E + u₁²/2)).
    pub max_drift: [f64; 3],
    pub min_g: f64,
    pub min_h: f64,
}

impl Default for BgkLedger {
    fn default() -> Self {
        BgkLedger { steps: 0, max_drift: [0.0; 3], min_g: f64::INFINITY, min_h: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgkOutput {
    pub snapshots: Vec<KineticField>,
    pub ledger: BgkLedger,
}

/// Time stepper holding the field and Maxwellian boundary data.
pub struct KineticRun {
    pub cfg: BgkConfig,
    pub field: KineticField,
    ghost_left: (Vec<f64>, Vec<f64>),
    ghost_right: (Vec<f64>, Vec<f64>),
    next_g: Vec<f64>,
    next_h: Vec<f64>,
    totals_cache: Option<[f64; 3]>,
    pub ledger: BgkLedger,
}

impl KineticRun {
    /// Boundary cells hold the Maxwellians of `left` and `right` (v = 1/ρ).
    pub fn new(field: KineticField, left: ThermoState, right: ThermoState, cfg: BgkConfig) -> Result<Self> {
        cfg.validate()?;
        let nv = field.velocity.len();
        let ghost = |s: ThermoState| -> Result<(Vec<f64>, Vec<f64>)> {
            maxwellian(1.0 / s.v, s.u, s.theta, 0.0)?;
            let mut g = vec![0.0; nv];
            let mut h = vec![0.0; nv];
            fill_maxwellian(1.0 / s.v, s.u, s.theta, &field.velocity.nodes, &mut g, &mut h);
            Ok((g, h))
        };
        let ghost_left = ghost(left)?;
        let ghost_right = ghost(right)?;
        let len = field.g.len();
        Ok(KineticRun {
            cfg,
            field,
            ghost_left,
            ghost_right,
            next_g: vec![0.0; len],
            next_h: vec![0.0; len],
            totals_cache: None,
            ledger: BgkLedger::default(),
        })
    }

    pub fn stable_dt(&self) -> f64 {
        self.cfg.cfl * self.field.grid.dx / self.field.velocity.max_speed()
    }

    fn totals(&self) -> [f64; 3] {
        let f = &self.field;
        let nv = f.velocity.len();
        let dx = f.grid.dx;
        let mut acc = [Neumaier::default(); 3];
        for i in 0..f.grid.n {
            let m = reduced_moments(
                &f.velocity.weights,
                &f.velocity.nodes,
                &f.g[i * nv..(i + 1) * nv],
                &f.h[i * nv..(i + 1) * nv],
            );
            for c in 0..3 {
                acc[c].add(m[c] * dx);
            }
        }
        acc.map(|a| a.total())
    }

    /// One transport + relaxation step of size dt.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let f = &self.field;
        let n = f.grid.n;
        let nv = f.velocity.len();
        let dx = f.grid.dx;
        let xi = &f.velocity.nodes;
        let w = &f.velocity.weights;
        if dt > self.stable_dt() * (1.0 + 1e-12) {
            return Err(Error::usage(format!("kinetic step {dt} exceeds the CFL limit {}", self.stable_dt())));
        }
        let before = match self.totals_cache.take() {
            Some(t) => t,
            None => self.totals(),
        };

        // boundary fluxes of (ρ, ρu, energy) through the two end faces
        let f = &self.field;
        let (gl, hl) = &self.ghost_left;
        let (gr, hr) = &self.ghost_right;
        let first = (&f.g[..nv], &f.h[..nv]);
        let last = (&f.g[(n - 1) * nv..], &f.h[(n - 1) * nv..]);
        let mut inflow = [0.0; 3];
        for k in 0..nv {
            let (lg, lh) = if xi[k] > 0.0 { (gl[k], hl[k]) } else { (first.0[k], first.1[k]) };
            let (rg, rh) = if xi[k] > 0.0 { (last.0[k], last.1[k]) } else { (gr[k], hr[k]) };
            let a = w[k] * xi[k];
            inflow[0] += a * (lg - rg);
            inflow[1] += a * xi[k] * (lg - rg);
            inflow[2] += a * (0.5 * xi[k] * xi[k] * (lg - rg) + (lh - rh));
        }

        let relax = if self.cfg.eps.is_finite() { Some((-dt / self.cfg.eps).exp()) } else { None };
        let nu: Vec<f64> = xi.iter().map(|x| x * dt / dx).collect();
        // nodes are sorted: [0, kpos) move left, [kpos, nv) move right
        let kpos = xi.partition_point(|&x| x <= 0.0);
        let mut gm = vec![0.0; nv];
        let mut hm = vec![0.0; nv];
        let mut min_g = f64::INFINITY;
        let mut min_h = f64::INFINITY;
        let mut acc = [Neumaier::default(); 3];
        let mut bad: Option<(usize, String)> = None;
        for i in 0..n {
            let (gm1, hm1) = if i == 0 { (&gl[..], &hl[..]) } else { (&f.g[(i - 1) * nv..i * nv], &f.h[(i - 1) * nv..i * nv]) };
            let (gp1, hp1) = if i + 1 == n {
                (&gr[..], &hr[..])
            } else {
                (&f.g[(i + 1) * nv..(i + 2) * nv], &f.h[(i + 1) * nv..(i + 2) * nv])
            };
            let g0 = &f.g[i * nv..(i + 1) * nv];
            let h0 = &f.h[i * nv..(i + 1) * nv];
            let ng = &mut self.next_g[i * nv..(i + 1) * nv];
            let nh = &mut self.next_h[i * nv..(i + 1) * nv];
            for k in 0..kpos {
                let c = nu[k];
                ng[k] = g0[k] - c * (gp1[k] - g0[k]);
                nh[k] = h0[k] - c * (hp1[k] - h0[k]);
            }
            for k in kpos..nv {
                let c = nu[k];
                ng[k] = g0[k] - c * (g0[k] - gm1[k]);
                nh[k] = h0[k] - c * (h0[k] - hm1[k]);
            }
            if let Some(decay) = relax {
                let m = reduced_moments(w, xi, ng, nh);
                let (rho, u, theta) = match primitive(m) {
                    Ok(p) => p,
                    Err(e) => {
                        bad.get_or_insert((i, e.to_string()));
                        continue;
                    }
                };
                fill_maxwellian(rho, u, theta, xi, &mut gm, &mut hm);
                for k in 0..nv {
                    ng[k] = gm[k] + (ng[k] - gm[k]) * decay;
                    nh[k] = hm[k] + (nh[k] - hm[k]) * decay;
                }
            }
            let m = reduced_moments(w, xi, ng, nh);
            for c in 0..3 {
                acc[c].add(m[c] * dx);
            }
            let (lg, lh) = (lane_min(ng), lane_min(nh));
            min_g = min_g.min(lg);
            min_h = min_h.min(lh);
            if bad.is_none() && !(lg >= 0.0 && lh >= 0.0) {
                bad = Some((i, format!("negative distribution: min g = {lg}, min h = {lh}")));
            }
        }
        let t = self.field.t + dt;
        if let Some((cell, reason)) = bad {
            return Err(Error::NumericalAbort { time: t, cell, reason });
        }
        std::mem::swap(&mut self.field.g, &mut self.next_g);
        std::mem::swap(&mut self.field.h, &mut self.next_h);
        self.field.t = t;
        self.ledger.min_g = self.ledger.min_g.min(min_g);
        self.ledger.min_h = self.ledger.min_h.min(min_h);

        let after = acc.map(|a| a.total());
        self.totals_cache = Some(after);
        for c in 0..3 {
            let drift = ((after[c] - before[c]) - dt * inflow[c]).abs() / after[c].abs().max(1.0);
            self.ledger.max_drift[c] = self.ledger.max_drift[c].max(drift);
            if drift > self.cfg.drift_tol {
                return Err(Error::NumericalAbort {
                    time: t,
                    cell: 0,
                    reason: format!("kinetic conservation drift {drift:e} in moment {c}"),
                });
            }
        }
        self.ledger.steps += 1;
        Ok(())
    }

    /// Steps to each time in `times` (sorted, within [t, t_end]) and returns the fields there.
    pub fn integrate(&mut self, times: &[f64]) -> Result<Vec<KineticField>> {
        let t_end = self.cfg.t_end;
        let mut times: Vec<f64> = if times.is_empty() { vec![t_end] } else { times.to_vec() };
        times.sort_by(|a, b| a.total_cmp(b));
        if let Some(&bad) = times.iter().find(|&&s| !(s >= self.field.t && s <= t_end)) {
            return Err(Error::usage(format!("snapshot time {bad} outside [{}, {t_end}]", self.field.t)));
        }
        let mut out = Vec::with_capacity(times.len());
        let full = self.stable_dt();
        for &target in &times {
            while self.field.t < target {
                let t = self.field.t;
                let last = t + full >= target;
                let dt = if last { target - t } else { full };
                self.step(dt)?;
                if last {
                    self.field.t = target;
                }
            }
            out.push(self.field.clone());
        }
        Ok(out)
    }
}

/// Minimum over four interleaved lanes.
#[inline]
fn lane_min(a: &[f64]) -> f64 {
    let mut m = [f64::INFINITY; 4];
    let chunks = a.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for l in 0..4 {
            m[l] = if c[l] < m[l] { c[l] } else { m[l] };
        }
    }
    for &x in rest {
        m[0] = m[0].min(x);
    }
    m[0].min(m[1]).min(m[2].min(m[3]))
}

/// Eulerian domain holding every wave of the ansatz until `t_end`, in the same way as
/// [`Grid::for_ansatz`] but with the Eulerian wave speeds u ∓ c.
pub fn eulerian_grid_for(ansatz: &WaveAnsatz, t_end: f64, dx: f64) -> Result<Grid> {
    let p = &ansatz.cfg.pattern;
    let g = &ansatz.params;
    let vmax = [p.left.v, p.right.v, p.star.v, p.starstar.v].into_iter().fold(0.0, f64::max);
    let tt = (1.5 * t_end).max(t_end + ansatz.cfg.t0);
    let lo = p.left.u - g.sound_speed(p.left.theta);
    let hi = p.right.u + g.sound_speed(p.right.theta);
    let contact = ansatz.table.half_width() * (ansatz.cfg.eps * (1.0 + t_end)).sqrt() * vmax + p.star.u.abs() * t_end;
    let pad = 10.0 * ansatz.cfg.sigma * vmax;
    Grid::with_spacing((lo * tt).min(-contact) - pad, (hi * tt).max(contact) + pad, dx)
}

/// Velocity grid covering the pattern's states.
pub fn velocity_grid_for(pattern: &WavePattern, count: usize) -> Result<VelocityGrid> {
    VelocityGrid::for_states(&[pattern.left, pattern.right, pattern.star, pattern.starstar], count)
}

/// Maxwellian of the t = 0 ansatz, moved to Eulerian positions X(x) = ∫₀ˣ V(0, y) dy.
pub fn init_kinetic(grid: Grid, velocity: &VelocityGrid, ansatz: &WaveAnsatz) -> Result<KineticField> {
    let cfg = &ansatz.cfg;
    let step = cfg.sigma.min(cfg.eps.sqrt()) / 8.0;
    let rule = GaussRule::new(6);
    let vol = |x: f64| -> Result<f64> { Ok(ansatz.superpose(0.0, x)?.v) };
    let mut vol_err = None;
    let mut seg = |a: f64, b: f64| -> f64 {
        rule.integrate(a, b, |y| match vol(y) {
            Ok(v) => v,
            Err(e) => {
                vol_err.get_or_insert(e);
                1.0
            }
        })
    };
    // tabulate X(x) outward from the contact until the Eulerian domain is covered
    let mut right = vec![(0.0, 0.0)];
    while right.last().unwrap().1 < grid.x_max + grid.dx {
        let (x, big) = *right.last().unwrap();
        right.push((x + step, big + seg(x, x + step)));
    }
    let mut left = vec![(0.0, 0.0)];
    while left.last().unwrap().1 > grid.x_min - grid.dx {
        let (x, big) = *left.last().unwrap();
        left.push((x - step, big - seg(x - step, x)));
    }
    if let Some(e) = vol_err {
        return Err(e);
    }
    left.reverse();
    left.pop();
    let table: Vec<(f64, f64)> = left.into_iter().chain(right).collect();

    let nv = velocity.len();
    let mut field = KineticField {
        t: 0.0,
        grid,
        velocity: velocity.clone(),
        g: vec![0.0; nv * grid.n],
        h: vec![0.0; nv * grid.n],
    };
    let mut gk = vec![0.0; nv];
    let mut hk = vec![0.0; nv];
    for i in 0..grid.n {
        let target = grid.x(i);
        let j = table.partition_point(|&(_, big)| big <= target).clamp(1, table.len() - 1);
        let (xa, ba) = table[j - 1];
        // Newton on X(x) = target inside the segment, X' = V
        let mut x = xa;
        for _ in 0..50 {
            let big = ba + rule.integrate(xa, x, |y| vol(y).unwrap_or(1.0));
            let dxn = (target - big) / vol(x)?;
            x += dxn;
            if dxn.abs() <= 1e-14 * (1.0 + x.abs()) {
                break;
            }
        }
        let s = ansatz.superpose(0.0, x)?;
        maxwellian(1.0 / s.v, s.u, s.theta, 0.0)?;
        fill_maxwellian(1.0 / s.v, s.u, s.theta, &velocity.nodes, &mut gk, &mut hk);
        field.set_cell(i, &gk, &hk);
    }
    Ok(field)
}

/// Runs the BGK model from the ansatz with the pattern's end states as boundary data.
pub fn bgk_run(grid: Grid, velocity: &VelocityGrid, ansatz: &WaveAnsatz, cfg: &BgkConfig, times: &[f64]) -> Result<BgkOutput> {
    if (ansatz.cfg.eps - cfg.eps).abs() > 1e-14 * cfg.eps {
        return Err(Error::usage(format!(
            "profile eps {} differs from kinetic eps {}",
            ansatz.cfg.eps, cfg.eps
        )));
    }
    let field = init_kinetic(grid, velocity, ansatz)?;
    let p = ansatz.cfg.pattern;
    let mut run = KineticRun::new(field, p.left, p.right, *cfg)?;
    let snapshots = run.integrate(times)?;
    Ok(BgkOutput { snapshots, ledger: run.ledger })
}

/// Largest weighted distance to the Maxwellian of the Riemann solution over cells whose
/// mass coordinate lies in the measurement set |x|/√(1+t) ≥ h·ε^α.
pub fn sup_distance_on_sigma(
    field: &KineticField,
    pattern: &WavePattern,
    params: &GasParams,
    m_star: &GlobalMaxwellian,
    h: f64,
    alpha: f64,
    eps: f64,
) -> Result<f64> {
    let t = field.t;
    if !(h > 0.0) || !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::usage(format!("need h > 0 and 0 < alpha < 1/2, got h = {h}, alpha = {alpha}")));
    }
    if !(t >= h) {
        return Err(Error::usage(format!("snapshot time {t} precedes the initial layer t >= h = {h}")));
    }
    let mut worst: Option<f64> = None;
    for i in 0..field.grid.n {
        let big_x = field.grid.x(i);
        let x = lagrangian_label(pattern, t, big_x, params)?;
        if !in_sigma_h(t, x, h, alpha, eps) {
            continue;
        }
        let reference = eval_riemann_eulerian(pattern, t, big_x, params)?;
        let d = weighted_distance(field, i, &reference, m_star)?;
        worst = Some(worst.map_or(d, |w: f64| w.max(d)));
    }
    worst.ok_or_else(|| Error::usage("measurement set does not meet the grid"))
}
