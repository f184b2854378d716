//! Finite-volume update: MUSCL/van Leer reconstruction with a Rusanov flux for the
//! inviscid part, centered differences for the viscous and heat fluxes, SSP-RK2 in time.

use serde::{Deserialize, Serialize};

use super::{FieldState, Grid, SolverConfig};
use crate::error::{Error, Result};
use crate::gas::ThermoState;
use crate::numerics::{compensated_sum, Neumaier};
use crate::profiles::WaveAnsatz;

/// Source term S(t, x) added to (v, u, E) equations.
pub type Forcing<'a> = &'a (dyn Fn(f64, f64) -> [f64; 3] + Sync);
type BoundaryFn<'a> = &'a (dyn Fn(f64, f64) -> ThermoState + Sync);

/// Per-step record of the discrete conservation check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservationLedger {
    pub steps: usize,
    /// Largest per-step |ΔΣ + dt·(boundary flux)| / max(1, |Σ|) for (v, u, E).
    pub max_drift: [f64; 3],
    /// Cumulative net inflow through the two boundaries.
    pub inflow: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub snapshots: Vec<FieldState>,
    pub ledger: ConservationLedger,
    pub min_v: f64,
    pub min_theta: f64,
}

#[inline]
fn van_leer(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p > 0.0 {
        2.0 * p / (a + b)
    } else {
        0.0
    }
}

/// Explicit solver with reusable work arrays.
pub struct Solver<'a> {
    pub cfg: SolverConfig,
    pub grid: Grid,
    left: ThermoState,
    right: ThermoState,
    boundary_fn: Option<BoundaryFn<'a>>,
    forcing: Option<Forcing<'a>>,
    prim: [Vec<f64>; 3],
    rhs0: [Vec<f64>; 3],
    rhs1: [Vec<f64>; 3],
    stage: [Vec<f64>; 3],
    summary: Option<Summary>,
    pub ledger: ConservationLedger,
}

impl<'a> Solver<'a> {
    /// Dirichlet data fixed at `left` and `right`.
    pub fn new(cfg: SolverConfig, grid: Grid, left: ThermoState, right: ThermoState) -> Result<Self> {
        cfg.validate()?;
        let n = grid.n;
        let z = |m: usize| [vec![0.0; m], vec![0.0; m], vec![0.0; m]];
        Ok(Solver {
            cfg,
            grid,
            left,
            right,
            boundary_fn: None,
            forcing: None,
            prim: z(n + 4),
            rhs0: z(n),
            rhs1: z(n),
            stage: z(n),
            summary: None,
            ledger: ConservationLedger::default(),
        })
    }

    /// Time-dependent ghost values taken from `f(t, x)`.
    pub fn with_boundary_fn(mut self, f: BoundaryFn<'a>) -> Self {
        self.boundary_fn = Some(f);
        self
    }

    pub fn with_forcing(mut self, f: Forcing<'a>) -> Self {
        self.forcing = Some(f);
        self
    }

    /// Ghost cell k of the extended array (k < 2 on the left, k >= n + 2 on the right).
    fn ghost(&self, t: f64, k: usize) -> ThermoState {
        let x = self.grid.x_min + (k as f64 - 1.5) * self.grid.dx;
        match self.boundary_fn {
            Some(f) => f(t, x),
            None if k < 2 => self.left,
            None => self.right,
        }
    }

    /// Conserved (v, u, E) from a field.
    pub fn conserved(&self, st: &FieldState) -> [Vec<f64>; 3] {
        let g = &self.cfg.params;
        let e: Vec<f64> = st
            .theta
            .iter()
            .zip(&st.u)
            .map(|(&th, &u)| g.e(th) + 0.5 * u * u)
            .collect();
        [st.v.clone(), st.u.clone(), e]
    }

    fn write_field(&self, t: f64, cons: &[Vec<f64>; 3], out: &mut FieldState) {
        let g = &self.cfg.params;
        let k = (g.gamma - 1.0) / g.r;
        out.t = t;
        for i in 0..self.grid.n {
            out.v[i] = cons[0][i];
            out.u[i] = cons[1][i];
            out.theta[i] = k * (cons[2][i] - 0.5 * cons[1][i] * cons[1][i]);
        }
    }

    fn check_positive(&self, t: f64, cons: &[Vec<f64>; 3]) -> Result<()> {
        let g = &self.cfg.params;
        let k = (g.gamma - 1.0) / g.r;
        for i in 0..self.grid.n {
            let v = cons[0][i];
            let th = k * (cons[2][i] - 0.5 * cons[1][i] * cons[1][i]);
            if !(v > 0.0 && th > 0.0) {
                return Err(Error::NumericalAbort {
                    time: t,
                    cell: i,
                    reason: format!("positivity lost: v = {v}, theta = {th}"),
                });
            }
        }
        Ok(())
    }

    /// Semi-discrete right-hand side into `rhs0` or `rhs1`; returns the boundary flux
    /// difference F_R - F_L and the integrated source.
    fn rhs(&mut self, t: f64, cons: &[Vec<f64>; 3], which: usize) -> ([f64; 3], [f64; 3]) {
        let n = self.grid.n;
        let dx = self.grid.dx;
        let inv_dx = 1.0 / dx;
        let g = self.cfg.params;
        let (gam, r) = (g.gamma, g.r);
        let k = (gam - 1.0) / r;
        let inv_k = 1.0 / k;
        let eps = self.cfg.eps;
        let kappa = self.cfg.kappa();

        for kk in [0, 1, n + 2, n + 3] {
            let s = self.ghost(t, kk);
            self.prim[0][kk] = s.v;
            self.prim[1][kk] = s.u;
            self.prim[2][kk] = s.theta;
        }
        {
            let [pv, pu, pt] = &mut self.prim;
            for i in 0..n {
                let u = cons[1][i];
                pv[i + 2] = cons[0][i];
                pu[i + 2] = u;
                pt[i + 2] = k * (cons[2][i] - 0.5 * u * u);
            }
        }
        let [pv, pu, pt] = &self.prim;
        let out = if which == 0 { &mut self.rhs0 } else { &mut self.rhs1 };
        let [o0, o1, o2] = out;
        let slope = |q: &[f64], c: usize| van_leer(q[c] - q[c - 1], q[c + 1] - q[c]);

        let mut sa = [slope(pv, 1), slope(pu, 1), slope(pt, 1)];
        let mut prev = [0.0; 3];
        let mut first = [0.0; 3];
        for j in 0..=n {
            let a = j + 1;
            let b = j + 2;
            let sb = [slope(pv, b), slope(pu, b), slope(pt, b)];
            let vl = pv[a] + 0.5 * sa[0];
            let ul = pu[a] + 0.5 * sa[1];
            let tl = pt[a] + 0.5 * sa[2];
            let vr = pv[b] - 0.5 * sb[0];
            let ur = pu[b] - 0.5 * sb[1];
            let tr = pt[b] - 0.5 * sb[2];
            sa = sb;
            let ivl = 1.0 / vl;
            let ivr = 1.0 / vr;
            let pl = r * tl * ivl;
            let pr = r * tr * ivr;
            let alpha = (gam * (pl * ivl).max(pr * ivr)).sqrt();
            let el = tl * inv_k + 0.5 * ul * ul;
            let er = tr * inv_k + 0.5 * ur * ur;
            // centered dissipative fluxes
            let ivf = 2.0 / (pv[a] + pv[b]);
            let uf = 0.5 * (pu[a] + pu[b]);
            let du = (pu[b] - pu[a]) * inv_dx;
            let dth = (pt[b] - pt[a]) * inv_dx;
            let h = [
                0.5 * (-ul - ur) - 0.5 * alpha * (vr - vl),
                0.5 * (pl + pr) - 0.5 * alpha * (ur - ul) - eps * du * ivf,
                0.5 * (pl * ul + pr * ur) - 0.5 * alpha * (er - el) - (kappa * dth + eps * uf * du) * ivf,
            ];
            if j == 0 {
                first = h;
            } else {
                o0[j - 1] = (prev[0] - h[0]) * inv_dx;
                o1[j - 1] = (prev[1] - h[1]) * inv_dx;
                o2[j - 1] = (prev[2] - h[2]) * inv_dx;
            }
            prev = h;
        }
        let mut src = [0.0; 3];
        if let Some(force) = self.forcing {
            let mut acc: [Vec<f64>; 3] = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
            for i in 0..n {
                let s = force(t, self.grid.x(i));
                o0[i] += s[0];
                o1[i] += s[1];
                o2[i] += s[2];
                for c in 0..3 {
                    acc[c].push(s[c] * dx);
                }
            }
            for c in 0..3 {
                src[c] = compensated_sum(acc[c].iter().copied());
            }
        }
        let bflux = [prev[0] - first[0], prev[1] - first[1], prev[2] - first[2]];
        (bflux, src)
    }

    /// Single pass over the conserved arrays: totals, extremes and the wave speed bound.
    fn summarize(&self, cons: &[Vec<f64>; 3]) -> Summary {
        let g = &self.cfg.params;
        let k = (g.gamma - 1.0) / g.r;
        let dx = self.grid.dx;
        let mut acc = [Neumaier::default(); 3];
        let mut s = Summary::empty();
        for i in 0..self.grid.n {
            let (v, u, e) = (cons[0][i], cons[1][i], cons[2][i]);
            acc[0].add(v * dx);
            acc[1].add(u * dx);
            acc[2].add(e * dx);
            s.note(v, k * (e - 0.5 * u * u));
        }
        s.totals = acc.map(|a| a.total());
        s
    }

    fn dt_from(&self, s: &Summary) -> f64 {
        let g = &self.cfg.params;
        let mut a2 = s.max_a2 * g.gamma * g.r;
        for b in [self.left, self.right] {
            a2 = a2.max(g.lagrangian_sound_speed(b.v, b.theta).powi(2));
        }
        let dx = self.grid.dx;
        let conv = self.cfg.cfl * dx / a2.sqrt();
        let dmax = self.cfg.eps.max(self.cfg.kappa() * (g.gamma - 1.0) / g.r);
        let diff = self.cfg.diff_safety * dx * dx * s.min_v / dmax;
        conv.min(diff)
    }

    /// Largest stable step for the current state.
    pub fn stable_dt(&self, cons: &[Vec<f64>; 3]) -> f64 {
        self.dt_from(&self.summarize(cons))
    }

    /// Advances `cons` from t by dt with SSP-RK2 and records the conservation check.
    pub fn advance(&mut self, t: f64, cons: &mut [Vec<f64>; 3], dt: f64) -> Result<()> {
        let n = self.grid.n;
        let dx = self.grid.dx;
        let k = (self.cfg.params.gamma - 1.0) / self.cfg.params.r;
        let before = match self.summary.take() {
            Some(s) => s.totals,
            None => self.summarize(cons).totals,
        };
        let (b0, s0) = self.rhs(t, cons, 0);
        let mut stage = std::mem::take(&mut self.stage);
        let mut check = Summary::empty();
        for i in 0..n {
            let v = cons[0][i] + dt * self.rhs0[0][i];
            let u = cons[1][i] + dt * self.rhs0[1][i];
            let e = cons[2][i] + dt * self.rhs0[2][i];
            stage[0][i] = v;
            stage[1][i] = u;
            stage[2][i] = e;
            check.note(v, k * (e - 0.5 * u * u));
        }
        if !check.positive() {
            let err = self.check_positive(t + dt, &stage);
            self.stage = stage;
            return err;
        }
        let (b1, s1) = self.rhs(t + dt, &stage, 1);
        let mut acc = [Neumaier::default(); 3];
        let mut next = Summary::empty();
        for i in 0..n {
            let v = 0.5 * cons[0][i] + 0.5 * (stage[0][i] + dt * self.rhs1[0][i]);
            let u = 0.5 * cons[1][i] + 0.5 * (stage[1][i] + dt * self.rhs1[1][i]);
            let e = 0.5 * cons[2][i] + 0.5 * (stage[2][i] + dt * self.rhs1[2][i]);
            cons[0][i] = v;
            cons[1][i] = u;
            cons[2][i] = e;
            acc[0].add(v * dx);
            acc[1].add(u * dx);
            acc[2].add(e * dx);
            next.note(v, k * (e - 0.5 * u * u));
        }
        self.stage = stage;
        if !next.positive() {
            return self.check_positive(t + dt, cons);
        }
        next.totals = acc.map(|a| a.total());
        let after = next.totals;
        self.summary = Some(next);
        for c in 0..3 {
            let budget = 0.5 * dt * ((s0[c] + s1[c]) - (b0[c] + b1[c]));
            let drift = ((after[c] - before[c]) - budget).abs() / after[c].abs().max(1.0);
            self.ledger.max_drift[c] = self.ledger.max_drift[c].max(drift);
            self.ledger.inflow[c] -= 0.5 * dt * (b0[c] + b1[c]);
            if drift > self.cfg.drift_tol {
                return Err(Error::NumericalAbort {
                    time: t + dt,
                    cell: 0,
                    reason: format!("conservation drift {drift:e} in component {c}"),
                });
            }
        }
        self.ledger.steps += 1;
        Ok(())
    }

    /// Integrates `init` to the configured end time, recording snapshots at `times`.
    pub fn integrate(&mut self, init: &FieldState, times: &[f64]) -> Result<RunOutput> {
        let t_end = self.cfg.t_end;
        let mut times: Vec<f64> = if times.is_empty() { vec![t_end] } else { times.to_vec() };
        times.sort_by(|a, b| a.total_cmp(b));
        if let Some(&bad) = times.iter().find(|&&s| !(s >= 0.0 && s <= t_end)) {
            return Err(Error::usage(format!("snapshot time {bad} outside [0, {t_end}]")));
        }
        let mut cons = self.conserved(init);
        let mut t = init.t;
        let mut field = init.clone();
        let mut out = Vec::with_capacity(times.len());
        let first = self.summarize(&cons);
        let mut min_v = first.min_v;
        let mut min_theta = first.min_theta;
        self.summary = Some(first);
        for &target in &times {
            while t < target {
                let s = self.summary.unwrap_or_else(|| self.summarize(&cons));
                let mut dt = self.dt_from(&s);
                if !(dt > 1e-14 * (1.0 + t)) {
                    return Err(Error::NumericalAbort {
                        time: t,
                        cell: 0,
                        reason: format!("time step underflow: dt = {dt:e}"),
                    });
                }
                let last = t + dt >= target;
                if last {
                    dt = target - t;
                }
                self.advance(t, &mut cons, dt)?;
                t = if last { target } else { t + dt };
                if let Some(s) = &self.summary {
                    min_v = min_v.min(s.min_v);
                    min_theta = min_theta.min(s.min_theta);
                }
            }
            self.write_field(t, &cons, &mut field);
            out.push(field.clone());
        }
        Ok(RunOutput { snapshots: out, ledger: self.ledger, min_v, min_theta })
    }
}

#[derive(Debug, Clone, Copy)]
struct Summary {
    totals: [f64; 3],
    /// max θ/v², the squared Lagrangian sound speed up to the factor γR.
    max_a2: f64,
    min_v: f64,
    min_theta: f64,
}

impl Summary {
    fn empty() -> Self {
        Summary { totals: [0.0; 3], max_a2: 0.0, min_v: f64::INFINITY, min_theta: f64::INFINITY }
    }

    #[inline]
    fn note(&mut self, v: f64, theta: f64) {
        self.min_v = self.min_v.min(v);
        self.min_theta = self.min_theta.min(theta);
        self.max_a2 = self.max_a2.max(theta / (v * v));
    }

    fn positive(&self) -> bool {
        self.min_v > 0.0 && self.min_theta > 0.0
    }
}

/// One step with the edge cells' values held as Dirichlet data.
pub fn step(state: &FieldState, cfg: &SolverConfig) -> Result<FieldState> {
    let n = state.grid.n;
    let mut solver = Solver::new(*cfg, state.grid, state.state(0), state.state(n - 1))?;
    let mut cons = solver.conserved(state);
    let dt = solver.stable_dt(&cons);
    solver.advance(state.t, &mut cons, dt)?;
    let mut out = state.clone();
    solver.write_field(state.t + dt, &cons, &mut out);
    Ok(out)
}

/// Runs from the ansatz at t = 0 with the pattern's end states as boundary data.
pub fn run(grid: Grid, ansatz: &WaveAnsatz, cfg: &SolverConfig, times: &[f64]) -> Result<RunOutput> {
    let init = super::init_from_ansatz(grid, ansatz)?;
    let p = ansatz.cfg.pattern;
    let mut solver = Solver::new(*cfg, grid, p.left, p.right)?;
    solver.integrate(&init, times)
}

/// Runs an arbitrary initial field with a prepared solver.
pub fn run_with(solver: &mut Solver<'_>, init: &FieldState, times: &[f64]) -> Result<RunOutput> {
    solver.integrate(init, times)
}
