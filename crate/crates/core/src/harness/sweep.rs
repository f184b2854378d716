//! ε-sweeps of either model, log-log rate fits and the convergence report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::{check_ansatz_bound, spread_of, BoundCheck};
use super::config::ExperimentConfig;
use super::io::{kinetic_csv, kinetic_dump, profile_csv, KineticRow};
use crate::error::{Error, Result};
use crate::kinetic::{
    bgk_run, eulerian_grid_for, sup_distance_on_sigma, velocity_grid_for, weighted_distance, BgkConfig,
    GlobalMaxwellian,
};
use crate::ns::{run, sup_error_on_sigma, Grid, SolverConfig};
use crate::numerics::fit_line;
use crate::profiles::{Model, ProfileConfig, WaveAnsatz};
use crate::riemann::eval_riemann_eulerian;

/// Errors at or below this are treated as round-off.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Velocity nodes of the kinetic runs.
pub const VELOCITY_NODES: usize = 64;

/// e(ε) ≈ C·ε^r fitted in log-log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub constant: f64,
    /// RMS residual of ln e.
    pub residual: f64,
}

/// Ordinary least squares of ln e against ln ε; needs three points or more.
pub fn fit_rate(eps: &[f64], errors: &[f64]) -> Result<RateFit> {
    if eps.len() != errors.len() {
        return Err(Error::usage("eps and errors differ in length"));
    }
    if eps.len() < 3 {
        return Err(Error::usage(format!("rate fit needs at least 3 points, got {}", eps.len())));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::usage(format!("rate fit needs positive errors, got {e}")));
    }
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let f = fit_line(&lx, &ly).ok_or_else(|| Error::usage("rate fit needs distinct eps values"))?;
    Ok(RateFit { rate: f.slope, constant: f.intercept.exp(), residual: f.rms_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub cells: usize,
    pub steps: usize,
    pub max_drift: [f64; 3],
    /// (min v, min θ) for the fluid model, (min g, min h) for the kinetic one.
    pub minima: [f64; 2],
}

/// Outcome of one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub eps: f64,
    pub failure: Option<String>,
    pub summary: Option<RunSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub model: Model,
    pub h: f64,
    pub alpha: f64,
    pub dx_per_eps: f64,
    pub snapshot_times: Vec<f64>,
    pub eps: Vec<f64>,
    /// Sup error on the measurement set per snapshot time; None for failed runs.
    pub errors: Vec<Option<Vec<f64>>>,
    /// Final-time error divided by ε^{1/5}.
    pub scaled_errors: Vec<Option<f64>>,
    /// max/min of `scaled_errors` over surviving runs.
    pub scaled_spread: Option<f64>,
    /// Final-time errors strictly decrease with ε over surviving runs.
    pub monotone: bool,
    pub fitted_rate: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub fit_residual: Option<f64>,
    pub fit_note: Option<String>,
    pub bound_checks: Option<BoundCheck>,
    pub runs: Vec<RunRecord>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report holds only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
    }

    pub fn any_failed(&self) -> bool {
        self.runs.iter().any(|r| r.failure.is_some())
    }
}

/// What a single run should keep besides its errors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CaseOptions {
    pub csv: bool,
    pub dump: bool,
}

/// One ε: record, errors and the requested artifacts.
#[derive(Debug, Clone)]
pub struct CaseOutput {
    pub record: RunRecord,
    pub errors: Option<Vec<f64>>,
    /// (t, CSV text) per snapshot.
    pub csv: Vec<(f64, String)>,
    /// (t, bytes) of the kinetic dumps.
    pub dumps: Vec<(f64, Vec<u8>)>,
}

/// Ansatz of the config at one ε.
pub fn ansatz_for(cfg: &ExperimentConfig, eps: f64) -> Result<WaveAnsatz> {
    let pc = ProfileConfig::new(eps, cfg.nu, cfg.model, cfg.pattern()?)?;
    WaveAnsatz::new(pc, cfg.params)
}

type Csvs = Vec<(f64, String)>;

fn ns_case(cfg: &ExperimentConfig, eps: f64, opts: CaseOptions) -> Result<(RunSummary, Vec<f64>, Csvs)> {
    let a = ansatz_for(cfg, eps)?;
    let p = a.cfg.pattern;
    let grid = Grid::for_ansatz(&a, cfg.t_end, cfg.dx_per_eps * eps)?;
    let sc = SolverConfig::new(eps, cfg.nu, cfg.params, cfg.t_end)?;
    let out = run(grid, &a, &sc, &cfg.snapshot_times)?;
    let errors = out
        .snapshots
        .iter()
        .map(|s| sup_error_on_sigma(s, &p, &cfg.params, cfg.h, cfg.alpha, eps))
        .collect::<Result<Vec<_>>>()?;
    let csv = if opts.csv {
        out.snapshots
            .iter()
            .map(|s| (s.t, profile_csv((0..grid.n).map(|i| (s.t, grid.x(i), s.state(i))))))
            .collect()
    } else {
        Vec::new()
    };
    let summary = RunSummary {
        cells: grid.n,
        steps: out.ledger.steps,
        max_drift: out.ledger.max_drift,
        minima: [out.min_v, out.min_theta],
    };
    Ok((summary, errors, csv))
}

type KineticCase = (RunSummary, Vec<f64>, Csvs, Vec<(f64, Vec<u8>)>);

fn kinetic_case(cfg: &ExperimentConfig, eps: f64, opts: CaseOptions) -> Result<KineticCase> {
    let a = ansatz_for(cfg, eps)?;
    let p = a.cfg.pattern;
    let grid = eulerian_grid_for(&a, cfg.t_end, cfg.dx_per_eps * eps)?;
    let vg = velocity_grid_for(&p, VELOCITY_NODES)?;
    let bc = BgkConfig::new(eps, cfg.t_end)?;
    let out = bgk_run(grid, &vg, &a, &bc, &cfg.snapshot_times)?;
    let m_star = GlobalMaxwellian::for_states(&[p.left, p.right, p.star, p.starstar])?;
    let errors = out
        .snapshots
        .iter()
        .map(|f| sup_distance_on_sigma(f, &p, &cfg.params, &m_star, cfg.h, cfg.alpha, eps))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Vec::new();
    if opts.csv {
        for f in &out.snapshots {
            let mut rows = Vec::with_capacity(grid.n);
            for i in 0..grid.n {
                let s = f.state(i)?;
                let reference = eval_riemann_eulerian(&p, f.t, grid.x(i), &cfg.params)?;
                rows.push(KineticRow {
                    t: f.t,
                    x: grid.x(i),
                    rho: 1.0 / s.v,
                    u1: s.u,
                    theta: s.theta,
                    dist_weighted: weighted_distance(f, i, &reference, &m_star)?,
                });
            }
            csv.push((f.t, kinetic_csv(&rows)));
        }
    }
    let dumps = if opts.dump { out.snapshots.iter().map(|f| (f.t, kinetic_dump(f))).collect() } else { Vec::new() };
    let summary = RunSummary {
        cells: grid.n,
        steps: out.ledger.steps,
        max_drift: out.ledger.max_drift,
        minima: [out.ledger.min_g, out.ledger.min_h],
    };
    Ok((summary, errors, csv, dumps))
}

/// Runs the configured model at one ε. Numerical aborts are recorded, other errors returned.
pub fn run_case(cfg: &ExperimentConfig, eps: f64, opts: CaseOptions) -> Result<CaseOutput> {
    let res = match cfg.model {
        Model::NavierStokes => ns_case(cfg, eps, opts).map(|(s, e, c)| (s, e, c, Vec::new())),
        Model::Kinetic => kinetic_case(cfg, eps, opts),
    };
    match res {
        Ok((summary, errors, csv, dumps)) => Ok(CaseOutput {
            record: RunRecord { eps, failure: None, summary: Some(summary) },
            errors: Some(errors),
            csv,
            dumps,
        }),
        Err(e) if e.is_numerical() => Ok(CaseOutput {
            record: RunRecord { eps, failure: Some(e.to_string()), summary: None },
            errors: None,
            csv: Vec::new(),
            dumps: Vec::new(),
        }),
        Err(e) => Err(e),
    }
}

/// Assembles the report from per-ε outcomes given in ε order.
pub fn assemble_report(cfg: &ExperimentConfig, cases: &[CaseOutput], bound: Option<BoundCheck>) -> ConvergenceReport {
    let last = |c: &CaseOutput| c.errors.as_ref().and_then(|e| e.last().copied());
    let alive: Vec<(f64, f64)> = cases.iter().filter_map(|c| last(c).map(|e| (c.record.eps, e))).collect();
    let scaled: Vec<Option<f64>> = cases.iter().map(|c| last(c).map(|e| e / c.record.eps.powf(0.2))).collect();
    let alive_scaled: Vec<f64> = scaled.iter().flatten().copied().collect();
    let spread = spread_of(&alive_scaled);
    let monotone = alive.len() >= 2 && alive.windows(2).all(|w| w[1].1 < w[0].1);

    let (mut rate, mut constant, mut residual, mut note) = (None, None, None, None);
    if alive.len() < 3 {
        note = Some(format!("fit needs at least 3 surviving runs, have {}", alive.len()));
    } else if alive.iter().all(|&(_, e)| e <= NOISE_FLOOR) {
        note = Some("below noise floor".to_string());
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = alive.iter().copied().unzip();
        match fit_rate(&xs, &ys) {
            Ok(f) => {
                rate = Some(f.rate);
                constant = Some(f.constant);
                residual = Some(f.residual);
            }
            Err(e) => note = Some(e.to_string()),
        }
    }
    ConvergenceReport {
        model: cfg.model,
        h: cfg.h,
        alpha: cfg.alpha,
        dx_per_eps: cfg.dx_per_eps,
        snapshot_times: cfg.snapshot_times.clone(),
        eps: cases.iter().map(|c| c.record.eps).collect(),
        errors: cases.iter().map(|c| c.errors.clone()).collect(),
        scaled_errors: scaled,
        scaled_spread: (!alive_scaled.is_empty() && spread.is_finite()).then_some(spread),
        monotone,
        fitted_rate: rate,
        fitted_constant: constant,
        fit_residual: residual,
        fit_note: note,
        bound_checks: bound,
        runs: cases.iter().map(|c| c.record.clone()).collect(),
    }
}

/// Runs every ε concurrently and keeps the per-run artifacts.
pub fn sweep_cases(cfg: &ExperimentConfig, opts: CaseOptions) -> Result<Vec<CaseOutput>> {
    cfg.validate()?;
    cfg.pattern()?;
    cfg.eps_list.par_iter().map(|&e| run_case(cfg, e, opts)).collect()
}

/// Sweep with the ansatz bound check at the snapshot times.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let cases = sweep_cases(cfg, CaseOptions::default())?;
    let bound = check_ansatz_bound(cfg, &cfg.eps_list, &cfg.snapshot_times)?;
    Ok(assemble_report(cfg, &cases, Some(bound)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let eps = [1e-1, 3e-2, 1e-2, 3e-3];
        let e: Vec<f64> = eps.iter().map(|x: &f64| 2.5 * x.powf(0.3)).collect();
        let f = fit_rate(&eps, &e).unwrap();
        assert!((f.rate - 0.3).abs() < 1e-12);
        assert!((f.constant - 2.5).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn fit_rejects_short_or_nonpositive_input() {
        assert!(fit_rate(&[1e-2, 1e-3], &[1.0, 0.5]).is_err());
        assert!(fit_rate(&[1e-1, 1e-2, 1e-3], &[1.0, 0.0, 0.5]).is_err());
    }

    fn fake(eps: f64, err: Option<f64>) -> CaseOutput {
        CaseOutput {
            record: RunRecord {
                eps,
                failure: err.is_none().then(|| "abort".to_string()),
                summary: None,
            },
            errors: err.map(|e| vec![e]),
            csv: Vec::new(),
            dumps: Vec::new(),
        }
    }

    #[test]
    fn failed_runs_are_left_out_of_the_fit() {
        let cfg = ExperimentConfig::preset(Model::NavierStokes);
        let cases = [fake(1e-1, Some(0.5)), fake(3e-2, None), fake(1e-2, Some(0.3)), fake(3e-3, Some(0.2))];
        let r = assemble_report(&cfg, &cases, None);
        assert!(r.fitted_rate.is_some());
        assert!(r.monotone);
        assert!(r.any_failed());
        let cases = [fake(1e-1, Some(0.5)), fake(3e-2, None), fake(1e-2, Some(0.3))];
        let r = assemble_report(&cfg, &cases, None);
        assert!(r.fitted_rate.is_none());
        assert!(r.fit_note.is_some());
    }

    #[test]
    fn zero_errors_hit_the_noise_floor() {
        let cfg = ExperimentConfig::preset(Model::NavierStokes);
        let cases = [fake(1e-1, Some(0.0)), fake(1e-2, Some(0.0)), fake(1e-3, Some(1e-15))];
        let r = assemble_report(&cfg, &cases, None);
        assert_eq!(r.fit_note.as_deref(), Some("below noise floor"));
        assert!(r.fitted_rate.is_none());
    }
}
