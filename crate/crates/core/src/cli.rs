//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration/domain/usage error, 2 numerical abort.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::io::{eps_tag, profile_csv, residual_csv, write_file};
use crate::harness::{
    ansatz_for, assemble_report, check_ansatz_bound, sweep_cases, CaseOptions, CaseOutput, ExperimentConfig,
};
use crate::ns::Grid;
use crate::profiles::{ansatz_residuals, Model};
use crate::riemann::eval_riemann;

#[derive(Debug, Parser)]
#[command(name = "wavelimit", version, about = "Vanishing-dissipation experiments for R1-CD-R3 Riemann patterns")]
struct Cli {
    /// Experiment file (`key = value` lines); the built-in sample preset when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print the solved pattern as JSON and write the sampled exact profile.
    Riemann,
    /// Write the superposed ansatz at the snapshot times for every ε.
    Ansatz,
    /// Write the residuals Q1, Q2 of the ansatz for every ε.
    Residuals,
    /// Run the Navier-Stokes solver for every ε.
    NsRun,
    /// Navier-Stokes ε-sweep with rate fit and bound check.
    NsSweep,
    /// Run the BGK model for every ε.
    BgkRun {
        /// Also write binary dumps of the distributions.
        #[arg(long)]
        dump: bool,
    },
    /// BGK ε-sweep with rate fit and bound check.
    BgkSweep {
        #[arg(long)]
        dump: bool,
    },
    /// Compare the ansatz with the Riemann solution outside the contact core.
    CheckBound,
}

fn load(cli: &Cli, model: Option<Model>) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::preset(model.unwrap_or(Model::NavierStokes)),
    };
    if let Some(m) = model {
        if cfg.model != m {
            return Err(Error::Config(format!("this command needs model = {m:?}, the config has {:?}", cfg.model)));
        }
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    Ok(cfg)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn prefix(model: Model) -> &'static str {
    match model {
        Model::NavierStokes => "ns",
        Model::Kinetic => "kinetic",
    }
}

fn riemann(cfg: &ExperimentConfig) -> Result<()> {
    let p = cfg.pattern()?;
    print!("{}", json(&p));
    let t_max = cfg.snapshot_times.iter().copied().fold(cfg.t_end, f64::max);
    let half = 1.25 * p.max_speed() * t_max + 0.25;
    let n = 801;
    let mut rows = Vec::with_capacity(n * cfg.snapshot_times.len());
    for &t in &cfg.snapshot_times {
        for i in 0..n {
            let x = -half + 2.0 * half * i as f64 / (n - 1) as f64;
            rows.push((t, x, eval_riemann(&p, t, x, &cfg.params)?));
        }
    }
    write_file(&cfg.out_dir.join("riemann_profile.csv"), profile_csv(rows).as_bytes())
}

fn ansatz(cfg: &ExperimentConfig) -> Result<()> {
    for &eps in &cfg.eps_list {
        let a = ansatz_for(cfg, eps)?;
        let grid = Grid::for_ansatz(&a, cfg.t_end, cfg.dx_per_eps * eps)?;
        let mut rows = Vec::with_capacity(grid.n * cfg.snapshot_times.len());
        for &t in &cfg.snapshot_times {
            for x in grid.centers() {
                rows.push((t, x, a.superpose(t, x)?));
            }
        }
        let path = cfg.out_dir.join(format!("ansatz_eps{}.csv", eps_tag(eps)));
        write_file(&path, profile_csv(rows).as_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}

fn residuals(cfg: &ExperimentConfig) -> Result<()> {
    for &eps in &cfg.eps_list {
        let a = ansatz_for(cfg, eps)?;
        let dx = (cfg.dx_per_eps * eps).min(a.cfg.sigma / 8.0);
        let grid = Grid::for_ansatz(&a, cfg.t_end, dx)?;
        let xs: Vec<f64> = (0..=grid.n).map(|i| grid.x_min + i as f64 * grid.dx).collect();
        let fields = cfg
            .snapshot_times
            .iter()
            .map(|&t| ansatz_residuals(&a, &xs, t))
            .collect::<Result<Vec<_>>>()?;
        let path = cfg.out_dir.join(format!("residuals_eps{}.csv", eps_tag(eps)));
        write_file(&path, residual_csv(&fields).as_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}

fn write_cases(cfg: &ExperimentConfig, cases: &[CaseOutput]) -> Result<()> {
    let pre = prefix(cfg.model);
    for c in cases {
        let tag = eps_tag(c.record.eps);
        for (t, csv) in &c.csv {
            write_file(&cfg.out_dir.join(format!("{pre}_eps{tag}_t{t}.csv")), csv.as_bytes())?;
        }
        for (t, bytes) in &c.dumps {
            write_file(&cfg.out_dir.join(format!("{pre}_eps{tag}_t{t}.bin")), bytes)?;
        }
    }
    Ok(())
}

fn failure_code(cases: &[CaseOutput]) -> i32 {
    if cases.iter().any(|c| c.record.failure.is_some()) {
        2
    } else {
        0
    }
}

fn runs(cfg: &ExperimentConfig, dump: bool) -> Result<i32> {
    let cases = sweep_cases(cfg, CaseOptions { csv: true, dump })?;
    write_cases(cfg, &cases)?;
    let ledger: Vec<_> = cases
        .iter()
        .map(|c| serde_json::json!({ "run": c.record, "errors": c.errors }))
        .collect();
    let text = json(&ledger);
    write_file(&cfg.out_dir.join(format!("{}_runs.json", prefix(cfg.model))), text.as_bytes())?;
    print!("{text}");
    Ok(failure_code(&cases))
}

fn sweep_cmd(cfg: &ExperimentConfig, dump: bool) -> Result<i32> {
    let cases = sweep_cases(cfg, CaseOptions { csv: true, dump })?;
    write_cases(cfg, &cases)?;
    let bound = check_ansatz_bound(cfg, &cfg.eps_list, &cfg.snapshot_times)?;
    let report = assemble_report(cfg, &cases, Some(bound));
    let path = cfg.out_dir.join(format!("{}_report.json", prefix(cfg.model)));
    write_file(&path, (report.to_json() + "\n").as_bytes())?;
    for (e, err) in report.eps.iter().zip(&report.errors) {
        match err {
            Some(v) => println!("eps {e:e}: sup error {:?}", v),
            None => println!("eps {e:e}: failed"),
        }
    }
    match (report.fitted_rate, report.fitted_constant) {
        (Some(r), Some(c)) => println!("fitted rate {r:.4}, constant {c:.4}"),
        _ => println!("no fit: {}", report.fit_note.as_deref().unwrap_or("")),
    }
    println!("report: {}", path.display());
    Ok(failure_code(&cases))
}

fn check_bound(cfg: &ExperimentConfig) -> Result<()> {
    let b = check_ansatz_bound(cfg, &cfg.eps_list, &cfg.snapshot_times)?;
    let text = json(&b);
    write_file(&cfg.out_dir.join("bound.json"), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Riemann => riemann(&load(cli, None)?).map(|_| 0),
        Cmd::Ansatz => ansatz(&load(cli, None)?).map(|_| 0),
        Cmd::Residuals => residuals(&load(cli, None)?).map(|_| 0),
        Cmd::CheckBound => check_bound(&load(cli, None)?).map(|_| 0),
        Cmd::NsRun => runs(&load(cli, Some(Model::NavierStokes))?, false),
        Cmd::NsSweep => sweep_cmd(&load(cli, Some(Model::NavierStokes))?, false),
        Cmd::BgkRun { dump } => runs(&load(cli, Some(Model::Kinetic))?, *dump),
        Cmd::BgkSweep { dump } => sweep_cmd(&load(cli, Some(Model::Kinetic))?, *dump),
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Convenience for tests: runs a command against a config file and output directory.
pub fn run_with_config(cmd: &str, config: &Path, out: &Path) -> i32 {
    cli_main([
        OsString::from("wavelimit"),
        OsString::from(cmd),
        OsString::from("--config"),
        config.as_os_str().to_owned(),
        OsString::from("--out"),
        out.as_os_str().to_owned(),
    ])
}
