//! `key = value` experiment files.
//!
//! One assignment per line, UTF-8, `#` starts a comment. Lists are written as
//! `[a, b, c]` or bare `a, b, c`; strings may be quoted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::profiles::{Model, NU_MIN};
use crate::riemann::{solve_pattern, WavePattern};

pub const KEYS: [&str; 18] = [
    "model",
    "gamma",
    "R",
    "A",
    "v_left",
    "u_left",
    "theta_left",
    "v_right",
    "u_right",
    "theta_right",
    "eps_list",
    "nu",
    "h",
    "alpha",
    "t_end",
    "snapshot_times",
    "dx_per_eps",
    "out_dir",
];

/// Everything needed to reproduce one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub params: GasParams,
    pub left: ThermoState,
    pub right: ThermoState,
    pub eps_list: Vec<f64>,
    pub nu: f64,
    pub h: f64,
    pub alpha: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Grid spacing is dx_per_eps·ε.
    pub dx_per_eps: f64,
    pub out_dir: PathBuf,
}

/// Default grid slaving: ε/8 for the fluid solver, ε/2 for the kinetic one.
pub fn default_dx_per_eps(model: Model) -> f64 {
    match model {
        Model::NavierStokes => 0.125,
        Model::Kinetic => 0.5,
    }
}

impl ExperimentConfig {
    /// The sample R1-CD-R3 pattern with the desk-scale sweep ε ∈ {1e-2, 3e-3, 1e-3}.
    pub fn preset(model: Model) -> Self {
        let params = match model {
            Model::NavierStokes => GasParams { r: 1.0, gamma: 5.0 / 3.0, a: 1.0 },
            Model::Kinetic => GasParams::kinetic(),
        };
        ExperimentConfig {
            model,
            params,
            left: ThermoState { v: 1.0, u: -0.5, theta: 1.0 },
            right: ThermoState { v: 1.2, u: 0.5, theta: 1.1 },
            eps_list: vec![1e-2, 3e-3, 1e-3],
            nu: 1.0,
            h: 0.5,
            alpha: 0.25,
            t_end: 1.0,
            snapshot_times: vec![1.0],
            dx_per_eps: default_dx_per_eps(model),
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.eps_list.is_empty() {
            return cfg("eps_list is empty".into());
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return cfg(format!("eps_list entries must be positive, got {e}"));
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return cfg(format!("eps_list must be strictly decreasing, got {:?}", self.eps_list));
        }
        if !(self.h > 0.0) {
            return cfg(format!("h must be positive, got {}", self.h));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return cfg(format!("alpha must lie in (0, 1/2), got {}", self.alpha));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return cfg(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.snapshot_times.is_empty() {
            return cfg("snapshot_times is empty".into());
        }
        if self.snapshot_times.windows(2).any(|w| !(w[1] > w[0])) {
            return cfg("snapshot_times must be strictly increasing".into());
        }
        for &t in &self.snapshot_times {
            if !(t >= self.h && t <= self.t_end) {
                return cfg(format!(
                    "snapshot time {t} outside [h, t_end] = [{}, {}]",
                    self.h, self.t_end
                ));
            }
        }
        if !(self.nu >= NU_MIN) {
            return cfg(format!("nu must be at least {NU_MIN}, got {}", self.nu));
        }
        if !(self.dx_per_eps > 0.0 && self.dx_per_eps <= 4.0) {
            return cfg(format!("dx_per_eps must lie in (0, 4], got {}", self.dx_per_eps));
        }
        GasParams::new(self.params.r, self.params.gamma, self.params.a).map_err(|e| Error::Config(e.to_string()))?;
        if self.model == Model::Kinetic {
            let k = GasParams::kinetic();
            if (self.params.r - k.r).abs() > 1e-12 || (self.params.gamma - k.gamma).abs() > 1e-12 {
                return cfg(format!(
                    "the kinetic model fixes R = 2/3 and gamma = 5/3, got R = {}, gamma = {}",
                    self.params.r, self.params.gamma
                ));
            }
        }
        for (side, s) in [("left", self.left), ("right", self.right)] {
            ThermoState::new(s.v, s.u, s.theta).map_err(|e| Error::Config(format!("{side} state: {e}")))?;
        }
        Ok(())
    }

    /// Solved Riemann pattern of the end states.
    pub fn pattern(&self) -> Result<WavePattern> {
        solve_pattern(self.left, self.right, &self.params)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key '{k}'", no + 1)));
            }
            if map.insert(k, (no + 1, v.trim())).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", no + 1)));
            }
        }

        let model = match map.get("model") {
            Some((_, v)) => unquote(v).parse::<Model>()?,
            None => Model::NavierStokes,
        };
        let mut c = Self::preset(model);
        let num = |key: &str| -> Result<Option<f64>> {
            match map.get(key) {
                None => Ok(None),
                Some((line, v)) => parse_f64(unquote(v))
                    .map(Some)
                    .map_err(|m| Error::Config(format!("line {line}: {key}: {m}"))),
            }
        };
        let list = |key: &str| -> Result<Option<Vec<f64>>> {
            match map.get(key) {
                None => Ok(None),
                Some((line, v)) => parse_list(v)
                    .map(Some)
                    .map_err(|m| Error::Config(format!("line {line}: {key}: {m}"))),
            }
        };
        let required = |key: &str| -> Result<f64> {
            num(key)?.ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
        };

        if let Some(g) = num("gamma")? {
            c.params.gamma = g;
        }
        if let Some(r) = num("R")? {
            c.params.r = r;
        }
        if let Some(a) = num("A")? {
            c.params.a = a;
        }
        c.left = ThermoState { v: required("v_left")?, u: required("u_left")?, theta: required("theta_left")? };
        c.right = ThermoState { v: required("v_right")?, u: required("u_right")?, theta: required("theta_right")? };
        c.eps_list = list("eps_list")?.ok_or_else(|| Error::Config("missing required key 'eps_list'".into()))?;
        if let Some(v) = num("nu")? {
            c.nu = v;
        }
        if let Some(v) = num("h")? {
            c.h = v;
        }
        if let Some(v) = num("alpha")? {
            c.alpha = v;
        }
        if let Some(v) = num("t_end")? {
            c.t_end = v;
        }
        c.snapshot_times = list("snapshot_times")?.unwrap_or_else(|| vec![c.t_end]);
        if let Some(v) = num("dx_per_eps")? {
            c.dx_per_eps = v;
        }
        if let Some((_, v)) = map.get("out_dir") {
            c.out_dir = PathBuf::from(unquote(v));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        let model = match self.model {
            Model::NavierStokes => "navier_stokes",
            Model::Kinetic => "kinetic",
        };
        format!(
            "model = {model}\ngamma = {}\nR = {}\nA = {}\n\
             v_left = {}\nu_left = {}\ntheta_left = {}\n\
             v_right = {}\nu_right = {}\ntheta_right = {}\n\
             eps_list = [{}]\nnu = {}\nh = {}\nalpha = {}\nt_end = {}\n\
             snapshot_times = [{}]\ndx_per_eps = {}\nout_dir = \"{}\"\n",
            self.params.gamma,
            self.params.r,
            self.params.a,
            self.left.v,
            self.left.u,
            self.left.theta,
            self.right.v,
            self.right.u,
            self.right.theta,
            list(&self.eps_list),
            self.nu,
            self.h,
            self.alpha,
            self.t_end,
            list(&self.snapshot_times),
            self.dx_per_eps,
            self.out_dir.display(),
        )
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    let inner = match (s.strip_prefix('['), s.ends_with(']')) {
        (Some(rest), true) => &rest[..rest.len() - 1],
        (None, false) => s,
        _ => return Err(format!("unbalanced brackets in '{s}'")),
    };
    inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_f64)
        .collect()
}
