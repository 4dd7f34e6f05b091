//! Flat `key = value` configuration with one `[section]` per module,
//! `#` comments, no nesting. Every run configuration can be expressed as a
//! file plus repeatable `section.key=value` overrides; the manifest digest
//! is a SHA-256 over the canonical rendering of the effective config.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::characteristics::Numerics;
use crate::error::{Result, SolverError};
use crate::euler_map::MeshConfig;
use crate::experiments::{ScenarioTemplate, SweepConfig};
use crate::initial_data::{ExprFn, InitialData, PiecewiseLipschitzFn};
use crate::pressure::PressureModel;

/// Parsed profile selector for `u0`/`g0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Expr(ExprFn),
    Step { x0: f64, left: f64, right: f64 },
    Table(String),
}

/// Parsed pressure selector.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureSpec {
    Log,
    Gamma(f64),
    Table(String),
}

/// The full effective configuration.
#[derive(Debug, Clone)]
pub struct Config {
    // [pressure]
    pub pressure: PressureSpec,
    // [initial_data]
    pub u0: ProfileSpec,
    pub g0: ProfileSpec,
    pub window: (f64, f64),
    // [characteristics]
    pub epsilon: f64,
    pub ode_steps_per_unit_time: f64,
    pub tol_foot: f64,
    pub tol_inv: f64,
    pub delta_blow: f64,
    pub t_max: f64,
    pub n_cond: usize,
    pub step_rate_limit: f64,
    // [fields]
    pub grid_n: usize,
    pub bounds_t_frac: f64,
    pub level_m: f64,
    pub level_t_cap: f64,
    // [euler_map]
    pub n_quad: usize,
    // [experiments]
    pub eps_list: Vec<f64>,
    pub t_star: f64,
    pub lattice_nx: usize,
    pub lattice_nt: usize,
    pub seed_x: f64,
    pub seed_t: f64,
    pub blowup_eps_list: Vec<f64>,
    pub foot_span: (f64, f64),
    pub foot_grid_n: usize,
    pub weak_x0: f64,
    pub weak_x1: f64,
    pub weak_t1: f64,
    pub weak_grid_n: usize,
    pub weak_n_test: usize,
    pub mesh_n_time: usize,
    pub mesh_feet_per_side: usize,
    pub mesh_cluster_per_side: usize,
    pub mesh_n_y: usize,
    // [cli]
    pub seed: u64,
    pub out_dir: String,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            pressure: PressureSpec::Log,
            u0: ProfileSpec::Expr(ExprFn::NegTanh),
            g0: ProfileSpec::Step {
                x0: 0.0,
                left: 1.0,
                right: 2.0,
            },
            window: (-5.0, 5.0),
            epsilon: 0.1,
            ode_steps_per_unit_time: 1000.0,
            tol_foot: 1e-10,
            tol_inv: 1e-12,
            delta_blow: 1e-6,
            t_max: 4.0,
            n_cond: 4096,
            step_rate_limit: 0.02,
            grid_n: 101,
            bounds_t_frac: 0.9,
            level_m: 9.0,
            level_t_cap: 2.0,
            n_quad: 256,
            eps_list: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
            t_star: 0.5,
            lattice_nx: 201,
            lattice_nt: 101,
            seed_x: 0.0,
            seed_t: 0.45,
            blowup_eps_list: vec![0.2, 0.1, 0.05],
            foot_span: (-2.0, 2.0),
            foot_grid_n: 201,
            weak_x0: -3.0,
            weak_x1: 3.0,
            weak_t1: 0.4,
            weak_grid_n: 64,
            weak_n_test: 8,
            mesh_n_time: 800,
            mesh_feet_per_side: 900,
            mesh_cluster_per_side: 140,
            mesh_n_y: 561,
            seed: 42,
            out_dir: "out".into(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| SolverError::Config(format!("{key}: expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| SolverError::Config(format!("{key}: expected an integer, got '{v}'")))
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(SolverError::Config(format!(
            "{key}: expected 'a,b', got '{v}'"
        )));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|p| parse_f64(key, p)).collect()
}

fn parse_expr(key: &str, v: &str) -> Result<ExprFn> {
    let (name, args) = match v.find('(') {
        Some(i) => {
            let close = v
                .rfind(')')
                .ok_or_else(|| SolverError::Config(format!("{key}: missing ')': '{v}'")))?;
            (&v[..i], v[i + 1..close].split(',').collect::<Vec<_>>())
        }
        None => (v, Vec::new()),
    };
    let need = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(SolverError::Config(format!(
                "{key}: expr '{name}' takes {n} parameter(s), got {}",
                args.len()
            )))
        }
    };
    match name.trim() {
        "const" => {
            need(1)?;
            Ok(ExprFn::Const(parse_f64(key, args[0])?))
        }
        "linear" => {
            need(2)?;
            Ok(ExprFn::Linear {
                intercept: parse_f64(key, args[0])?,
                slope: parse_f64(key, args[1])?,
            })
        }
        "neg_tanh" => Ok(ExprFn::NegTanh),
        "tanh" => Ok(ExprFn::Tanh),
        "gauss_bump" => {
            need(3)?;
            Ok(ExprFn::GaussBump {
                amp: parse_f64(key, args[0])?,
                center: parse_f64(key, args[1])?,
                width: parse_f64(key, args[2])?,
            })
        }
        other => Err(SolverError::Config(format!(
            "{key}: unknown expression '{other}'"
        ))),
    }
}

fn parse_profile(key: &str, v: &str) -> Result<ProfileSpec> {
    if let Some(rest) = v.strip_prefix("expr:") {
        return Ok(ProfileSpec::Expr(parse_expr(key, rest)?));
    }
    if let Some(rest) = v.strip_prefix("step:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(SolverError::Config(format!(
                "{key}: step wants 'x0,left,right', got '{rest}'"
            )));
        }
        return Ok(ProfileSpec::Step {
            x0: parse_f64(key, parts[0])?,
            left: parse_f64(key, parts[1])?,
            right: parse_f64(key, parts[2])?,
        });
    }
    if let Some(rest) = v.strip_prefix("table:") {
        return Ok(ProfileSpec::Table(rest.trim().to_string()));
    }
    Err(SolverError::Config(format!(
        "{key}: expected 'expr:<name>(params)', 'step:x0,l,r' or 'table:<path>', got '{v}'"
    )))
}

fn parse_pressure(v: &str) -> Result<PressureSpec> {
    if v == "log" {
        return Ok(PressureSpec::Log);
    }
    if let Some(g) = v.strip_prefix("gamma:") {
        return Ok(PressureSpec::Gamma(parse_f64("pressure", g)?));
    }
    if let Some(p) = v.strip_prefix("table:") {
        return Ok(PressureSpec::Table(p.trim().to_string()));
    }
    Err(SolverError::Config(format!(
        "pressure: expected 'log', 'gamma:<g>' or 'table:<path>', got '{v}'"
    )))
}

impl Config {
    pub fn from_str(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SolverError::Config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    lineno + 1
                ))
            })?;
            cfg.set(&section, key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SolverError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_str(&text)
    }

    /// Apply one `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec.split_once('=').ok_or_else(|| {
            SolverError::Config(format!("override must be section.key=value, got '{spec}'"))
        })?;
        let (section, key) = path.trim().split_once('.').ok_or_else(|| {
            SolverError::Config(format!("override key must be section.key, got '{path}'"))
        })?;
        self.set(section, key, value.trim())
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let full = format!("{section}.{key}");
        match (section, key) {
            ("pressure", "pressure") => self.pressure = parse_pressure(value)?,
            ("initial_data", "u0") => self.u0 = parse_profile(&full, value)?,
            ("initial_data", "g0") => self.g0 = parse_profile(&full, value)?,
            ("initial_data", "window") => self.window = parse_pair(&full, value)?,
            ("characteristics", "epsilon") => self.epsilon = parse_f64(&full, value)?,
            ("characteristics", "ode_steps_per_unit_time") => {
                self.ode_steps_per_unit_time = parse_f64(&full, value)?
            }
            ("characteristics", "tol_foot") => self.tol_foot = parse_f64(&full, value)?,
            ("characteristics", "tol_inv") => self.tol_inv = parse_f64(&full, value)?,
            ("characteristics", "delta_blow") => self.delta_blow = parse_f64(&full, value)?,
            ("characteristics", "t_max") => self.t_max = parse_f64(&full, value)?,
            ("characteristics", "n_cond") => self.n_cond = parse_usize(&full, value)?,
            ("characteristics", "step_rate_limit") => {
                self.step_rate_limit = parse_f64(&full, value)?
            }
            ("fields", "grid_n") => self.grid_n = parse_usize(&full, value)?,
            ("fields", "bounds_t_frac") => self.bounds_t_frac = parse_f64(&full, value)?,
            ("fields", "level_m") => self.level_m = parse_f64(&full, value)?,
            ("fields", "level_t_cap") => self.level_t_cap = parse_f64(&full, value)?,
            ("euler_map", "n_quad") => self.n_quad = parse_usize(&full, value)?,
            ("experiments", "eps_list") => self.eps_list = parse_list(&full, value)?,
            ("experiments", "t_star") => self.t_star = parse_f64(&full, value)?,
            ("experiments", "lattice_nx") => self.lattice_nx = parse_usize(&full, value)?,
            ("experiments", "lattice_nt") => self.lattice_nt = parse_usize(&full, value)?,
            ("experiments", "seed_x") => self.seed_x = parse_f64(&full, value)?,
            ("experiments", "seed_t") => self.seed_t = parse_f64(&full, value)?,
            ("experiments", "blowup_eps_list") => self.blowup_eps_list = parse_list(&full, value)?,
            ("experiments", "foot_span") => self.foot_span = parse_pair(&full, value)?,
            ("experiments", "foot_grid_n") => self.foot_grid_n = parse_usize(&full, value)?,
            ("experiments", "weak_x0") => self.weak_x0 = parse_f64(&full, value)?,
            ("experiments", "weak_x1") => self.weak_x1 = parse_f64(&full, value)?,
            ("experiments", "weak_t1") => self.weak_t1 = parse_f64(&full, value)?,
            ("experiments", "weak_grid_n") => self.weak_grid_n = parse_usize(&full, value)?,
            ("experiments", "weak_n_test") => self.weak_n_test = parse_usize(&full, value)?,
            ("experiments", "mesh_n_time") => self.mesh_n_time = parse_usize(&full, value)?,
            ("experiments", "mesh_feet_per_side") => {
                self.mesh_feet_per_side = parse_usize(&full, value)?
            }
            ("experiments", "mesh_cluster_per_side") => {
                self.mesh_cluster_per_side = parse_usize(&full, value)?
            }
            ("experiments", "mesh_n_y") => self.mesh_n_y = parse_usize(&full, value)?,
            ("cli", "seed") => {
                self.seed = value.parse().map_err(|_| {
                    SolverError::Config(format!("{full}: expected u64, got '{value}'"))
                })?
            }
            ("cli", "out_dir") => self.out_dir = value.to_string(),
            _ => {
                return Err(SolverError::Config(format!("unknown config key '{full}'")));
            }
        }
        Ok(())
    }

    /// Canonical rendering; the digest hashes exactly this.
    pub fn canonical(&self) -> String {
        let f = |x: f64| format!("{x:e}");
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let profile = |p: &ProfileSpec| match p {
            ProfileSpec::Expr(e) => format!("expr:{e:?}"),
            ProfileSpec::Step { x0, left, right } => format!("step:{x0:e},{left:e},{right:e}"),
            ProfileSpec::Table(p) => format!("table:{p}"),
        };
        let pressure = match &self.pressure {
            PressureSpec::Log => "log".to_string(),
            PressureSpec::Gamma(g) => format!("gamma:{g:e}"),
            PressureSpec::Table(p) => format!("table:{p}"),
        };
        let mut lines = vec![
            format!("characteristics.delta_blow={}", f(self.delta_blow)),
            format!("characteristics.epsilon={}", f(self.epsilon)),
            format!("characteristics.n_cond={}", self.n_cond),
            format!(
                "characteristics.ode_steps_per_unit_time={}",
                f(self.ode_steps_per_unit_time)
            ),
            format!(
                "characteristics.step_rate_limit={}",
                f(self.step_rate_limit)
            ),
            format!("characteristics.t_max={}", f(self.t_max)),
            format!("characteristics.tol_foot={}", f(self.tol_foot)),
            format!("characteristics.tol_inv={}", f(self.tol_inv)),
            format!("cli.out_dir={}", self.out_dir),
            format!("cli.seed={}", self.seed),
            format!("euler_map.n_quad={}", self.n_quad),
            format!(
                "experiments.blowup_eps_list={}",
                list(&self.blowup_eps_list)
            ),
            format!("experiments.eps_list={}", list(&self.eps_list)),
            format!("experiments.foot_grid_n={}", self.foot_grid_n),
            format!(
                "experiments.foot_span={},{}",
                f(self.foot_span.0),
                f(self.foot_span.1)
            ),
            format!("experiments.lattice_nt={}", self.lattice_nt),
            format!("experiments.lattice_nx={}", self.lattice_nx),
            format!(
                "experiments.mesh_cluster_per_side={}",
                self.mesh_cluster_per_side
            ),
            format!("experiments.mesh_feet_per_side={}", self.mesh_feet_per_side),
            format!("experiments.mesh_n_time={}", self.mesh_n_time),
            format!("experiments.mesh_n_y={}", self.mesh_n_y),
            format!("experiments.seed_t={}", f(self.seed_t)),
            format!("experiments.seed_x={}", f(self.seed_x)),
            format!("experiments.t_star={}", f(self.t_star)),
            format!("experiments.weak_grid_n={}", self.weak_grid_n),
            format!("experiments.weak_n_test={}", self.weak_n_test),
            format!("experiments.weak_t1={}", f(self.weak_t1)),
            format!("experiments.weak_x0={}", f(self.weak_x0)),
            format!("experiments.weak_x1={}", f(self.weak_x1)),
            format!("fields.bounds_t_frac={}", f(self.bounds_t_frac)),
            format!("fields.grid_n={}", self.grid_n),
            format!("fields.level_m={}", f(self.level_m)),
            format!("fields.level_t_cap={}", f(self.level_t_cap)),
            format!("initial_data.g0={}", profile(&self.g0)),
            format!("initial_data.u0={}", profile(&self.u0)),
            format!(
                "initial_data.window={},{}",
                f(self.window.0),
                f(self.window.1)
            ),
            format!("pressure.pressure={pressure}"),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn numerics(&self) -> Numerics {
        Numerics {
            ode_steps_per_unit_time: self.ode_steps_per_unit_time,
            tol_foot: self.tol_foot,
            tol_inv: self.tol_inv,
            delta_blow: self.delta_blow,
            grid_n: self.grid_n,
            t_max: self.t_max,
            n_cond: self.n_cond,
            n_quad: self.n_quad,
            v0_diff_step_rel: 1e-6,
            horizon_frac: 0.999,
            step_rate_limit: self.step_rate_limit,
        }
    }

    fn build_profile(&self, spec: &ProfileSpec) -> Result<PiecewiseLipschitzFn> {
        match spec {
            ProfileSpec::Expr(e) => Ok(PiecewiseLipschitzFn::smooth(e.clone(), self.window)),
            ProfileSpec::Step { x0, left, right } => {
                Ok(PiecewiseLipschitzFn::step(*x0, *left, *right, self.window))
            }
            ProfileSpec::Table(path) => {
                let pts = read_two_column_csv(Path::new(path))?;
                PiecewiseLipschitzFn::from_table(pts, self.window)
            }
        }
    }

    pub fn pressure_model(&self) -> Result<PressureModel> {
        match &self.pressure {
            PressureSpec::Log => Ok(PressureModel::log_law()),
            PressureSpec::Gamma(g) => PressureModel::gamma_law(*g),
            PressureSpec::Table(path) => {
                let pts = read_two_column_csv(Path::new(path))?;
                PressureModel::tabulated(pts)
            }
        }
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        InitialData::new(self.build_profile(&self.u0)?, self.build_profile(&self.g0)?)
    }

    pub fn template(&self) -> Result<ScenarioTemplate> {
        Ok(ScenarioTemplate {
            model: self.pressure_model()?,
            data: self.initial_data()?,
            window: self.window,
            numerics: self.numerics(),
        })
    }

    pub fn scenario(&self) -> Result<crate::characteristics::Scenario> {
        self.template()?.with_epsilon(self.epsilon)
    }

    pub fn mesh_config(&self) -> MeshConfig {
        MeshConfig {
            n_time: self.mesh_n_time,
            feet_per_side: self.mesh_feet_per_side,
            cluster_per_side: self.mesh_cluster_per_side,
            n_y: self.mesh_n_y,
        }
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            template: self.template()?,
            epsilons: self.eps_list.clone(),
            t_star: self.t_star,
            lattice_nx: self.lattice_nx,
            lattice_nt: self.lattice_nt,
            seeds: vec![(self.seed_x, self.seed_t)],
            mesh: self.mesh_config(),
        })
    }
}

/// `rho,p` or `x,y` pairs, one per line, `#` comments allowed.
pub fn read_two_column_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SolverError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() || lineno == 0 && line.chars().any(|c| c.is_alphabetic()) {
            continue; // header or blank
        }
        let mut parts = line.split(',');
        let a = parts.next().ok_or_else(|| {
            SolverError::Config(format!("{}:{}: missing column", path.display(), lineno + 1))
        })?;
        let b = parts.next().ok_or_else(|| {
            SolverError::Config(format!("{}:{}: missing column", path.display(), lineno + 1))
        })?;
        out.push((parse_f64("table", a)?, parse_f64("table", b)?));
    }
    Ok(out)
}
