//! Run configuration: flat `key = value` text with `#` comments.
//!
//! The same keys are accepted as command-line overrides, and a resolved
//! configuration is written back out in this format as the run manifest.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{DEFAULT_MIN_PROMINENCE, DEFAULT_T_EVAL};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SetupParams, MIN_POINTS};
use crate::potential::KernelMethod;
use crate::propagator::{
    snapshot_steps, CouplingMode, StepScheme, DEFAULT_BOUNDARY_TOLERANCE, MAX_PICARD_ITERATIONS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Sweep,
    Compare,
    Feasibility,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(Mode::Single),
            "sweep" => Ok(Mode::Sweep),
            "compare" => Ok(Mode::Compare),
            "feasibility" => Ok(Mode::Feasibility),
            _ => Err(format!("unknown mode '{s}' (single|sweep|compare|feasibility)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Single => "single",
            Mode::Sweep => "sweep",
            Mode::Compare => "compare",
            Mode::Feasibility => "feasibility",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub t_final: f64,
    pub n_steps: usize,
    pub d: f64,
    pub sigma: f64,
    pub mass: f64,
    pub epsilon: f64,
    pub gravity: bool,
    pub coupling_scale: f64,
    pub scheme: CouplingMode,
    pub picard_iterations: usize,
    pub kernel: KernelMethod,
    pub snapshot_times: Vec<f64>,
    pub masses: Vec<f64>,
    pub t_eval: f64,
    pub min_prominence: f64,
    pub boundary_tolerance: f64,
    pub outdir: PathBuf,
    /// Worker threads for sweeps; 0 means one per available core.
    pub jobs: usize,
    pub emit_potential: bool,
    pub emit_plot_script: bool,
    pub feasibility_masses_u: Vec<f64>,
    pub feasibility_m_tilde: f64,
    pub feasibility_t_tilde: f64,
    /// Unused: runs are deterministic. Kept so manifests have a stable slot for it.
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Single,
            x_min: -70.0,
            x_max: 70.0,
            n_points: 2001,
            t_final: 10.0,
            n_steps: 1000,
            d: 6.0,
            sigma: 2.0,
            mass: 0.5,
            epsilon: 0.01,
            gravity: true,
            coupling_scale: 1.0,
            scheme: CouplingMode::FrozenPotential,
            picard_iterations: 2,
            kernel: KernelMethod::Auto,
            snapshot_times: vec![0.0, 2.0, 4.0, 6.0, DEFAULT_T_EVAL],
            masses: vec![0.2, 0.3, 0.4, 0.5, 0.6],
            t_eval: DEFAULT_T_EVAL,
            min_prominence: DEFAULT_MIN_PROMINENCE,
            boundary_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
            outdir: PathBuf::from("sn-output"),
            jobs: 0,
            emit_potential: false,
            emit_plot_script: false,
            feasibility_masses_u: vec![16e9, 1e8],
            feasibility_m_tilde: 0.5,
            feasibility_t_tilde: 8.0,
            seed: None,
        }
    }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on|off, got '{v}'")),
    }
}

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse '{v}' as a number"))
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_num(s.trim())).collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn scheme_name(mode: CouplingMode) -> &'static str {
    match mode {
        CouplingMode::FrozenPotential => "frozen",
        CouplingMode::PredictorCorrector => "pc",
    }
}

fn kernel_name(k: KernelMethod) -> &'static str {
    match k {
        KernelMethod::Auto => "auto",
        KernelMethod::Direct => "direct",
        KernelMethod::Fast => "fast",
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "mode" => self.mode = v.parse()?,
            "x_min" => self.x_min = parse_num(v)?,
            "x_max" => self.x_max = parse_num(v)?,
            "n_points" => self.n_points = parse_num(v)?,
            "t_final" => self.t_final = parse_num(v)?,
            "n_steps" => self.n_steps = parse_num(v)?,
            "d" => self.d = parse_num(v)?,
            "sigma" => self.sigma = parse_num(v)?,
            "mass" | "m_tilde" => self.mass = parse_num(v)?,
            "epsilon" => self.epsilon = parse_num(v)?,
            "gravity" => self.gravity = parse_bool(v)?,
            "coupling_scale" => self.coupling_scale = parse_num(v)?,
            "scheme" => {
                self.scheme = match v {
                    "frozen" => CouplingMode::FrozenPotential,
                    "pc" | "predictor-corrector" => CouplingMode::PredictorCorrector,
                    _ => return Err(format!("unknown scheme '{v}' (frozen|pc)")),
                }
            }
            "picard_iterations" => self.picard_iterations = parse_num(v)?,
            "kernel" => {
                self.kernel = match v {
                    "auto" => KernelMethod::Auto,
                    "direct" => KernelMethod::Direct,
                    "fast" => KernelMethod::Fast,
                    _ => return Err(format!("unknown kernel '{v}' (auto|direct|fast)")),
                }
            }
            "snapshot_times" => self.snapshot_times = parse_list(v)?,
            "masses" => self.masses = parse_list(v)?,
            "t_eval" => self.t_eval = parse_num(v)?,
            "min_prominence" => self.min_prominence = parse_num(v)?,
            "boundary_tolerance" => self.boundary_tolerance = parse_num(v)?,
            "outdir" => self.outdir = PathBuf::from(v),
            "jobs" => self.jobs = parse_num(v)?,
            "emit_potential" => self.emit_potential = parse_bool(v)?,
            "emit_plot_script" => self.emit_plot_script = parse_bool(v)?,
            "feasibility_masses_u" => self.feasibility_masses_u = parse_list(v)?,
            "feasibility_m_tilde" => self.feasibility_m_tilde = parse_num(v)?,
            "feasibility_t_tilde" => self.feasibility_t_tilde = parse_num(v)?,
            "seed" => self.seed = if v.is_empty() { None } else { Some(parse_num(v)?) },
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        let mut errors = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("line {}: expected 'key = value', got '{line}'", no + 1));
                continue;
            };
            if let Err(e) = self.set(key, value) {
                errors.push(format!("line {}: {e}", no + 1));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        cfg.merge_str(&text)?;
        Ok(cfg)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.x_min, self.x_max, self.n_points, self.t_final, self.n_steps)
    }

    pub fn setup(&self, m_tilde: f64, gravity_on: bool) -> SetupParams {
        SetupParams {
            d: self.d,
            sigma: self.sigma,
            m_tilde,
            epsilon: self.epsilon,
            gravity_on,
            coupling_scale: self.coupling_scale,
        }
    }

    pub fn step_scheme(&self) -> StepScheme {
        StepScheme { mode: self.scheme, picard_iterations: self.picard_iterations }
    }

    /// Every violated precondition, checked before any computation starts.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.mode == Mode::Feasibility {
            if self.feasibility_masses_u.is_empty() {
                errs.push("feasibility_masses_u is empty".to_string());
            }
            for (name, v) in self
                .feasibility_masses_u
                .iter()
                .map(|m| ("feasibility mass", *m))
                .chain([
                    ("feasibility_m_tilde", self.feasibility_m_tilde),
                    ("feasibility_t_tilde", self.feasibility_t_tilde),
                ])
            {
                if !v.is_finite() || v <= 0.0 {
                    errs.push(format!("{name} must be positive, got {v}"));
                }
            }
            return if errs.is_empty() { Ok(()) } else { Err(Error::Config(errs)) };
        }

        if !(self.x_min < self.x_max) {
            errs.push(format!("x_min ({}) must be below x_max ({})", self.x_min, self.x_max));
        }
        if self.n_points < MIN_POINTS {
            errs.push(format!("n_points must be at least {MIN_POINTS}, got {}", self.n_points));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            errs.push(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.n_steps == 0 {
            errs.push("n_steps must be at least 1".to_string());
        }
        if !(1..=MAX_PICARD_ITERATIONS).contains(&self.picard_iterations) {
            errs.push(format!(
                "picard_iterations must be in [1, {MAX_PICARD_ITERATIONS}], got {}",
                self.picard_iterations
            ));
        }
        if !(self.min_prominence > 0.0 && self.min_prominence < 1.0) {
            errs.push(format!("min_prominence must lie in (0, 1), got {}", self.min_prominence));
        }
        if !(self.boundary_tolerance > 0.0) {
            errs.push(format!("boundary_tolerance must be positive, got {}", self.boundary_tolerance));
        }

        let masses: Vec<f64> = match self.mode {
            Mode::Sweep => {
                if self.masses.is_empty() {
                    errs.push("masses is empty".to_string());
                }
                self.masses.clone()
            }
            _ => vec![self.mass],
        };
        for &m in &masses {
            errs.extend(self.setup(m, true).violations());
        }
        let reach = self.d + 3.0 * self.sigma;
        if reach >= self.x_max || -reach <= self.x_min {
            errs.push(format!(
                "packets at +/-{} with width {} do not fit in [{}, {}]",
                self.d, self.sigma, self.x_min, self.x_max
            ));
        }

        if let Ok(lattice) = self.lattice() {
            let times = match self.mode {
                Mode::Single => self.snapshot_times.clone(),
                Mode::Compare => merged_times(&self.snapshot_times, self.t_eval),
                _ => vec![self.t_eval],
            };
            if let Err(e) = snapshot_steps(&times, &lattice) {
                errs.push(e.to_string());
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// The resolved configuration in `key = value` form, parseable by [`RunConfig::merge_str`].
    pub fn to_manifest(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.to_string());
        kv("x_min", self.x_min.to_string());
        kv("x_max", self.x_max.to_string());
        kv("n_points", self.n_points.to_string());
        kv("t_final", self.t_final.to_string());
        kv("n_steps", self.n_steps.to_string());
        kv("d", self.d.to_string());
        kv("sigma", self.sigma.to_string());
        kv("mass", self.mass.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv("gravity", if self.gravity { "on" } else { "off" }.to_string());
        kv("coupling_scale", self.coupling_scale.to_string());
        kv("scheme", scheme_name(self.scheme).to_string());
        kv("picard_iterations", self.picard_iterations.to_string());
        kv("kernel", kernel_name(self.kernel).to_string());
        kv("snapshot_times", fmt_list(&self.snapshot_times));
        kv("masses", fmt_list(&self.masses));
        kv("t_eval", self.t_eval.to_string());
        kv("min_prominence", self.min_prominence.to_string());
        kv("boundary_tolerance", self.boundary_tolerance.to_string());
        kv("outdir", self.outdir.display().to_string());
        kv("jobs", self.jobs.to_string());
        kv("emit_potential", if self.emit_potential { "on" } else { "off" }.to_string());
        kv("emit_plot_script", if self.emit_plot_script { "on" } else { "off" }.to_string());
        kv("feasibility_masses_u", fmt_list(&self.feasibility_masses_u));
        kv("feasibility_m_tilde", self.feasibility_m_tilde.to_string());
        kv("feasibility_t_tilde", self.feasibility_t_tilde.to_string());
        kv("seed", self.seed.map(|v| v.to_string()).unwrap_or_default());
        s
    }
}

/// `times` plus `extra`, sorted, without duplicates.
pub(crate) fn merged_times(times: &[f64], extra: f64) -> Vec<f64> {
    let mut all: Vec<f64> = times.to_vec();
    all.push(extra);
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}
