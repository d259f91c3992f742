//! Campaign driver behind the `sn-sim` binary: single runs, free-vs-gravity
//! comparisons, mass sweeps and feasibility tables.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::analysis::{fringe_metrics, fringe_width_scan, FringeMetrics, FringeScan};
use crate::config::{merged_times, Mode, RunConfig};
use crate::error::{Error, Result};
use crate::lattice::prepare_double_gaussian;
use crate::output::{self, MetricsRow};
use crate::propagator::{Evolution, RunRecord};
use crate::units::{feasibility_report, FeasibilityReport, Quantity};

/// What a campaign produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Human-readable digest for the terminal.
    pub summary: String,
    pub scan: Option<FringeScan>,
    pub feasibility: Vec<FeasibilityReport>,
}

/// One simulation from the double-Gaussian initial state.
pub fn simulate(config: &RunConfig, m_tilde: f64, gravity: bool, snapshot_times: &[f64]) -> Result<RunRecord> {
    let lattice = config.lattice()?;
    let params = config.setup(m_tilde, gravity);
    let initial = prepare_double_gaussian(&lattice, &params)?;
    Evolution::new(params, lattice, config.step_scheme())
        .boundary_tolerance(config.boundary_tolerance)
        .kernel(config.kernel)
        .run(&initial, snapshot_times)
}

fn metrics_rows(record: &RunRecord, min_prominence: f64) -> Result<Vec<MetricsRow>> {
    let t0 = record.diagnostics[0].t_tilde;
    let dt = record.lattice.dt();
    record
        .snapshots
        .iter()
        .map(|snap| {
            let diag = record.diagnostics[((snap.t_tilde() - t0) / dt).round() as usize];
            Ok(MetricsRow {
                m_tilde: record.params.m_tilde,
                gravity: record.params.gravity_on,
                t_tilde: snap.t_tilde(),
                norm: diag.norm,
                energy: diag.energy(),
                metrics: fringe_metrics(&snap.density(), &record.lattice, min_prominence)?,
            })
        })
        .collect()
}

fn fmt_w(w: Option<f64>) -> String {
    w.map(|v| format!("{v:.4}")).unwrap_or_else(|| "none".into())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        builder = builder.num_threads(jobs);
    }
    builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {jobs} worker threads: {e}")))
}

/// Validates `config` and runs the selected campaign, writing artifacts to `config.outdir`.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = config.outdir.clone();
    std::fs::create_dir_all(&dir)?;
    let mut artifacts = Vec::new();
    let manifest = dir.join("manifest.txt");
    output::write_manifest(&manifest, config)?;
    artifacts.push(manifest);

    let mut outcome = match config.mode {
        Mode::Single => run_single(config)?,
        Mode::Compare => run_compare(config)?,
        Mode::Sweep => run_sweep(config)?,
        Mode::Feasibility => run_feasibility(config)?,
    };
    if config.emit_plot_script {
        outcome.artifacts.push(output::write_plot_script(&dir)?);
    }
    artifacts.append(&mut outcome.artifacts);
    outcome.artifacts = artifacts;
    Ok(outcome)
}

fn run_single(config: &RunConfig) -> Result<Outcome> {
    let dir = &config.outdir;
    let record = simulate(config, config.mass, config.gravity, &config.snapshot_times)?;
    let mut artifacts = output::write_snapshots(&dir.join("snapshots"), &record, config.emit_potential)?;
    let rows = metrics_rows(&record, config.min_prominence)?;
    let metrics = dir.join("metrics.csv");
    output::write_metrics(&metrics, config.min_prominence, &rows)?;
    let series = dir.join("series.csv");
    output::write_series(&series, &record)?;
    artifacts.extend([metrics, series]);

    let mut summary = format!(
        "single run: m_tilde = {}, gravity {}, max |norm - 1| = {:.2e}\n",
        config.mass,
        if config.gravity { "on" } else { "off" },
        record.max_norm_error()
    );
    for r in &rows {
        summary.push_str(&format!(
            "  t = {:7.3}  w = {}  visibility = {:.3}  separation = {:.3}  rms = {:.3}\n",
            r.t_tilde,
            fmt_w(r.metrics.w),
            r.metrics.visibility,
            r.metrics.peak_separation,
            r.metrics.rms_spread
        ));
    }
    Ok(Outcome { artifacts, summary, scan: None, feasibility: Vec::new() })
}

/// Fringe metrics of a gravity-off / gravity-on pair at the same time.
#[derive(Debug, Clone, Copy)]
pub struct Comparison {
    pub t_tilde: f64,
    pub free: FringeMetrics,
    pub gravity: FringeMetrics,
    /// Max-norm difference of the two densities.
    pub density_linf: f64,
}

pub fn compare_records(free: &RunRecord, gravity: &RunRecord, t_tilde: f64, min_prominence: f64) -> Result<Comparison> {
    let pick = |r: &RunRecord| {
        r.snapshot_at(t_tilde)
            .map(|s| s.density())
            .ok_or_else(|| Error::invalid(format!("no snapshot at t = {t_tilde}")))
    };
    let a = pick(free)?;
    let b = pick(gravity)?;
    Ok(Comparison {
        t_tilde,
        free: fringe_metrics(&a, &free.lattice, min_prominence)?,
        gravity: fringe_metrics(&b, &gravity.lattice, min_prominence)?,
        density_linf: a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
    })
}

fn run_compare(config: &RunConfig) -> Result<Outcome> {
    let dir = &config.outdir;
    let times = merged_times(&config.snapshot_times, config.t_eval);
    let pool = thread_pool(config.jobs.min(2))?;
    let (free, gravity) = pool.install(|| {
        rayon::join(
            || simulate(config, config.mass, false, &times),
            || simulate(config, config.mass, true, &times),
        )
    });
    let (free, gravity) = (free?, gravity?);

    let mut artifacts = output::write_snapshots(&dir.join("snapshots").join("free"), &free, false)?;
    artifacts.extend(output::write_snapshots(
        &dir.join("snapshots").join("gravity"),
        &gravity,
        config.emit_potential,
    )?);
    let mut rows = metrics_rows(&free, config.min_prominence)?;
    rows.extend(metrics_rows(&gravity, config.min_prominence)?);
    let metrics = dir.join("metrics.csv");
    output::write_metrics(&metrics, config.min_prominence, &rows)?;
    artifacts.push(metrics);

    let c = compare_records(&free, &gravity, config.t_eval, config.min_prominence)?;
    let summary = format!(
        "compare: m_tilde = {} at t = {}\n  w_free = {}  w_sn = {}\n  visibility free = {:.3}  sn = {:.3}\n  max |rho_free - rho_sn| = {:.3e}\n",
        config.mass,
        c.t_tilde,
        fmt_w(c.free.w),
        fmt_w(c.gravity.w),
        c.free.visibility,
        c.gravity.visibility,
        c.density_linf
    );
    Ok(Outcome { artifacts, summary, scan: None, feasibility: Vec::new() })
}

fn run_sweep(config: &RunConfig) -> Result<Outcome> {
    let dir = &config.outdir;
    let jobs: Vec<(f64, bool)> = config
        .masses
        .iter()
        .flat_map(|&m| [(m, false), (m, true)])
        .collect();
    let times = [config.t_eval];
    let pool = thread_pool(config.jobs)?;
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, g)| simulate(config, m, g, &times))
            .collect::<Result<Vec<_>>>()
    })?;

    let scan = fringe_width_scan(&records, config.t_eval, config.min_prominence)?;
    let mut artifacts = Vec::new();
    let mut rows = Vec::new();
    for r in &records {
        let tag = format!("m{}_{}", r.params.m_tilde, if r.params.gravity_on { "gravity" } else { "free" });
        artifacts.extend(output::write_snapshots(
            &dir.join("snapshots").join(tag),
            r,
            config.emit_potential,
        )?);
        rows.extend(metrics_rows(r, config.min_prominence)?);
    }
    let metrics = dir.join("metrics.csv");
    output::write_metrics(&metrics, config.min_prominence, &rows)?;
    let scan_path = dir.join("scan.csv");
    output::write_scan(&scan_path, &scan)?;
    artifacts.extend([metrics, scan_path]);

    let mut summary = format!("sweep at t = {}:\n  m_tilde   1/m    w_free    w_sn   deviation\n", config.t_eval);
    for r in &scan.rows {
        summary.push_str(&format!(
            "  {:6.3} {:6.3} {:>9} {:>9} {:>9}\n",
            r.m_tilde,
            r.inv_m_tilde,
            fmt_w(r.w_free),
            fmt_w(r.w_sn),
            fmt_w(r.deviation)
        ));
    }
    if let Some(f) = scan.fit_affine {
        summary.push_str(&format!(
            "  free trend: w = {:.4}/m + {:.4} (relative rms {:.2}%)\n",
            f.slope,
            f.intercept,
            100.0 * f.relative_rms
        ));
    }
    Ok(Outcome { artifacts, summary, scan: Some(scan), feasibility: Vec::new() })
}

fn run_feasibility(config: &RunConfig) -> Result<Outcome> {
    let reports = config
        .feasibility_masses_u
        .iter()
        .map(|&u| {
            feasibility_report(
                Quantity::atomic_mass_units(u),
                config.feasibility_m_tilde,
                config.feasibility_t_tilde,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let path = config.outdir.join("feasibility.csv");
    output::write_feasibility(&path, &reports)?;
    let mut summary = format!(
        "feasibility for m_tilde = {}, t_tilde = {}:\n",
        config.feasibility_m_tilde, config.feasibility_t_tilde
    );
    for r in &reports {
        summary.push_str(&format!(
            "  {:.3e} u: sigma_r = {:.3e} m, slit separation = {:.3e} m, time = {:.3e} s\n",
            r.mass_u(),
            r.sigma_r(),
            r.slit_separation,
            r.evolution_time
        ));
    }
    Ok(Outcome { artifacts: vec![path], summary, scan: None, feasibility: reports })
}
