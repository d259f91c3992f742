//! CSV and manifest writers. Numbers are written with 17 significant digits.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{FringeMetrics, FringeScan};
use crate::config::RunConfig;
use crate::error::Result;
use crate::lattice::Lattice;
use crate::propagator::{RunRecord, Snapshot};
use crate::units::FeasibilityReport;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

pub fn snapshot_file_name(t_tilde: f64) -> String {
    format!("t{t_tilde:.3}.csv")
}

/// `x, re, im, density[, potential]`, one row per node.
pub fn write_snapshot(path: &Path, lattice: &Lattice, snap: &Snapshot, with_potential: bool) -> Result<()> {
    let mut w = create(path)?;
    let potential = snap.potential.as_ref().filter(|_| with_potential);
    writeln!(w, "# t_tilde = {}", snap.t_tilde())?;
    if potential.is_some() {
        writeln!(w, "x,re,im,density,potential")?;
    } else {
        writeln!(w, "x,re,im,density")?;
    }
    for (i, a) in snap.state.amplitudes.iter().enumerate() {
        write!(w, "{},{},{},{}", num(lattice.x(i)), num(a.re), num(a.im), num(a.norm_sqr()))?;
        if let Some(p) = potential {
            write!(w, ",{}", num(p.values[i]))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every snapshot of `record` into `dir`, returning the file paths.
pub fn write_snapshots(dir: &Path, record: &RunRecord, with_potential: bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::with_capacity(record.snapshots.len());
    for snap in &record.snapshots {
        let path = dir.join(snapshot_file_name(snap.t_tilde()));
        write_snapshot(&path, &record.lattice, snap, with_potential)?;
        out.push(path);
    }
    Ok(out)
}

/// Per-step norm and energy.
pub fn write_series(path: &Path, record: &RunRecord) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,norm,kinetic,potential,energy")?;
    for d in &record.diagnostics {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(d.t_tilde),
            num(d.norm),
            num(d.kinetic),
            num(d.potential),
            num(d.energy())
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `metrics.csv`.
#[derive(Debug, Clone, Copy)]
pub struct MetricsRow {
    pub m_tilde: f64,
    pub gravity: bool,
    pub t_tilde: f64,
    pub norm: f64,
    pub energy: f64,
    pub metrics: FringeMetrics,
}

pub fn write_metrics(path: &Path, min_prominence: f64, rows: &[MetricsRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# min_prominence = {min_prominence}")?;
    writeln!(w, "m_tilde,gravity,t,norm,energy,w,visibility,rms_spread,peak_separation,peak_count")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            num(r.m_tilde),
            if r.gravity { "on" } else { "off" },
            num(r.t_tilde),
            num(r.norm),
            num(r.energy),
            opt(r.metrics.w),
            num(r.metrics.visibility),
            num(r.metrics.rms_spread),
            num(r.metrics.peak_separation),
            r.metrics.peak_count
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan(path: &Path, scan: &FringeScan) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# t_eval = {}", scan.t_eval)?;
    writeln!(w, "# min_prominence = {}", scan.min_prominence)?;
    for (name, fit) in [("fit_origin", scan.fit_origin), ("fit_affine", scan.fit_affine)] {
        if let Some(f) = fit {
            writeln!(
                w,
                "# {name}: slope = {}, intercept = {}, relative_rms = {}",
                num(f.slope),
                num(f.intercept),
                num(f.relative_rms)
            )?;
        }
    }
    writeln!(w, "m_tilde,inv_m_tilde,w_free,w_sn,deviation")?;
    for r in &scan.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(r.m_tilde),
            num(r.inv_m_tilde),
            opt(r.w_free),
            opt(r.w_sn),
            opt(r.deviation)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_feasibility(path: &Path, reports: &[FeasibilityReport]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "mass_u,target_m_tilde,target_t_tilde,sigma_r_m,m_r_u,t_r_s,slit_separation_m,evolution_time_s"
    )?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            num(r.mass_u()),
            num(r.target_m_tilde),
            num(r.target_t_tilde),
            num(r.sigma_r()),
            num(r.scale.m_r_in_u()),
            num(r.scale.t_r()),
            num(r.slit_separation),
            num(r.evolution_time)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest(path: &Path, config: &RunConfig) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# resolved configuration; feed back with --config to reproduce")?;
    w.write_all(config.to_manifest().as_bytes())?;
    w.flush()?;
    Ok(())
}

pub const PLOT_SCRIPT: &str = r##"#!/usr/bin/env python3
"""Render the standard figures from a run directory: python3 plot.py <outdir>"""
import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path) as f:
        rows = [r for r in csv.reader(line for line in f if not line.startswith("#"))]
    head, body = rows[0], rows[1:]
    return {k: [float(r[i]) if r[i] not in ("", "on", "off") else r[i] for r in body] for i, k in enumerate(head)}


def snapshots(root):
    for path in sorted(glob.glob(os.path.join(root, "snapshots", "**", "t*.csv"), recursive=True)):
        yield os.path.relpath(path, root), read(path)


def main(root):
    shots = list(snapshots(root))
    if shots:
        fig, ax = plt.subplots()
        for name, d in shots:
            ax.plot(d["x"], d["density"], label=name)
        ax.set_xlabel("x / sigma_r")
        ax.set_ylabel("|psi|^2")
        ax.legend(fontsize="x-small")
        fig.savefig(os.path.join(root, "density.png"), dpi=150)
        pots = [(n, d) for n, d in shots if "potential" in d]
        if pots:
            fig, ax = plt.subplots()
            for name, d in pots:
                ax.plot(d["x"], d["potential"], label=name)
            ax.set_xlabel("x / sigma_r")
            ax.set_ylabel("V_G")
            ax.legend(fontsize="x-small")
            fig.savefig(os.path.join(root, "potential.png"), dpi=150)
    scan = os.path.join(root, "scan.csv")
    if os.path.exists(scan):
        d = read(scan)
        fig, ax = plt.subplots()
        free = [(x, w) for x, w in zip(d["inv_m_tilde"], d["w_free"]) if w != ""]
        sn = [(x, w) for x, w in zip(d["inv_m_tilde"], d["w_sn"]) if w != ""]
        if free:
            ax.plot(*zip(*free), "k+", label="free")
        if sn:
            ax.plot(*zip(*sn), "r*", label="self-gravity")
        ax.set_xlabel("1 / m_tilde")
        ax.set_ylabel("w / sigma_r")
        ax.legend()
        fig.savefig(os.path.join(root, "fringe_width.png"), dpi=150)
    metrics = os.path.join(root, "metrics.csv")
    if os.path.exists(metrics):
        d = read(metrics)
        if len(d["t"]) > 1:
            fig, ax = plt.subplots()
            ax.plot(d["t"], d["peak_separation"], "o-", label="peak separation")
            ax.plot(d["t"], d["rms_spread"], "s-", label="rms spread")
            ax.set_xlabel("t_tilde")
            ax.legend()
            fig.savefig(os.path.join(root, "attraction.png"), dpi=150)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
"##;

pub fn write_plot_script(dir: &Path) -> Result<PathBuf> {
    let path = dir.join("plot.py");
    let mut w = create(&path)?;
    w.write_all(PLOT_SCRIPT.as_bytes())?;
    w.flush()?;
    Ok(path)
}
