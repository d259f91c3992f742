//! Observables extracted from density snapshots: peaks, fringe width, visibility,
//! spread and the separation of the two dominant lobes.
//!
//! Everything here depends only on the shape of the density, so rescaling it by a
//! positive constant leaves all results unchanged.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::propagator::RunRecord;

/// Default peak acceptance threshold, as a fraction of the global maximum.
pub const DEFAULT_MIN_PROMINENCE: f64 = 0.05;

/// Peaks at least this high (relative to the global maximum) count as dominant lobes.
pub const DOMINANT_HEIGHT: f64 = 0.5;

/// Evaluation time of the fringe-width comparison.
pub const DEFAULT_T_EVAL: f64 = 8.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sub-grid position.
    pub position: f64,
    /// Node index of the sampled maximum.
    pub index: usize,
    /// Height relative to the global maximum.
    pub height: f64,
    /// Prominence relative to the global maximum, in `(0, 1]`.
    pub prominence: f64,
}

/// Accepted peaks ordered by position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.position).collect()
    }

    pub fn prominences(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.prominence).collect()
    }

    /// The peak within one grid spacing of `x = 0`, if any.
    pub fn central(&self, dx: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .filter(|p| p.position.abs() <= dx)
            .min_by(|a, b| a.position.abs().total_cmp(&b.position.abs()))
    }
}

fn check_density(density: &[f64], lattice: &Lattice) -> Result<()> {
    lattice.check_len(density.len(), "density")?;
    if let Some(bad) = density.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("density must be non-negative and finite, found {bad}")));
    }
    Ok(())
}

/// Topographic prominence of the maximum spanning nodes `lo..=hi`: the drop to the
/// higher of the two lowest points reached before meeting higher ground (or the edge).
fn prominence(y: &[f64], lo: usize, hi: usize) -> f64 {
    let h = y[lo];
    let mut left_min = h;
    for &v in y[..lo].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[hi + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Three-point parabolic vertex offset in units of `dx`, within `[-0.5, 0.5]`.
fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let curv = left - 2.0 * mid + right;
    if curv >= 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / curv).clamp(-0.5, 0.5)
}

/// Interior local maxima, refined to sub-grid precision and filtered by prominence.
///
/// Flat tops spanning several equal nodes are reported once, at their midpoint.
pub fn find_peaks(density: &[f64], lattice: &Lattice, min_prominence: f64) -> Result<PeakSet> {
    check_density(density, lattice)?;
    if !(min_prominence > 0.0 && min_prominence < 1.0) {
        return Err(Error::invalid(format!("min_prominence must lie in (0, 1), got {min_prominence}")));
    }
    let global = density.iter().copied().fold(0.0, f64::max);
    if global == 0.0 {
        return Ok(PeakSet::default());
    }
    let n = density.len();
    let dx = lattice.dx();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if density[i] > density[i - 1] {
            let mut j = i;
            while j + 1 < n && density[j + 1] == density[i] {
                j += 1;
            }
            if j + 1 < n && density[j + 1] < density[i] {
                let prom = prominence(density, i, j) / global;
                if prom >= min_prominence {
                    let position = if i == j {
                        lattice.x(i) + dx * parabolic_offset(density[i - 1], density[i], density[i + 1])
                    } else {
                        0.5 * (lattice.x(i) + lattice.x(j))
                    };
                    peaks.push(Peak {
                        position,
                        index: (i + j) / 2,
                        height: density[i] / global,
                        prominence: prom,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(PeakSet { peaks })
}

/// Distance from the central peak to its nearest accepted neighbour.
///
/// `None` when there is no peak within one `dx` of the origin or no other peak.
pub fn fringe_width(density: &[f64], lattice: &Lattice, min_prominence: f64) -> Result<Option<f64>> {
    let peaks = find_peaks(density, lattice, min_prominence)?;
    Ok(fringe_width_from(&peaks, lattice.dx()))
}

fn fringe_width_from(peaks: &PeakSet, dx: f64) -> Option<f64> {
    let center = peaks.central(dx)?;
    peaks
        .peaks
        .iter()
        .filter(|p| p.index != center.index)
        .map(|p| (p.position - center.position).abs())
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeMetrics {
    pub w: Option<f64>,
    /// Contrast `(max - min) / (max + min)` between the nearest accepted peaks flanking
    /// the origin; zero when the origin is not flanked on both sides.
    pub visibility: f64,
    pub rms_spread: f64,
    /// Distance between the outermost dominant peaks; zero for a single lobe.
    pub peak_separation: f64,
    pub peak_count: usize,
}

/// `sqrt(<x^2>)` of the density, normalized by its total weight.
pub fn rms_spread(density: &[f64], lattice: &Lattice) -> Result<f64> {
    check_density(density, lattice)?;
    let total: f64 = density.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let second: f64 = density.iter().enumerate().map(|(i, r)| lattice.x(i).powi(2) * r).sum();
    Ok((second / total).sqrt())
}

fn visibility(density: &[f64], peaks: &PeakSet, dx: f64) -> f64 {
    let center = peaks.central(dx).map(|p| p.index);
    let others = peaks.peaks.iter().filter(|p| Some(p.index) != center);
    let left = others.clone().filter(|p| p.position < 0.0).map(|p| p.index).max();
    let right = others.filter(|p| p.position > 0.0).map(|p| p.index).min();
    let (Some(lo), Some(hi)) = (left, right) else {
        return 0.0;
    };
    let region = &density[lo..=hi];
    let max = region.iter().copied().fold(f64::MIN, f64::max);
    let min = region.iter().copied().fold(f64::MAX, f64::min);
    if max + min == 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

fn separation(peaks: &PeakSet) -> f64 {
    let mut dominant = peaks.peaks.iter().filter(|p| p.height >= DOMINANT_HEIGHT);
    match (dominant.next(), dominant.next_back()) {
        (Some(first), Some(last)) => last.position - first.position,
        _ => 0.0,
    }
}

pub fn fringe_metrics(density: &[f64], lattice: &Lattice, min_prominence: f64) -> Result<FringeMetrics> {
    let peaks = find_peaks(density, lattice, min_prominence)?;
    Ok(FringeMetrics {
        w: fringe_width_from(&peaks, lattice.dx()),
        visibility: visibility(density, &peaks, lattice.dx()),
        rms_spread: rms_spread(density, lattice)?,
        peak_separation: separation(&peaks),
        peak_count: peaks.len(),
    })
}

/// Least-squares line `w = slope / m + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `sqrt(mean((residual / w)^2))`.
    pub relative_rms: f64,
    pub points: usize,
}

fn relative_rms(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let sum: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| ((y - (slope * x + intercept)) / y).powi(2))
        .sum();
    (sum / xs.len() as f64).sqrt()
}

/// Least squares through the origin.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.is_empty() {
        return None;
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: 0.0, relative_rms: relative_rms(xs, ys, slope, 0.0), points: xs.len() })
}

/// Ordinary least squares with a free intercept.
pub fn fit_affine(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Some(LineFit { slope, intercept, relative_rms: relative_rms(xs, ys, slope, intercept), points: xs.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub m_tilde: f64,
    pub inv_m_tilde: f64,
    pub w_free: Option<f64>,
    pub w_sn: Option<f64>,
    /// `w_sn - w_free` when both exist.
    pub deviation: Option<f64>,
}

/// Fringe width versus `1/m` with and without self-gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub t_eval: f64,
    pub min_prominence: f64,
    pub rows: Vec<ScanRow>,
    /// Fits through the gravity-off points.
    pub fit_origin: Option<LineFit>,
    pub fit_affine: Option<LineFit>,
}

/// Pairs gravity-off and gravity-on records by mass and measures `w` at `t_eval`.
///
/// Every mass needs one record of each kind; rows come out in increasing mass.
pub fn fringe_width_scan(records: &[RunRecord], t_eval: f64, min_prominence: f64) -> Result<FringeScan> {
    let mut masses: Vec<f64> = records.iter().map(|r| r.params.m_tilde).collect();
    masses.sort_by(f64::total_cmp);
    masses.dedup();

    let width_of = |r: &RunRecord| -> Result<Option<f64>> {
        let snap = r.snapshot_at(t_eval).ok_or_else(|| {
            Error::invalid(format!(
                "record for m_tilde = {} (gravity {}) has no snapshot at t = {t_eval}",
                r.params.m_tilde,
                if r.params.gravity_on { "on" } else { "off" }
            ))
        })?;
        fringe_width(&snap.density(), &r.lattice, min_prominence)
    };

    let mut rows = Vec::with_capacity(masses.len());
    for m in masses {
        let find = |gravity: bool| {
            records
                .iter()
                .find(|r| r.params.m_tilde == m && r.params.gravity_on == gravity)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "no gravity-{} record for m_tilde = {m}",
                        if gravity { "on" } else { "off" }
                    ))
                })
        };
        let w_free = width_of(find(false)?)?;
        let w_sn = width_of(find(true)?)?;
        rows.push(ScanRow {
            m_tilde: m,
            inv_m_tilde: 1.0 / m,
            w_free,
            w_sn,
            deviation: w_free.zip(w_sn).map(|(f, s)| s - f),
        });
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.w_free.map(|w| (r.inv_m_tilde, w)))
        .unzip();
    Ok(FringeScan {
        t_eval,
        min_prominence,
        fit_origin: fit_through_origin(&xs, &ys),
        fit_affine: fit_affine(&xs, &ys),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionPoint {
    pub t_tilde: f64,
    pub peak_separation: f64,
    pub rms_spread: f64,
    pub peak_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractionSeries {
    pub points: Vec<AttractionPoint>,
    /// First snapshot time showing a single surviving peak.
    pub merge_time: Option<f64>,
}

impl AttractionSeries {
    /// True when the last `tail` snapshots all show a single peak.
    pub fn ends_merged(&self, tail: usize) -> bool {
        tail > 0
            && self.points.len() >= tail
            && self.points[self.points.len() - tail..].iter().all(|p| p.peak_count == 1)
    }
}

/// Lobe separation and spread per snapshot.
pub fn attraction_series(record: &RunRecord, min_prominence: f64) -> Result<AttractionSeries> {
    if record.snapshots.len() < 2 {
        return Err(Error::invalid("attraction series needs at least two snapshots"));
    }
    let mut points = Vec::with_capacity(record.snapshots.len());
    for snap in &record.snapshots {
        let m = fringe_metrics(&snap.density(), &record.lattice, min_prominence)?;
        points.push(AttractionPoint {
            t_tilde: snap.t_tilde(),
            peak_separation: m.peak_separation,
            rms_spread: m.rms_spread,
            peak_count: m.peak_count,
        });
    }
    let merge_time = points.iter().find(|p| p.peak_count == 1).map(|p| p.t_tilde);
    Ok(AttractionSeries { points, merge_time })
}
