//! Reading a square-wave energy trace as an Otto cycle.
//!
//! Diabatic strokes are the fast jumps between plateaus, adiabatic strokes
//! the plateaus themselves. Each period, anchored at an upward jump, reads
//! endothermic, adiabatic high, exothermic, adiabatic low.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analytic::{CavitySpec, EnergyTrace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKind {
    AdiabaticHigh,
    AdiabaticLow,
    Endothermic,
    Exothermic,
}

impl StrokeKind {
    pub fn is_diabatic(self) -> bool {
        matches!(self, StrokeKind::Endothermic | StrokeKind::Exothermic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrokeKind::AdiabaticHigh => "adiabatic_high",
            StrokeKind::AdiabaticLow => "adiabatic_low",
            StrokeKind::Endothermic => "endothermic",
            StrokeKind::Exothermic => "exothermic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stroke {
    pub period_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub kind: StrokeKind,
    /// Plateau difference across a diabatic stroke, in-plateau drift for an
    /// adiabatic one.
    pub delta_energy_per_quantum: f64,
    /// Heat exchanged per stroke; zero until [`CycleReport::with_heat`].
    pub heat_proxy: f64,
}

impl Stroke {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub period: f64,
    pub strokes: Vec<Stroke>,
    pub plateau_high: f64,
    pub plateau_low: f64,
    pub ripple: f64,
    pub n_periods_analyzed: usize,
    /// Share of the analyzed time spent on plateaus.
    pub plateau_fraction: f64,
}

impl CycleReport {
    pub fn gap(&self) -> f64 {
        self.plateau_high - self.plateau_low
    }

    pub fn strokes_in_period(&self, period_index: usize) -> impl Iterator<Item = &Stroke> {
        self.strokes.iter().filter(move |s| s.period_index == period_index)
    }

    /// Fills `heat_proxy` from [`heat_ledger`].
    pub fn with_heat(mut self, spec: &CavitySpec) -> Self {
        let heat = heat_ledger(spec, &self);
        for (stroke, q) in self.strokes.iter_mut().zip(heat) {
            stroke.heat_proxy = q;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    /// A sample belongs to a jump when `|dE/dt|` exceeds this fraction of
    /// the trace maximum.
    pub derivative_fraction: f64,
    /// Jump centers are derivative peaks above this fraction of the maximum.
    pub peak_fraction: f64,
    /// Central share of a plateau used for its mean and drift.
    pub plateau_core: f64,
    pub min_plateau_fraction: f64,
    /// Largest plateau drift, relative to the gap, that still counts as flat.
    pub max_relative_drift: f64,
    pub min_samples_per_period: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            derivative_fraction: 0.1,
            peak_fraction: 0.5,
            plateau_core: 0.6,
            min_plateau_fraction: 0.5,
            max_relative_drift: 0.05,
            min_samples_per_period: 64.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Jump {
    center: usize,
    rising: bool,
    start: usize,
    end: usize,
    complete: bool,
}

#[derive(Debug, Clone, Copy)]
struct Plateau {
    mean: f64,
    drift: f64,
    ripple: f64,
}

fn central_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

/// Mean and drift over the central `core` share of samples `lo..=hi`,
/// ripple over all of them.
fn plateau_stats(values: &[f64], lo: usize, hi: usize, core: f64) -> Option<Plateau> {
    if hi < lo || hi - lo + 1 < 4 {
        return None;
    }
    let len = hi - lo + 1;
    let trim = ((len as f64) * (1.0 - core) / 2.0).floor() as usize;
    let central = &values[lo + trim..=hi - trim];
    let mean = central.iter().sum::<f64>() / central.len() as f64;
    let half = central.len() / 2;
    let avg = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let drift = avg(&central[central.len() - half..]) - avg(&central[..half]);
    let ripple = values[lo..=hi].iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    Some(Plateau { mean, drift, ripple })
}

fn find_jumps(times: &[f64], deriv: &[f64], period: f64, config: &DetectionConfig) -> Result<Vec<Jump>> {
    let n = deriv.len();
    let abs: Vec<f64> = deriv.iter().map(|d| d.abs()).collect();
    let max_d = abs.iter().copied().fold(0.0, f64::max);
    if !(max_d > 0.0) {
        return Err(Error::NoDiabaticStrokes);
    }
    let peak = config.peak_fraction * max_d;
    let tau = config.derivative_fraction * max_d;

    let mut centers: Vec<usize> = Vec::new();
    for i in 0..n {
        let left = if i > 0 { abs[i - 1] } else { 0.0 };
        let right = if i + 1 < n { abs[i + 1] } else { 0.0 };
        if abs[i] < peak || abs[i] < left || abs[i] <= right {
            continue;
        }
        match centers.last_mut() {
            Some(last)
                if times[i] - times[*last] < 0.25 * period && (deriv[i] > 0.0) == (deriv[*last] > 0.0) =>
            {
                if abs[i] > abs[*last] {
                    *last = i;
                }
            }
            _ => centers.push(i),
        }
    }

    let mut jumps = Vec::with_capacity(centers.len());
    for (k, &c) in centers.iter().enumerate() {
        let region_lo = if k > 0 {
            (centers[k - 1] + c) / 2
        } else {
            let t = times[c] - 0.25 * period;
            times.partition_point(|&x| x < t)
        };
        let region_hi = if k + 1 < centers.len() {
            (c + centers[k + 1]).div_ceil(2)
        } else {
            let t = times[c] + 0.25 * period;
            times.partition_point(|&x| x <= t).saturating_sub(1)
        };
        let start = (region_lo..=c).find(|&i| abs[i] >= tau).unwrap_or(c);
        let end = (c..=region_hi.max(c)).rev().find(|&i| abs[i] >= tau).unwrap_or(c);
        // settled samples on both sides
        jumps.push(Jump {
            center: c,
            rising: deriv[c] > 0.0,
            start,
            end,
            complete: start > 0 && end + 1 < n,
        });
    }
    Ok(jumps)
}

/// Splits a square-wave trace into strokes.
///
/// `omega0` is the fundamental; the trace must cover at least two periods
/// with at least `min_samples_per_period` samples each. Only full periods,
/// from one complete upward jump to the next, are analyzed.
pub fn detect_strokes(trace: &EnergyTrace, omega0: f64, config: &DetectionConfig) -> Result<CycleReport> {
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::param("omega0", format!("must be positive, got {omega0}")));
    }
    let period = 2.0 * PI / omega0;
    let times = trace.times();
    let values = trace.values();
    let n = times.len();
    if n < 3 {
        return Err(Error::InsufficientTrace(format!("{n} samples")));
    }
    let span = times[n - 1] - times[0];
    if span < 2.0 * period * (1.0 - 1e-9) {
        return Err(Error::InsufficientTrace(format!(
            "trace spans {:.3} periods, need at least 2",
            span / period
        )));
    }
    let per_period = (n - 1) as f64 * period / span;
    if per_period < config.min_samples_per_period {
        return Err(Error::InsufficientTrace(format!(
            "{per_period:.1} samples per period, need at least {}",
            config.min_samples_per_period
        )));
    }

    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
        return Err(Error::NoDiabaticStrokes);
    }

    let deriv = central_derivative(times, values);
    let tau = config.derivative_fraction * deriv.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let flat_fraction = deriv.iter().filter(|d| d.abs() < tau).count() as f64 / n as f64;
    let not_plateau = |fraction: f64| Error::NotPlateauDominated {
        plateau_fraction: fraction,
    };

    let jumps = find_jumps(times, &deriv, period, config)?;
    if jumps.is_empty() {
        return Err(Error::NoDiabaticStrokes);
    }
    if jumps.windows(2).any(|w| w[0].rising == w[1].rising) {
        return Err(not_plateau(flat_fraction));
    }

    let Some(first_up) = jumps.iter().position(|j| j.rising && j.complete) else {
        return Err(Error::InsufficientTrace("no complete upward jump".into()));
    };

    let stats = |a: usize, b: usize| plateau_stats(values, a, b, config.plateau_core);
    // Low plateau before the first analyzed period, if a complete downward
    // jump bounds it; a plateau cut by the trace start is not trusted.
    let mut prev_low = match first_up.checked_sub(1).map(|k| jumps[k]) {
        Some(down) if down.complete => stats(down.end + 1, jumps[first_up].start - 1),
        _ => None,
    };

    let mut strokes = Vec::new();
    let mut highs = Vec::new();
    let mut lows = Vec::new();
    let mut ripple: f64 = 0.0;
    let mut k = first_up;
    let mut period_index = 0;
    while k + 2 < jumps.len() {
        let (up, down, next_up) = (jumps[k], jumps[k + 1], jumps[k + 2]);
        if !(up.complete && down.complete && next_up.complete) {
            break;
        }
        let (Some(high), Some(low)) = (stats(up.end + 1, down.start - 1), stats(down.end + 1, next_up.start - 1))
        else {
            return Err(not_plateau(flat_fraction));
        };
        let before = prev_low.unwrap_or(low);
        let t = |i: usize| times[i];
        let mut push = |t_start, t_end, kind, delta| {
            strokes.push(Stroke {
                period_index,
                t_start,
                t_end,
                kind,
                delta_energy_per_quantum: delta,
                heat_proxy: 0.0,
            })
        };
        push(t(up.start), t(up.end), StrokeKind::Endothermic, high.mean - before.mean);
        push(t(up.end), t(down.start), StrokeKind::AdiabaticHigh, high.drift);
        push(t(down.start), t(down.end), StrokeKind::Exothermic, low.mean - high.mean);
        push(t(down.end), t(next_up.start), StrokeKind::AdiabaticLow, low.drift);
        ripple = ripple.max(high.ripple).max(low.ripple);
        highs.push(high.mean);
        lows.push(low.mean);
        prev_low = Some(low);
        period_index += 1;
        k += 2;
    }
    if period_index == 0 {
        return Err(Error::InsufficientTrace("no complete period between upward jumps".into()));
    }
    log::debug!(
        "analyzed {period_index} periods; jump centers at samples {:?}",
        jumps.iter().map(|j| j.center).collect::<Vec<_>>()
    );

    let plateau_high = highs.iter().sum::<f64>() / highs.len() as f64;
    let plateau_low = lows.iter().sum::<f64>() / lows.len() as f64;
    let gap = plateau_high - plateau_low;
    let total: f64 = strokes.iter().map(Stroke::duration).sum();
    let flat: f64 = strokes.iter().filter(|s| !s.kind.is_diabatic()).map(Stroke::duration).sum();
    let plateau_fraction = flat / total;
    if plateau_fraction < config.min_plateau_fraction {
        return Err(not_plateau(plateau_fraction));
    }
    let drifting = strokes
        .iter()
        .any(|s| !s.kind.is_diabatic() && s.delta_energy_per_quantum.abs() > config.max_relative_drift * gap.abs());
    if drifting || !(gap > 0.0) {
        return Err(not_plateau(plateau_fraction));
    }

    Ok(CycleReport {
        period,
        strokes,
        plateau_high,
        plateau_low,
        ripple,
        n_periods_analyzed: period_index,
        plateau_fraction,
    })
}

/// Row of the level diagram: level `m` sits at `m` times the plateau energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRow {
    pub period_index: usize,
    pub kind: StrokeKind,
    pub t_start: f64,
    pub t_end: f64,
    pub level: u32,
    pub energy_start: f64,
    pub energy_end: f64,
}

/// Energies of levels `0..=levels` along every stroke.
pub fn level_diagram(report: &CycleReport, levels: u32) -> Vec<LevelRow> {
    let mut rows = Vec::with_capacity(report.strokes.len() * (levels as usize + 1));
    for stroke in &report.strokes {
        let (from, to) = match stroke.kind {
            StrokeKind::Endothermic => (report.plateau_low, report.plateau_high),
            StrokeKind::Exothermic => (report.plateau_high, report.plateau_low),
            StrokeKind::AdiabaticHigh => (report.plateau_high, report.plateau_high),
            StrokeKind::AdiabaticLow => (report.plateau_low, report.plateau_low),
        };
        for m in 0..=levels {
            rows.push(LevelRow {
                period_index: stroke.period_index,
                kind: stroke.kind,
                t_start: stroke.t_start,
                t_end: stroke.t_end,
                level: m,
                energy_start: m as f64 * from,
                energy_end: m as f64 * to,
            });
        }
    }
    rows
}

/// Heat per stroke, aligned with `report.strokes`: `+mu * gap` on the way
/// up, `-mu * gap` on the way down, nothing on plateaus.
pub fn heat_ledger(spec: &CavitySpec, report: &CycleReport) -> Vec<f64> {
    let q = spec.mu() * report.gap();
    report
        .strokes
        .iter()
        .map(|s| match s.kind {
            StrokeKind::Endothermic => q,
            StrokeKind::Exothermic => -q,
            _ => 0.0,
        })
        .collect()
}

/// Pearson correlation between the trace and itself shifted by `lag`,
/// with linear interpolation between samples.
pub fn period_correlation(trace: &EnergyTrace, lag: f64) -> Result<f64> {
    let times = trace.times();
    let values = trace.values();
    if !(lag > 0.0) || !lag.is_finite() {
        return Err(Error::param("lag", format!("must be positive, got {lag}")));
    }
    let n = times.len();
    if n < 2 || times[n - 1] - times[0] <= lag {
        return Err(Error::InsufficientTrace("trace shorter than the lag".into()));
    }
    let interp = |t: f64| {
        let i = times.partition_point(|&x| x <= t).clamp(1, n - 1);
        let (t0, t1) = (times[i - 1], times[i]);
        let w = (t - t0) / (t1 - t0);
        values[i - 1] * (1.0 - w) + values[i] * w
    };
    let pairs: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .take_while(|(t, _)| **t + lag <= times[n - 1])
        .map(|(&t, &v)| (v, interp(t + lag)))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InsufficientTrace("too few overlapping samples".into()));
    }
    let m = pairs.len() as f64;
    let (ma, mb) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(if saa == sbb { 1.0 } else { 0.0 });
    }
    Ok(sab / (saa * sbb).sqrt())
}
