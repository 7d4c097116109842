//! Observables extracted from run records: probe time series, wave maxima,
//! growth factors, subspace sums, and decimal-digit agreement.

use crate::engine::{Probe, RunRecord};
use crate::lattice::{magnitude, Lattice, Quantity, Site, ZERO};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("probe {0} was not recorded in this run")]
    UnknownProbe(String),
    #[error("series has {0} points; at least 3 are needed")]
    TooShort(usize),
    #[error("window {lo}..={hi} does not fit a series of {len} points")]
    BadWindow { lo: u64, hi: u64, len: usize },
    #[error("only {0} maxima inside the window; at least 2 are needed")]
    TooFewMaxima(usize),
    #[error("maximum at t = {t} has non-positive height {height}")]
    NonPositiveHeight { t: u64, height: f64 },
}

/// Real values indexed by iteration, `values[t]` being the value at `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Series {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(t, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().enumerate().map(|(t, v)| (t as u64, *v))
    }

    pub fn scaled(&self, s: f64) -> Series {
        Series::new(self.label.clone(), self.values.iter().map(|v| v * s).collect())
    }
}

/// Real part of a recorded probe over the whole run.
pub fn probe_series(record: &RunRecord, lattice: &str, site: Site) -> Result<Series, AnalysisError> {
    let probe = Probe::new(lattice, site);
    let rec = record
        .probe(&probe)
        .ok_or_else(|| AnalysisError::UnknownProbe(probe.to_string()))?;
    Ok(Series::new(
        probe.to_string(),
        rec.values.iter().map(|q| q.re).collect(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximaReport {
    /// `(t, height)` in time order.
    pub maxima: Vec<(u64, f64)>,
    /// Whether `t = 0` is counted as the first maximum.
    pub includes_start: bool,
}

impl MaximaReport {
    pub fn heights(&self) -> Vec<f64> {
        self.maxima.iter().map(|m| m.1).collect()
    }

    /// The `k`-th maximum, counting from 1.
    pub fn nth(&self, k: usize) -> Option<(u64, f64)> {
        k.checked_sub(1).and_then(|i| self.maxima.get(i).copied())
    }
}

/// Maximal runs of equal values: `(first index, last index)`.
fn plateaus(v: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || v[i] != v[start] {
            out.push((start, i - 1));
            start = i;
        }
    }
    out
}

/// Local maxima of a series.
///
/// Interior maxima are strict: a run of equal values counts once, at its
/// first index, when both neighbouring values are lower. The start counts as
/// the first maximum when its value is at least every value up to and
/// including the first interior local minimum (or the whole series when
/// there is none), so a flat start `1, 1, ...` followed by a dip counts.
pub fn detect_maxima(s: &Series) -> Result<MaximaReport, AnalysisError> {
    let v = &s.values;
    if v.len() < 3 {
        return Err(AnalysisError::TooShort(v.len()));
    }
    let runs = plateaus(v);
    let interior = |&(a, b): &(usize, usize)| a >= 1 && b + 1 < v.len();
    let first_min = runs
        .iter()
        .filter(|r| interior(r))
        .find(|&&(a, b)| v[a - 1] > v[a] && v[b + 1] > v[a])
        .map(|&(_, b)| b);
    let horizon = first_min.unwrap_or(v.len() - 1);
    let includes_start = v[1..=horizon].iter().all(|x| v[0] >= *x);

    let mut maxima = Vec::new();
    if includes_start {
        maxima.push((0, v[0]));
    }
    for &(a, b) in runs.iter().filter(|r| interior(r)) {
        if v[a - 1] < v[a] && v[b + 1] < v[a] {
            maxima.push((a as u64, v[a]));
        }
    }
    Ok(MaximaReport {
        maxima,
        includes_start,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthMethod {
    /// Geometric mean ratio of consecutive maxima per unit time.
    GeometricMaxima,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub per_step_factor: f64,
    /// `(t_lo, t_hi)` as requested.
    pub window: (u64, u64),
    /// Number of maxima used.
    pub maxima: usize,
    pub method: GrowthMethod,
}

/// Average per-step growth of the maxima inside `window` (inclusive):
/// `exp(sum ln(h[k+1] / h[k]) / (t_last - t_first))`.
///
/// Maxima are found on the whole series first so the window edges do not
/// create spurious ones.
pub fn growth_factor(s: &Series, window: (u64, u64)) -> Result<GrowthEstimate, AnalysisError> {
    let (lo, hi) = window;
    if lo > hi || hi as usize >= s.len() {
        return Err(AnalysisError::BadWindow {
            lo,
            hi,
            len: s.len(),
        });
    }
    let report = detect_maxima(s)?;
    let inside: Vec<(u64, f64)> = report
        .maxima
        .into_iter()
        .filter(|(t, _)| (lo..=hi).contains(t))
        .collect();
    growth_from_maxima(&inside, window)
}

/// [`growth_factor`] on an explicit list of maxima.
pub fn growth_from_maxima(
    maxima: &[(u64, f64)],
    window: (u64, u64),
) -> Result<GrowthEstimate, AnalysisError> {
    if maxima.len() < 2 {
        return Err(AnalysisError::TooFewMaxima(maxima.len()));
    }
    if let Some(&(t, height)) = maxima.iter().find(|m| m.1.is_nan() || m.1 <= 0.0) {
        return Err(AnalysisError::NonPositiveHeight { t, height });
    }
    let log_sum: f64 = maxima.windows(2).map(|w| (w[1].1 / w[0].1).ln()).sum();
    let span = (maxima[maxima.len() - 1].0 - maxima[0].0) as f64;
    Ok(GrowthEstimate {
        per_step_factor: (log_sum / span).exp(),
        window,
        maxima: maxima.len(),
        method: GrowthMethod::GeometricMaxima,
    })
}

/// A subspace given by fixing some coordinates; free ones range over all
/// stored sites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SubspaceSpec {
    pub x: Option<i32>,
    pub y: Option<i32>,
    pub z: Option<i32>,
}

impl SubspaceSpec {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn point(s: Site) -> Self {
        SubspaceSpec {
            x: Some(s.x),
            y: Some(s.y),
            z: Some(s.z),
        }
    }

    pub fn matches(&self, s: Site) -> bool {
        self.x.is_none_or(|x| x == s.x)
            && self.y.is_none_or(|y| y == s.y)
            && self.z.is_none_or(|z| z == s.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatisticKind {
    /// Real part of the plain sum.
    Sum,
    /// Sum of magnitudes.
    AbsSum,
    /// Sum of squared magnitudes.
    SquareSum,
}

pub fn subspace_statistic(lat: &Lattice, spec: SubspaceSpec, kind: StatisticKind) -> f64 {
    let matching = lat.iter().filter(|(s, _)| spec.matches(*s));
    match kind {
        StatisticKind::Sum => subspace_sum(lat, spec).re,
        StatisticKind::AbsSum => matching.map(|(_, q)| magnitude(q)).sum(),
        StatisticKind::SquareSum => matching.map(|(_, q)| q.norm_sqr()).sum(),
    }
}

/// Complex sum over the subspace.
pub fn subspace_sum(lat: &Lattice, spec: SubspaceSpec) -> Quantity {
    lat.iter()
        .filter(|(s, _)| spec.matches(*s))
        .fold(ZERO, |acc, (_, q)| acc + q)
}

/// Leading decimal digits on which `a` and `b` agree, from their relative
/// difference: `floor(-log10(|a - b| / max(|a|, |b|)))` clamped to `0..=15`.
pub fn significant_digit_agreement(a: f64, b: f64) -> u32 {
    if a == b {
        return 15;
    }
    if !a.is_finite() || !b.is_finite() {
        return 0;
    }
    let rel = (a - b).abs() / a.abs().max(b.abs());
    let digits = (-rel.log10()).floor();
    digits.clamp(0.0, 15.0) as u32
}
