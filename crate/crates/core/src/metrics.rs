//! Preferred-difference distributions and the compatibility metric.
//!
//! A [`Histogram`] is backed by integer bin counts; the published masses are
//! the normalized view `count / total_count`. Keeping the counts lets
//! [`compatibility`] run on exact integer arithmetic — a single cross-
//! multiplied min-sum in `u128` with one floating division at the end — so
//! the metric is bitwise symmetric in its arguments, never leaves `[0, 1]`,
//! and is exactly `1.0` for perfectly mirrored distributions.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Gender, Population};

/// Binned, normalized distribution of preferred differences for one group.
///
/// Bin `k` covers values `v` with `round(v / bin_width) = k`, rounding halves
/// away from zero so that index negation exactly mirrors value negation.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bin_width: f64,
    counts: BTreeMap<i64, u64>,
    masses: BTreeMap<i64, f64>,
    total_count: u64,
}

impl Histogram {
    /// Build from per-bin counts. Zero-count entries are dropped.
    pub fn from_counts(bin_width: f64, counts: BTreeMap<i64, u64>) -> Result<Histogram> {
        if bin_width <= 0.0 || !bin_width.is_finite() {
            return Err(Error::InvalidParameter {
                name: "bin-width",
                reason: format!("must be a positive finite number, got {bin_width}"),
            });
        }
        let counts: BTreeMap<i64, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total_count: u64 = counts.values().sum();
        let masses = counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / total_count as f64))
            .collect();
        Ok(Histogram {
            bin_width,
            counts,
            masses,
            total_count,
        })
    }

    pub fn empty(bin_width: f64) -> Result<Histogram> {
        Histogram::from_counts(bin_width, BTreeMap::new())
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn is_empty(&self) -> bool {
        self.total_count == 0
    }

    /// Normalized mass per bin index; sums to 1 when non-empty.
    pub fn masses(&self) -> &BTreeMap<i64, f64> {
        &self.masses
    }

    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn mass(&self, index: i64) -> f64 {
        self.masses.get(&index).copied().unwrap_or(0.0)
    }

    /// The value at the center of bin `index`.
    pub fn bin_center(&self, index: i64) -> f64 {
        index as f64 * self.bin_width
    }

    /// The same distribution with every bin index negated.
    pub fn mirrored(&self) -> Histogram {
        Histogram {
            bin_width: self.bin_width,
            counts: self.counts.iter().map(|(&k, &c)| (-k, c)).collect(),
            masses: self.masses.iter().map(|(&k, &m)| (-k, m)).collect(),
            total_count: self.total_count,
        }
    }

    /// Bin index for a value: nearest integer multiple of the bin width,
    /// halves rounded away from zero.
    pub fn bin_index(bin_width: f64, value: f64) -> i64 {
        (value / bin_width).round() as i64
    }

    /// Write the plot-ready form: `bin_center,mass` rows in index order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_center,mass")?;
        for &k in self.counts.keys() {
            writeln!(w, "{:.6},{:.6}", self.bin_center(k), self.mass(k))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&HistogramFile::from(self))?)
    }

    pub fn from_json(json: &str) -> Result<Histogram> {
        let file: HistogramFile = serde_json::from_str(json)?;
        file.try_into()
    }
}

/// On-disk JSON form of a histogram.
#[derive(Debug, Serialize, Deserialize)]
pub struct HistogramFile {
    pub bin_width: f64,
    pub bins: BTreeMap<i64, f64>,
    pub total_count: u64,
}

impl From<&Histogram> for HistogramFile {
    fn from(h: &Histogram) -> HistogramFile {
        HistogramFile {
            bin_width: h.bin_width,
            bins: h.masses.clone(),
            total_count: h.total_count,
        }
    }
}

impl TryFrom<HistogramFile> for Histogram {
    type Error = Error;

    /// Validate and reconstruct the backing counts. Each mass must be a
    /// whole number of individuals out of `total_count`, the counts must sum
    /// to `total_count`, and the masses must sum to 1 within 1e-9.
    fn try_from(file: HistogramFile) -> Result<Histogram> {
        if file.bin_width <= 0.0 || !file.bin_width.is_finite() {
            return Err(Error::InvalidHistogram(format!(
                "bin_width must be positive and finite, got {}",
                file.bin_width
            )));
        }
        if file.total_count == 0 {
            if !file.bins.is_empty() {
                return Err(Error::InvalidHistogram(
                    "total_count is 0 but bins are not empty".into(),
                ));
            }
            return Histogram::empty(file.bin_width);
        }
        if file.bins.is_empty() {
            return Err(Error::InvalidHistogram(format!(
                "total_count is {} but bins are empty",
                file.total_count
            )));
        }
        let total = file.total_count as f64;
        let mut counts = BTreeMap::new();
        let mut mass_sum = 0.0;
        for (&k, &mass) in &file.bins {
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidHistogram(format!(
                    "bin {k} has invalid mass {mass}"
                )));
            }
            mass_sum += mass;
            let scaled = mass * total;
            let count = scaled.round();
            if (scaled - count).abs() > 1e-6 || count < 1.0 {
                return Err(Error::InvalidHistogram(format!(
                    "bin {k} mass {mass} is not a whole count out of {}",
                    file.total_count
                )));
            }
            counts.insert(k, count as u64);
        }
        if (mass_sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidHistogram(format!(
                "bin masses sum to {mass_sum}, expected 1"
            )));
        }
        let count_sum: u64 = counts.values().sum();
        if count_sum != file.total_count {
            return Err(Error::InvalidHistogram(format!(
                "bin counts sum to {count_sum}, expected total_count {}",
                file.total_count
            )));
        }
        Histogram::from_counts(file.bin_width, counts)
    }
}

/// Bin a list of values and normalize. Values must be finite.
pub fn build_histogram(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if bin_width <= 0.0 || !bin_width.is_finite() {
        return Err(Error::InvalidParameter {
            name: "bin-width",
            reason: format!("must be a positive finite number, got {bin_width}"),
        });
    }
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for &v in values {
        debug_assert!(v.is_finite(), "histogram values must be finite");
        *counts.entry(Histogram::bin_index(bin_width, v)).or_insert(0) += 1;
    }
    Histogram::from_counts(bin_width, counts)
}

/// Compatibility of two preferred-difference distributions: the overlap of
/// `f` with the mirror image of `m`, i.e. the summed per-bin minima of
/// `f(x)` and `m(-x)`. Ranges over `[0, 1]`; `1` means the groups'
/// preferences complement each other perfectly. Empty distributions have
/// compatibility 0.
///
/// Computed as an exact integer min-sum over cross-multiplied counts, so the
/// result is identical with the arguments swapped and exactly `1.0` when
/// `m` is the mirror of `f`.
pub fn compatibility(f: &Histogram, m: &Histogram) -> Result<f64> {
    if f.bin_width != m.bin_width {
        return Err(Error::BinWidthMismatch {
            left: f.bin_width,
            right: m.bin_width,
        });
    }
    if f.is_empty() || m.is_empty() {
        return Ok(0.0);
    }
    let f_total = f.total_count as u128;
    let m_total = m.total_count as u128;
    let mut matched: u128 = 0;
    for (&k, &f_count) in &f.counts {
        if let Some(&m_count) = m.counts.get(&-k) {
            matched += (f_count as u128 * m_total).min(m_count as u128 * f_total);
        }
    }
    Ok(matched as f64 / (f_total * m_total) as f64)
}

/// Realized preferred differences of one generation's parents, from its
/// mating log. For every agent with at least one successful meeting, the
/// preferred value is the mean partner property over its realized matings
/// (repeats count with multiplicity) and the preferred difference is that
/// mean minus the agent's own value. Agents with no matings are excluded.
///
/// Returns `(female_diffs, male_diffs)` in agent-index order.
pub fn realized_preferred_differences(
    mating_log: &[(usize, usize)],
    parents: &Population,
) -> (Vec<f64>, Vec<f64>) {
    let mut f_acc: Vec<(u64, u64)> = vec![(0, 0); parents.females.len()];
    let mut m_acc: Vec<(u64, u64)> = vec![(0, 0); parents.males.len()];
    for &(fi, mi) in mating_log {
        let f = &parents.females[fi];
        let m = &parents.males[mi];
        f_acc[fi].0 += m.value as u64;
        f_acc[fi].1 += 1;
        m_acc[mi].0 += f.value as u64;
        m_acc[mi].1 += 1;
    }
    let diffs = |acc: &[(u64, u64)], agents: &[crate::model::Genotype]| {
        acc.iter()
            .zip(agents)
            .filter(|((_, n), _)| *n > 0)
            .map(|((sum, n), agent)| *sum as f64 / *n as f64 - agent.value as f64)
            .collect()
    };
    (diffs(&f_acc, &parents.females), diffs(&m_acc, &parents.males))
}

/// Which standard deviation normalization to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdKind {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n - 1.
    Sample,
}

/// Mean, standard deviation, and count of a value list. Mean and std are
/// `None` for an empty list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl SummaryStats {
    pub fn is_defined(&self) -> bool {
        self.n > 0
    }
}

/// Summary statistics with the population standard deviation.
pub fn summary_stats(values: &[f64]) -> SummaryStats {
    summary_stats_with(values, StdKind::Population)
}

pub fn summary_stats_with(values: &[f64], kind: StdKind) -> SummaryStats {
    let n = values.len();
    if n == 0 {
        return SummaryStats {
            n: 0,
            mean: None,
            std: None,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let std = match kind {
        StdKind::Population => (ss / n as f64).sqrt(),
        StdKind::Sample => {
            if n < 2 {
                return SummaryStats {
                    n,
                    mean: Some(mean),
                    std: None,
                };
            }
            (ss / (n - 1) as f64).sqrt()
        }
    };
    SummaryStats {
        n,
        mean: Some(mean),
        std: Some(std),
    }
}

/// Gender helper for histogram sidecar naming and report columns.
pub fn gender_key(gender: Gender) -> &'static str {
    match gender {
        Gender::Female => "female",
        Gender::Male => "male",
    }
}
