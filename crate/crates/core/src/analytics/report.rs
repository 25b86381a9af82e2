//! Per-property preferred-difference tables and the comparison report.

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::Result;
use crate::metrics::{build_histogram, compatibility, summary_stats_with, Histogram, StdKind};
use crate::model::Gender;

use super::{MatingEdge, ProfileTable, Property};

/// One user's preferred difference in one property.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffRecord {
    pub user_id: String,
    pub gender: Gender,
    pub own_value: f64,
    /// Mean property value over partners that declare the property.
    pub preferred_value: f64,
    /// `preferred_value - own_value`.
    pub diff: f64,
    /// Number of partners that entered the mean.
    pub partner_count: usize,
}

/// All users' preferred differences for one property, with exclusion
/// accounting: a user is excluded when their own value is absent or no
/// partner declares the property (users with no partners included).
#[derive(Debug, Clone, Default)]
pub struct DiffTable {
    pub records: Vec<DiffRecord>,
    pub excluded_females: usize,
    pub excluded_males: usize,
}

impl DiffTable {
    pub fn diffs_by_gender(&self, gender: Gender) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.gender == gender)
            .map(|r| r.diff)
            .collect()
    }
}

/// Compute per-user preferred differences for `property`.
///
/// Edges are treated as a set: repeated pairs count once. For each user with
/// their own value present and at least one partner with the value present,
/// the preferred value is the mean over those partners and the difference is
/// preferred minus own. Everyone else is excluded and counted per gender.
pub fn preferred_difference_table(
    profiles: &ProfileTable,
    edges: &[MatingEdge],
    property: Property,
) -> Result<DiffTable> {
    let mut partners: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); profiles.len()];
    for edge in edges {
        // Loaders validated the ids; resolve defensively anyway.
        let a = profiles
            .index_of(&edge.user_a)
            .ok_or_else(|| crate::error::Error::UnknownUserId(edge.user_a.clone()))?;
        let b = profiles
            .index_of(&edge.user_b)
            .ok_or_else(|| crate::error::Error::UnknownUserId(edge.user_b.clone()))?;
        partners[a].insert(b);
        partners[b].insert(a);
    }

    let mut table = DiffTable::default();
    for (i, profile) in profiles.iter().enumerate() {
        let included = profile.value(property).and_then(|own| {
            let partner_values: Vec<f64> = partners[i]
                .iter()
                .filter_map(|&j| profiles.get(j).value(property))
                .collect();
            if partner_values.is_empty() {
                return None;
            }
            let preferred = partner_values.iter().sum::<f64>() / partner_values.len() as f64;
            Some(DiffRecord {
                user_id: profile.user_id.clone(),
                gender: profile.gender,
                own_value: own,
                preferred_value: preferred,
                diff: preferred - own,
                partner_count: partner_values.len(),
            })
        });
        match included {
            Some(record) => table.records.push(record),
            None => match profile.gender {
                Gender::Female => table.excluded_females += 1,
                Gender::Male => table.excluded_males += 1,
            },
        }
    }
    Ok(table)
}

/// One report line: per-gender mean, standard deviation, and sample size of
/// the preferred differences, plus the compatibility of the two
/// distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub property: Property,
    pub mu_m: Option<f64>,
    pub mu_f: Option<f64>,
    pub sigma_m: Option<f64>,
    pub sigma_f: Option<f64>,
    pub rho: f64,
    pub n_m: usize,
    pub n_f: usize,
}

/// Report row plus the per-gender histograms it was computed from.
#[derive(Debug, Clone)]
pub struct PropertyAnalysis {
    pub row: StatsRow,
    pub female_hist: Histogram,
    pub male_hist: Histogram,
    pub excluded_females: usize,
    pub excluded_males: usize,
}

/// Analyze one property end to end: difference table, per-gender summary
/// stats and histograms, and the compatibility of the two histograms.
pub fn analyze_property(
    profiles: &ProfileTable,
    edges: &[MatingEdge],
    property: Property,
    bin_width: f64,
    std_kind: StdKind,
) -> Result<PropertyAnalysis> {
    let table = preferred_difference_table(profiles, edges, property)?;
    let female_diffs = table.diffs_by_gender(Gender::Female);
    let male_diffs = table.diffs_by_gender(Gender::Male);
    let female_stats = summary_stats_with(&female_diffs, std_kind);
    let male_stats = summary_stats_with(&male_diffs, std_kind);
    let female_hist = build_histogram(&female_diffs, bin_width)?;
    let male_hist = build_histogram(&male_diffs, bin_width)?;
    let rho = compatibility(&female_hist, &male_hist)?;
    Ok(PropertyAnalysis {
        row: StatsRow {
            property,
            mu_m: male_stats.mean,
            mu_f: female_stats.mean,
            sigma_m: male_stats.std,
            sigma_f: female_stats.std,
            rho,
            n_m: male_stats.n,
            n_f: female_stats.n,
        },
        female_hist,
        male_hist,
        excluded_females: table.excluded_females,
        excluded_males: table.excluded_males,
    })
}

/// The comparison report: one [`StatsRow`] per requested property.
/// `bin_width` maps each property to its histogram bin width; properties not
/// in the list use their default width.
pub fn property_report(
    profiles: &ProfileTable,
    edges: &[MatingEdge],
    properties: &[Property],
    bin_width: &dyn Fn(Property) -> f64,
    std_kind: StdKind,
) -> Result<Vec<StatsRow>> {
    properties
        .iter()
        .map(|&p| Ok(analyze_property(profiles, edges, p, bin_width(p), std_kind)?.row))
        .collect()
}

/// Write report rows as CSV. Undefined statistics print as empty cells.
pub fn write_report_csv<W: Write>(rows: &[StatsRow], mut w: W) -> Result<()> {
    writeln!(w, "property,mu_m,mu_f,sigma_m,sigma_f,rho,n_m,n_f")?;
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{:.6},{},{}",
            row.property,
            cell(row.mu_m),
            cell(row.mu_f),
            cell(row.sigma_m),
            cell(row.sigma_f),
            row.rho,
            row.n_m,
            row.n_f,
        )?;
    }
    Ok(())
}
