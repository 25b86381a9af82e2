//! Orchestration of single realizations and seed-indexed ensembles.
//!
//! A realization iterates generations until the per-generation compatibility
//! reaches the convergence threshold, the population goes extinct, or the
//! generation budget runs out. Every trajectory is a pure function of its
//! parameters and seed; ensembles distribute realizations over a bounded
//! worker pool and produce identical output at any parallelism level.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{build_histogram, compatibility, realized_preferred_differences};
use crate::model::{advance_generation, genotype_variety, sim_rng, Population, SimParams};

/// Knobs shared by every realization of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    /// A realization converges once its generation compatibility reaches
    /// this value. Must lie in (0, 1].
    pub convergence_threshold: f64,
    /// Bin width for the per-generation preferred-difference histograms.
    pub bin_width: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            convergence_threshold: 0.999,
            bin_width: 1.0,
        }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        if !self.convergence_threshold.is_finite()
            || self.convergence_threshold <= 0.0
            || self.convergence_threshold > 1.0
        {
            return Err(Error::InvalidParameter {
                name: "threshold",
                reason: format!(
                    "convergence threshold must be in (0, 1], got {}",
                    self.convergence_threshold
                ),
            });
        }
        if self.bin_width <= 0.0 || !self.bin_width.is_finite() {
            return Err(Error::InvalidParameter {
                name: "bin-width",
                reason: format!("must be a positive finite number, got {}", self.bin_width),
            });
        }
        Ok(())
    }
}

/// How a realization ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    Converged,
    Extinct,
    MaxGenerationsReached,
}

impl TerminalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::Extinct => "extinct",
            TerminalStatus::MaxGenerationsReached => "max_generations_reached",
        }
    }
}

/// Observables of one generation's life span.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u32,
    /// Compatibility of the realized preferred-difference distributions of
    /// this generation's parents; 0 when either gender had no matings.
    pub rho: f64,
    /// Distinct genotypes alive in this generation.
    pub variety: usize,
    pub n_females: usize,
    pub n_males: usize,
    /// Successful meetings during the generation.
    pub matings: usize,
}

/// Full per-generation time series of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationTrace {
    pub seed: u64,
    pub records: Vec<GenerationRecord>,
    pub status: TerminalStatus,
    /// Index of the last generation that lived (the last record).
    pub terminal_generation: u32,
}

/// Run one realization to its terminal state. The trace is fully determined
/// by `params` (including its seed) and `settings`.
///
/// Convergence is checked after each generation, before extinction: a
/// generation that reaches the threshold counts as converged even if its
/// children happen to miss one gender.
pub fn run_realization(params: &SimParams, settings: &RunSettings) -> Result<RealizationTrace> {
    params.validate()?;
    settings.validate()?;

    let mut rng = sim_rng(params.seed);
    let mut pop = Population::initialize(params, &mut rng)?;
    let mut records = Vec::new();
    loop {
        let generation = pop.generation_index;
        let result = advance_generation(&pop, params, &mut rng)?;
        let (female_diffs, male_diffs) = realized_preferred_differences(&result.mating_log, &pop);
        let rho = compatibility(
            &build_histogram(&female_diffs, settings.bin_width)?,
            &build_histogram(&male_diffs, settings.bin_width)?,
        )?;
        records.push(GenerationRecord {
            generation,
            rho,
            variety: genotype_variety(&pop),
            n_females: pop.females.len(),
            n_males: pop.males.len(),
            matings: result.mating_log.len(),
        });

        let status = if rho >= settings.convergence_threshold {
            Some(TerminalStatus::Converged)
        } else if result.extinct {
            Some(TerminalStatus::Extinct)
        } else if generation + 1 >= params.max_generations {
            Some(TerminalStatus::MaxGenerationsReached)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(RealizationTrace {
                seed: params.seed,
                records,
                status,
                terminal_generation: generation,
            });
        }
        pop = result.children;
    }
}

/// Aggregate view of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub n_realizations: usize,
    pub extinction_fraction: f64,
    pub convergence_fraction: f64,
    /// Median terminal generation among converged realizations; `None` when
    /// nothing converged.
    pub median_generations_to_convergence: Option<f64>,
}

impl EnsembleSummary {
    pub fn from_traces(traces: &[RealizationTrace]) -> EnsembleSummary {
        let n = traces.len();
        if n == 0 {
            return EnsembleSummary {
                n_realizations: 0,
                extinction_fraction: 0.0,
                convergence_fraction: 0.0,
                median_generations_to_convergence: None,
            };
        }
        let extinct = traces
            .iter()
            .filter(|t| t.status == TerminalStatus::Extinct)
            .count();
        let mut converged_gens: Vec<u32> = traces
            .iter()
            .filter(|t| t.status == TerminalStatus::Converged)
            .map(|t| t.terminal_generation)
            .collect();
        converged_gens.sort_unstable();
        let median = match converged_gens.len() {
            0 => None,
            len if len % 2 == 1 => Some(converged_gens[len / 2] as f64),
            len => Some((converged_gens[len / 2 - 1] as f64 + converged_gens[len / 2] as f64) / 2.0),
        };
        EnsembleSummary {
            n_realizations: n,
            extinction_fraction: extinct as f64 / n as f64,
            convergence_fraction: converged_gens.len() as f64 / n as f64,
            median_generations_to_convergence: median,
        }
    }
}

/// Derive an ensemble seed list as `base_seed + index`.
pub fn seeds_from_base(base_seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base_seed.wrapping_add(i)).collect()
}

/// Run one realization per seed on a pool of `parallelism` workers. Traces
/// come back in seed-list order and are identical at every parallelism
/// level. Duplicate seeds are rejected: they would silently double-count a
/// trajectory in the summary.
pub fn run_ensemble(
    params: &SimParams,
    seeds: &[u64],
    parallelism: usize,
    settings: &RunSettings,
) -> Result<(Vec<RealizationTrace>, EnsembleSummary)> {
    let mut seen = HashSet::with_capacity(seeds.len());
    for &seed in seeds {
        if !seen.insert(seed) {
            return Err(Error::DuplicateSeed(seed));
        }
    }
    if parallelism < 1 {
        return Err(Error::InvalidParameter {
            name: "parallelism",
            reason: "worker count must be >= 1".into(),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "parallelism",
            reason: e.to_string(),
        })?;
    let traces: Vec<RealizationTrace> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let params = SimParams { seed, ..*params };
                run_realization(&params, settings)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = EnsembleSummary::from_traces(&traces);
    Ok((traces, summary))
}

/// Canonical trace file name for a seed.
pub fn trace_file_name(seed: u64) -> String {
    format!("trace_{seed}.csv")
}

/// Write one realization's time series as CSV.
pub fn write_trace_csv<W: Write>(trace: &RealizationTrace, mut w: W) -> Result<()> {
    writeln!(w, "generation,rho,variety,n_females,n_males,matings")?;
    for r in &trace.records {
        writeln!(
            w,
            "{},{:.6},{},{},{},{}",
            r.generation, r.rho, r.variety, r.n_females, r.n_males, r.matings
        )?;
    }
    Ok(())
}

/// Write the ensemble summary as pretty JSON.
pub fn write_summary_json<W: Write>(summary: &EnsembleSummary, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    Ok(())
}
