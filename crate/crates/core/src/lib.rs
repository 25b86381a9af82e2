//! Evolutionary mate-choice simulation and preference-compatibility
//! analytics.
//!
//! The crate has four layers:
//!
//! - [`model`] — the agent-based evolutionary model: genotypes with a single
//!   integer property and an acceptance range, random meetings, verbatim
//!   inheritance, generational replacement, extinction.
//! - [`metrics`] — preferred-difference histograms, summary statistics, and
//!   the compatibility metric (the overlap of one gender's distribution with
//!   the mirror image of the other's).
//! - [`analytics`] — CSV ingestion of profiles and mating edges,
//!   per-property difference tables, the per-gender comparison report, and a
//!   synthetic-data generator with exact ground truth.
//! - [`runner`] — deterministic single realizations and parallel,
//!   seed-indexed ensembles with trace/summary output.

pub mod analytics;
pub mod error;
pub mod metrics;
pub mod model;
pub mod runner;

pub use analytics::{
    analyze_property, generate_synthetic, load_matings, load_profiles,
    preferred_difference_table, property_report, DeltaSpec, MatingEdge, Profile, ProfileTable,
    Property, PropertySpec, StatsRow, SyntheticData, SyntheticSpec,
};
pub use error::{Error, Result};
pub use metrics::{
    build_histogram, compatibility, realized_preferred_differences, summary_stats, Histogram,
    StdKind, SummaryStats,
};
pub use model::{
    advance_generation, agrees, genotype_variety, init_agent, meet, mutual_agreement, sim_rng,
    Gender, GenerationResult, Genotype, MeetingOutcome, Population, SimParams, SimRng,
};
pub use runner::{
    run_ensemble, run_realization, seeds_from_base, trace_file_name, write_summary_json,
    write_trace_csv, EnsembleSummary, GenerationRecord, RealizationTrace, RunSettings,
    TerminalStatus,
};
