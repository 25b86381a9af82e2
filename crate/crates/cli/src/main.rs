//! Command-line front end: `simulate`, `analyze`, `compat`, and `demo`
//! subcommands emitting plot-ready CSV/JSON.

use std::collections::BTreeMap;
use std::fs;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use matesim_core::analytics::{
    analyze_property, load_matings, load_profiles, write_report_csv, Property, StatsRow,
};
use matesim_core::metrics::{compatibility, Histogram, StdKind};
use matesim_core::model::SimParams;
use matesim_core::runner::{
    run_ensemble, seeds_from_base, trace_file_name, write_summary_json, write_trace_csv,
    RunSettings,
};

#[derive(Parser)]
#[command(
    name = "matesim",
    version,
    about = "Evolutionary mate-choice simulation and preference-compatibility analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded realizations of the evolutionary model and write
    /// per-generation traces plus an ensemble summary.
    Simulate(SimulateArgs),
    /// Ingest profile and mating CSVs and write the per-property
    /// comparison report with histogram sidecars.
    Analyze(AnalyzeArgs),
    /// Compute the compatibility of two histogram JSON files.
    Compat(CompatArgs),
    /// Walk through the compatibility metric on a small worked example.
    Demo,
}

#[derive(Args)]
struct SimulateArgs {
    /// Per-gender population cap N.
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Property values range over {1..R}.
    #[arg(long, default_value_t = 9)]
    r: u32,
    /// Meetings per generation M.
    #[arg(long, default_value_t = 20_000)]
    m: u32,
    /// Stop a realization after this many generations.
    #[arg(long, default_value_t = 1_000)]
    max_generations: u32,
    /// Convergence threshold on the per-generation compatibility.
    #[arg(long, default_value_t = 0.999)]
    threshold: f64,
    /// Bin width of the per-generation difference histograms.
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,
    /// Seed list: comma-separated seeds and/or inclusive ranges, e.g.
    /// `1..50` or `3,7,10..12`.
    #[arg(long, conflicts_with_all = ["base_seed", "count"])]
    seeds: Option<String>,
    /// First seed of a derived list (requires --count).
    #[arg(long, requires = "count")]
    base_seed: Option<u64>,
    /// Number of seeds derived from --base-seed.
    #[arg(long, requires = "base_seed")]
    count: Option<usize>,
    /// Worker threads for the ensemble.
    #[arg(long, default_value_t = default_parallelism())]
    parallelism: usize,
    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Prepend a `# generated_at=...` header line to CSV outputs.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Profiles CSV (user_id,gender,age,height,education,income).
    #[arg(long)]
    profiles: PathBuf,
    /// Matings CSV (user_a,user_b).
    #[arg(long)]
    matings: PathBuf,
    /// Comma-separated properties to report on.
    #[arg(long, default_value = "age,height,education,income")]
    properties: String,
    /// Per-property bin width as `property=width`; repeatable.
    #[arg(long = "bin-width", value_name = "PROP=WIDTH")]
    bin_width: Vec<String>,
    /// Use the sample (n-1) standard deviation instead of the population one.
    #[arg(long)]
    sample_std: bool,
    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Prepend a `# generated_at=...` header line to CSV outputs.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args)]
struct CompatArgs {
    /// Histogram JSON for the group whose differences are read as-is.
    female_hist: PathBuf,
    /// Histogram JSON for the group mirrored before overlapping.
    male_hist: PathBuf,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compat(args) => cmd_compat(args),
        Command::Demo => cmd_demo(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

/// Parse `1..50`, `7`, or comma-separated combinations; ranges inclusive.
fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            bail!("--seeds has an empty item in `{text}`");
        }
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: u64 = lo
                .trim()
                .parse()
                .with_context(|| format!("--seeds range start `{lo}` is not a number"))?;
            let hi: u64 = hi
                .trim()
                .parse()
                .with_context(|| format!("--seeds range end `{hi}` is not a number"))?;
            if hi < lo {
                bail!("--seeds range `{item}` is empty (end below start)");
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(
                item.parse()
                    .with_context(|| format!("--seeds item `{item}` is not a number"))?,
            );
        }
    }
    Ok(seeds)
}

fn timestamp_header(enabled: bool) -> String {
    if enabled {
        format!("# generated_at={}\n", chrono::Utc::now().to_rfc3339())
    } else {
        String::new()
    }
}

fn write_file(path: &Path, header: &str, body: &[u8]) -> Result<()> {
    let mut file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(header.as_bytes())?;
    file.write_all(body)?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let seeds = match (&args.seeds, args.base_seed, args.count) {
        (Some(text), None, None) => parse_seeds(text)?,
        (None, Some(base), Some(count)) => seeds_from_base(base, count),
        _ => bail!("provide either --seeds or --base-seed with --count"),
    };
    let params = SimParams {
        population_cap: args.n,
        value_range: args.r,
        meetings_per_generation: args.m,
        max_generations: args.max_generations,
        seed: 0,
    };
    let settings = RunSettings {
        convergence_threshold: args.threshold,
        bin_width: args.bin_width,
    };
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;

    let (traces, summary) = run_ensemble(&params, &seeds, args.parallelism, &settings)?;

    let header = timestamp_header(args.timestamp);
    for trace in &traces {
        let path = args.out.join(trace_file_name(trace.seed));
        let mut body = Vec::new();
        write_trace_csv(trace, &mut body)?;
        write_file(&path, &header, &body)?;
        let last = trace
            .records
            .last()
            .expect("every trace has at least one generation");
        println!(
            "seed {}: {} at generation {} (rho {:.6}, variety {}, {}f/{}m)",
            trace.seed,
            trace.status.as_str(),
            trace.terminal_generation,
            last.rho,
            last.variety,
            last.n_females,
            last.n_males,
        );
    }

    let summary_path = args.out.join("ensemble_summary.json");
    let mut body = Vec::new();
    write_summary_json(&summary, &mut body)?;
    write_file(&summary_path, "", &body)?;

    println!(
        "{} realizations: {:.0}% converged, {:.0}% extinct{}",
        summary.n_realizations,
        summary.convergence_fraction * 100.0,
        summary.extinction_fraction * 100.0,
        summary
            .median_generations_to_convergence
            .map(|m| format!(", median convergence generation {m}"))
            .unwrap_or_default(),
    );
    println!("wrote {} traces and {}", traces.len(), summary_path.display());
    Ok(())
}

fn parse_properties(text: &str) -> Result<Vec<Property>> {
    text.split(',')
        .map(|s| s.trim().parse::<Property>().map_err(Into::into))
        .collect()
}

fn parse_bin_widths(items: &[String]) -> Result<BTreeMap<Property, f64>> {
    let mut widths = BTreeMap::new();
    for item in items {
        let (name, width) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--bin-width `{item}` must look like `age=1.0`"))?;
        let property: Property = name.trim().parse()?;
        let width: f64 = width
            .trim()
            .parse()
            .with_context(|| format!("--bin-width `{item}` has a non-numeric width"))?;
        widths.insert(property, width);
    }
    Ok(widths)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let properties = parse_properties(&args.properties)?;
    let widths = parse_bin_widths(&args.bin_width)?;
    let std_kind = if args.sample_std {
        StdKind::Sample
    } else {
        StdKind::Population
    };

    let profiles = load_profiles(&args.profiles)
        .with_context(|| format!("failed to load profiles from {}", args.profiles.display()))?;
    let edges = load_matings(&args.matings, &profiles)
        .with_context(|| format!("failed to load matings from {}", args.matings.display()))?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;

    let header = timestamp_header(args.timestamp);
    let mut rows: Vec<StatsRow> = Vec::new();
    for &property in &properties {
        let width = widths
            .get(&property)
            .copied()
            .unwrap_or_else(|| property.default_bin_width());
        let analysis = analyze_property(&profiles, &edges, property, width, std_kind)?;

        for (gender, hist) in [("female", &analysis.female_hist), ("male", &analysis.male_hist)] {
            let mut body = Vec::new();
            hist.write_csv(&mut body)?;
            write_file(
                &args.out.join(format!("hist_{property}_{gender}.csv")),
                &header,
                &body,
            )?;
            write_file(
                &args.out.join(format!("hist_{property}_{gender}.json")),
                "",
                format!("{}\n", hist.to_json()?).as_bytes(),
            )?;
        }

        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        println!(
            "{property}: mu_f={} mu_m={} sigma_f={} sigma_m={} rho={:.6} (n_f={}, n_m={}, excluded {}f/{}m)",
            fmt(analysis.row.mu_f),
            fmt(analysis.row.mu_m),
            fmt(analysis.row.sigma_f),
            fmt(analysis.row.sigma_m),
            analysis.row.rho,
            analysis.row.n_f,
            analysis.row.n_m,
            analysis.excluded_females,
            analysis.excluded_males,
        );
        rows.push(analysis.row);
    }

    let report_path = args.out.join("report.csv");
    let mut body = Vec::new();
    write_report_csv(&rows, &mut body)?;
    write_file(&report_path, &header, &body)?;
    println!("wrote {}", report_path.display());
    Ok(())
}

fn load_histogram(path: &Path) -> Result<Histogram> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read histogram file {}", path.display()))?;
    Histogram::from_json(&text)
        .with_context(|| format!("cannot parse histogram file {}", path.display()))
}

fn cmd_compat(args: CompatArgs) -> Result<()> {
    let f = load_histogram(&args.female_hist)?;
    let m = load_histogram(&args.male_hist)?;
    let rho = compatibility(&f, &m)?;
    println!("{rho:.6}");
    Ok(())
}

fn cmd_demo() -> Result<()> {
    // Two three-bin distributions over differences -1, 0, +1.
    let f = Histogram::from_counts(1.0, BTreeMap::from([(-1, 30), (0, 50), (1, 20)]))?;
    let m = Histogram::from_counts(1.0, BTreeMap::from([(-1, 10), (0, 60), (1, 30)]))?;

    println!("Two preferred-difference distributions over bins -1, 0, +1:");
    println!(
        "  women: f(-1) = {:.2}  f(0) = {:.2}  f(+1) = {:.2}",
        f.mass(-1),
        f.mass(0),
        f.mass(1)
    );
    println!(
        "  men:   m(-1) = {:.2}  m(0) = {:.2}  m(+1) = {:.2}",
        m.mass(-1),
        m.mass(0),
        m.mass(1)
    );
    println!();
    println!("Someone preferring a difference of x matches someone preferring -x,");
    println!("so each bin contributes min(f(x), m(-x)):");
    for x in [0i64, 1, -1] {
        let term = f.mass(x).min(m.mass(-x));
        println!(
            "  x = {x:>2}: min(f({x}) = {:.2}, m({}) = {:.2}) -> {term:.2} matched",
            f.mass(x),
            -x,
            m.mass(-x),
        );
    }
    let rho = compatibility(&f, &m)?;
    println!();
    println!("compatibility rho = {rho:.2}: that fraction of each group finds a");
    println!("partner whose preferred difference exactly complements their own.");
    Ok(())
}
