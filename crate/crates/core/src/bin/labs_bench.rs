use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use labs_topsis::bench::{run_experiment, ExperimentConfig};
use labs_topsis::engine::GroupSource;
use labs_topsis::operators::{Mode, Variant};

/// Run the LABS benchmark grid and compare every variant against `base`.
///
/// Flags override values from `--config`.
#[derive(Parser, Debug)]
#[command(name = "labs-bench", version)]
struct Cli {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Variant ids (base, fb, fbd, rw, rwm, fb+rw, fb+rwm, fbd+rw, fbd+rwm); repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    variant: Vec<Variant>,
    /// Mode ids (rate05, single); repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    mode: Vec<Mode>,
    #[arg(long)]
    runs: Option<usize>,
    /// Sequence length.
    #[arg(long)]
    length: Option<usize>,
    /// Fitness evaluations per run.
    #[arg(long)]
    budget: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Elite and worst group size.
    #[arg(long)]
    k: Option<usize>,
    /// Where the groups are ranked from: mating-pool or population.
    #[arg(long, value_parser = parse_group_source)]
    groups: Option<GroupSource>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_group_source(s: &str) -> Result<GroupSource, String> {
    match s {
        "mating-pool" => Ok(GroupSource::MatingPool),
        "population" => Ok(GroupSource::Population),
        _ => Err(format!("unknown group source {s:?} (expected mating-pool or population)")),
    }
}

fn build_config(cli: Cli) -> labs_topsis::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if !cli.variant.is_empty() {
        cfg.variants = cli.variant;
    }
    if !cli.mode.is_empty() {
        cfg.modes = cli.mode;
    }
    cfg.runs = cli.runs.unwrap_or(cfg.runs);
    cfg.length = cli.length.unwrap_or(cfg.length);
    cfg.ga.evaluation_budget = cli.budget.unwrap_or(cfg.ga.evaluation_budget);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.out = cli.out.unwrap_or(cfg.out);
    cfg.k = cli.k.unwrap_or(cfg.k);
    cfg.ga.group_source = cli.groups.unwrap_or(cfg.ga.group_source);
    cfg.jobs = cli.jobs.unwrap_or(cfg.jobs);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(cli).and_then(|cfg| {
        let report = run_experiment(&cfg)?;
        print!("{}", report.render_table());
        println!("results written to {}", cfg.out.display());
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("labs-bench: {e}");
            ExitCode::from(2)
        }
    }
}
