//! Benchmark harness: runs a grid of (variant, mode) cells, writes per-run
//! traces, mean traces and boxplot data, and compares every cell with `base`.
//!
//! Output layout under `out/`:
//!
//! ```text
//! traces/{variant}__{mode}__run{NNN}.csv
//! means/{variant}__{mode}.csv
//! boxplot.csv
//! report.json
//! ```

mod config;
mod report;
mod trace;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use config::ExperimentConfig;
pub use report::{
    boxplot_csv, emit_boxplot_data, BestRow, BoxplotRow, ConfigEcho, ExperimentReport, SignificanceRow,
    SummaryRow, BOXPLOT_HEADER,
};
pub use trace::{
    emit_mean_trace, mean_trace_csv, parse_trace, read_trace, trace_file_name, TraceFile, TraceRecord,
    MEAN_TRACE_HEADER, TRACE_HEADER,
};

use crate::engine::{run, GaParams};
use crate::error::{Error, Result};
use crate::operators::{Mode, OperatorPipeline, Variant};
use crate::stats::{summarize, wilcoxon_rank_sum};
use trace::write_file;

/// Seed for one run, independent of scheduling: the first 8 bytes
/// (little-endian) of SHA-256 over the master seed, variant id, mode id and
/// run index.
pub fn derive_seed(master: u64, variant: Variant, mode: Mode, run_index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(variant.id().as_bytes());
    h.update([0]);
    h.update(mode.id().as_bytes());
    h.update([0]);
    h.update((run_index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Runs one cell `runs` times on the calling thread's rayon pool.
pub fn run_cell(
    ga: &GaParams,
    length: usize,
    variant: Variant,
    mode: Mode,
    k: usize,
    runs: usize,
    master_seed: u64,
) -> Result<Vec<TraceRecord>> {
    let pipeline = OperatorPipeline::for_variant(variant, mode, k)?;
    (0..runs)
        .into_par_iter()
        .map(|run_index| {
            let seed = derive_seed(master_seed, variant, mode, run_index);
            let params = GaParams { seed, ..ga.clone() };
            Ok(TraceRecord {
                variant,
                mode,
                run_index,
                seed,
                trace: run(&params, &pipeline, length)?,
            })
        })
        .collect()
}

fn ensure_writable(out: &Path) -> Result<()> {
    for dir in [out.join("traces"), out.join("means")] {
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir, e))?;
    }
    let probe = out.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(probe, e))
}

/// Runs every cell of `config`, writes all artefacts under `config.out` and
/// returns the report that was written to `report.json`.
///
/// Results depend only on the configuration, never on `jobs`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let cells = config.cells()?;
    ensure_writable(&config.out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Vec<TraceRecord>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(v, m)| run_cell(&config.ga, config.length, v, m, config.k, config.runs, config.seed))
            .collect::<Result<_>>()
    })?;

    let mut summary = Vec::new();
    let mut best = Vec::new();
    let mut finals = Vec::new();
    for (&(variant, mode), records) in cells.iter().zip(&results) {
        for r in records {
            write_file(config.out.join("traces").join(r.file_name()), &r.to_csv())?;
        }
        let series: Vec<&[u64]> = records.iter().map(|r| r.trace.best_energies.as_slice()).collect();
        let means = emit_mean_trace(&series)?;
        write_file(
            config.out.join("means").join(format!("{}__{}.csv", variant.id(), mode.id())),
            &mean_trace_csv(&means),
        )?;

        let values: Vec<f64> = records.iter().map(|r| r.trace.final_energy() as f64).collect();
        summary.push(SummaryRow {
            variant,
            mode,
            stats: summarize(&values)?,
        });
        let top = records
            .iter()
            .min_by_key(|r| (r.trace.best.energy, r.run_index))
            .expect("runs >= 1");
        best.push(BestRow {
            variant,
            mode,
            energy: top.trace.best.energy.0,
            genome: top.trace.best.genome.to_string(),
        });
        finals.push((variant, mode, values));
    }

    let mut significance = Vec::new();
    for (variant, mode, values) in &finals {
        if *variant == Variant::Base {
            continue;
        }
        let (_, _, baseline) = finals
            .iter()
            .find(|(v, m, _)| *v == Variant::Base && m == mode)
            .expect("base is always part of the grid");
        significance.push(SignificanceRow {
            variant: *variant,
            mode: *mode,
            result: wilcoxon_rank_sum(values, baseline)?,
        });
    }

    write_file(config.out.join("boxplot.csv"), &boxplot_csv(&emit_boxplot_data(&finals)?))?;
    let report = ExperimentReport {
        config: ConfigEcho::new(config.length, &cells, config.runs, config.k, config.seed, &config.ga),
        summary,
        significance,
        best,
    };
    write_file(config.out.join("report.json"), &report.to_json())?;
    Ok(report)
}
