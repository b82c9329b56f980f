use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{GaParams, GroupSource};
use crate::error::Result;
use crate::operators::{Mode, Variant};
use crate::stats::{boxplot, BoxplotStats, SummaryStats, WilcoxonResult};

pub const BOXPLOT_HEADER: &str =
    "variant,mode,min,q1,median,q3,max,whisker_low,whisker_high,outliers";

/// Configuration as echoed in the report. Output location and worker count
/// are left out so reports stay comparable across machines and `--jobs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub length: usize,
    pub variants: Vec<Variant>,
    pub modes: Vec<Mode>,
    pub runs: usize,
    pub k: usize,
    pub seed: u64,
    pub population_size: usize,
    pub offspring_count: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub group_source: GroupSource,
    pub evaluation_budget: u64,
    /// Trace rows are indexed by generation, not by evaluation.
    pub generation_unit: String,
    pub evaluations_per_generation: usize,
}

impl ConfigEcho {
    pub(crate) fn new(length: usize, cells: &[(Variant, Mode)], runs: usize, k: usize, seed: u64, ga: &GaParams) -> Self {
        let mut variants = Vec::new();
        let mut modes = Vec::new();
        for &(v, m) in cells {
            if !variants.contains(&v) {
                variants.push(v);
            }
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
        Self {
            length,
            variants,
            modes,
            runs,
            k,
            seed,
            population_size: ga.population_size,
            offspring_count: ga.offspring_count,
            crossover_rate: ga.crossover_rate,
            mutation_rate: ga.mutation_rate,
            group_source: ga.group_source,
            evaluation_budget: ga.evaluation_budget,
            generation_unit: "generation".into(),
            evaluations_per_generation: ga.offspring_count,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: Variant,
    pub mode: Mode,
    #[serde(flatten)]
    pub stats: SummaryStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub variant: Variant,
    pub mode: Mode,
    #[serde(flatten)]
    pub result: WilcoxonResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub variant: Variant,
    pub mode: Mode,
    pub energy: u64,
    pub genome: String,
}

/// Everything the harness concludes from one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub summary: Vec<SummaryRow>,
    /// Each non-base cell against `base` in the same mode.
    pub significance: Vec<SignificanceRow>,
    pub best: Vec<BestRow>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Data(e.to_string()))
    }

    pub fn summary_for(&self, variant: Variant, mode: Mode) -> Option<&SummaryStats> {
        self.summary
            .iter()
            .find(|r| r.variant == variant && r.mode == mode)
            .map(|r| &r.stats)
    }

    pub fn significance_for(&self, variant: Variant, mode: Mode) -> Option<&WilcoxonResult> {
        self.significance
            .iter()
            .find(|r| r.variant == variant && r.mode == mode)
            .map(|r| &r.result)
    }

    pub fn best_for(&self, variant: Variant, mode: Mode) -> Option<&BestRow> {
        self.best.iter().find(|r| r.variant == variant && r.mode == mode)
    }

    /// Plain-text table of means and p-values.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:<7} {:>9} {:>8} {:>6} {:>9}", "variant", "mode", "mean", "sd", "best", "p");
        for row in &self.summary {
            let p = self
                .significance_for(row.variant, row.mode)
                .map(|r| format!("{:.4}{}", r.p_value, if r.significant { "*" } else { " " }))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<8} {:<7} {:>9.2} {:>8.2} {:>6} {:>9}",
                row.variant.id(),
                row.mode.id(),
                row.stats.mean,
                row.stats.sd,
                row.stats.min,
                p
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxplotRow {
    pub variant: Variant,
    pub mode: Mode,
    pub stats: BoxplotStats,
}

/// Five-number summaries, whiskers and outliers for each cell's final energies.
pub fn emit_boxplot_data(samples: &[(Variant, Mode, Vec<f64>)]) -> Result<Vec<BoxplotRow>> {
    if samples.is_empty() {
        return Err(crate::Error::Usage("no samples to summarise".into()));
    }
    samples
        .iter()
        .map(|(variant, mode, values)| {
            Ok(BoxplotRow {
                variant: *variant,
                mode: *mode,
                stats: boxplot(values)?,
            })
        })
        .collect()
}

pub fn boxplot_csv(rows: &[BoxplotRow]) -> String {
    let mut out = String::from(BOXPLOT_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.stats;
        let outliers = s.outliers.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.variant.id(),
            r.mode.id(),
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max,
            s.whisker_low,
            s.whisker_high,
            outliers
        );
    }
    out
}
