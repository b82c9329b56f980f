//! Per-run trace files and the per-generation mean series.
//!
//! A trace file is UTF-8 CSV:
//!
//! ```text
//! generation,best_energy
//! 0,612
//! 1,588
//! ...
//! genome,0110...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::labs::BitGenome;
use crate::operators::{Mode, Variant};

pub const TRACE_HEADER: &str = "generation,best_energy";
pub const MEAN_TRACE_HEADER: &str = "generation,mean_best_energy";

/// One finished run together with the cell it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub variant: Variant,
    pub mode: Mode,
    pub run_index: usize,
    pub seed: u64,
    pub trace: RunTrace,
}

impl TraceRecord {
    pub fn file_name(&self) -> String {
        trace_file_name(self.variant, self.mode, self.run_index)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.trace.best_energies.len() * 8 + 64);
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for (generation, e) in self.trace.best_energies.iter().enumerate() {
            let _ = writeln!(out, "{generation},{e}");
        }
        let _ = writeln!(out, "genome,{}", self.trace.best.genome);
        out
    }
}

pub fn trace_file_name(variant: Variant, mode: Mode, run_index: usize) -> String {
    format!("{}__{}__run{:03}.csv", variant.id(), mode.id(), run_index)
}

/// Contents of a trace file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFile {
    pub best_energies: Vec<u64>,
    pub genome: BitGenome,
}

pub fn parse_trace(text: &str) -> Result<TraceFile> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(Error::Data(format!("trace must start with {TRACE_HEADER:?}")));
    }
    let mut best_energies = Vec::new();
    let mut genome = None;
    for line in lines {
        let (key, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Data(format!("malformed trace line {line:?}")))?;
        if genome.is_some() {
            return Err(Error::Data("trace continues after the genome line".into()));
        }
        if key == "genome" {
            genome = Some(value.parse::<BitGenome>()?);
            continue;
        }
        let generation: usize = key
            .parse()
            .map_err(|_| Error::Data(format!("bad generation {key:?}")))?;
        if generation != best_energies.len() {
            return Err(Error::Data(format!(
                "expected generation {}, found {generation}",
                best_energies.len()
            )));
        }
        best_energies.push(
            value
                .parse()
                .map_err(|_| Error::Data(format!("bad energy {value:?}")))?,
        );
    }
    let genome = genome.ok_or_else(|| Error::Data("trace has no genome line".into()))?;
    if best_energies.is_empty() {
        return Err(Error::Data("trace has no generations".into()));
    }
    Ok(TraceFile {
        best_energies,
        genome,
    })
}

pub fn read_trace(path: &Path) -> Result<TraceFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

/// Per-generation arithmetic mean of several equally long best-energy series.
pub fn emit_mean_trace(series: &[&[u64]]) -> Result<Vec<(usize, f64)>> {
    let first = series
        .first()
        .ok_or_else(|| Error::Usage("mean trace needs at least one run".into()))?;
    if let Some(bad) = series.iter().find(|s| s.len() != first.len()) {
        return Err(Error::Data(format!(
            "traces differ in length ({} vs {} generations)",
            first.len(),
            bad.len()
        )));
    }
    let n = series.len() as f64;
    Ok((0..first.len())
        .map(|g| (g, series.iter().map(|s| s[g] as f64).sum::<f64>() / n))
        .collect())
}

pub fn mean_trace_csv(means: &[(usize, f64)]) -> String {
    let mut out = String::from(MEAN_TRACE_HEADER);
    out.push('\n');
    for (generation, mean) in means {
        let _ = writeln!(out, "{generation},{mean}");
    }
    out
}

pub(crate) fn write_file(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}
