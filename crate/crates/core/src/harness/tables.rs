use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{write_csv, write_json, write_timings, SummaryEntry};
use super::{run_comparison, ExperimentSpec, HarnessError, RunRecord, SignalSpec};

/// One results table: a quantity compared across signals and algorithms at a
/// fixed input SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSpec {
    pub id: u8,
    pub quantity: &'static str,
    pub input_snr_db: f64,
}

pub const TABLES: [TableSpec; 4] = [
    TableSpec { id: 1, quantity: "corr_coeff", input_snr_db: 10.0 },
    TableSpec { id: 3, quantity: "output_snr_db", input_snr_db: 30.0 },
    TableSpec { id: 4, quantity: "output_snr_db", input_snr_db: 10.0 },
    TableSpec { id: 5, quantity: "output_snr_db", input_snr_db: -10.0 },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub signal: String,
    /// `"ok"`, or `"skipped"` when no audio file was supplied.
    pub status: String,
    /// RLS, FTF, GAL in that order; empty when skipped.
    pub entries: Vec<SummaryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub table: u8,
    pub quantity: String,
    pub input_snr_db: f64,
    pub rows: Vec<TableRow>,
}

/// Runs of one table, row by row; `None` marks a skipped row.
#[derive(Debug, Clone)]
pub struct TableRun {
    pub table: TableSpec,
    pub rows: Vec<(String, Option<Vec<RunRecord>>)>,
}

impl TableRun {
    pub fn doc(&self) -> TableDoc {
        TableDoc {
            table: self.table.id,
            quantity: self.table.quantity.to_string(),
            input_snr_db: self.table.input_snr_db,
            rows: self
                .rows
                .iter()
                .map(|(signal, records)| TableRow {
                    signal: signal.clone(),
                    status: if records.is_some() { "ok" } else { "skipped" }.to_string(),
                    entries: records.iter().flatten().map(SummaryEntry::from).collect(),
                })
                .collect(),
        }
    }
}

fn signals(audio: Option<&Path>) -> Vec<(&'static str, Option<SignalSpec>)> {
    vec![
        ("sinusoid", Some(SignalSpec::sinusoid())),
        ("sawtooth", Some(SignalSpec::sawtooth())),
        ("chirp", Some(SignalSpec::chirp())),
        ("audio", audio.map(|p| SignalSpec::Audio { path: PathBuf::from(p) })),
    ]
}

/// Runs every table on `base` (which fixes noise, channel, filter settings,
/// length and seed), varying signal and input SNR.
pub fn run_tables(base: &ExperimentSpec, audio: Option<&Path>) -> Result<Vec<TableRun>, HarnessError> {
    let jobs: Vec<(usize, &'static str, Option<ExperimentSpec>)> = TABLES
        .iter()
        .enumerate()
        .flat_map(|(t, table)| {
            signals(audio).into_iter().map(move |(name, signal)| {
                let spec =
                    signal.map(|signal| ExperimentSpec { signal, input_snr_db: table.input_snr_db, ..base.clone() });
                (t, name, spec)
            })
        })
        .collect();
    let results: Vec<Option<Vec<RunRecord>>> =
        jobs.par_iter().map(|(_, _, spec)| spec.as_ref().map(run_comparison).transpose()).collect::<Result<_, _>>()?;

    let mut runs: Vec<TableRun> = TABLES.iter().map(|&table| TableRun { table, rows: Vec::new() }).collect();
    for ((t, name, _), records) in jobs.into_iter().zip(results) {
        runs[t].rows.push((name.to_string(), records));
    }
    Ok(runs)
}

/// Writes `table<id>.json` per table and `timings.json`; with `traces`, also
/// `table<id>/<signal>_<algo>.csv` per run.
pub fn write_tables(runs: &[TableRun], out_dir: &Path, traces: bool) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let mut all = Vec::new();
    for run in runs {
        let path = out_dir.join(format!("table{}.json", run.table.id));
        write_json(&run.doc(), &path)?;
        written.push(path);
        for (signal, records) in &run.rows {
            for record in records.iter().flatten() {
                if traces {
                    let csv = out_dir
                        .join(format!("table{}", run.table.id))
                        .join(format!("{signal}_{}.csv", record.spec.algorithm));
                    write_csv(record, &csv)?;
                    written.push(csv);
                }
                all.push(record.clone());
            }
        }
    }
    let timings = out_dir.join("timings.json");
    write_timings(&all, &timings)?;
    written.push(timings);
    Ok(written)
}
