use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, HarnessError, RunRecord};
use crate::filters::Algorithm;
use crate::metrics::Convergence;

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let context = context.into();
    move |source| HarnessError::Io { context, source }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    }
    let file = File::create(path).map_err(io_err(format!("creating {}", path.display())))?;
    Ok(BufWriter::new(file))
}

/// One line of a trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub d: f64,
    pub x: f64,
    pub y: f64,
    pub e: f64,
    pub mse_windowed: Option<f64>,
}

pub const CSV_HEADER: &str = "n,d,x,y,e,mse_windowed";

/// Writes `n,d,x,y,e,mse_windowed`, one row per sample. Values use the
/// shortest decimal form that parses back to the same `f64`; the MSE cell is
/// empty until the first window fills.
pub fn write_csv(record: &RunRecord, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let t = &record.traces;
    let mut curve = record.report.mse_curve.iter().peekable();
    let mut body = String::with_capacity(64 * (t.d.len() + 1));
    body.push_str(CSV_HEADER);
    body.push('\n');
    for n in 0..t.d.len() {
        use std::fmt::Write as _;
        let _ = write!(body, "{n},{},{},{},{},", t.d[n], t.x[n], t.y[n], t.e[n]);
        if let Some((_, v)) = curve.next_if(|(i, _)| *i == n) {
            let _ = write!(body, "{v}");
        }
        body.push('\n');
    }
    out.write_all(body.as_bytes()).and_then(|_| out.flush()).map_err(io_err(format!("writing {}", path.display())))
}

/// Parses a trace CSV written by [`write_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>, HarnessError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(format!("opening {}", path.display())))?;
    let mut rows = Vec::new();
    let malformed = |line: usize| HarnessError::Invalid(format!("{}: malformed line {line}", path.display()));
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(format!("reading {}", path.display())))?;
        if i == 0 {
            if line != CSV_HEADER {
                return Err(malformed(1));
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(malformed(i + 1));
        }
        let num = |c: &str| c.parse::<f64>().map_err(|_| malformed(i + 1));
        rows.push(TraceRow {
            n: cells[0].parse().map_err(|_| malformed(i + 1))?,
            d: num(cells[1])?,
            x: num(cells[2])?,
            y: num(cells[3])?,
            e: num(cells[4])?,
            mse_windowed: if cells[5].is_empty() { None } else { Some(num(cells[5])?) },
        });
    }
    Ok(rows)
}

/// Scalar results of one run as persisted in summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub algorithm: Algorithm,
    pub signal: String,
    pub input_snr_db: f64,
    pub corr_coeff: f64,
    pub output_snr_db: f64,
    pub convergence_samples: Convergence,
    /// Convergence index in seconds of signal time.
    pub convergence_seconds: Option<f64>,
    pub rescues: u64,
    pub noise_scale: f64,
    pub spec: ExperimentSpec,
}

impl From<&RunRecord> for SummaryEntry {
    fn from(r: &RunRecord) -> Self {
        Self {
            algorithm: r.spec.algorithm,
            signal: r.spec.signal.name().to_string(),
            input_snr_db: r.report.input_snr_db,
            corr_coeff: r.report.corr_coeff,
            output_snr_db: r.report.output_snr_db,
            convergence_samples: r.report.convergence_samples,
            convergence_seconds: r.report.convergence_seconds,
            rescues: r.rescues,
            noise_scale: r.noise_scale,
            spec: r.spec.clone(),
        }
    }
}

pub(crate) fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<(), HarnessError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(io_err(format!("writing {}", path.display())))
}

/// Writes a JSON array with one [`SummaryEntry`] per record, in input order.
pub fn write_summary(records: &[RunRecord], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let entries: Vec<SummaryEntry> = records.iter().map(SummaryEntry::from).collect();
    write_json(&entries, path.as_ref())
}

/// Wall-clock cost of one run; kept apart from summaries, which are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingEntry {
    pub algorithm: Algorithm,
    pub signal: String,
    pub order: usize,
    pub filter_seconds: f64,
}

pub fn write_timings(records: &[RunRecord], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let entries: Vec<TimingEntry> = records
        .iter()
        .map(|r| TimingEntry {
            algorithm: r.spec.algorithm,
            signal: r.spec.signal.name().to_string(),
            order: r.spec.filter.order,
            filter_seconds: r.filter_seconds,
        })
        .collect();
    write_json(&entries, path.as_ref())
}
