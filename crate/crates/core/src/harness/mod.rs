//! Experiment runner: builds the two sensor streams, runs a filter and scores
//! the recovered signal.
//!
//! For a resolved [`ExperimentSpec`] the streams are
//!
//! ```text
//! d(n) = s(n) + c·(h * v1)(n)      primary
//! x(n) = c·v1(n)                   reference
//! ```
//!
//! where `h` is the channel and `c` sets the input SNR of `s` against the
//! filtered interference. Everything is a pure function of the spec.

pub mod cli;
mod output;
mod tables;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use output::{read_csv, write_csv, write_summary, write_timings, SummaryEntry, TimingEntry, TraceRow};
pub use tables::{run_tables, write_tables, TableDoc, TableRow, TableRun, TableSpec, TABLES};

use crate::filters::{process, Algorithm, AnyFilter, FilterConfig, FilterError};
use crate::metrics::{MetricsError, MetricsReport};
use crate::noise::{channel_filter, mix_at_snr, ChannelSpec, NoiseError, NoiseKind, NoiseSpec};
use crate::siggen::{self, SignalError, WavError};
use crate::signal::{SignalBuffer, DEFAULT_SAMPLE_RATE_HZ};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// True for errors caused by the request itself rather than by the
    /// environment or the data read at run time.
    pub fn is_validation(&self) -> bool {
        match self {
            HarnessError::Invalid(_) | HarnessError::Signal(_) | HarnessError::Noise(_) => true,
            HarnessError::Filter(e) => matches!(e, FilterError::InvalidConfig(_)),
            _ => false,
        }
    }
}

/// The clean signal family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalSpec {
    Sinusoid { freq_hz: f64, amplitude: f64 },
    Sawtooth { freq_hz: f64, amplitude: f64 },
    Chirp { f0_hz: f64, f1_hz: f64, amplitude: f64 },
    Audio { path: PathBuf },
}

impl SignalSpec {
    pub fn sinusoid() -> Self {
        SignalSpec::Sinusoid { freq_hz: 440.0, amplitude: 1.0 }
    }

    pub fn sawtooth() -> Self {
        SignalSpec::Sawtooth { freq_hz: 100.0, amplitude: 1.0 }
    }

    pub fn chirp() -> Self {
        SignalSpec::Chirp { f0_hz: 100.0, f1_hz: 1000.0, amplitude: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignalSpec::Sinusoid { .. } => "sinusoid",
            SignalSpec::Sawtooth { .. } => "sawtooth",
            SignalSpec::Chirp { .. } => "chirp",
            SignalSpec::Audio { .. } => "audio",
        }
    }
}

/// Reference-to-primary interference path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelChoice {
    /// Fixed taps.
    Taps { taps: Vec<f64> },
    /// `len` unit-energy Gaussian taps drawn from the experiment seed.
    Random { len: usize },
}

impl ChannelChoice {
    pub fn len(&self) -> usize {
        match self {
            ChannelChoice::Taps { taps } => taps.len(),
            ChannelChoice::Random { len } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub signal: SignalSpec,
    /// Interference source. Its seed is replaced by [`ExperimentSpec::seed`].
    pub noise: NoiseSpec,
    pub channel: ChannelChoice,
    pub input_snr_db: f64,
    pub algorithm: Algorithm,
    pub filter: FilterConfig,
    pub n_samples: usize,
    pub sample_rate_hz: f64,
    pub seed: u64,
    pub mse_window: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            signal: SignalSpec::sinusoid(),
            noise: NoiseSpec::new(NoiseKind::White, 0),
            channel: ChannelChoice::Random { len: 4 },
            input_snr_db: 10.0,
            algorithm: Algorithm::Gal,
            filter: FilterConfig::default(),
            n_samples: 20_000,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            seed: 0,
            mse_window: 100,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Invalid(msg));
        self.filter.validate()?;
        self.noise.validate()?;
        if self.channel.is_empty() {
            return bad("channel needs at least one tap".into());
        }
        if self.channel.len() > self.filter.order {
            return bad(format!("channel length {} exceeds filter order {}", self.channel.len(), self.filter.order));
        }
        if self.mse_window == 0 {
            return bad("MSE window must be positive".into());
        }
        if self.n_samples < 10 * self.mse_window {
            return bad(format!("{} samples is fewer than 10 MSE windows of {}", self.n_samples, self.mse_window));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return bad(format!("sample rate {} must be positive", self.sample_rate_hz));
        }
        if self.input_snr_db.is_nan() {
            return bad("input SNR must be a number".into());
        }
        Ok(())
    }
}

/// Per-sample streams of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub s: Vec<f64>,
    pub d: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub e: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Fully resolved: channel taps drawn, noise seed set, length fixed.
    pub spec: ExperimentSpec,
    /// Gain `c` applied to the interference.
    pub noise_scale: f64,
    pub report: MetricsReport,
    pub traces: Traces,
    /// Wall-clock time of the filtering loop alone. Machine dependent.
    pub filter_seconds: f64,
    /// Predictor restarts (FTF only; zero otherwise).
    pub rescues: u64,
}

/// Sensor streams shared by every algorithm run on the same spec.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ExperimentSpec,
    pub noise_scale: f64,
    pub s: SignalBuffer,
    pub d: SignalBuffer,
    pub x: SignalBuffer,
}

fn clean_signal(spec: &ExperimentSpec) -> Result<SignalBuffer, HarnessError> {
    let (n, fs) = (spec.n_samples, spec.sample_rate_hz);
    Ok(match &spec.signal {
        SignalSpec::Sinusoid { freq_hz, amplitude } => siggen::gen_sinusoid(*freq_hz, *amplitude, n, fs, 0.0)?,
        SignalSpec::Sawtooth { freq_hz, amplitude } => siggen::gen_sawtooth(*freq_hz, *amplitude, n, fs)?,
        SignalSpec::Chirp { f0_hz, f1_hz, amplitude } => siggen::gen_chirp(*f0_hz, *f1_hz, *amplitude, n, fs)?,
        SignalSpec::Audio { path } => {
            let mut audio = siggen::load_wav(path)?;
            audio.samples.truncate(n);
            audio
        }
    })
}

impl Scenario {
    /// Validates `spec`, resolves it and synthesizes `s`, `d` and `x`.
    pub fn build(spec: &ExperimentSpec) -> Result<Self, HarnessError> {
        spec.validate()?;
        let mut spec = spec.clone();
        spec.noise.seed = spec.seed;

        let s = clean_signal(&spec)?;
        spec.n_samples = s.len();
        spec.sample_rate_hz = s.sample_rate_hz;
        spec.validate()?;

        let channel = match &spec.channel {
            ChannelChoice::Taps { taps } => ChannelSpec::new(taps.clone())?,
            ChannelChoice::Random { len } => ChannelSpec::random(*len, spec.seed)?,
        };
        spec.channel = ChannelChoice::Taps { taps: channel.taps.clone() };

        let v1 = spec.noise.generate(spec.n_samples, spec.sample_rate_hz)?;
        let v0 = channel_filter(&v1, &channel)?;
        let (d, noise_scale) = mix_at_snr(&s, &v0, spec.input_snr_db)?;
        let x = v1.scaled(noise_scale);
        Ok(Self { spec, noise_scale, s, d, x })
    }

    /// Runs one algorithm on these streams.
    pub fn run(&self, algorithm: Algorithm) -> Result<RunRecord, HarnessError> {
        let mut spec = self.spec.clone();
        spec.algorithm = algorithm;
        let mut filter = AnyFilter::new(algorithm, &spec.filter)?;
        let started = Instant::now();
        let (y, e) = process(&mut filter, &self.x, &self.d)?;
        let filter_seconds = started.elapsed().as_secs_f64();
        let rescues = match &filter {
            AnyFilter::Ftf(f) => f.rescue_count(),
            _ => 0,
        };
        let report = MetricsReport::compute(
            &self.s.samples,
            &e.samples,
            spec.sample_rate_hz,
            spec.mse_window,
            spec.input_snr_db,
        )?;
        Ok(RunRecord {
            spec,
            noise_scale: self.noise_scale,
            report,
            traces: Traces {
                s: self.s.samples.clone(),
                d: self.d.samples.clone(),
                x: self.x.samples.clone(),
                y: y.samples,
                e: e.samples,
            },
            filter_seconds,
            rescues,
        })
    }
}

/// Runs `spec.algorithm` on the streams described by `spec`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunRecord, HarnessError> {
    Scenario::build(spec)?.run(spec.algorithm)
}

/// Runs RLS, FTF and GAL (in that order) on identical streams.
pub fn run_comparison(base: &ExperimentSpec) -> Result<Vec<RunRecord>, HarnessError> {
    let scenario = Scenario::build(base)?;
    Algorithm::ALL.par_iter().map(|&a| scenario.run(a)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Order,
    Lambda,
    Mu,
    Snr,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "order" => Ok(SweepParam::Order),
            "lambda" => Ok(SweepParam::Lambda),
            "mu" => Ok(SweepParam::Mu),
            "snr" => Ok(SweepParam::Snr),
            other => Err(format!("unknown sweep parameter '{other}' (expected order, lambda, mu or snr)")),
        }
    }
}

impl SweepParam {
    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &ExperimentSpec, value: f64) -> Result<ExperimentSpec, HarnessError> {
        let mut spec = base.clone();
        match self {
            SweepParam::Order => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(HarnessError::Invalid(format!("order {value} is not a positive integer")));
                }
                spec.filter.order = value as usize;
            }
            SweepParam::Lambda => spec.filter.forgetting_factor = value,
            SweepParam::Mu => spec.filter.step_size = value,
            SweepParam::Snr => spec.input_snr_db = value,
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// One run per value, in the order given, everything else fixed.
pub fn run_sweep(base: &ExperimentSpec, param: SweepParam, values: &[f64]) -> Result<Vec<RunRecord>, HarnessError> {
    let specs = values.iter().map(|&v| param.apply(base, v)).collect::<Result<Vec<_>, _>>()?;
    specs.par_iter().map(run_experiment).collect()
}
