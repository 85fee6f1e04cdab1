//! Evaluation quantities for a canceller run: windowed MSE curve, convergence
//! index, Pearson correlation and residual-based output SNR.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::signal::mean_square;

/// Output SNR reported when the residual vanishes.
pub const SNR_CAP_DB: f64 = 120.0;

/// Default ratio between the settle threshold and the steady-state floor.
pub const DEFAULT_SETTLE_RATIO: f64 = 2.0;

/// A tail median this many times above the curve minimum means divergence.
const RISING_TAIL_RATIO: f64 = 4.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("window {window} must be in 1..={len}")]
    BadWindow { window: usize, len: usize },
    #[error("empty curve")]
    EmptyCurve,
    #[error("settle ratio must exceed 1, got {0}")]
    BadSettleRatio(f64),
    #[error("buffers differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("{0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("clean signal has zero power")]
    ZeroSignalPower,
}

/// Mean of `e²` over each full window, keyed by the index of its last sample.
///
/// ```
/// let curve = anc_core::metrics::mse_curve(&[2.0, 0.0, 0.0], 2).unwrap();
/// assert_eq!(curve, vec![(1, 2.0), (2, 0.0)]);
/// ```
pub fn mse_curve(e: &[f64], window: usize) -> Result<Vec<(usize, f64)>, MetricsError> {
    if window == 0 || window > e.len() {
        return Err(MetricsError::BadWindow { window, len: e.len() });
    }
    Ok(e.windows(window).enumerate().map(|(start, w)| (start + window - 1, mean_square(w))).collect())
}

/// When a run settled, in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    At(usize),
    NotConverged,
}

impl Convergence {
    pub fn samples(self) -> Option<usize> {
        match self {
            Convergence::At(n) => Some(n),
            Convergence::NotConverged => None,
        }
    }
}

const NOT_CONVERGED: &str = "not converged";

impl Serialize for Convergence {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Convergence::At(n) => ser.serialize_u64(*n as u64),
            Convergence::NotConverged => ser.serialize_str(NOT_CONVERGED),
        }
    }
}

impl<'de> Deserialize<'de> for Convergence {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            At(u64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::At(n) => Ok(Convergence::At(n as usize)),
            Raw::Text(s) if s == NOT_CONVERGED => Ok(Convergence::NotConverged),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("bad convergence value '{s}'"))),
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// First curve index from which every later value stays within
/// `settle_ratio` times the floor, the median of the final 10% of the curve.
///
/// A curve whose floor exceeds four times its global minimum is still rising
/// and reports [`Convergence::NotConverged`].
pub fn convergence_time(curve: &[(usize, f64)], settle_ratio: f64) -> Result<Convergence, MetricsError> {
    if curve.is_empty() {
        return Err(MetricsError::EmptyCurve);
    }
    if settle_ratio.is_nan() || settle_ratio <= 1.0 {
        return Err(MetricsError::BadSettleRatio(settle_ratio));
    }
    let tail_len = curve.len().div_ceil(10);
    let mut tail: Vec<f64> = curve[curve.len() - tail_len..].iter().map(|p| p.1).collect();
    let floor = median(&mut tail);
    let min = curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if floor > RISING_TAIL_RATIO * min {
        return Ok(Convergence::NotConverged);
    }
    let threshold = settle_ratio * floor;
    match curve.iter().rposition(|p| p.1.is_nan() || p.1 > threshold) {
        None => Ok(Convergence::At(curve[0].0)),
        Some(last) if last + 1 < curve.len() => Ok(Convergence::At(curve[last + 1].0)),
        Some(_) => Ok(Convergence::NotConverged),
    }
}

/// Pearson correlation with population moments, clamped to `[-1, 1]`.
pub fn correlation_coefficient(s: &[f64], e: &[f64]) -> Result<f64, MetricsError> {
    if s.len() != e.len() {
        return Err(MetricsError::LengthMismatch(s.len(), e.len()));
    }
    if s.len() < 2 {
        return Err(MetricsError::TooShort(s.len()));
    }
    let n = s.len() as f64;
    let ms = s.iter().sum::<f64>() / n;
    let me = e.iter().sum::<f64>() / n;
    let (mut cov, mut vs, mut ve) = (0.0, 0.0, 0.0);
    for (a, b) in s.iter().zip(e) {
        let (da, db) = (a - ms, b - me);
        cov += da * db;
        vs += da * da;
        ve += db * db;
    }
    if vs == 0.0 {
        return Err(MetricsError::ZeroVariance("signal"));
    }
    if ve == 0.0 {
        return Err(MetricsError::ZeroVariance("output"));
    }
    Ok((cov / (vs.sqrt() * ve.sqrt())).clamp(-1.0, 1.0))
}

/// `10 log10(P_s / P_r)` with `r = e - s`, over the second half of the run.
pub fn output_snr(s: &[f64], e: &[f64]) -> Result<f64, MetricsError> {
    if s.len() != e.len() {
        return Err(MetricsError::LengthMismatch(s.len(), e.len()));
    }
    let start = s.len() / 2;
    let p_s = mean_square(&s[start..]);
    if p_s.is_nan() || p_s <= 0.0 {
        return Err(MetricsError::ZeroSignalPower);
    }
    let residual: Vec<f64> = e[start..].iter().zip(&s[start..]).map(|(a, b)| a - b).collect();
    let p_r = mean_square(&residual);
    if p_r == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((10.0 * (p_s / p_r).log10()).min(SNR_CAP_DB))
}

/// Scores of one canceller run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Windowed MSE of the canceller output `e`.
    pub mse_curve: Vec<(usize, f64)>,
    pub convergence_samples: Convergence,
    /// Convergence index divided by the sample rate.
    pub convergence_seconds: Option<f64>,
    pub corr_coeff: f64,
    pub output_snr_db: f64,
    pub input_snr_db: f64,
}

impl MetricsReport {
    /// Scores output `e` against clean signal `s`.
    pub fn compute(
        s: &[f64],
        e: &[f64],
        sample_rate_hz: f64,
        mse_window: usize,
        input_snr_db: f64,
    ) -> Result<Self, MetricsError> {
        if s.len() != e.len() {
            return Err(MetricsError::LengthMismatch(s.len(), e.len()));
        }
        let mse_curve = mse_curve(e, mse_window)?;
        let convergence = convergence_time(&mse_curve, DEFAULT_SETTLE_RATIO)?;
        Ok(Self {
            convergence_seconds: convergence.samples().map(|n| n as f64 / sample_rate_hz),
            convergence_samples: convergence,
            corr_coeff: correlation_coefficient(s, e)?,
            output_snr_db: output_snr(s, e)?,
            input_snr_db,
            mse_curve,
        })
    }
}
