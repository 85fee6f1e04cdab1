use serde::{Deserialize, Serialize};

/// Default rate for synthetic signals.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 8000.0;

/// A finite run of real samples at a fixed sample rate.
///
/// Every stream in the canceller (clean signal, primary, reference, filter
/// output, error) travels as one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalBuffer {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl SignalBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Self {
        Self { samples, sample_rate_hz }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }

    /// Mean of squares over the whole buffer.
    pub fn power(&self) -> f64 {
        mean_square(&self.samples)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self::new(self.samples.iter().map(|v| v * gain).collect(), self.sample_rate_hz)
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }
}

pub(crate) fn mean_square(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64
}
