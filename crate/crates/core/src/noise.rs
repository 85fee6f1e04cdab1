//! Interference sources and the unknown noise path of the canceller.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit seed. Each purpose uses
//! its own ChaCha stream so that, for one seed, the Gaussian samples, the
//! burst gate and the random channel taps never share draws:
//!
//! | stream | use |
//! |--------|-----|
//! | 0 | Gaussian samples (white, pink base, burst carrier) |
//! | 1 | burst on/off gate |
//! | 2 | random channel taps |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{mean_square, SignalBuffer};

const GAUSSIAN_STREAM: u64 = 0;
const GATE_STREAM: u64 = 1;
const CHANNEL_STREAM: u64 = 2;

/// Shortest buffer for which the spectral shaping of pink noise is defined.
pub const MIN_PINK_SAMPLES: usize = 1024;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("sample count must be positive")]
    Empty,
    #[error("pink noise needs at least {MIN_PINK_SAMPLES} samples, got {0}")]
    TooShortForPink(usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("burst gain must be positive, got {0}")]
    InvalidGain(f64),
    #[error("channel needs at least one nonzero tap")]
    EmptyChannel,
    #[error("buffers differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} has zero power")]
    ZeroPower(&'static str),
    #[error("SNR must not be NaN")]
    InvalidSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    White,
    Pink,
    Burst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
    /// Per-sample off→on transition probability.
    pub burst_on_prob: f64,
    /// Per-sample on→off transition probability.
    pub burst_off_prob: f64,
    pub burst_gain: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, seed: u64) -> Self {
        Self { kind, seed, burst_on_prob: 0.02, burst_off_prob: 0.02, burst_gain: 1.0 }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for p in [self.burst_on_prob, self.burst_off_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(NoiseError::InvalidProbability(p));
            }
        }
        if !(self.burst_gain.is_finite() && self.burst_gain > 0.0) {
            return Err(NoiseError::InvalidGain(self.burst_gain));
        }
        Ok(())
    }

    pub fn generate(&self, n_samples: usize, sample_rate_hz: f64) -> Result<SignalBuffer, NoiseError> {
        match self.kind {
            NoiseKind::White => gen_white(self.seed, n_samples, sample_rate_hz),
            NoiseKind::Pink => gen_pink(self.seed, n_samples, sample_rate_hz),
            NoiseKind::Burst => gen_burst(self, n_samples, sample_rate_hz),
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(seed: u64, n_samples: usize) -> Vec<f64> {
    let mut rng = rng_for(seed, GAUSSIAN_STREAM);
    (0..n_samples).map(|_| rng.sample(StandardNormal)).collect()
}

/// I.i.d. standard Gaussian samples.
pub fn gen_white(seed: u64, n_samples: usize, sample_rate_hz: f64) -> Result<SignalBuffer, NoiseError> {
    if n_samples == 0 {
        return Err(NoiseError::Empty);
    }
    Ok(SignalBuffer::new(gaussian(seed, n_samples), sample_rate_hz))
}

/// 1/f noise by spectral shaping of a white draw.
///
/// The spectrum of the Gaussian base is scaled by `1/sqrt(k)` at bin `k` (DC
/// removed), which gives a power slope of -10 dB per decade. The result is
/// normalized to zero mean and unit variance.
pub fn gen_pink(seed: u64, n_samples: usize, sample_rate_hz: f64) -> Result<SignalBuffer, NoiseError> {
    if n_samples < MIN_PINK_SAMPLES {
        return Err(NoiseError::TooShortForPink(n_samples));
    }
    let mut spectrum: Vec<Complex<f64>> = gaussian(seed, n_samples).into_iter().map(|v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n_samples).process(&mut spectrum);
    spectrum[0] = Complex::new(0.0, 0.0);
    for (k, bin) in spectrum.iter_mut().enumerate().skip(1) {
        // mirror bins keep the conjugate symmetry of a real signal
        let freq_index = k.min(n_samples - k) as f64;
        *bin /= freq_index.sqrt();
    }
    planner.plan_fft_inverse(n_samples).process(&mut spectrum);

    let mut samples: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let mean = samples.iter().sum::<f64>() / n_samples as f64;
    samples.iter_mut().for_each(|v| *v -= mean);
    let std = mean_square(&samples).sqrt();
    samples.iter_mut().for_each(|v| *v /= std);
    Ok(SignalBuffer::new(samples, sample_rate_hz))
}

/// White Gaussian noise gated by a two-state Markov chain that starts "off".
///
/// Each sample first draws the state transition, then emits `gain · w(n)`
/// when on and zero when off.
pub fn gen_burst(spec: &NoiseSpec, n_samples: usize, sample_rate_hz: f64) -> Result<SignalBuffer, NoiseError> {
    spec.validate()?;
    if n_samples == 0 {
        return Err(NoiseError::Empty);
    }
    let carrier = gaussian(spec.seed, n_samples);
    let mut gate = rng_for(spec.seed, GATE_STREAM);
    let mut on = false;
    let samples = carrier
        .into_iter()
        .map(|w| {
            let u: f64 = gate.random();
            on = if on { u >= spec.burst_off_prob } else { u < spec.burst_on_prob };
            if on {
                spec.burst_gain * w
            } else {
                0.0
            }
        })
        .collect();
    Ok(SignalBuffer::new(samples, sample_rate_hz))
}

/// FIR model of the path from the reference sensor to the primary sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub taps: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(taps: Vec<f64>) -> Result<Self, NoiseError> {
        let chan = Self { taps };
        chan.validate()?;
        Ok(chan)
    }

    pub fn identity() -> Self {
        Self { taps: vec![1.0] }
    }

    /// `len` Gaussian taps normalized to unit energy.
    pub fn random(len: usize, seed: u64) -> Result<Self, NoiseError> {
        if len == 0 {
            return Err(NoiseError::EmptyChannel);
        }
        let mut rng = rng_for(seed, CHANNEL_STREAM);
        let mut taps: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        taps.iter_mut().for_each(|t| *t /= norm);
        Self::new(taps)
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if self.taps.iter().any(|t| *t != 0.0 && t.is_finite()) && self.taps.iter().all(|t| t.is_finite()) {
            Ok(())
        } else {
            Err(NoiseError::EmptyChannel)
        }
    }
}

/// Causal convolution with zero prehistory; output length equals input length.
pub fn channel_filter(noise: &SignalBuffer, chan: &ChannelSpec) -> Result<SignalBuffer, NoiseError> {
    chan.validate()?;
    let x = noise.as_slice();
    let out = (0..x.len()).map(|n| chan.taps.iter().take(n + 1).enumerate().map(|(i, t)| t * x[n - i]).sum()).collect();
    Ok(SignalBuffer::new(out, noise.sample_rate_hz))
}

/// Adds `scale · noise` to `signal` so that the power ratio equals
/// `target_snr_db`, with powers taken as mean squares over the whole buffer.
///
/// `+inf` dB yields `scale = 0`. Returns the primary input and the scale.
pub fn mix_at_snr(
    signal: &SignalBuffer,
    noise: &SignalBuffer,
    target_snr_db: f64,
) -> Result<(SignalBuffer, f64), NoiseError> {
    if signal.len() != noise.len() {
        return Err(NoiseError::LengthMismatch(signal.len(), noise.len()));
    }
    if target_snr_db.is_nan() {
        return Err(NoiseError::InvalidSnr);
    }
    let p_signal = signal.power();
    let p_noise = noise.power();
    if p_signal <= 0.0 {
        return Err(NoiseError::ZeroPower("signal"));
    }
    if p_noise <= 0.0 {
        return Err(NoiseError::ZeroPower("noise"));
    }
    let scale = (p_signal / (p_noise * 10f64.powf(target_snr_db / 10.0))).sqrt();
    let primary = signal.samples.iter().zip(&noise.samples).map(|(s, v)| s + scale * v).collect();
    Ok((SignalBuffer::new(primary, signal.sample_rate_hz), scale))
}
