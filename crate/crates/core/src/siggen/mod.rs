//! Deterministic test signals: sinusoid, sawtooth and linear chirp, plus
//! 16-bit PCM WAV ingestion for recorded audio.
//!
//! All generators are pure functions of their arguments and reject any
//! frequency at or above Nyquist.

mod wav;

use std::f64::consts::TAU;

use thiserror::Error;

pub use wav::{load_wav, write_wav, WavError};

use crate::signal::SignalBuffer;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("frequency {freq_hz} Hz is not below Nyquist ({nyquist_hz} Hz)")]
    AboveNyquist { freq_hz: f64, nyquist_hz: f64 },
    #[error("sample count must be positive")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

fn check_common(n_samples: usize, sample_rate_hz: f64, freqs: &[f64]) -> Result<(), SignalError> {
    if n_samples == 0 {
        return Err(SignalError::Empty);
    }
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(SignalError::InvalidParameter("sample rate must be positive"));
    }
    let nyquist_hz = sample_rate_hz / 2.0;
    for &freq_hz in freqs {
        if !freq_hz.is_finite() || freq_hz < 0.0 {
            return Err(SignalError::InvalidParameter("frequency must be non-negative"));
        }
        if freq_hz >= nyquist_hz {
            return Err(SignalError::AboveNyquist { freq_hz, nyquist_hz });
        }
    }
    Ok(())
}

fn check_amplitude(amplitude: f64) -> Result<(), SignalError> {
    if amplitude.is_finite() && amplitude > 0.0 {
        Ok(())
    } else {
        Err(SignalError::InvalidParameter("amplitude must be positive"))
    }
}

/// `amplitude · sin(2π f n / fs + phase)`.
pub fn gen_sinusoid(
    freq_hz: f64,
    amplitude: f64,
    n_samples: usize,
    sample_rate_hz: f64,
    phase_rad: f64,
) -> Result<SignalBuffer, SignalError> {
    check_common(n_samples, sample_rate_hz, &[freq_hz])?;
    check_amplitude(amplitude)?;
    let samples =
        (0..n_samples).map(|n| amplitude * (TAU * freq_hz * n as f64 / sample_rate_hz + phase_rad).sin()).collect();
    Ok(SignalBuffer::new(samples, sample_rate_hz))
}

/// Rising ramp from `-amplitude` towards `+amplitude`, restarting every period.
pub fn gen_sawtooth(
    freq_hz: f64,
    amplitude: f64,
    n_samples: usize,
    sample_rate_hz: f64,
) -> Result<SignalBuffer, SignalError> {
    check_common(n_samples, sample_rate_hz, &[freq_hz])?;
    check_amplitude(amplitude)?;
    let samples = (0..n_samples)
        .map(|n| {
            let cycles = freq_hz * n as f64 / sample_rate_hz;
            amplitude * (2.0 * cycles.fract() - 1.0)
        })
        .collect();
    Ok(SignalBuffer::new(samples, sample_rate_hz))
}

/// Linear sweep from `f0_hz` to `f1_hz` over the length of the buffer.
///
/// The phase is `2π (f0 t + (f1 - f0) t² / 2T)` with `T` the buffer duration,
/// so equal endpoints reproduce [`gen_sinusoid`] exactly.
pub fn gen_chirp(
    f0_hz: f64,
    f1_hz: f64,
    amplitude: f64,
    n_samples: usize,
    sample_rate_hz: f64,
) -> Result<SignalBuffer, SignalError> {
    check_common(n_samples, sample_rate_hz, &[f0_hz, f1_hz])?;
    check_amplitude(amplitude)?;
    let duration = n_samples as f64 / sample_rate_hz;
    let sweep_rate = (f1_hz - f0_hz) / (2.0 * duration);
    let samples = (0..n_samples)
        .map(|n| {
            let t = n as f64 / sample_rate_hz;
            amplitude * (TAU * (f0_hz * t + sweep_rate * t * t)).sin()
        })
        .collect();
    Ok(SignalBuffer::new(samples, sample_rate_hz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoid_zero_frequency_is_silent() {
        let s = gen_sinusoid(0.0, 1.0, 4, 8000.0, 0.0).unwrap();
        assert_eq!(s.samples, vec![0.0; 4]);
    }

    #[test]
    fn sinusoid_quarter_period() {
        let s = gen_sinusoid(2000.0, 1.0, 4, 8000.0, 0.0).unwrap();
        for (got, want) in s.samples.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn sinusoid_matches_closed_form() {
        let s = gen_sinusoid(440.0, 0.5, 1000, 8000.0, 0.0).unwrap();
        for (n, v) in s.samples.iter().enumerate() {
            let t = n as f64 / 8000.0;
            let want = 0.5 * (2.0 * std::f64::consts::PI * 440.0 * t).sin();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nyquist_and_empty() {
        assert!(matches!(gen_sinusoid(4000.0, 1.0, 8, 8000.0, 0.0), Err(SignalError::AboveNyquist { .. })));
        assert_eq!(gen_sinusoid(100.0, 1.0, 0, 8000.0, 0.0), Err(SignalError::Empty));
        assert!(gen_sawtooth(5000.0, 1.0, 8, 8000.0).is_err());
        assert!(gen_chirp(100.0, 4000.0, 1.0, 8, 8000.0).is_err());
        assert!(gen_chirp(100.0, 200.0, 1.0, 0, 8000.0).is_err());
    }

    #[test]
    fn sawtooth_small_cases() {
        assert_eq!(gen_sawtooth(1.0, 1.0, 4, 4.0).unwrap().samples, vec![-1.0, -0.5, 0.0, 0.5]);
        assert_eq!(gen_sawtooth(0.5, 2.0, 2, 4.0).unwrap().samples, vec![-2.0, -1.5]);
    }

    #[test]
    fn sawtooth_counts_ramps() {
        let s = gen_sawtooth(100.0, 1.0, 800, 8000.0).unwrap();
        // a reset is a downward jump; the first ramp starts at sample 0
        let resets = s.samples.windows(2).filter(|w| w[1] < w[0]).count();
        assert_eq!(resets + 1, 10);
        let max = s.samples.iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - (1.0 - 2.0 * 100.0 / 8000.0)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_chirp_is_a_sinusoid() {
        let c = gen_chirp(440.0, 440.0, 1.0, 2000, 8000.0).unwrap();
        let s = gen_sinusoid(440.0, 1.0, 2000, 8000.0, 0.0).unwrap();
        for (a, b) in c.samples.iter().zip(&s.samples) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = gen_chirp(0.0, 0.0, 1.0, 8, 8000.0).unwrap();
        assert_eq!(z.samples, vec![0.0; 8]);
    }

    #[test]
    fn chirp_zero_crossing_rate_rises() {
        let c = gen_chirp(100.0, 1000.0, 1.0, 8000, 8000.0).unwrap();
        let rates: Vec<usize> =
            c.samples.chunks(800).map(|w| w.windows(2).filter(|p| (p[0] < 0.0) != (p[1] < 0.0)).count()).collect();
        assert_eq!(rates.len(), 10);
        for pair in rates.windows(2) {
            assert!(pair[1] > pair[0], "{rates:?}");
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_chirp(50.0, 900.0, 0.7, 3000, 8000.0).unwrap();
        let b = gen_chirp(50.0, 900.0, 0.7, 3000, 8000.0).unwrap();
        assert_eq!(a, b);
        assert!(a.is_finite());
    }
}
