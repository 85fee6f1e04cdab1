//! Minimal RIFF/WAVE codec: 16-bit integer PCM only.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::signal::SignalBuffer;

const PCM_FORMAT: u16 = 1;
const FULL_SCALE: f64 = 32768.0;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("audio file not found: {0}")]
    NotFound(PathBuf),
    #[error("unsupported WAV format: {0}")]
    Unsupported(String),
    #[error("malformed WAV file: {0}")]
    Malformed(&'static str),
    #[error("truncated data chunk: header declares {declared} bytes, {available} present")]
    Truncated { declared: usize, available: usize },
    #[error("buffer contains non-finite samples")]
    NonFinite,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy)]
struct Format {
    channels: u16,
    sample_rate: u32,
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Reads a 16-bit PCM WAV file, averaging channels down to mono.
///
/// Integer codes map to `[-1, 1)` by division by 32768.
pub fn load_wav(path: impl AsRef<Path>) -> Result<SignalBuffer, WavError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    match File::open(path) {
        Ok(mut f) => f.read_to_end(&mut bytes)?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(WavError::NotFound(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<SignalBuffer, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::Malformed("missing RIFF/WAVE header"));
    }
    let mut format: Option<Format> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(WavError::Malformed("fmt chunk too short"));
                }
                let audio_format = u16_at(bytes, body);
                let channels = u16_at(bytes, body + 2);
                let sample_rate = u32_at(bytes, body + 4);
                let bits = u16_at(bytes, body + 14);
                if audio_format != PCM_FORMAT {
                    return Err(WavError::Unsupported(format!("audio format code {audio_format} (only PCM = 1)")));
                }
                if bits != 16 {
                    return Err(WavError::Unsupported(format!("{bits} bits per sample (only 16)")));
                }
                if channels == 0 || sample_rate == 0 {
                    return Err(WavError::Malformed("zero channels or sample rate"));
                }
                format = Some(Format { channels, sample_rate });
            }
            b"data" => {
                let fmt = format.ok_or(WavError::Malformed("data chunk before fmt chunk"))?;
                let available = bytes.len() - body;
                if size > available {
                    return Err(WavError::Truncated { declared: size, available });
                }
                return Ok(frames_to_mono(&bytes[body..body + size], fmt));
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body + size + (size & 1);
    }
    Err(WavError::Malformed("no data chunk"))
}

fn frames_to_mono(data: &[u8], fmt: Format) -> SignalBuffer {
    let channels = fmt.channels as usize;
    let frame_bytes = 2 * channels;
    let samples = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame.chunks_exact(2).map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / FULL_SCALE).sum();
            sum / channels as f64
        })
        .collect();
    SignalBuffer::new(samples, fmt.sample_rate as f64)
}

fn quantize(v: f64) -> i16 {
    let max = 1.0 - 1.0 / FULL_SCALE;
    (v.clamp(-1.0, max) * FULL_SCALE).round() as i16
}

/// Writes a mono 16-bit PCM WAV, clipping samples to `[-1, 1 - 2^-15]`.
pub fn write_wav(buf: &SignalBuffer, path: impl AsRef<Path>) -> Result<(), WavError> {
    if !buf.is_finite() {
        return Err(WavError::NonFinite);
    }
    let sample_rate = buf.sample_rate_hz.round() as u32;
    let data_len = (buf.len() * 2) as u32;
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(b"RIFF")?;
    out.write_all(&(36 + data_len).to_le_bytes())?;
    out.write_all(b"WAVEfmt ")?;
    out.write_all(&16u32.to_le_bytes())?;
    out.write_all(&PCM_FORMAT.to_le_bytes())?;
    out.write_all(&1u16.to_le_bytes())?;
    out.write_all(&sample_rate.to_le_bytes())?;
    out.write_all(&(sample_rate * 2).to_le_bytes())?;
    out.write_all(&2u16.to_le_bytes())?;
    out.write_all(&16u16.to_le_bytes())?;
    out.write_all(b"data")?;
    out.write_all(&data_len.to_le_bytes())?;
    for &v in &buf.samples {
        out.write_all(&quantize(v).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wav_bytes(channels: u16, rate: u32, bits: u16, format: u16, codes: &[i16]) -> Vec<u8> {
        let data: Vec<u8> = codes.iter().flat_map(|c| c.to_le_bytes()).collect();
        let mut v = Vec::new();
        v.extend_from_slice(b"RIFF");
        v.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
        v.extend_from_slice(b"WAVEfmt ");
        v.extend_from_slice(&16u32.to_le_bytes());
        v.extend_from_slice(&format.to_le_bytes());
        v.extend_from_slice(&channels.to_le_bytes());
        v.extend_from_slice(&rate.to_le_bytes());
        v.extend_from_slice(&(rate * channels as u32 * 2).to_le_bytes());
        v.extend_from_slice(&(channels * 2).to_le_bytes());
        v.extend_from_slice(&bits.to_le_bytes());
        v.extend_from_slice(b"data");
        v.extend_from_slice(&(data.len() as u32).to_le_bytes());
        v.extend_from_slice(&data);
        v
    }

    #[test]
    fn decodes_scaling() {
        let buf = decode(&wav_bytes(1, 8000, 16, 1, &[0, 16384, -32768])).unwrap();
        assert_eq!(buf.samples, vec![0.0, 0.5, -1.0]);
        assert_eq!(buf.sample_rate_hz, 8000.0);
    }

    #[test]
    fn stereo_is_averaged() {
        let buf = decode(&wav_bytes(2, 44100, 16, 1, &[16384, 0, -16384, -16384])).unwrap();
        assert_eq!(buf.samples, vec![0.25, -0.5]);
    }

    #[test]
    fn one_second_header_contract() {
        let codes = vec![100i16; 8000];
        let buf = decode(&wav_bytes(1, 8000, 16, 1, &codes)).unwrap();
        assert_eq!(buf.len(), 8000);
        assert_eq!(buf.sample_rate_hz, 8000.0);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(decode(&wav_bytes(1, 8000, 16, 3, &[0])), Err(WavError::Unsupported(_))));
        assert!(matches!(decode(&wav_bytes(1, 8000, 8, 1, &[0])), Err(WavError::Unsupported(_))));
        let mut cut = wav_bytes(1, 8000, 16, 1, &[1, 2, 3, 4]);
        cut.truncate(cut.len() - 3);
        assert!(matches!(decode(&cut), Err(WavError::Truncated { declared: 8, available: 5 })));
        assert!(matches!(load_wav("/definitely/not/here.wav"), Err(WavError::NotFound(_))));
        assert!(matches!(decode(b"nonsense"), Err(WavError::Malformed(_))));
    }

    #[test]
    fn clipping_rule() {
        assert_eq!(quantize(2.0), i16::MAX);
        assert_eq!(quantize(-3.0), i16::MIN);
        assert_eq!(quantize(0.0), 0);
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        write_wav(&SignalBuffer::new(vec![0.0, 2.0], 8000.0), &path).unwrap();
        let back = load_wav(&path).unwrap();
        assert_eq!(back.samples[0], 0.0);
        assert_eq!(back.samples[1], i16::MAX as f64 / FULL_SCALE);
        assert!(write_wav(&SignalBuffer::new(vec![f64::NAN], 8000.0), &path).is_err());
        assert!(write_wav(&back, dir.path().join("missing/dir/x.wav")).is_err());
    }
}
