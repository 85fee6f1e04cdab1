//! Sample-by-sample adaptive filters behind one interface.
//!
//! Every filter consumes a reference sample `x(n)` and a desired sample
//! `d(n)` and returns the a priori output `y(n)` together with
//! `e(n) = d(n) - y(n)`, then adapts.

mod config;
mod ftf;
mod gal;
mod rls;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::FilterConfig;
pub use ftf::Ftf;
pub use gal::Gal;
pub use rls::Rls;

use crate::signal::SignalBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub y: f64,
    pub e: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("invalid filter configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite input sample (x = {x}, d = {d})")]
    NonFinite { x: f64, d: f64 },
    #[error("input buffers differ in length: x has {x}, d has {d}")]
    LengthMismatch { x: usize, d: usize },
}

pub trait AdaptiveFilter {
    /// Filters one sample pair and adapts. Non-finite input leaves the state untouched.
    fn step(&mut self, x: f64, d: f64) -> Result<StepResult, FilterError>;

    /// Number of taps of the joint-process (output) section.
    fn order(&self) -> usize;
}

pub(crate) fn check_finite(x: f64, d: f64) -> Result<(), FilterError> {
    if x.is_finite() && d.is_finite() {
        Ok(())
    } else {
        Err(FilterError::NonFinite { x, d })
    }
}

/// Runs `filter` over whole buffers; identical to stepping sample by sample.
///
/// State carries over between calls, so a stream may be processed in pieces.
pub fn process<F: AdaptiveFilter + ?Sized>(
    filter: &mut F,
    x: &SignalBuffer,
    d: &SignalBuffer,
) -> Result<(SignalBuffer, SignalBuffer), FilterError> {
    if x.len() != d.len() {
        return Err(FilterError::LengthMismatch { x: x.len(), d: d.len() });
    }
    let mut y = Vec::with_capacity(x.len());
    let mut e = Vec::with_capacity(x.len());
    for (&xn, &dn) in x.samples.iter().zip(&d.samples) {
        let r = filter.step(xn, dn)?;
        y.push(r.y);
        e.push(r.e);
    }
    Ok((SignalBuffer::new(y, d.sample_rate_hz), SignalBuffer::new(e, d.sample_rate_hz)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rls,
    Ftf,
    Gal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Rls, Algorithm::Ftf, Algorithm::Gal];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rls => "rls",
            Algorithm::Ftf => "ftf",
            Algorithm::Gal => "gal",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rls" => Ok(Algorithm::Rls),
            "ftf" => Ok(Algorithm::Ftf),
            "gal" => Ok(Algorithm::Gal),
            other => Err(format!("unknown algorithm '{other}' (expected rls, ftf or gal)")),
        }
    }
}

/// A filter of any of the three kinds, chosen at run time.
#[derive(Debug, Clone)]
pub enum AnyFilter {
    Rls(Rls),
    Ftf(Ftf),
    Gal(Gal),
}

impl AnyFilter {
    pub fn new(algorithm: Algorithm, cfg: &FilterConfig) -> Result<Self, FilterError> {
        Ok(match algorithm {
            Algorithm::Rls => AnyFilter::Rls(Rls::new(cfg)?),
            Algorithm::Ftf => AnyFilter::Ftf(Ftf::new(cfg)?),
            Algorithm::Gal => AnyFilter::Gal(Gal::new(cfg)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AnyFilter::Rls(_) => Algorithm::Rls,
            AnyFilter::Ftf(_) => Algorithm::Ftf,
            AnyFilter::Gal(_) => Algorithm::Gal,
        }
    }
}

impl AdaptiveFilter for AnyFilter {
    fn step(&mut self, x: f64, d: f64) -> Result<StepResult, FilterError> {
        match self {
            AnyFilter::Rls(f) => f.step(x, d),
            AnyFilter::Ftf(f) => f.step(x, d),
            AnyFilter::Gal(f) => f.step(x, d),
        }
    }

    fn order(&self) -> usize {
        match self {
            AnyFilter::Rls(f) => f.order(),
            AnyFilter::Ftf(f) => f.order(),
            AnyFilter::Gal(f) => f.order(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_buffers_give_empty_outputs() {
        let cfg = FilterConfig::default();
        for algo in Algorithm::ALL {
            let mut f = AnyFilter::new(algo, &cfg).unwrap();
            let empty = SignalBuffer::new(vec![], 8000.0);
            let (y, e) = process(&mut f, &empty, &empty).unwrap();
            assert!(y.is_empty() && e.is_empty());
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut f = AnyFilter::new(Algorithm::Gal, &FilterConfig::default()).unwrap();
        let a = SignalBuffer::new(vec![0.0; 3], 8000.0);
        let b = SignalBuffer::new(vec![0.0; 2], 8000.0);
        assert_eq!(process(&mut f, &a, &b), Err(FilterError::LengthMismatch { x: 3, d: 2 }));
    }

    #[test]
    fn block_equals_loop_of_steps() {
        let x: Vec<f64> = (0..200).map(|n| ((n * 37 % 101) as f64 / 50.0) - 1.0).collect();
        let d: Vec<f64> = (0..200).map(|n| (n as f64 * 0.3).sin()).collect();
        let xb = SignalBuffer::new(x.clone(), 8000.0);
        let db = SignalBuffer::new(d.clone(), 8000.0);
        for algo in Algorithm::ALL {
            let cfg = FilterConfig { order: 4, ..FilterConfig::default() };
            let mut block = AnyFilter::new(algo, &cfg).unwrap();
            let (_, e_block) = process(&mut block, &xb, &db).unwrap();
            let mut single = AnyFilter::new(algo, &cfg).unwrap();
            let e_loop: Vec<f64> = x.iter().zip(&d).map(|(&a, &b)| single.step(a, b).unwrap().e).collect();
            assert_eq!(e_block.samples, e_loop, "{algo}");
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        for algo in Algorithm::ALL {
            let mut f = AnyFilter::new(algo, &FilterConfig::default()).unwrap();
            assert!(matches!(f.step(f64::NAN, 0.0), Err(FilterError::NonFinite { .. })));
            assert!(matches!(f.step(0.0, f64::INFINITY), Err(FilterError::NonFinite { .. })));
            assert_eq!(f.step(0.0, 1.0).unwrap(), StepResult { y: 0.0, e: 1.0 });
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("lms".parse::<Algorithm>().is_err());
    }
}
