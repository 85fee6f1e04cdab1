//! Adaptive noise cancellation with three least-squares filters.
//!
//! A primary sensor records `d(n) = s(n) + v0(n)`, where `v0` is interference
//! that reached it through an unknown FIR path. A reference sensor records the
//! interference source `x(n) = v1(n)`. An adaptive filter driven by `x`
//! estimates `v0`, and the error `e(n) = d(n) - y(n)` is the recovered signal.
//!
//! The filters are:
//!
//! * [`filters::Rls`]: exponentially weighted recursive least squares, O(N²) per sample.
//! * [`filters::Ftf`]: fast transversal RLS, O(N) per sample, same a priori errors.
//! * [`filters::Gal`]: gradient adaptive lattice with a normalized ladder.
//!
//! [`harness`] wires generators, filters and [`metrics`] into reproducible
//! experiments and backs the `ancbench` binary.
//!
//! ```
//! use anc_core::filters::{AdaptiveFilter, FilterConfig, Rls};
//!
//! let cfg = FilterConfig { order: 2, ..FilterConfig::default() };
//! let mut rls = Rls::new(&cfg).unwrap();
//! let out = rls.step(0.0, 1.5).unwrap();
//! assert_eq!((out.y, out.e), (0.0, 1.5));
//! ```

pub mod filters;
pub mod harness;
pub mod metrics;
pub mod noise;
pub mod siggen;
pub mod signal;

pub use signal::{SignalBuffer, DEFAULT_SAMPLE_RATE_HZ};
