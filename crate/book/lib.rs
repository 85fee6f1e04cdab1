//! Every chapter of the guide is a module here so that `cargo test` compiles
//! and runs its Rust listings as doctests. A failing listing is reported
//! under the module of its chapter.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/canceller.md")]
pub mod canceller {}
#[doc = include_str!("src/signals.md")]
pub mod signals {}
#[doc = include_str!("src/rls.md")]
pub mod rls {}
#[doc = include_str!("src/ftf.md")]
pub mod ftf {}
#[doc = include_str!("src/gal.md")]
pub mod gal {}
#[doc = include_str!("src/metrics.md")]
pub mod metrics {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
