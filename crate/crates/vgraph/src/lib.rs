//! Map time series onto visibility graphs and measure their structure.
//!
//! The pipeline: load or synthesize a series ([`series`]), build its
//! visibility graph ([`vg`]), then quantify long-range memory ([`dfa`]),
//! global statistics, clustering, small-world behavior and degree mixing
//! ([`metrics`]), and heavy-tailed degree distributions ([`distfit`]).
//! Shared OLS machinery lives in [`regress`].

pub mod dfa;
pub mod distfit;
mod error;
pub mod metrics;
pub mod regress;
pub mod series;
mod special;
pub mod vg;

pub use error::{Error, Result};
pub use regress::LinearFit;
pub use series::{Column, SyntheticKind, SyntheticSpec, TimeSeries};
pub use vg::VisibilityGraph;
