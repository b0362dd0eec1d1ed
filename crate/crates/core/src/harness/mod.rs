//! Experiment orchestration: edge rescaling, empirical CDFs, Kolmogorov
//! distances with DKW bands, rate fits, and the runners behind the CLI.
//!
//! Replicate `r` of an experiment with seed `s` at dimension `N` always uses
//! the stream keyed by `(s, N, r)`, and every reduction runs in replicate
//! order, so outputs do not depend on the number of worker threads.

pub mod experiments;
mod rate;
mod stats;

pub use rate::{
    empirical_top_curve, rate_scan, rescaled_top_eigenvalues, with_threads, write_rate_csv, Channel, ChannelFit,
    EnsembleConfig, ExperimentConfig, GridSpec, RateRow, RateScanResult, MIN_REPLICAS,
};
pub use stats::{
    dkw_radius, edge_rescale, empirical_cdf, fit_rate, ks_distance, noise_dominated, ClampCounts, EdgeMode, RateFit,
    BOOTSTRAP_RESAMPLES, DKW_ALPHA,
};
