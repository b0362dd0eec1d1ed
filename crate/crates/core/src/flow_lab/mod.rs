//! Desk-scale probes of the comparison argument: observables along the
//! Ornstein–Uhlenbeck flow, the GUE edge trace, unmatched-term decay and
//! Weingarten calculus.

mod edge_trace;
mod haar;
mod scan;
mod weingarten;

pub use edge_trace::{gue_edge_trace, gue_edge_trace_with, EdgeTrace, EDGE_TRACE_ORDER};
pub use haar::{haar_moment_mc, sample_haar, weingarten_moment, HaarMoment, MomentPattern};
pub use scan::{
    default_unmatched_z, flow_scan, unmatched_probe, Flatness, FlowObservable, FlowRow, FlowScan, FlowScanResult,
    UnmatchedRow, UnmatchedTerm, MIN_FLOW_REPLICAS, MIN_UNMATCHED_REPLICAS,
};
pub use weingarten::{
    all_perms, catalan, catalan_product, value_from_table, weingarten, weingarten_asymptotic, Perm, WeingartenQuery,
    WeingartenTable, WeingartenValue, MAX_ORDER,
};
