pub mod bridge;
pub mod ensembles;
pub mod error;
pub mod flow_lab;
pub mod fredholm;
pub mod harness;
pub mod kernels;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};

/// Chapters of the guide in `book/`, compiled as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    pub mod ensembles {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub mod spectral {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/fredholm.md")]
    pub mod fredholm {}
    #[doc = include_str!("../../../book/src/bridge.md")]
    pub mod bridge {}
    #[doc = include_str!("../../../book/src/flow_lab.md")]
    pub mod flow_lab {}
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
