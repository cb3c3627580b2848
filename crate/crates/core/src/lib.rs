//! Onset of synchronization in the second-order (inertial) Kuramoto model on
//! graphs.
//!
//! The analytical side computes the critical coupling `K_c = 1/(g₀ μ_max)`,
//! generalized eigenvalue trajectories `λ(K)` and the pitchfork amplitude
//! law. The simulation side integrates finite networks on W-random graphs
//! and measures order parameters across coupling sweeps.
//!
//! ```
//! use inertial_kuramoto::{bifurcation, freq_dist::FrequencyDistribution, graphon::Graphon};
//!
//! let g = FrequencyDistribution::gaussian(0.3)?;
//! let spectrum = Graphon::erdos_renyi(0.5)?.spectrum(256)?;
//! let p = bifurcation::predict(&g, &spectrum)?;
//! assert!((p.k_c - 0.6153118956612826).abs() < 1e-10);
//! # Ok::<(), inertial_kuramoto::Error>(())
//! ```

// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod error;
pub mod export;
pub mod freq_dist;
pub mod graphon;
pub mod quadrature;
pub mod selftest;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};

// The README and guide snippets run as doctests through these modules.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/frequency-distributions.md")]
    mod frequency_distributions {}
    #[doc = include_str!("../../../book/src/graphons.md")]
    mod graphons {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/bifurcation.md")]
    mod bifurcation {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
