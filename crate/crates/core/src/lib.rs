//! Beam switching and handover on a multi-lane mmWave highway.
//!
//! Base stations sit on both sides of a straight highway as one-dimensional
//! Poisson point processes, thinned by large-vehicle blockage. A vehicle
//! drives along one lane, always served by the nearest line-of-sight base
//! station, which in turn serves it with one beam of a symmetric codebook.
//!
//! The crate has two independent engines that are meant to be checked
//! against each other:
//!
//! * [`closed_form`] evaluates the analytical expectations (switch counts per
//!   gap, cross-side handover probabilities, per-box expectations and the
//!   highway-level totals).
//! * [`monte_carlo`] samples worlds and traces the vehicle exactly along the
//!   road, logging every handover and beam switch.
//!
//! [`overhead`] turns event counts into beam-training time and the
//! training-to-connectivity ratio, and [`scenario`] wires everything to a
//! config file and the `hwbeam` binary.

pub mod closed_form;
pub mod codebook;
pub mod error;
pub mod monte_carlo;
pub mod overhead;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod stochastic_geometry;

pub use codebook::{Codebook, LaneGeometry, PathlossParams};
pub use error::{Error, Result};
pub use rng::Seed;
pub use stochastic_geometry::{LosModel, PointProcess1D, Side};
