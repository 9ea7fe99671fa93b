//! Event-traced simulation of one vehicle driving the highway.
//!
//! A [`Realization`] is one sampled world. [`trace_realization`] drives the
//! vehicle from `x = 0` to `x = L_h` and records every handover and beam
//! switch at its exact position: serving cells are read off the lower
//! envelope of the squared distances `(x - b)^2 + w^2`, and beam switches are
//! the codebook edges that fall inside each cell. Nothing is discretized.

mod ensemble;
mod probes;
mod trace;

pub use ensemble::{
    box_statistics, run_ensemble, run_ensemble_with, BoxStatistics, EnsembleStats, MetricStats,
    RunningStats,
};
pub use probes::{cross_pair_offsets, top_bottom_top_outcomes};
pub use trace::{
    sojourn_times, trace_realization, trace_with_sink, write_event_log, BeamSwitch, BoxCounts,
    Handover, ServingInterval, StationId, TraceOptions, TraceResult, TraceSink,
};

use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, LaneGeometry};
use crate::error::{check_finite_at_least, check_positive, Result};
use crate::rng::Seed;
use crate::stochastic_geometry::{sample_ppp, thin_los, LosModel, PointProcess1D, Side};

/// Which sides of the road carry base stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deployment {
    Top,
    Bottom,
    #[serde(rename = "double")]
    Both,
}

impl Deployment {
    pub fn has(self, side: Side) -> bool {
        matches!(
            (self, side),
            (Deployment::Both, _) | (Deployment::Top, Side::Top) | (Deployment::Bottom, Side::Bottom)
        )
    }
}

/// Everything needed to sample and trace one world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub l_h: f64,
    /// Base-station density per side before blockage thinning.
    pub lambda_bs_top: f64,
    pub lambda_bs_bottom: f64,
    pub los: LosModel,
    pub geometry: LaneGeometry,
    pub codebook: Codebook,
    pub deployment: Deployment,
    pub trace: TraceOptions,
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("l_h", self.l_h)?;
        check_finite_at_least("lambda_bs_top", self.lambda_bs_top, 0.0)?;
        check_finite_at_least("lambda_bs_bottom", self.lambda_bs_bottom, 0.0)?;
        Ok(())
    }

    /// Line-of-sight density on `side`, zero when the side is not deployed.
    pub fn los_density(&self, side: Side) -> f64 {
        if !self.deployment.has(side) {
            return 0.0;
        }
        let lambda = match side {
            Side::Top => self.lambda_bs_top,
            Side::Bottom => self.lambda_bs_bottom,
        };
        self.los.los_density(lambda, side)
    }

    /// Samples realization `index` of the stream rooted at `master`.
    pub fn sample(&self, master: u64, index: u64) -> Result<Realization> {
        let seed = Seed::new(master, index);
        let side_process = |side: Side, lambda: f64, tag: u64| -> Result<PointProcess1D> {
            if !self.deployment.has(side) {
                return Ok(PointProcess1D::empty(0.0, self.l_h, side));
            }
            let raw = sample_ppp(lambda, self.l_h, side, seed.child(tag))?;
            Ok(thin_los(&raw, &self.los, seed.child(tag + 1)))
        };
        Ok(Realization {
            bs_top: side_process(Side::Top, self.lambda_bs_top, 0)?,
            bs_bottom: side_process(Side::Bottom, self.lambda_bs_bottom, 2)?,
            geometry: self.geometry,
            codebook: self.codebook.clone(),
        })
    }
}

/// Line-of-sight stations of one sampled world.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub bs_top: PointProcess1D,
    pub bs_bottom: PointProcess1D,
    pub geometry: LaneGeometry,
    pub codebook: Codebook,
}

impl Realization {
    pub fn new(
        bs_top: PointProcess1D,
        bs_bottom: PointProcess1D,
        geometry: LaneGeometry,
        codebook: Codebook,
    ) -> Result<Self> {
        if bs_top.length() != bs_bottom.length() {
            return Err(crate::Error::invalid("length", "both sides must cover the same highway"));
        }
        Ok(Self {
            bs_top: bs_top.with_side(Side::Top),
            bs_bottom: bs_bottom.with_side(Side::Bottom),
            geometry,
            codebook,
        })
    }

    pub fn l_h(&self) -> f64 {
        self.bs_top.length()
    }

    pub fn station_count(&self) -> usize {
        self.bs_top.len() + self.bs_bottom.len()
    }

    pub fn side(&self, side: Side) -> &PointProcess1D {
        match side {
            Side::Top => &self.bs_top,
            Side::Bottom => &self.bs_bottom,
        }
    }
}
