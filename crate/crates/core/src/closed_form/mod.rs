//! Analytical expectations of beam-switch and handover counts.
//!
//! * [`single_side`]: all base stations on one side; switches per gap and
//!   highway totals.
//! * [`cross_side`]: handover probabilities between sides, switch counts
//!   across a side change and the handover-offset densities.
//! * [`box_model`]: expectations per top-side gap ("box") and highway totals
//!   for two-sided deployment.

pub mod box_model;
pub mod cross_side;
pub mod single_side;

pub use box_model::{
    bsn_double_side, conditional_pmf_nbv, expected_handovers_box, expected_switches_box,
    hon_double_side, nbv_pmf, BoxExpectation, BoxWeights, GapWeight, SeriesControl,
};
pub use cross_side::{
    expected_switches_cross, handover_offset_cdfs, handover_offset_densities, prob_handover_bb,
    prob_handover_bt, prob_handover_tb, prob_handover_tt, CrossSwitches,
};
pub use single_side::{
    bsn_single_side, conditional_switches, expected_switches_neighbor, hon_single_side,
    SingleSideParams,
};

use crate::codebook::Codebook;
use crate::error::{check_positive, Error, Result};

/// Two-sided deployment seen from a lane on the top side (`w_t < w_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSideParams {
    lambda_t_los: f64,
    lambda_b_los: f64,
    w_t: f64,
    w_b: f64,
    codebook: Codebook,
    l_h: f64,
}

impl DoubleSideParams {
    pub fn new(
        lambda_t_los: f64,
        lambda_b_los: f64,
        w_t: f64,
        w_b: f64,
        codebook: Codebook,
        l_h: f64,
    ) -> Result<Self> {
        check_positive("lambda_t_los", lambda_t_los)?;
        check_positive("lambda_b_los", lambda_b_los)?;
        check_positive("w_t", w_t)?;
        check_positive("w_b", w_b)?;
        check_positive("l_h", l_h)?;
        if w_b < w_t {
            return Err(Error::invalid(
                "w_b",
                format!("the lane must be nearer the top line (w_t={w_t} > w_b={w_b})"),
            ));
        }
        Ok(Self {
            lambda_t_los,
            lambda_b_los,
            w_t,
            w_b,
            codebook,
            l_h,
        })
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda_t_los
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b_los
    }

    /// Density of the merged line-of-sight process.
    pub fn lambda_tb(&self) -> f64 {
        self.lambda_t_los + self.lambda_b_los
    }

    pub fn w_t(&self) -> f64 {
        self.w_t
    }

    pub fn w_b(&self) -> f64 {
        self.w_b
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn l_h(&self) -> f64 {
        self.l_h
    }

    /// `W_b^2 - W_t^2`, computed as a product to keep precision when the
    /// two distances are close.
    pub fn width_gap_sq(&self) -> f64 {
        (self.w_b - self.w_t) * (self.w_b + self.w_t)
    }

    pub fn with_l_h(&self, l_h: f64) -> Result<Self> {
        Self::new(
            self.lambda_t_los,
            self.lambda_b_los,
            self.w_t,
            self.w_b,
            self.codebook.clone(),
            l_h,
        )
    }

    /// The top side taken alone.
    pub fn top_only(&self) -> SingleSideParams {
        SingleSideParams::new(self.lambda_t_los, self.w_t, self.codebook.clone(), self.l_h)
            .expect("validated on construction")
    }

    /// The bottom side taken alone.
    pub fn bottom_only(&self) -> SingleSideParams {
        SingleSideParams::new(self.lambda_b_los, self.w_b, self.codebook.clone(), self.l_h)
            .expect("validated on construction")
    }
}
