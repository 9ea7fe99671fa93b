use crate::codebook::Codebook;
use crate::error::{check_positive, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SingleSideParams {
    pub lambda_los: f64,
    pub w: f64,
    pub codebook: Codebook,
    pub l_h: f64,
}

impl SingleSideParams {
    pub fn new(lambda_los: f64, w: f64, codebook: Codebook, l_h: f64) -> Result<Self> {
        check_positive("lambda_los", lambda_los)?;
        check_positive("w", w)?;
        check_positive("l_h", l_h)?;
        Ok(Self {
            lambda_los,
            w,
            codebook,
            l_h,
        })
    }
}

/// Beam switches while driving between two same-side neighbours `d` apart:
/// `2k` once `d` passes `2 w a_{k-1}`, saturating at `N_c / 2`.
pub fn conditional_switches(d: f64, p: &SingleSideParams) -> u32 {
    let crossed = p
        .codebook
        .boundary_tangents()
        .partition_point(|a| 2.0 * p.w * a < d);
    2 * crossed as u32
}

/// Mean switches per gap when gaps are exponential with rate `lambda_los`:
/// `2 * sum_k exp(-2 w lambda a_k)`.
pub fn expected_switches_neighbor(p: &SingleSideParams) -> f64 {
    2.0 * p
        .codebook
        .boundary_tangents()
        .iter()
        .map(|a| (-2.0 * p.w * p.lambda_los * a).exp())
        .sum::<f64>()
}

/// Mean beam switches along the whole highway.
pub fn bsn_single_side(p: &SingleSideParams) -> f64 {
    p.lambda_los * p.l_h * expected_switches_neighbor(p)
}

/// Mean handovers along the highway, `lambda L - 1`, clamped at zero for
/// deployments sparser than one station per highway.
pub fn hon_single_side(p: &SingleSideParams) -> f64 {
    let raw = p.lambda_los * p.l_h - 1.0;
    if raw < 0.0 {
        log::warn!(
            "lambda * L_h = {} < 1: handover count {raw} clamped to 0",
            p.lambda_los * p.l_h
        );
        return 0.0;
    }
    raw
}
