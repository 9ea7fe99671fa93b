//! Symmetric codebook geometry on the vehicle's lane.
//!
//! Put the lane on the x axis and a base station at lateral distance `w`.
//! With `N_c` beams of equal width around the array, beam edges sit at the
//! angles `pi/N_c + 2k pi/N_c` from broadside, so on the lane they fall at
//! `bs_x +/- w * a_k` with `a_k = tan(pi/N_c + 2k pi/N_c)` for
//! `k = 0 .. N_c/4 - 1`. The lane therefore meets `N_c/2 + 1` beams, which are
//! indexed here from `-N_c/4` to `N_c/4` with `0` the broadside beam and
//! indices increasing toward `+x`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n_c: u32,
    tangents: Vec<f64>,
}

impl Codebook {
    pub fn new(n_c: u32) -> Result<Self> {
        if n_c < 4 || !n_c.is_multiple_of(4) {
            return Err(Error::CodebookSize(n_c));
        }
        let n = f64::from(n_c);
        let tangents = (0..n_c / 4)
            .map(|k| (PI / n + 2.0 * f64::from(k) * PI / n).tan())
            .collect();
        Ok(Self { n_c, tangents })
    }

    /// Codebook whose beams are `degrees` wide, i.e. `N_c = 360 / degrees`.
    pub fn from_beamwidth_deg(degrees: f64) -> Result<Self> {
        check_positive("beamwidth", degrees)?;
        let n = 360.0 / degrees;
        let rounded = n.round();
        if (n - rounded).abs() > 1e-6 * n.max(1.0) || rounded > f64::from(u32::MAX) {
            return Err(Error::invalid(
                "beamwidth",
                format!("{degrees} degrees does not divide 360 into a whole number of beams"),
            ));
        }
        Self::new(rounded as u32)
    }

    pub fn n_c(&self) -> u32 {
        self.n_c
    }

    pub fn beamwidth_deg(&self) -> f64 {
        360.0 / f64::from(self.n_c)
    }

    /// `a_k` for `k = 0 .. N_c/4 - 1`, strictly increasing and positive.
    pub fn boundary_tangents(&self) -> &[f64] {
        &self.tangents
    }

    /// Number of boundaries on each half of the lane, `N_c / 4`.
    pub fn quarter(&self) -> usize {
        self.tangents.len()
    }

    /// Beam-edge positions on a lane at lateral distance `w`, ascending.
    pub fn boundaries(&self, bs_x: f64, w: f64) -> impl Iterator<Item = f64> + '_ {
        self.tangents
            .iter()
            .rev()
            .map(move |a| bs_x - w * a)
            .chain(self.tangents.iter().map(move |a| bs_x + w * a))
    }
}

/// Beam serving a vehicle at `vu_x` from a base station at `bs_x`.
///
/// A point exactly on a beam edge belongs to the beam on its `+x` side.
pub fn beam_index(vu_x: f64, bs_x: f64, w: f64, codebook: &Codebook) -> i32 {
    debug_assert!(w > 0.0);
    let u = vu_x - bs_x;
    let tangents = codebook.boundary_tangents();
    if u >= 0.0 {
        // edges at +w*a_k with u >= edge count toward the positive side
        tangents.partition_point(|a| w * a <= u) as i32
    } else {
        -(tangents.partition_point(|a| -w * a > u) as i32)
    }
}

/// Beam edges of one base station strictly inside `(x_start, x_end)`.
pub fn switch_count_between(x_start: f64, x_end: f64, bs_x: f64, w: f64, codebook: &Codebook) -> usize {
    if x_end <= x_start {
        return 0;
    }
    codebook
        .boundaries(bs_x, w)
        .filter(|&b| b > x_start && b < x_end)
        .count()
}

/// Handover point between two base stations on the same side.
pub fn handover_point_same_side(b_i: f64, b_next: f64) -> f64 {
    0.5 * (b_i + b_next)
}

/// Point on the lane equidistant from a top station at `(b_t, w_t)` and a
/// bottom station at `(b_b, w_b)`. `None` when both share an x coordinate,
/// in which case the lane never crosses their bisector.
pub fn handover_point_cross_side(b_t: f64, b_b: f64, w_t: f64, w_b: f64) -> Option<f64> {
    let dx = b_b - b_t;
    if dx == 0.0 {
        return None;
    }
    Some((w_b * w_b - w_t * w_t + dx * (b_b + b_t)) / (2.0 * dx))
}

/// Lateral layout of the vehicle's lane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneGeometry {
    /// Distance from the lane centre line to the top base-station line.
    pub w_top: f64,
    /// Distance from the lane centre line to the bottom base-station line.
    pub w_bottom: f64,
    pub lane_width: f64,
    /// Lanes across the whole carriageway (both directions).
    pub n_lanes: u32,
}

impl LaneGeometry {
    pub fn new(w_top: f64, w_bottom: f64, lane_width: f64, n_lanes: u32) -> Result<Self> {
        check_positive("w_top", w_top)?;
        check_positive("w_bottom", w_bottom)?;
        check_positive("lane_width", lane_width)?;
        Ok(Self {
            w_top,
            w_bottom,
            lane_width,
            n_lanes,
        })
    }

    /// Lane `vu_lane` (1-based, counted from the top edge) of `n_lanes`, with
    /// base stations `setback` meters outside each road edge.
    pub fn from_lane(n_lanes: u32, lane_width: f64, vu_lane: u32, setback: f64) -> Result<Self> {
        if n_lanes == 0 {
            return Err(Error::invalid("n_lanes", "must be at least 1"));
        }
        if vu_lane == 0 || vu_lane > n_lanes {
            return Err(Error::invalid("vu_lane", format!("must be in 1..={n_lanes}, got {vu_lane}")));
        }
        check_positive("lane_width", lane_width)?;
        if !(setback.is_finite() && setback >= 0.0) {
            return Err(Error::invalid("bs_setback", format!("must be >= 0, got {setback}")));
        }
        let from_top = f64::from(vu_lane) - 0.5;
        let w_top = setback + from_top * lane_width;
        let w_bottom = setback + (f64::from(n_lanes) - from_top) * lane_width;
        Self::new(w_top, w_bottom, lane_width, n_lanes)
    }

    /// Folds antenna height into the lateral distances, `sqrt(w^2 + h^2)`.
    pub fn with_antenna_height(self, h: f64) -> Self {
        Self {
            w_top: self.w_top.hypot(h),
            w_bottom: self.w_bottom.hypot(h),
            ..self
        }
    }

    pub fn w(&self, side: crate::Side) -> f64 {
        match side {
            crate::Side::Top => self.w_top,
            crate::Side::Bottom => self.w_bottom,
        }
    }

    /// The side whose base-station line is closer to the lane.
    pub fn near_side(&self) -> crate::Side {
        if self.w_top <= self.w_bottom {
            crate::Side::Top
        } else {
            crate::Side::Bottom
        }
    }
}

/// `l(r) = C r^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossParams {
    pub c_gain: f64,
    pub alpha: f64,
}

impl PathlossParams {
    pub fn new(c_gain: f64, alpha: f64) -> Result<Self> {
        check_positive("c_gain", c_gain)?;
        check_positive("alpha", alpha)?;
        Ok(Self { c_gain, alpha })
    }

    /// Free-space-like default at 28 GHz, `C = 20 log10(4 pi f / c)` dB.
    pub fn mmwave_28ghz(alpha: f64) -> Self {
        let c_db = 20.0 * (4.0 * PI * 28e9 / 299_792_458.0).log10();
        Self {
            c_gain: 10f64.powf(c_db / 10.0),
            alpha,
        }
    }

    pub fn pathloss(&self, r: f64) -> f64 {
        self.c_gain * r.powf(self.alpha)
    }
}
