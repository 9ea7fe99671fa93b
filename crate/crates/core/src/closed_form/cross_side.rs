//! Side changes: handover probabilities, switch counts across a top-to-bottom
//! handover and the densities of the handover offsets.
//!
//! Throughout, `x = b_b - b_t` is the distance from a serving top station to
//! the next bottom station, exponential with the merged rate `lambda_tb`,
//! and `c = W_b^2 - W_t^2`. The handover point sits
//! `d_t = x/2 + c/(2x)` past the top station and `d_b = x/2 - c/(2x)` before
//! the bottom one.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, QuadratureOptions};

use super::DoubleSideParams;

/// Probability that the first bottom station of a box serves the vehicle,
/// `P(x y > c)` for independent exponential `x`, `y`.
///
/// With `u = x - c/x` on the upper branch (and the lower branch folded onto
/// it by `x -> c/x`) the integral becomes `int_0^inf e^{-sqrt(v^2 + z^2)} dv`
/// with `z = 2 lambda_tb sqrt(c)`.
pub fn prob_handover_tb(p: &DoubleSideParams) -> Result<f64> {
    let c = p.width_gap_sq();
    if c == 0.0 {
        return Ok(1.0);
    }
    let z = 2.0 * p.lambda_tb() * c.sqrt();
    if !z.is_finite() {
        return Err(Error::invalid("lambda_tb", format!("scaled offset {z} is not finite")));
    }
    // e^{-z} below the smallest normal: nothing left to integrate
    if z > 745.0 {
        return Ok(0.0);
    }
    let z2 = z * z;
    let opts = QuadratureOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    };
    let integral = integrate_to_infinity(|v| (-(v * v + z2).sqrt()).exp(), 0.0, opts)?;
    Ok(integral.value.clamp(0.0, 1.0))
}

/// Complement of [`prob_handover_tb`]: probability of returning to the top.
pub fn prob_handover_bt(p: &DoubleSideParams) -> Result<f64> {
    Ok(1.0 - prob_handover_tb(p)?)
}

pub fn prob_handover_tt(p: &DoubleSideParams) -> Result<f64> {
    Ok(1.0 - prob_handover_tb(p)?)
}

pub fn prob_handover_bb(p: &DoubleSideParams) -> Result<f64> {
    Ok(1.0 - prob_handover_bt(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSwitches {
    /// Mean switches between the top station and the handover point.
    pub e_th: f64,
    /// Mean switches between the handover point and the bottom station.
    pub e_hb: f64,
    pub e_ntb: f64,
    /// Same expression as `e_ntb`.
    pub e_nbt: f64,
    /// First boundary index `k` with `W_t a_k > sqrt(c)`; `N_c/4` when no
    /// boundary of the top station lies beyond the earliest handover point.
    pub first_active: usize,
}

/// Mean beam switches across one top-to-bottom (or bottom-to-top) handover.
pub fn expected_switches_cross(p: &DoubleSideParams) -> CrossSwitches {
    let lambda = p.lambda_tb();
    let c = p.width_gap_sq();
    let tangents = p.codebook().boundary_tangents();
    let quarter = tangents.len() as f64;

    let e_hb: f64 = tangents
        .iter()
        .map(|a| {
            let y = p.w_b() * a;
            (-lambda * (y + (y * y + c).sqrt())).exp()
        })
        .sum();

    // Boundaries with W_t a_k <= sqrt(c) are crossed on every top-to-bottom
    // handover; the comparison stays on squares so no root moves a knot.
    let first_active = tangents.partition_point(|a| {
        let y = p.w_t() * a;
        y * y <= c
    });
    let e_th = quarter
        - tangents[first_active..]
            .iter()
            .map(|a| {
                let y = p.w_t() * a;
                let s = (y * y - c).sqrt();
                // 2 e^{-l y} sinh(l s), with y - s written as c / (y + s)
                (-lambda * c / (y + s)).exp() - (-lambda * (y + s)).exp()
            })
            .sum::<f64>();

    let e_ntb = e_th + e_hb;
    CrossSwitches {
        e_th,
        e_hb,
        e_ntb,
        e_nbt: e_ntb,
        first_active,
    }
}

/// Densities of the handover offsets `d_t` (past the top station) and `d_b`
/// (before the bottom station), evaluated at `y`.
///
/// `d_t` lives on `[sqrt(c), inf)` and diverges like `1/sqrt(y - sqrt(c))`
/// at its lower end (the value there is reported as infinite). `d_b` ranges
/// over the whole line: it is negative when the bottom station is passed
/// before the handover, which happens with probability `1 - e^{-lambda sqrt(c)}`.
pub fn handover_offset_densities(p: &DoubleSideParams, y: f64) -> (f64, f64) {
    let lambda = p.lambda_tb();
    let c = p.width_gap_sq();
    if c == 0.0 {
        let f = if y >= 0.0 {
            2.0 * lambda * (-2.0 * lambda * y).exp()
        } else {
            0.0
        };
        return (f, f);
    }

    let f_dht = if y * y < c || y < 0.0 {
        0.0
    } else if y * y == c {
        f64::INFINITY
    } else {
        let s = (y * y - c).sqrt();
        let near = lambda * (y / s + 1.0) * (-lambda * (y + s)).exp();
        let far = lambda * (y / s - 1.0) * (-lambda * c / (y + s)).exp();
        near + far
    };

    let r = (y * y + c).sqrt();
    // 1 + y/r and y + r both lose precision for large negative y
    let (slope, arg) = if y >= 0.0 {
        (1.0 + y / r, y + r)
    } else {
        (c / (r * (r - y)), c / (r - y))
    };
    let f_dhb = lambda * slope * (-lambda * arg).exp();
    (f_dht, f_dhb)
}

/// Cumulative distribution functions matching [`handover_offset_densities`].
pub fn handover_offset_cdfs(p: &DoubleSideParams, y: f64) -> (f64, f64) {
    let lambda = p.lambda_tb();
    let c = p.width_gap_sq();
    let root_c = c.sqrt();
    let cdf_t = if y < root_c {
        0.0
    } else {
        let s = (y * y - c).max(0.0).sqrt();
        // P(y - s <= x <= y + s)
        (-lambda * c / (y + s)).exp() - (-lambda * (y + s)).exp()
    };
    let r = (y * y + c).sqrt();
    let upper = if y >= 0.0 { y + r } else { c / (r - y) };
    let cdf_b = if c == 0.0 && y < 0.0 {
        0.0
    } else {
        -(-lambda * upper).exp_m1()
    };
    (cdf_t, cdf_b)
}
