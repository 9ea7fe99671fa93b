//! Samples of the local cross-side configurations the analysis conditions on.

use std::collections::HashSet;

use crate::codebook::handover_point_cross_side;
use crate::stochastic_geometry::Side;

use super::trace::{StationId, TraceResult};
use super::Realization;

fn merged(r: &Realization) -> Vec<(f64, StationId)> {
    let mut all: Vec<(f64, StationId)> = [Side::Top, Side::Bottom]
        .into_iter()
        .flat_map(|side| {
            r.side(side)
                .points()
                .iter()
                .enumerate()
                .map(move |(i, &x)| (x, StationId { side, index: i as u32 }))
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all
}

/// For every top station immediately followed (in the merged order) by a
/// bottom station: the offsets `(h - b_t, b_b - h)` of their equal-distance
/// point `h`.
pub fn cross_pair_offsets(r: &Realization) -> Vec<(f64, f64)> {
    let (w_t, w_b) = (r.geometry.w_top, r.geometry.w_bottom);
    merged(r)
        .windows(2)
        .filter(|p| p[0].1.side == Side::Top && p[1].1.side == Side::Bottom)
        .filter_map(|p| {
            let (b_t, b_b) = (p[0].0, p[1].0);
            handover_point_cross_side(b_t, b_b, w_t, w_b).map(|h| (h - b_t, b_b - h))
        })
        .collect()
}

/// For every merged triple top, bottom, top: whether the traced drive was
/// ever served by that bottom station.
pub fn top_bottom_top_outcomes(r: &Realization, trace: &TraceResult) -> Vec<bool> {
    let served: HashSet<StationId> = trace.serving.iter().map(|s| s.station).collect();
    merged(r)
        .windows(3)
        .filter(|t| t[0].1.side == Side::Top && t[1].1.side == Side::Bottom && t[2].1.side == Side::Top)
        .map(|t| served.contains(&t[1].1))
        .collect()
}
