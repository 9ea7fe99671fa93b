//! One-dimensional Poisson point processes for base-station positions and
//! their line-of-sight thinning by blockages.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite_at_least, check_positive, Error, Result};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sorted points of a homogeneous process on `[0, length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointProcess1D {
    points: Vec<f64>,
    density: f64,
    length: f64,
    side: Side,
}

impl PointProcess1D {
    /// Builds a process from explicit coordinates, sorting them. Coordinates
    /// outside `[0, length]` or repeated values are rejected.
    pub fn from_points(mut points: Vec<f64>, density: f64, length: f64, side: Side) -> Result<Self> {
        check_positive("length", length)?;
        check_finite_at_least("density", density, 0.0)?;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("points", "coordinates must be finite"));
        }
        points.sort_by(f64::total_cmp);
        if points.first().is_some_and(|&p| p < 0.0) || points.last().is_some_and(|&p| p > length) {
            return Err(Error::invalid("points", format!("coordinates must lie in [0, {length}]")));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("points", "coordinates must be distinct"));
        }
        Ok(Self {
            points,
            density,
            length,
            side,
        })
    }

    pub fn empty(density: f64, length: f64, side: Side) -> Self {
        Self {
            points: Vec::new(),
            density,
            length,
            side,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    /// Union of two independent processes on the same segment. The result
    /// carries the summed density and the side of `self`.
    pub fn superpose(&self, other: &PointProcess1D) -> Result<PointProcess1D> {
        if self.length != other.length {
            return Err(Error::invalid("length", "superposed processes must share a segment"));
        }
        let mut points = Vec::with_capacity(self.len() + other.len());
        points.extend_from_slice(&self.points);
        points.extend_from_slice(&other.points);
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(PointProcess1D {
            points,
            density: self.density + other.density,
            length: self.length,
            side: self.side,
        })
    }
}

/// Homogeneous process with `density` points per meter on `[0, length]`.
pub fn sample_ppp(density: f64, length: f64, side: Side, seed: Seed) -> Result<PointProcess1D> {
    check_finite_at_least("density", density, 0.0)?;
    check_positive("length", length)?;
    let mean = density * length;
    if mean == 0.0 {
        return Ok(PointProcess1D::empty(density, length, side));
    }
    let mut rng = seed.rng();
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid("density", e.to_string()))?
        .sample(&mut rng) as usize;
    let mut points: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * length).collect();
    points.sort_by(f64::total_cmp);
    // Exact repeats have probability ~2^-53 per pair; dropping one keeps the
    // strict ordering invariant.
    points.dedup();
    Ok(PointProcess1D {
        points,
        density,
        length,
        side,
    })
}

/// Blockage model on the outer lanes: blockers of length `tau0` arrive as a
/// Poisson process per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosModel {
    pub tau0: f64,
    pub lambda_block_top: f64,
    pub lambda_block_bottom: f64,
}

impl LosModel {
    pub fn new(tau0: f64, lambda_block_top: f64, lambda_block_bottom: f64) -> Result<Self> {
        check_finite_at_least("tau0", tau0, 0.0)?;
        // Infinite blockage density is allowed and means no line of sight.
        for (name, v) in [
            ("lambda_block_top", lambda_block_top),
            ("lambda_block_bottom", lambda_block_bottom),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            tau0,
            lambda_block_top,
            lambda_block_bottom,
        })
    }

    pub fn clear() -> Self {
        Self {
            tau0: 0.0,
            lambda_block_top: 0.0,
            lambda_block_bottom: 0.0,
        }
    }

    pub fn los_probability(&self, side: Side) -> f64 {
        let block = match side {
            Side::Top => self.lambda_block_top,
            Side::Bottom => self.lambda_block_bottom,
        };
        if self.tau0 == 0.0 || block == 0.0 {
            return 1.0;
        }
        (-self.tau0 * block).exp()
    }

    /// Density of line-of-sight base stations on `side`.
    pub fn los_density(&self, lambda_bs: f64, side: Side) -> f64 {
        lambda_bs * self.los_probability(side)
    }
}

/// Independent Bernoulli thinning with the line-of-sight probability of the
/// process's side.
pub fn thin_los(pp: &PointProcess1D, los: &LosModel, seed: Seed) -> PointProcess1D {
    let p = los.los_probability(pp.side);
    let density = pp.density * p;
    if p >= 1.0 {
        return PointProcess1D {
            density,
            ..pp.clone()
        };
    }
    let mut rng = seed.rng();
    let points = pp
        .points
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    PointProcess1D {
        points,
        density,
        length: pp.length,
        side: pp.side,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapStats {
    /// Fewer than two points.
    Empty,
    Summary { count: usize, mean: f64, variance: f64 },
}

impl GapStats {
    pub fn mean(&self) -> Option<f64> {
        match self {
            GapStats::Empty => None,
            GapStats::Summary { mean, .. } => Some(*mean),
        }
    }
}

/// Mean and (population) variance of consecutive gaps.
pub fn gap_distribution_check(pp: &PointProcess1D) -> GapStats {
    gap_stats(pp.points.windows(2).map(|w| w[1] - w[0]))
}

/// Pools the gaps of many realizations into one summary.
pub fn pooled_gap_stats<'a>(pps: impl IntoIterator<Item = &'a PointProcess1D>) -> GapStats {
    gap_stats(
        pps.into_iter()
            .flat_map(|pp| pp.points.windows(2).map(|w| w[1] - w[0])),
    )
}

fn gap_stats(gaps: impl Iterator<Item = f64>) -> GapStats {
    // Welford
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for g in gaps {
        count += 1;
        let delta = g - mean;
        mean += delta / count as f64;
        m2 += delta * (g - mean);
    }
    if count == 0 {
        GapStats::Empty
    } else {
        GapStats::Summary {
            count,
            mean,
            variance: m2 / count as f64,
        }
    }
}
