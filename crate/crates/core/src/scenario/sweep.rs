use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Base-station density on both sides, per km.
    LambdaB,
    /// Beamwidth in degrees; sets `n_c = 360 / value`.
    Beamwidth,
    NC,
    /// Vehicle speed in km/h.
    Speed,
    /// Lateral distance to the nearer line in metres; the gap to the far
    /// line is kept.
    W,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::LambdaB => "lambda_b",
            SweepParameter::Beamwidth => "beamwidth",
            SweepParameter::NC => "n_c",
            SweepParameter::Speed => "speed",
            SweepParameter::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    Bsn,
    Hon,
    Tcr,
    /// Mean beam sojourn in ms.
    Sojourn,
}

impl SweepOutput {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepOutput::Bsn => "bsn",
            SweepOutput::Hon => "hon",
            SweepOutput::Tcr => "tcr",
            SweepOutput::Sojourn => "sojourn_ms",
        }
    }
}

fn all_outputs() -> Vec<SweepOutput> {
    vec![SweepOutput::Bsn, SweepOutput::Hon, SweepOutput::Tcr, SweepOutput::Sojourn]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<SweepOutput>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "sweep grid is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "sweep values must be finite"));
        }
        let rising = self.values.windows(2).all(|w| w[0] < w[1]);
        let falling = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(rising || falling) {
            return Err(Error::invalid("values", "sweep grid must be strictly monotone"));
        }
        if self.outputs.is_empty() {
            return Err(Error::invalid("outputs", "no output requested"));
        }
        Ok(())
    }

    /// The scenario at one grid point.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        cfg.sweep = None;
        match self.parameter {
            SweepParameter::LambdaB => {
                cfg.densities.lambda_b_top_per_km = Some(value);
                cfg.densities.lambda_b_bottom_per_km = Some(value);
            }
            SweepParameter::Beamwidth => {
                cfg.codebook.n_c = None;
                cfg.codebook.beamwidth_deg = Some(value);
            }
            SweepParameter::NC => {
                if value.fract() != 0.0 || value < 0.0 || value > f64::from(u32::MAX) {
                    return Err(Error::invalid("n_c", format!("{value} is not a beam count")));
                }
                cfg.codebook.n_c = Some(value as u32);
            }
            SweepParameter::Speed => cfg.overhead.speed_kmh = value,
            SweepParameter::W => {
                let g = base.geometry()?;
                let gap = (g.w_bottom - g.w_top).abs();
                let (near, far) = if g.w_top <= g.w_bottom {
                    (&mut cfg.highway.w_top_m, &mut cfg.highway.w_bottom_m)
                } else {
                    (&mut cfg.highway.w_bottom_m, &mut cfg.highway.w_top_m)
                };
                *near = Some(value);
                *far = Some(value + gap);
                cfg.highway.effective_height = false;
            }
        }
        cfg.normalize("")?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub output: String,
    pub analytic: f64,
    pub simulated_mean: f64,
    pub ci_half_width: f64,
    /// `(analytic - simulated) / simulated`.
    pub relative_error: f64,
}
