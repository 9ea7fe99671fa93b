//! Scenario file: TOML with the sections `highway`, `densities`, `codebook`,
//! `overhead`, `run` and an optional `sweep`. Every key has a default, so an
//! empty file is a valid scenario. Values are stored in the units of the
//! file (km, per km, km/h); the accessors return SI values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::closed_form::{DoubleSideParams, SeriesControl, SingleSideParams};
use crate::codebook::{Codebook, LaneGeometry};
use crate::error::{Error, Result};
use crate::monte_carlo::{Deployment, TraceOptions, WorldConfig};
use crate::overhead::{OverheadConfig, SsbRounding};
use crate::stochastic_geometry::{LosModel, Side};

use super::sweep::SweepSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Highway {
    pub length_km: f64,
    pub n_lanes: u32,
    pub lane_width_m: f64,
    /// 1-based lane of the vehicle, counted from the top edge.
    pub vu_lane: u32,
    pub bs_setback_m: f64,
    pub antenna_height_m: f64,
    /// Fold the antenna height into the lateral distances.
    pub effective_height: bool,
    /// Explicit lateral distances; override the lane layout when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_top_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_bottom_m: Option<f64>,
}

impl Default for Highway {
    fn default() -> Self {
        Self {
            length_km: 10.0,
            n_lanes: 4,
            lane_width_m: 3.7,
            vu_lane: 2,
            bs_setback_m: 0.0,
            antenna_height_m: 10.0,
            effective_height: false,
            w_top_m: None,
            w_bottom_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Densities {
    /// Shorthand for both sides; folded into the per-side keys on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_b_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_b_top_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_b_bottom_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_block_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_block_top_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_block_bottom_per_km: Option<f64>,
    pub tau0_m: f64,
    /// Vehicles per km and lane. Carried for completeness; no result uses it.
    pub lambda_v_per_km: f64,
}

impl Default for Densities {
    fn default() -> Self {
        Self {
            lambda_b_per_km: None,
            lambda_b_top_per_km: None,
            lambda_b_bottom_per_km: None,
            lambda_block_per_km: None,
            lambda_block_top_per_km: None,
            lambda_block_bottom_per_km: None,
            tau0_m: 9.0,
            lambda_v_per_km: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodebookSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_c: Option<u32>,
    /// Alternative to `n_c`: `360 / beamwidth_deg` beams.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beamwidth_deg: Option<f64>,
    /// Base-station beams swept in training; defaults to `n_c`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_beams: Option<u32>,
    pub vu_beams: u32,
}

impl Default for CodebookSection {
    fn default() -> Self {
        Self {
            n_c: None,
            beamwidth_deg: None,
            bs_beams: None,
            vu_beams: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverheadSection {
    pub tau_ss_ms: f64,
    pub tau_sym_ms: f64,
    pub speed_kmh: f64,
    pub t_ss_period_ms: u32,
    pub t_csi_period_slots: u32,
    pub symbols_per_slot: u32,
    pub ssb_rounding: SsbRounding,
}

impl Default for OverheadSection {
    fn default() -> Self {
        let d = OverheadConfig::default();
        Self {
            tau_ss_ms: d.tau_ss_ms,
            tau_sym_ms: d.tau_sym_ms,
            speed_kmh: 60.0,
            t_ss_period_ms: d.t_ss_period_ms,
            t_csi_period_slots: d.t_csi_period_slots,
            symbols_per_slot: d.symbols_per_slot,
            ssb_rounding: d.ssb_rounding,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub realizations: u64,
    pub seed: u64,
    pub deployment: Deployment,
    pub forward_only: bool,
    pub series_rel_tol: f64,
    pub series_n_max: usize,
    /// Realizations written to the event log when one is requested.
    pub event_log_realizations: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        let ctl = SeriesControl::default();
        Self {
            realizations: 10_000,
            seed: 1,
            deployment: Deployment::Both,
            forward_only: false,
            series_rel_tol: ctl.rel_tol,
            series_n_max: ctl.n_max,
            event_log_realizations: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub highway: Highway,
    pub densities: Densities,
    pub codebook: CodebookSection,
    pub overhead: OverheadSection,
    pub run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

const DEFAULT_LAMBDA_B_PER_KM: f64 = 10.0;
const DEFAULT_LAMBDA_BLOCK_PER_KM: f64 = 0.1;
const DEFAULT_N_C: u32 = 72;

/// Reads and validates a scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml(&text)
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line defining `section.key`, written either under `[section]` or as a
/// dotted key. Zero when the key is absent (the default was used).
fn line_of(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[') {
            current = header.trim_end_matches(']').trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
        let full = if current.is_empty() {
            lhs
        } else {
            format!("{current}.{lhs}")
        };
        if full == format!("{section}.{key}") {
            return i + 1;
        }
    }
    0
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map_or(0, |s| line_at(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        cfg.normalize(text)?;
        Ok(cfg)
    }

    /// Serializes the resolved scenario; parsing the output gives it back.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            line: 0,
            message: e.to_string(),
        })
    }

    /// Folds shorthands into explicit keys and checks every invariant.
    /// `source` is only used to point errors at a line.
    pub fn normalize(&mut self, source: &str) -> Result<()> {
        let at = |section: &str, key: &str, message: String| Error::Config {
            line: line_of(source, section, key),
            message: format!("{section}.{key}: {message}"),
        };

        let d = &mut self.densities;
        let both = d.lambda_b_per_km.take();
        d.lambda_b_top_per_km = d.lambda_b_top_per_km.or(both).or(Some(DEFAULT_LAMBDA_B_PER_KM));
        d.lambda_b_bottom_per_km = d.lambda_b_bottom_per_km.or(both).or(Some(DEFAULT_LAMBDA_B_PER_KM));
        let block = d.lambda_block_per_km.take();
        d.lambda_block_top_per_km = d.lambda_block_top_per_km.or(block).or(Some(DEFAULT_LAMBDA_BLOCK_PER_KM));
        d.lambda_block_bottom_per_km = d
            .lambda_block_bottom_per_km
            .or(block)
            .or(Some(DEFAULT_LAMBDA_BLOCK_PER_KM));

        let cb = &mut self.codebook;
        if let Some(deg) = cb.beamwidth_deg.take() {
            let from_width = Codebook::from_beamwidth_deg(deg)
                .map_err(|e| at("codebook", "beamwidth_deg", e.to_string()))?
                .n_c();
            if cb.n_c.is_some_and(|n| n != from_width) {
                return Err(at(
                    "codebook",
                    "beamwidth_deg",
                    format!("{deg} degrees gives {from_width} beams, but n_c = {}", cb.n_c.unwrap_or(0)),
                ));
            }
            cb.n_c = Some(from_width);
        }
        cb.n_c.get_or_insert(DEFAULT_N_C);

        self.validate(source)
    }

    fn validate(&self, source: &str) -> Result<()> {
        let at = |section: &str, key: &str, e: Error| Error::Config {
            line: line_of(source, section, key),
            message: format!("{section}.{key}: {e}"),
        };
        let positive = |section: &str, key: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(at(section, key, Error::invalid("value", format!("must be finite and > 0, got {v}"))))
            }
        };
        let nonnegative = |section: &str, key: &str, v: f64| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(at(section, key, Error::invalid("value", format!("must be finite and >= 0, got {v}"))))
            }
        };

        let h = &self.highway;
        positive("highway", "length_km", h.length_km)?;
        positive("highway", "lane_width_m", h.lane_width_m)?;
        nonnegative("highway", "bs_setback_m", h.bs_setback_m)?;
        nonnegative("highway", "antenna_height_m", h.antenna_height_m)?;
        if let Some(w) = h.w_top_m {
            positive("highway", "w_top_m", w)?;
        }
        if let Some(w) = h.w_bottom_m {
            positive("highway", "w_bottom_m", w)?;
        }
        LaneGeometry::from_lane(h.n_lanes, h.lane_width_m, h.vu_lane, h.bs_setback_m)
            .map_err(|e| at("highway", "vu_lane", e))?;

        let d = &self.densities;
        for (key, v) in [
            ("lambda_b_top_per_km", d.lambda_b_top_per_km),
            ("lambda_b_bottom_per_km", d.lambda_b_bottom_per_km),
            ("lambda_block_top_per_km", d.lambda_block_top_per_km),
            ("lambda_block_bottom_per_km", d.lambda_block_bottom_per_km),
        ] {
            nonnegative("densities", key, v.unwrap_or(0.0))?;
        }
        nonnegative("densities", "tau0_m", d.tau0_m)?;
        nonnegative("densities", "lambda_v_per_km", d.lambda_v_per_km)?;

        self.codebook().map_err(|e| at("codebook", "n_c", e))?;
        if self.codebook.vu_beams == 0 {
            return Err(at("codebook", "vu_beams", Error::invalid("vu_beams", "must be at least 1")));
        }
        if self.codebook.bs_beams == Some(0) {
            return Err(at("codebook", "bs_beams", Error::invalid("bs_beams", "must be at least 1")));
        }

        positive("overhead", "speed_kmh", self.overhead.speed_kmh)?;
        self.overhead_config().validate().map_err(|e| {
            let key = match &e {
                Error::InvalidParameter { name: "t_ss_period", .. } => "t_ss_period_ms",
                Error::InvalidParameter { name: "t_csi_period", .. } => "t_csi_period_slots",
                Error::InvalidParameter { name: "tau_ss", .. } => "tau_ss_ms",
                Error::InvalidParameter { name: "tau_sym", .. } => "tau_sym_ms",
                _ => "symbols_per_slot",
            };
            at("overhead", key, e)
        })?;

        if self.run.realizations == 0 {
            return Err(at("run", "realizations", Error::invalid("realizations", "must be at least 1")));
        }
        self.series_control().map_err(|e| at("run", "series_rel_tol", e))?;
        if let Some(sweep) = &self.sweep {
            sweep.validate().map_err(|e| at("sweep", "values", e))?;
        }
        Ok(())
    }

    pub fn l_h(&self) -> f64 {
        self.highway.length_km * 1000.0
    }

    /// Base-station density on `side` before blockage, per metre.
    pub fn lambda_bs(&self, side: Side) -> f64 {
        let per_km = match side {
            Side::Top => self.densities.lambda_b_top_per_km,
            Side::Bottom => self.densities.lambda_b_bottom_per_km,
        };
        per_km.unwrap_or(DEFAULT_LAMBDA_B_PER_KM) / 1000.0
    }

    pub fn los_model(&self) -> Result<LosModel> {
        let d = &self.densities;
        LosModel::new(
            d.tau0_m,
            d.lambda_block_top_per_km.unwrap_or(DEFAULT_LAMBDA_BLOCK_PER_KM) / 1000.0,
            d.lambda_block_bottom_per_km.unwrap_or(DEFAULT_LAMBDA_BLOCK_PER_KM) / 1000.0,
        )
    }

    /// Line-of-sight density on `side` per metre, zero if not deployed.
    pub fn lambda_los(&self, side: Side) -> Result<f64> {
        if !self.run.deployment.has(side) {
            return Ok(0.0);
        }
        Ok(self.los_model()?.los_density(self.lambda_bs(side), side))
    }

    pub fn geometry(&self) -> Result<LaneGeometry> {
        let h = &self.highway;
        let mut g = LaneGeometry::from_lane(h.n_lanes, h.lane_width_m, h.vu_lane, h.bs_setback_m)?;
        if let Some(w) = h.w_top_m {
            g.w_top = w;
        }
        if let Some(w) = h.w_bottom_m {
            g.w_bottom = w;
        }
        Ok(if h.effective_height {
            g.with_antenna_height(h.antenna_height_m)
        } else {
            g
        })
    }

    pub fn n_c(&self) -> u32 {
        self.codebook.n_c.unwrap_or(DEFAULT_N_C)
    }

    pub fn codebook(&self) -> Result<Codebook> {
        Codebook::new(self.n_c())
    }

    pub fn speed_mps(&self) -> f64 {
        self.overhead.speed_kmh / 3.6
    }

    pub fn overhead_config(&self) -> OverheadConfig {
        let o = &self.overhead;
        OverheadConfig {
            codebook_bs: self.codebook.bs_beams.unwrap_or(self.n_c()),
            codebook_vu: self.codebook.vu_beams,
            tau_ss_ms: o.tau_ss_ms,
            tau_sym_ms: o.tau_sym_ms,
            speed_mps: self.speed_mps(),
            t_ss_period_ms: o.t_ss_period_ms,
            t_csi_period_slots: o.t_csi_period_slots,
            symbols_per_slot: o.symbols_per_slot,
            ssb_rounding: o.ssb_rounding,
        }
    }

    pub fn series_control(&self) -> Result<SeriesControl> {
        SeriesControl::new(self.run.series_rel_tol, self.run.series_n_max)
    }

    pub fn world_config(&self) -> Result<WorldConfig> {
        let cfg = WorldConfig {
            l_h: self.l_h(),
            lambda_bs_top: self.lambda_bs(Side::Top),
            lambda_bs_bottom: self.lambda_bs(Side::Bottom),
            los: self.los_model()?,
            geometry: self.geometry()?,
            codebook: self.codebook()?,
            deployment: self.run.deployment,
            trace: TraceOptions {
                forward_only: self.run.forward_only,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Closed-form parameters for a one-sided deployment.
    pub fn single_side_params(&self) -> Result<SingleSideParams> {
        let side = match self.run.deployment {
            Deployment::Top => Side::Top,
            Deployment::Bottom => Side::Bottom,
            Deployment::Both => {
                return Err(Error::invalid("deployment", "single-side analysis needs top or bottom"))
            }
        };
        SingleSideParams::new(self.lambda_los(side)?, self.geometry()?.w(side), self.codebook()?, self.l_h())
    }

    /// Closed-form parameters for a two-sided deployment, seen from the
    /// nearer side (the analysis calls it "top").
    pub fn double_side_params(&self) -> Result<DoubleSideParams> {
        let g = self.geometry()?;
        let near = g.near_side();
        let far = near.other();
        DoubleSideParams::new(
            self.lambda_los(near)?,
            self.lambda_los(far)?,
            g.w(near),
            g.w(far),
            self.codebook()?,
            self.l_h(),
        )
    }
}
