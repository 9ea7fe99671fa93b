//! Beam-training time and the training-to-connectivity ratio (TCR).
//!
//! A handover costs a full SSB sweep: `|cb_bs| |cb_vu|` beam pairs, 64 per
//! burst, each burst `tau_ss` long. A beam switch costs one CSI-RS sweep of
//! `|cb_bs| |cb_vu|` OFDM symbols.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite_at_least, check_positive, Error, Result};

/// SSB periodicities allowed by NR, in ms.
pub const SSB_PERIODS_MS: [u32; 6] = [5, 10, 20, 40, 80, 160];
/// CSI-RS periodicities allowed by NR, in slots.
pub const CSI_PERIODS_SLOTS: [u32; 8] = [5, 10, 20, 40, 80, 160, 320, 640];
/// SS blocks carried by one burst.
pub const BLOCKS_PER_BURST: u32 = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SsbRounding {
    /// Whole bursts: `ceil(|cb_bs| |cb_vu| / 64)`.
    #[default]
    Ceil,
    /// The plain ratio `|cb_bs| |cb_vu| / 64`.
    Fractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadConfig {
    pub codebook_bs: u32,
    pub codebook_vu: u32,
    pub tau_ss_ms: f64,
    pub tau_sym_ms: f64,
    pub speed_mps: f64,
    pub t_ss_period_ms: u32,
    pub t_csi_period_slots: u32,
    pub symbols_per_slot: u32,
    pub ssb_rounding: SsbRounding,
}

impl Default for OverheadConfig {
    fn default() -> Self {
        Self {
            codebook_bs: 72,
            codebook_vu: 2,
            tau_ss_ms: 5.0,
            tau_sym_ms: 0.125,
            speed_mps: 60.0 / 3.6,
            t_ss_period_ms: 20,
            t_csi_period_slots: 20,
            symbols_per_slot: 14,
            ssb_rounding: SsbRounding::Ceil,
        }
    }
}

impl OverheadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.codebook_bs == 0 || self.codebook_vu == 0 {
            return Err(Error::invalid("codebook", "beam counts must be at least 1"));
        }
        check_positive("tau_ss", self.tau_ss_ms)?;
        check_positive("tau_sym", self.tau_sym_ms)?;
        check_positive("speed", self.speed_mps)?;
        if self.symbols_per_slot == 0 {
            return Err(Error::invalid("symbols_per_slot", "must be at least 1"));
        }
        if !SSB_PERIODS_MS.contains(&self.t_ss_period_ms) {
            return Err(Error::invalid(
                "t_ss_period",
                format!("{} ms is not one of {SSB_PERIODS_MS:?}", self.t_ss_period_ms),
            ));
        }
        if !CSI_PERIODS_SLOTS.contains(&self.t_csi_period_slots) {
            return Err(Error::invalid(
                "t_csi_period",
                format!("{} slots is not one of {CSI_PERIODS_SLOTS:?}", self.t_csi_period_slots),
            ));
        }
        Ok(())
    }

    /// SS bursts per full beam-pair sweep.
    pub fn ssb_count(&self) -> f64 {
        let pairs = self.codebook_bs as u64 * self.codebook_vu as u64;
        match self.ssb_rounding {
            SsbRounding::Ceil => pairs.div_ceil(u64::from(BLOCKS_PER_BURST)) as f64,
            SsbRounding::Fractional => pairs as f64 / f64::from(BLOCKS_PER_BURST),
        }
    }

    pub fn slot_ms(&self) -> f64 {
        self.tau_sym_ms * f64::from(self.symbols_per_slot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub t_ho_ms: f64,
    pub t_bswitch_ms: f64,
    pub tcr: f64,
    pub switch_share: f64,
}

/// Time spent on initial access for `n_handovers` handovers, in ms.
pub fn t_handover(n_handovers: f64, cfg: &OverheadConfig) -> f64 {
    n_handovers * cfg.ssb_count() * cfg.tau_ss_ms
}

/// Time spent on beam sweeps for `n_switches` beam switches, in ms.
pub fn t_beamswitch(n_switches: f64, cfg: &OverheadConfig) -> f64 {
    n_switches * f64::from(cfg.codebook_bs) * f64::from(cfg.codebook_vu) * cfg.tau_sym_ms
}

pub fn travel_time_ms(l_h: f64, cfg: &OverheadConfig) -> f64 {
    l_h / cfg.speed_mps * 1000.0
}

/// Training time over the connected time left on a drive of `l_h` metres.
pub fn tcr(n_ho: f64, n_bs: f64, l_h: f64, cfg: &OverheadConfig) -> Result<f64> {
    Ok(overhead_report(n_ho, n_bs, l_h, cfg)?.tcr)
}

pub fn overhead_report(n_ho: f64, n_bs: f64, l_h: f64, cfg: &OverheadConfig) -> Result<OverheadReport> {
    check_finite_at_least("n_handovers", n_ho, 0.0)?;
    check_finite_at_least("n_switches", n_bs, 0.0)?;
    check_positive("l_h", l_h)?;
    cfg.validate()?;
    let t_ho_ms = t_handover(n_ho, cfg);
    let t_bswitch_ms = t_beamswitch(n_bs, cfg);
    let overhead_ms = t_ho_ms + t_bswitch_ms;
    let travel_ms = travel_time_ms(l_h, cfg);
    if overhead_ms >= travel_ms {
        return Err(Error::OverheadSaturated {
            overhead_ms,
            travel_ms,
        });
    }
    let switch_share = if overhead_ms > 0.0 {
        t_bswitch_ms / overhead_ms
    } else {
        0.0
    };
    Ok(OverheadReport {
        t_ho_ms,
        t_bswitch_ms,
        tcr: overhead_ms / (travel_ms - overhead_ms),
        switch_share,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsiFeasibility {
    pub periods_slots: Vec<u32>,
    pub periods_ms: Vec<f64>,
    /// No allowed periodicity is short enough.
    pub advisory: bool,
}

/// CSI-RS periodicities strictly shorter than the mean beam sojourn.
pub fn feasible_csi_periods(mean_sojourn_ms: f64, cfg: &OverheadConfig) -> Result<CsiFeasibility> {
    if mean_sojourn_ms.is_nan() || mean_sojourn_ms <= 0.0 {
        return Err(Error::invalid("mean_sojourn", format!("must be > 0, got {mean_sojourn_ms}")));
    }
    let slot = cfg.slot_ms();
    let periods_slots: Vec<u32> = CSI_PERIODS_SLOTS
        .into_iter()
        .filter(|&s| f64::from(s) * slot < mean_sojourn_ms)
        .collect();
    let periods_ms: Vec<f64> = periods_slots.iter().map(|&s| f64::from(s) * slot).collect();
    let advisory = periods_slots.is_empty();
    if advisory {
        log::warn!("no CSI-RS periodicity is below the mean sojourn of {mean_sojourn_ms} ms");
    }
    Ok(CsiFeasibility {
        periods_slots,
        periods_ms,
        advisory,
    })
}
