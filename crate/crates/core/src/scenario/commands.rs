use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::closed_form::{
    bsn_double_side, bsn_single_side, expected_handovers_box, expected_switches_box,
    expected_switches_cross, expected_switches_neighbor, hon_double_side, hon_single_side,
    prob_handover_bt, prob_handover_tb,
};
use crate::error::{Error, Result};
use crate::monte_carlo::{run_ensemble, trace_realization, write_event_log, Deployment, EnsembleStats, MetricStats};
use crate::overhead::{feasible_csi_periods, overhead_report, CsiFeasibility, OverheadReport};
use crate::stochastic_geometry::Side;

use super::config::ScenarioConfig;
use super::sweep::{SweepOutput, SweepRow};

/// Relative error under which a count outside its confidence interval is
/// still accepted by the comparison gate.
pub const GATE_REL_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleSideDetail {
    pub p_tb: f64,
    pub p_bt: f64,
    pub e_ntb: f64,
    pub box_ns: f64,
    pub box_nh: f64,
    pub series_terms: usize,
    pub series_tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub deployment: Deployment,
    pub l_h_m: f64,
    pub n_c: u32,
    pub beamwidth_deg: f64,
    pub w_top_m: f64,
    pub w_bottom_m: f64,
    pub lambda_los_top_per_m: f64,
    pub lambda_los_bottom_per_m: f64,
    /// Parsed but not used by any result.
    pub lambda_v_per_km: f64,
    pub bsn: f64,
    pub hon: f64,
    /// Single side only: mean switches between neighbours.
    pub switches_per_gap: Option<f64>,
    pub double_side: Option<DoubleSideDetail>,
    /// `L_h / (BSN + HON + 1)` at the configured speed.
    pub mean_sojourn_ms: f64,
    pub overhead: Option<OverheadReport>,
    pub overhead_error: Option<String>,
    pub csi: Option<CsiFeasibility>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub deployment: Deployment,
    pub seed: u64,
    pub stats: EnsembleStats,
    pub sojourn_ms: MetricStats,
    pub overhead: Option<OverheadReport>,
    pub overhead_error: Option<String>,
    pub csi: Option<CsiFeasibility>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub analytic: f64,
    pub simulated_mean: f64,
    pub ci_half_width: f64,
    pub abs_error: f64,
    pub relative_error: f64,
    pub within_ci: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Pass,
    Fail,
    /// Two-sided analysis is approximate; nothing is gated.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub deployment: Deployment,
    pub seed: u64,
    pub realizations: u64,
    pub rows: Vec<ComparisonRow>,
    pub gate: Gate,
}

impl ComparisonReport {
    /// Process exit code: 0 within gates, 2 on statistical disagreement.
    pub fn exit_code(&self) -> i32 {
        match self.gate {
            Gate::Fail => 2,
            Gate::Pass | Gate::NotApplicable => 0,
        }
    }
}

/// Closed-form BSN and HON for the configured deployment.
pub fn analytic_counts(cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    match cfg.run.deployment {
        Deployment::Both => {
            let p = cfg.double_side_params()?;
            let ctl = cfg.series_control()?;
            Ok((bsn_double_side(&p, ctl)?, hon_double_side(&p, ctl)?))
        }
        _ => {
            let p = cfg.single_side_params()?;
            Ok((bsn_single_side(&p), hon_single_side(&p)))
        }
    }
}

fn sojourn_ms(cfg: &ScenarioConfig, bsn: f64, hon: f64) -> f64 {
    cfg.l_h() / (bsn + hon + 1.0) / cfg.speed_mps() * 1000.0
}

fn overhead_parts(
    cfg: &ScenarioConfig,
    hon: f64,
    bsn: f64,
    mean_sojourn_ms: f64,
) -> Result<(Option<OverheadReport>, Option<String>, Option<CsiFeasibility>)> {
    let oc = cfg.overhead_config();
    let (report, err) = match overhead_report(hon, bsn, cfg.l_h(), &oc) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::OverheadSaturated { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let csi = if mean_sojourn_ms > 0.0 {
        Some(feasible_csi_periods(mean_sojourn_ms, &oc)?)
    } else {
        None
    };
    Ok((report, err, csi))
}

pub fn cmd_analyze(cfg: &ScenarioConfig) -> Result<AnalysisReport> {
    let g = cfg.geometry()?;
    let (bsn, hon) = analytic_counts(cfg)?;
    let (switches_per_gap, double_side) = match cfg.run.deployment {
        Deployment::Both => {
            let p = cfg.double_side_params()?;
            let ctl = cfg.series_control()?;
            let ns = expected_switches_box(&p, ctl)?;
            let nh = expected_handovers_box(&p, ctl)?;
            let detail = DoubleSideDetail {
                p_tb: prob_handover_tb(&p)?,
                p_bt: prob_handover_bt(&p)?,
                e_ntb: expected_switches_cross(&p).e_ntb,
                box_ns: ns.value,
                box_nh: nh.value,
                series_terms: ns.terms.max(nh.terms),
                series_tail_bound: ns.tail_bound.max(nh.tail_bound),
            };
            (None, Some(detail))
        }
        _ => (Some(expected_switches_neighbor(&cfg.single_side_params()?)), None),
    };
    let mean_sojourn_ms = sojourn_ms(cfg, bsn, hon);
    let (overhead, overhead_error, csi) = overhead_parts(cfg, hon, bsn, mean_sojourn_ms)?;
    Ok(AnalysisReport {
        deployment: cfg.run.deployment,
        l_h_m: cfg.l_h(),
        n_c: cfg.n_c(),
        beamwidth_deg: cfg.codebook()?.beamwidth_deg(),
        w_top_m: g.w_top,
        w_bottom_m: g.w_bottom,
        lambda_los_top_per_m: cfg.lambda_los(Side::Top)?,
        lambda_los_bottom_per_m: cfg.lambda_los(Side::Bottom)?,
        lambda_v_per_km: cfg.densities.lambda_v_per_km,
        bsn,
        hon,
        switches_per_gap,
        double_side,
        mean_sojourn_ms,
        overhead,
        overhead_error,
        csi,
    })
}

/// Runs the ensemble; with `event_log`, also writes the events of the first
/// `run.event_log_realizations` realizations there.
pub fn cmd_simulate(cfg: &ScenarioConfig, event_log: Option<&Path>) -> Result<SimulationReport> {
    let world = cfg.world_config()?;
    let stats = run_ensemble(&world, cfg.run.realizations, cfg.run.seed)?;
    if let Some(path) = event_log {
        let n = cfg.run.event_log_realizations.min(cfg.run.realizations);
        let traces = (0..n)
            .map(|i| Ok((i, trace_realization(&world.sample(cfg.run.seed, i)?, world.trace))))
            .collect::<Result<Vec<_>>>()?;
        let file = std::fs::File::create(path)?;
        write_event_log(std::io::BufWriter::new(file), traces.iter().map(|(i, t)| (*i, t)))?;
    }
    let sojourn = stats.sojourn_m.scaled(1000.0 / cfg.speed_mps());
    let (overhead, overhead_error, csi) = overhead_parts(cfg, stats.hon.mean, stats.bsn.mean, sojourn.mean)?;
    Ok(SimulationReport {
        deployment: cfg.run.deployment,
        seed: cfg.run.seed,
        stats,
        sojourn_ms: sojourn,
        overhead,
        overhead_error,
        csi,
    })
}

fn row(metric: &str, analytic: f64, sim: &MetricStats) -> ComparisonRow {
    let abs_error = (analytic - sim.mean).abs();
    ComparisonRow {
        metric: metric.to_string(),
        analytic,
        simulated_mean: sim.mean,
        ci_half_width: sim.ci95,
        abs_error,
        relative_error: (analytic - sim.mean) / sim.mean,
        within_ci: abs_error <= sim.ci95,
    }
}

pub fn cmd_compare(cfg: &ScenarioConfig) -> Result<ComparisonReport> {
    let analysis = cmd_analyze(cfg)?;
    let sim = cmd_simulate(cfg, None)?;
    let mut rows = vec![
        row("bsn", analysis.bsn, &sim.stats.bsn),
        row("hon", analysis.hon, &sim.stats.hon),
    ];
    if let Some(d) = &analysis.double_side {
        rows.push(row("box_ns", d.box_ns, &sim.stats.box_ns));
        rows.push(row("box_nh", d.box_nh, &sim.stats.box_nh));
    }
    rows.push(row("sojourn_ms", analysis.mean_sojourn_ms, &sim.sojourn_ms));

    let gate = if cfg.run.deployment == Deployment::Both {
        Gate::NotApplicable
    } else if rows[..2]
        .iter()
        .all(|r| r.within_ci || r.relative_error.abs() < GATE_REL_TOL)
    {
        Gate::Pass
    } else {
        Gate::Fail
    };
    Ok(ComparisonReport {
        deployment: cfg.run.deployment,
        seed: cfg.run.seed,
        realizations: cfg.run.realizations,
        rows,
        gate,
    })
}

fn tcr_or_nan(cfg: &ScenarioConfig, hon: f64, bsn: f64) -> f64 {
    match crate::overhead::tcr(hon, bsn, cfg.l_h(), &cfg.overhead_config()) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("{e}");
            f64::NAN
        }
    }
}

/// One row per grid point and requested output.
pub fn cmd_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Usage("the config has no [sweep] section".into()))?;
    spec.validate()?;
    let mut rows = Vec::new();
    for &value in &spec.values {
        let point = spec.apply(cfg, value)?;
        let (bsn, hon) = analytic_counts(&point)?;
        let stats = run_ensemble(&point.world_config()?, point.run.realizations, point.run.seed)?;
        log::info!("{} = {value}: done", spec.parameter.as_str());
        for &output in &spec.outputs {
            let (analytic, sim) = match output {
                SweepOutput::Bsn => (bsn, stats.bsn),
                SweepOutput::Hon => (hon, stats.hon),
                SweepOutput::Sojourn => (
                    sojourn_ms(&point, bsn, hon),
                    stats.sojourn_m.scaled(1000.0 / point.speed_mps()),
                ),
                SweepOutput::Tcr => {
                    let mean = tcr_or_nan(&point, stats.hon.mean, stats.bsn.mean);
                    // upper excursion of both counts, a conservative width
                    let high = tcr_or_nan(&point, stats.hon.mean + stats.hon.ci95, stats.bsn.mean + stats.bsn.ci95);
                    let sim = MetricStats {
                        mean,
                        variance: f64::NAN,
                        count: stats.bsn.count,
                        ci95: high - mean,
                    };
                    (tcr_or_nan(&point, hon, bsn), sim)
                }
            };
            rows.push(SweepRow {
                parameter: spec.parameter.as_str().to_string(),
                value,
                output: output.as_str().to_string(),
                analytic,
                simulated_mean: sim.mean,
                ci_half_width: sim.ci95,
                relative_error: (analytic - sim.mean) / sim.mean,
            });
        }
    }
    Ok(rows)
}

/// Version line written before the header of every CSV output.
pub fn schema_line(kind: &str) -> String {
    format!("# schema: {kind}/v1")
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{}", schema_line("sweep"))?;
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "parameter",
            "value",
            "output",
            "analytic",
            "simulated_mean",
            "ci_half_width",
            "relative_error",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison_csv<W: Write>(mut out: W, report: &ComparisonReport) -> Result<()> {
    writeln!(out, "{}", schema_line("compare"))?;
    let mut w = csv::Writer::from_writer(out);
    for r in &report.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Any report as `key,value` rows with dotted keys.
pub fn write_key_value_csv<W: Write, T: Serialize>(mut out: W, kind: &str, report: &T) -> Result<()> {
    writeln!(out, "{}", schema_line(kind))?;
    let mut rows = Vec::new();
    flatten("", &serde_json::to_value(report)?, &mut rows);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, report: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}
