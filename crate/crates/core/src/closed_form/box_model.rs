//! Expectations over one box, the stretch between two consecutive top-side
//! stations, and the highway totals built from them.
//!
//! A box of length `d_t ~ Exp(lambda_t)` holds `n_b ~ Poisson(lambda_b d_t)`
//! bottom stations, so `P(n_b = n) = (lambda_t / lambda_tb) r^n` with
//! `r = lambda_b / lambda_tb`. Of those, `n_bv` serve the vehicle; its law
//! given `n_b` comes from an absorbing walk over the bottom stations
//! (`Top -> Bottom` with `P_tb`, `Bottom -> Bottom` with `P_bb`,
//! `Bottom -> done` with `P_bt`). Distances between non-consecutive stations
//! are treated as exponential, so the per-box sums are an approximation.

use crate::error::{Error, Result};

use super::cross_side::{expected_switches_cross, prob_handover_bt, prob_handover_tb};
use super::single_side::expected_switches_neighbor;
use super::DoubleSideParams;

/// Truncation of the infinite sum over `n_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub n_max: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, n_max: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return Err(Error::invalid("rel_tol", format!("must be in (0, 1e-3], got {rel_tol}")));
        }
        if n_max < 16 {
            return Err(Error::invalid("n_max", format!("must be >= 16, got {n_max}")));
        }
        Ok(Self { rel_tol, n_max })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            n_max: 4096,
        }
    }
}

/// Law of `n_bv` given `n_b` bottom stations in the box, indexed `0..=n_b`.
pub fn nbv_pmf(n_b: usize, p_tb: f64, p_bt: f64) -> Vec<f64> {
    let p_tt = 1.0 - p_tb;
    let p_bb = 1.0 - p_bt;
    let mut pmf = vec![0.0; n_b + 1];
    match n_b {
        0 => pmf[0] = 1.0,
        1 => {
            pmf[0] = p_tt;
            pmf[1] = p_tb;
        }
        n => {
            let tt_pow = powers(p_tt, n);
            let bb_pow = powers(p_bb, n);
            // stay_top[m] = sum_{j=1}^{m} P_tt^{j-1}
            let mut stay_top = vec![0.0; n + 1];
            for m in 1..=n {
                stay_top[m] = stay_top[m - 1] + tt_pow[m - 1];
            }
            pmf[0] = tt_pow[n];
            for v in 1..n {
                pmf[v] = stay_top[n - v] * p_tb * bb_pow[v - 1] * p_bt + tt_pow[n - v] * p_tb * bb_pow[v - 1];
            }
            pmf[n] = p_tb * bb_pow[n - 1];
        }
    }
    pmf
}

fn powers(base: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        out.push(acc);
        acc *= base;
    }
    out
}

pub fn conditional_pmf_nbv(n_b: usize, p: &DoubleSideParams) -> Result<Vec<f64>> {
    Ok(nbv_pmf(n_b, prob_handover_tb(p)?, prob_handover_bt(p)?))
}

/// What is counted on the stretch that stays with the top side.
#[derive(Debug, Clone, PartialEq)]
pub enum GapWeight {
    /// One event per box (handover counting).
    Unit,
    /// Beam switches of a top gap; holds `lambda_tb * 2 W_t a_k` per boundary.
    Switches { scaled_knots: Vec<f64> },
}

/// Event weights of a box, by how the vehicle crosses it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxWeights {
    pub gap: GapWeight,
    /// Top to bottom.
    pub e_tb: f64,
    /// Bottom to top.
    pub e_bt: f64,
    /// Between two consecutive serving bottom stations.
    pub e_nb: f64,
}

impl BoxWeights {
    pub fn unit() -> Self {
        Self {
            gap: GapWeight::Unit,
            e_tb: 1.0,
            e_bt: 1.0,
            e_nb: 1.0,
        }
    }

    pub fn switches(p: &DoubleSideParams) -> Self {
        let cross = expected_switches_cross(p);
        let lambda = p.lambda_tb();
        let scaled_knots = p
            .codebook()
            .boundary_tangents()
            .iter()
            .map(|a| lambda * 2.0 * p.w_t() * a)
            .collect();
        Self {
            gap: GapWeight::Switches { scaled_knots },
            e_tb: cross.e_ntb,
            e_bt: cross.e_nbt,
            e_nb: expected_switches_neighbor(&p.bottom_only()),
        }
    }

    fn gap_bound(&self) -> f64 {
        match &self.gap {
            GapWeight::Unit => 1.0,
            GapWeight::Switches { scaled_knots } => 2.0 * scaled_knots.len() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxExpectation {
    pub value: f64,
    /// Values of `n_b` summed, `0..terms`.
    pub terms: usize,
    /// Bound on the neglected tail.
    pub tail_bound: f64,
}

/// Sum over `n_b` of `P(n_b)` times the expected box weight given `n_b`.
///
/// For `n_bv = 0` the top gap weight is averaged over the box length
/// conditioned on `n_b`, `d_t | n_b ~ Gamma(n_b + 1, lambda_tb)`; a boundary
/// at `2 W_t a_k` is then crossed with probability `Q(n_b + 1, lambda_tb 2 W_t a_k)`
/// (regularized upper incomplete gamma), twice per boundary index.
pub fn box_series(
    p_tb: f64,
    lambda_t: f64,
    lambda_b: f64,
    weights: &BoxWeights,
    ctl: SeriesControl,
) -> Result<BoxExpectation> {
    let p_bt = 1.0 - p_tb;
    let p_tt = 1.0 - p_tb;
    let p_bb = p_tb;
    let lambda = lambda_t + lambda_b;
    let ratio = lambda_b / lambda;
    let lead = lambda_t / lambda;

    // Running Poisson partial sums e^{-z} sum_{j<=n} z^j/j! per knot.
    let knots: &[f64] = match &weights.gap {
        GapWeight::Unit => &[],
        GapWeight::Switches { scaled_knots } => scaled_knots,
    };
    let mut poisson_term: Vec<f64> = knots.iter().map(|z| (-z).exp()).collect();
    let mut poisson_cdf = poisson_term.clone();

    let e_max = weights.e_tb.max(weights.e_bt).max(weights.e_nb);
    let a_max = weights.gap_bound();

    let mut total = 0.0;
    let mut geometric = lead; // P(n_b = n)
    let mut tt_pows: Vec<f64> = vec![1.0]; // P_tt^m
    let mut bb_pows: Vec<f64> = vec![1.0]; // P_bb^m
    let mut stay: Vec<f64> = vec![0.0]; // sum_{j=1}^{m} P_tt^{j-1}
    for n in 0..ctl.n_max {
        if n > 0 {
            for (k, z) in knots.iter().enumerate() {
                poisson_term[k] *= z / n as f64;
                poisson_cdf[k] += poisson_term[k];
            }
            tt_pows.push(tt_pows[n - 1] * p_tt);
            bb_pows.push(bb_pows[n - 1] * p_bb);
            stay.push(stay[n - 1] + tt_pows[n - 1]);
        }
        let gap_weight = match &weights.gap {
            GapWeight::Unit => 1.0,
            GapWeight::Switches { .. } => 2.0 * poisson_cdf.iter().sum::<f64>(),
        };
        // sum_v pmf(v) (e_tb + e_bt + (v-1) e_nb) for v >= 1
        let served = match n {
            0 => 0.0,
            1 => p_tb * (weights.e_tb + weights.e_bt),
            _ => {
                let mut s = 0.0;
                for v in 1..n {
                    let pv = stay[n - v] * p_tb * bb_pows[v - 1] * p_bt + tt_pows[n - v] * p_tb * bb_pows[v - 1];
                    s += pv * (weights.e_tb + weights.e_bt + (v as f64 - 1.0) * weights.e_nb);
                }
                s + p_tb * bb_pows[n - 1] * (weights.e_tb + weights.e_bt + (n as f64 - 1.0) * weights.e_nb)
            }
        };
        total += geometric * (tt_pows[n] * gap_weight + served);
        geometric *= ratio;

        // tail over m > n: lead * r^m * (a_max + (m + 1) e_max)
        let tail = tail_bound(lead, ratio, n, a_max, e_max);
        if tail <= ctl.rel_tol * total.abs() {
            return Ok(BoxExpectation {
                value: total,
                terms: n + 1,
                tail_bound: tail,
            });
        }
    }
    Err(Error::SeriesNonConvergence {
        partial: total,
        tail_bound: tail_bound(lead, ratio, ctl.n_max - 1, a_max, e_max),
        terms: ctl.n_max,
    })
}

fn tail_bound(lead: f64, r: f64, n: usize, a_max: f64, e_max: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let n1 = (n + 1) as f64;
    let rn1 = r.powf(n1);
    let geo = rn1 / (1.0 - r);
    // sum_{m>n} m r^m
    let lin = rn1 * (n1 - n as f64 * r) / ((1.0 - r) * (1.0 - r));
    lead * ((a_max + e_max) * geo + e_max * lin)
}

/// Mean beam switches while crossing one box.
pub fn expected_switches_box(p: &DoubleSideParams, ctl: SeriesControl) -> Result<BoxExpectation> {
    let p_tb = prob_handover_tb(p)?;
    box_series(p_tb, p.lambda_t(), p.lambda_b(), &BoxWeights::switches(p), ctl)
}

/// Mean handovers while crossing one box, with the per-`n_b` brackets
/// written out term by term.
pub fn expected_handovers_box(p: &DoubleSideParams, ctl: SeriesControl) -> Result<BoxExpectation> {
    let p_tb = prob_handover_tb(p)?;
    handovers_series(p_tb, p.lambda_t(), p.lambda_b(), ctl)
}

pub(crate) fn handovers_series(p_tb: f64, lambda_t: f64, lambda_b: f64, ctl: SeriesControl) -> Result<BoxExpectation> {
    let p_bt = 1.0 - p_tb;
    let p_tt = 1.0 - p_tb;
    let p_bb = 1.0 - p_bt;
    let lambda = lambda_t + lambda_b;
    let ratio = lambda_b / lambda;
    let w1 = lambda_t * lambda_b / (lambda * lambda);

    let mut total = lambda_t / lambda + p_tt * w1 + 2.0 * p_tb * w1;
    let mut weight = w1; // lambda_t lambda_b^n / lambda^(n+1)
    for n in 2..ctl.n_max {
        weight *= ratio;
        let mut single = p_tt.powi(n as i32 - 1) * p_tb;
        for j in 1..n {
            single += p_tt.powi(j as i32 - 1) * p_tb * p_bt;
        }
        let mut middle = 0.0;
        for ns in 2..n {
            let mut paths = p_tt.powi((n - ns) as i32) * p_tb * p_bb.powi(ns as i32 - 1);
            for j in 1..=(n - ns) {
                paths += p_tt.powi(j as i32 - 1) * p_tb * p_bb.powi(ns as i32 - 1) * p_bt;
            }
            middle += (1.0 + ns as f64) * paths;
        }
        let all = (n as f64 + 1.0) * p_tb * p_bb.powi(n as i32 - 1);
        total += p_tt.powi(n as i32) * weight + weight * (2.0 * single + middle + all);

        let tail = tail_bound(lambda_t / lambda, ratio, n, 1.0, 1.0);
        if tail <= ctl.rel_tol * total {
            return Ok(BoxExpectation {
                value: total,
                terms: n + 1,
                tail_bound: tail,
            });
        }
    }
    Err(Error::SeriesNonConvergence {
        partial: total,
        tail_bound: tail_bound(lambda_t / lambda, ratio, ctl.n_max - 1, 1.0, 1.0),
        terms: ctl.n_max,
    })
}

/// Mean beam switches along the highway for a lane on the top side.
pub fn bsn_double_side(p: &DoubleSideParams, ctl: SeriesControl) -> Result<f64> {
    Ok(p.lambda_t() * p.l_h() * expected_switches_box(p, ctl)?.value)
}

/// Mean handovers along the highway, `(lambda_t L - 1) E[NH_box]`, clamped
/// at zero when fewer than one top station is expected.
pub fn hon_double_side(p: &DoubleSideParams, ctl: SeriesControl) -> Result<f64> {
    let boxes = p.lambda_t() * p.l_h() - 1.0;
    if boxes < 0.0 {
        log::warn!("lambda_t * L_h = {} < 1: handover count clamped to 0", boxes + 1.0);
        return Ok(0.0);
    }
    Ok(boxes * expected_handovers_box(p, ctl)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::single_side::expected_switches_neighbor;
    use crate::codebook::Codebook;
    use approx::assert_relative_eq;

    fn params(n_c: u32, lt: f64, lb: f64, wt: f64, wb: f64) -> DoubleSideParams {
        DoubleSideParams::new(lt, lb, wt, wb, Codebook::new(n_c).unwrap(), 1e4).unwrap()
    }

    #[test]
    fn pmf_rows() {
        assert_eq!(nbv_pmf(0, 0.3, 0.7), vec![1.0]);
        assert_eq!(nbv_pmf(1, 0.3, 0.7), vec![0.7, 0.3]);
        for n in 0..40 {
            for (tb, bt) in [(0.3, 0.7), (0.9, 0.2), (0.05, 0.95), (1.0, 0.0)] {
                let s: f64 = nbv_pmf(n, tb, bt).iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "n={n} sum={s}");
            }
        }
    }

    #[test]
    fn pmf_three_stations_by_hand() {
        let (tb, bt) = (0.3, 0.5);
        let (tt, bb) = (0.7, 0.5);
        let pmf = nbv_pmf(3, tb, bt);
        assert_relative_eq!(pmf[0], tt * tt * tt, max_relative = 1e-14);
        assert_relative_eq!(pmf[1], tb * bt + tt * tb * bt + tt * tt * tb, max_relative = 1e-14);
        assert_relative_eq!(pmf[2], tb * bb * bt + tt * tb * bb, max_relative = 1e-14);
        assert_relative_eq!(pmf[3], tb * bb * bb, max_relative = 1e-14);
    }

    #[test]
    fn handovers_without_bottom_side() {
        let p = params(16, 0.01, 1e-12, 10.0, 20.0);
        let nh = expected_handovers_box(&p, SeriesControl::default()).unwrap();
        assert_relative_eq!(nh.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn switches_without_bottom_side() {
        let p = params(16, 0.01, 1e-12, 10.0, 20.0);
        let ns = expected_switches_box(&p, SeriesControl::default()).unwrap();
        assert_relative_eq!(ns.value, expected_switches_neighbor(&p.top_only()), max_relative = 1e-9);
    }

    #[test]
    fn unit_weights_match_handover_evaluator() {
        for (lt, lb, wt, wb) in [
            (0.01, 0.01, 10.0, 20.0),
            (0.002, 0.02, 5.55, 9.25),
            (0.02, 0.003, 1.0, 40.0),
            (0.005, 0.005, 10.0, 10.0),
        ] {
            let p = params(32, lt, lb, wt, wb);
            let ctl = SeriesControl::new(1e-14, 2000).unwrap();
            let p_tb = prob_handover_tb(&p).unwrap();
            let generic = box_series(p_tb, lt, lb, &BoxWeights::unit(), ctl).unwrap();
            let direct = expected_handovers_box(&p, ctl).unwrap();
            assert_relative_eq!(generic.value, direct.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn truncation_stable() {
        let p = params(64, 0.01, 0.01, 10.0, 20.0);
        let a = expected_switches_box(&p, SeriesControl::new(1e-10, 512).unwrap()).unwrap();
        let b = expected_switches_box(&p, SeriesControl::new(1e-12, 512).unwrap()).unwrap();
        assert!(b.terms >= a.terms);
        assert!(((a.value - b.value) / b.value).abs() < 1e-8);
    }

    #[test]
    fn non_convergence_reports_partial() {
        // r = 1 - 1e-6 needs millions of terms
        let p = params(8, 1e-8, 1e-2, 10.0, 20.0);
        match expected_switches_box(&p, SeriesControl::new(1e-10, 16).unwrap()) {
            Err(Error::SeriesNonConvergence { partial, tail_bound, terms }) => {
                assert!(partial > 0.0 && tail_bound > 0.0);
                assert_eq!(terms, 16);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn highway_totals() {
        let ctl = SeriesControl::default();
        let p = params(16, 0.01, 1e-12, 10.0, 20.0);
        let single = crate::closed_form::bsn_single_side(&p.top_only());
        assert_relative_eq!(bsn_double_side(&p, ctl).unwrap(), single, max_relative = 1e-9);
        let q = params(16, 0.008, 0.012, 10.0, 20.0);
        let twice = q.with_l_h(2e4).unwrap();
        assert_relative_eq!(
            bsn_double_side(&twice, ctl).unwrap(),
            2.0 * bsn_double_side(&q, ctl).unwrap(),
            max_relative = 1e-14
        );
        let sparse = DoubleSideParams::new(1e-5, 1e-5, 10.0, 20.0, Codebook::new(8).unwrap(), 1e4).unwrap();
        assert_eq!(hon_double_side(&sparse, ctl).unwrap(), 0.0);
    }

    #[test]
    fn series_control_validation() {
        assert!(SeriesControl::new(0.0, 100).is_err());
        assert!(SeriesControl::new(1e-2, 100).is_err());
        assert!(SeriesControl::new(1e-6, 8).is_err());
    }
}
