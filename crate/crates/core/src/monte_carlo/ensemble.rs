use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::trace::{trace_with_sink, BoxCounter, StationId, TraceResult, TraceSink};
use super::WorldConfig;

/// Realizations per progress checkpoint.
const CHECKPOINT: usize = 2000;

/// Streaming mean and variance; `merge` is Chan's pairwise update, so the
/// result depends only on the order in which pieces are merged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count += other.count;
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn summary(&self) -> MetricStats {
        let variance = self.variance();
        let ci95 = if self.count == 0 {
            f64::NAN
        } else {
            1.96 * (variance / self.count as f64).sqrt()
        };
        MetricStats {
            mean: if self.count == 0 { f64::NAN } else { self.mean },
            variance,
            count: self.count,
            ci95,
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub variance: f64,
    pub count: u64,
    /// `1.96 sqrt(variance / count)`.
    pub ci95: f64,
}

impl MetricStats {
    pub fn scaled(&self, factor: f64) -> MetricStats {
        MetricStats {
            mean: self.mean * factor,
            variance: self.variance * factor * factor,
            count: self.count,
            ci95: self.ci95 * factor.abs(),
        }
    }

    pub fn covers(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.ci95
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub realizations: u64,
    /// Realizations without any station; excluded from every mean.
    pub empty_realizations: u64,
    /// Realizations with fewer than two top stations, hence no box.
    pub realizations_without_boxes: u64,
    /// Beam switches per drive.
    pub bsn: MetricStats,
    /// Handovers per drive.
    pub hon: MetricStats,
    /// Switches per box, pooled over all boxes.
    pub box_ns: MetricStats,
    /// Handovers per box, pooled over all boxes.
    pub box_nh: MetricStats,
    /// Serving-interval lengths in metres, pooled.
    pub sojourn_m: MetricStats,
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    realizations: u64,
    empty: u64,
    without_boxes: u64,
    bsn: RunningStats,
    hon: RunningStats,
    box_ns: RunningStats,
    box_nh: RunningStats,
    sojourn: RunningStats,
}

impl Accumulator {
    fn add(&mut self, s: &Summary) {
        self.realizations += 1;
        if s.empty {
            self.empty += 1;
            self.without_boxes += 1;
            return;
        }
        self.bsn.push(s.switches as f64);
        self.hon.push(s.handovers as f64);
        if s.box_ns.count == 0 {
            self.without_boxes += 1;
        }
        self.box_ns.merge(&s.box_ns);
        self.box_nh.merge(&s.box_nh);
        self.sojourn.merge(&s.sojourn);
    }

    fn stats(&self) -> EnsembleStats {
        EnsembleStats {
            realizations: self.realizations,
            empty_realizations: self.empty,
            realizations_without_boxes: self.without_boxes,
            bsn: self.bsn.summary(),
            hon: self.hon.summary(),
            box_ns: self.box_ns.summary(),
            box_nh: self.box_nh.summary(),
            sojourn_m: self.sojourn.summary(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Summary {
    empty: bool,
    switches: u64,
    handovers: u64,
    box_ns: RunningStats,
    box_nh: RunningStats,
    sojourn: RunningStats,
}

struct Counting<'a> {
    switches: u64,
    handovers: u64,
    last_x: f64,
    sojourn: RunningStats,
    boxes: BoxCounter<'a>,
}

impl Counting<'_> {
    fn interval(&mut self, x: f64) {
        self.sojourn.push(x - self.last_x);
        self.last_x = x;
    }
}

impl TraceSink for Counting<'_> {
    fn begin(&mut self, x: f64, _station: StationId, _beam: i32) {
        self.last_x = x;
    }

    fn handover(&mut self, x: f64, _from: StationId, _to: StationId, _beam: i32) {
        self.handovers += 1;
        self.interval(x);
        self.boxes.handover(x);
    }

    fn beam_switch(&mut self, x: f64, _station: StationId, _old: i32, _new: i32) {
        self.switches += 1;
        self.interval(x);
        self.boxes.switch(x);
    }

    fn end(&mut self, x: f64) {
        self.interval(x);
    }
}

fn summarize(config: &WorldConfig, master: u64, index: u64) -> Result<Summary> {
    let r = config.sample(master, index)?;
    let mut sink = Counting {
        switches: 0,
        handovers: 0,
        last_x: 0.0,
        sojourn: RunningStats::default(),
        boxes: BoxCounter::new(r.bs_top.points()),
    };
    if !trace_with_sink(&r, config.trace, &mut sink) {
        return Ok(Summary {
            empty: true,
            ..Summary::default()
        });
    }
    let counts = sink.boxes.counts();
    Ok(Summary {
        empty: false,
        switches: sink.switches,
        handovers: sink.handovers,
        box_ns: counts.iter().map(|c| f64::from(c.0)).collect(),
        box_nh: counts.iter().map(|c| f64::from(c.1)).collect(),
        sojourn: sink.sojourn,
    })
}

/// Runs `n_realizations` independent drives and aggregates them.
///
/// Realization `i` draws from stream `i` of `master_seed` and the results are
/// merged in index order, so the output is bit-identical for any number of
/// worker threads.
pub fn run_ensemble(config: &WorldConfig, n_realizations: u64, master_seed: u64) -> Result<EnsembleStats> {
    run_ensemble_with(config, n_realizations, master_seed, |done, stats| {
        log::info!(
            "{done}/{n_realizations} realizations: BSN {:.4} +/- {:.4}, HON {:.4} +/- {:.4}",
            stats.bsn.mean,
            stats.bsn.ci95,
            stats.hon.mean,
            stats.hon.ci95
        );
    })
}

/// [`run_ensemble`] with a callback at every checkpoint.
pub fn run_ensemble_with(
    config: &WorldConfig,
    n_realizations: u64,
    master_seed: u64,
    mut progress: impl FnMut(u64, &EnsembleStats),
) -> Result<EnsembleStats> {
    if n_realizations == 0 {
        return Err(Error::invalid("n_realizations", "must be at least 1"));
    }
    config.validate()?;
    let mut acc = Accumulator::default();
    let mut done = 0u64;
    while done < n_realizations {
        let stop = (done + CHECKPOINT as u64).min(n_realizations);
        let chunk: Vec<Summary> = (done..stop)
            .into_par_iter()
            .map(|i| summarize(config, master_seed, i))
            .collect::<Result<_>>()?;
        chunk.iter().for_each(|s| acc.add(s));
        done = stop;
        progress(done, &acc.stats());
    }
    if acc.empty > 0 {
        log::warn!("{} of {} realizations had no line-of-sight station", acc.empty, acc.realizations);
    }
    Ok(acc.stats())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStatistics {
    pub ns: MetricStats,
    pub nh: MetricStats,
    /// Traces without a complete box.
    pub excluded_realizations: u64,
}

/// Pooled switch and handover counts per box over a set of traces.
pub fn box_statistics<'a>(results: impl IntoIterator<Item = &'a TraceResult>) -> BoxStatistics {
    let mut ns = RunningStats::default();
    let mut nh = RunningStats::default();
    let mut excluded = 0;
    for r in results {
        if r.boxes.is_empty() {
            excluded += 1;
        }
        for b in &r.boxes {
            ns.push(f64::from(b.switches));
            nh.push(f64::from(b.handovers));
        }
    }
    BoxStatistics {
        ns: ns.summary(),
        nh: nh.summary(),
        excluded_realizations: excluded,
    }
}
