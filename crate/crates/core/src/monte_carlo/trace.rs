use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::codebook::{beam_index, handover_point_cross_side, handover_point_same_side, Codebook};
use crate::error::{check_positive, Result};
use crate::stochastic_geometry::Side;

use super::Realization;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Never hand over to a station the vehicle has already passed.
    pub forward_only: bool,
}

/// A station by side and position in that side's sorted point list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StationId {
    pub side: Side,
    pub index: u32,
}

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Handover {
    pub x: f64,
    pub from: StationId,
    pub to: StationId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSwitch {
    pub x: f64,
    pub station: StationId,
    pub old: i32,
    pub new: i32,
}

/// Stretch of road served by one (station, beam) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServingInterval {
    pub start: f64,
    pub end: f64,
    pub station: StationId,
    pub beam: i32,
}

impl ServingInterval {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// Events inside one box `(top_i, top_{i+1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCounts {
    pub start: f64,
    pub end: f64,
    pub switches: u32,
    pub handovers: u32,
}

/// Receives the events of a trace in increasing `x`.
pub trait TraceSink {
    fn begin(&mut self, _x: f64, _station: StationId, _beam: i32) {}
    fn handover(&mut self, x: f64, from: StationId, to: StationId, beam: i32);
    fn beam_switch(&mut self, x: f64, station: StationId, old: i32, new: i32);
    fn end(&mut self, _x: f64) {}
}

/// Full event record of one drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub l_h: f64,
    /// No station at all: nothing was traced.
    pub empty: bool,
    pub handovers: Vec<Handover>,
    pub beam_switches: Vec<BeamSwitch>,
    pub serving: Vec<ServingInterval>,
    pub boxes: Vec<BoxCounts>,
}

impl TraceResult {
    /// Lengths of the serving intervals, in metres.
    pub fn sojourn_intervals(&self) -> Vec<f64> {
        self.serving.iter().map(ServingInterval::len).collect()
    }

    pub fn event_count(&self) -> usize {
        self.handovers.len() + self.beam_switches.len()
    }

    /// Handovers and switches merged by position.
    pub fn events(&self) -> Vec<(f64, Event)> {
        let mut out: Vec<(f64, Event)> = self
            .handovers
            .iter()
            .map(|h| (h.x, Event::Handover(*h)))
            .chain(self.beam_switches.iter().map(|s| (s.x, Event::BeamSwitch(*s))))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Handover(Handover),
    BeamSwitch(BeamSwitch),
}

/// Durations in seconds of the serving intervals at constant `speed` (m/s).
pub fn sojourn_times(result: &TraceResult, speed: f64) -> Result<Vec<f64>> {
    check_positive("speed", speed)?;
    Ok(result.serving.iter().map(|s| s.len() / speed).collect())
}

/// Traces the drive from `0` to `L_h` and records every event.
pub fn trace_realization(r: &Realization, opts: TraceOptions) -> TraceResult {
    let mut rec = Recorder {
        handovers: Vec::new(),
        beam_switches: Vec::new(),
        serving: Vec::new(),
        current: None,
        boxes: BoxCounter::new(r.bs_top.points()),
    };
    let traced = trace_with_sink(r, opts, &mut rec);
    TraceResult {
        l_h: r.l_h(),
        empty: !traced,
        handovers: rec.handovers,
        beam_switches: rec.beam_switches,
        serving: rec.serving,
        boxes: rec.boxes.finish(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Station {
    x: f64,
    w: f64,
    id: StationId,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    station: Station,
    start: f64,
    end: f64,
}

fn handover_point(a: &Station, b: &Station) -> f64 {
    if a.w == b.w {
        handover_point_same_side(a.x, b.x)
    } else {
        handover_point_cross_side(a.x, b.x, a.w, b.w).expect("hull stations have distinct x")
    }
}

fn merged_stations(r: &Realization) -> Vec<Station> {
    let mut stations: Vec<Station> = [Side::Top, Side::Bottom]
        .into_iter()
        .flat_map(|side| {
            let w = r.geometry.w(side);
            r.side(side).points().iter().enumerate().map(move |(i, &x)| Station {
                x,
                w,
                id: StationId {
                    side,
                    index: i as u32,
                },
            })
        })
        .collect();
    stations.sort_by(|a, b| {
        a.x.total_cmp(&b.x)
            .then(a.w.total_cmp(&b.w))
            .then(a.id.cmp(&b.id))
    });
    stations
}

/// Serving cells on `[0, l_h]` from the lower envelope of `(p - x)^2 + w^2`.
///
/// `stations` must be sorted by `(x, w, side, index)`. Minimising the squared
/// distance over stations is minimising lines `-2 x p + x^2 + w^2` in `p`,
/// whose slopes fall as `x` grows, so a single monotone hull pass suffices.
fn serving_cells(stations: impl Iterator<Item = Station>, l_h: f64, cells: &mut Vec<Cell>) {
    let mut hull: Vec<Station> = Vec::new();
    for s in stations {
        if hull.last().is_some_and(|h| h.x == s.x) {
            // sorted: the kept one is nearer the lane or wins the tie-break
            continue;
        }
        while hull.len() >= 2 {
            let n = hull.len();
            if handover_point(&hull[n - 1], &s) <= handover_point(&hull[n - 2], &hull[n - 1]) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(s);
    }

    cells.clear();
    for (i, s) in hull.iter().enumerate() {
        let start = if i == 0 {
            f64::NEG_INFINITY
        } else {
            handover_point(&hull[i - 1], s)
        };
        let end = hull
            .get(i + 1)
            .map_or(f64::INFINITY, |next| handover_point(s, next));
        if end > 0.0 && start < l_h {
            cells.push(Cell {
                station: *s,
                start: start.max(0.0),
                end: end.min(l_h),
            });
        }
    }
}

/// Drives the vehicle along the realization and feeds `sink`. Returns
/// `false` (after sending nothing) when there is no station to associate to.
pub fn trace_with_sink<S: TraceSink>(r: &Realization, opts: TraceOptions, sink: &mut S) -> bool {
    let stations = merged_stations(r);
    if stations.is_empty() {
        return false;
    }
    let l_h = r.l_h();
    let mut cells = Vec::new();
    serving_cells(stations.iter().copied(), l_h, &mut cells);

    if opts.forward_only {
        let mut active = vec![true; stations.len()];
        loop {
            let behind = cells
                .iter()
                .skip(1)
                .find(|c| c.start > c.station.x)
                .map(|c| c.station.id);
            let Some(id) = behind else { break };
            let pos = stations
                .iter()
                .position(|s| s.id == id)
                .expect("cell station comes from the list");
            active[pos] = false;
            let kept = stations
                .iter()
                .zip(&active)
                .filter(|(_, &a)| a)
                .map(|(s, _)| *s);
            serving_cells(kept, l_h, &mut cells);
        }
    }

    emit(&cells, &r.codebook, sink);
    sink.end(l_h);
    true
}

fn emit<S: TraceSink>(cells: &[Cell], codebook: &Codebook, sink: &mut S) {
    let mut previous: Option<StationId> = None;
    for cell in cells {
        let st = cell.station;
        let mut beam = beam_index(cell.start, st.x, st.w, codebook);
        match previous {
            None => sink.begin(cell.start, st.id, beam),
            Some(from) => sink.handover(cell.start, from, st.id, beam),
        }
        for edge in codebook.boundaries(st.x, st.w) {
            if edge <= cell.start {
                continue;
            }
            if edge >= cell.end {
                break;
            }
            sink.beam_switch(edge, st.id, beam, beam + 1);
            beam += 1;
        }
        previous = Some(st.id);
    }
}

/// Assigns events to boxes `(top_i, top_{i+1}]` as they stream past.
#[derive(Debug, Clone)]
pub(crate) struct BoxCounter<'a> {
    tops: &'a [f64],
    /// Number of top stations strictly before the last event.
    passed: usize,
    counts: Vec<(u32, u32)>,
}

impl<'a> BoxCounter<'a> {
    pub(crate) fn new(tops: &'a [f64]) -> Self {
        Self {
            tops,
            passed: 0,
            counts: vec![(0, 0); tops.len().saturating_sub(1)],
        }
    }

    fn slot(&mut self, x: f64) -> Option<&mut (u32, u32)> {
        while self.passed < self.tops.len() && self.tops[self.passed] < x {
            self.passed += 1;
        }
        if self.passed == 0 || self.passed == self.tops.len() {
            return None;
        }
        self.counts.get_mut(self.passed - 1)
    }

    pub(crate) fn switch(&mut self, x: f64) {
        if let Some(c) = self.slot(x) {
            c.0 += 1;
        }
    }

    pub(crate) fn handover(&mut self, x: f64) {
        if let Some(c) = self.slot(x) {
            c.1 += 1;
        }
    }

    pub(crate) fn counts(&self) -> &[(u32, u32)] {
        &self.counts
    }

    fn finish(self) -> Vec<BoxCounts> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &(switches, handovers))| BoxCounts {
                start: self.tops[i],
                end: self.tops[i + 1],
                switches,
                handovers,
            })
            .collect()
    }
}

struct Recorder<'a> {
    handovers: Vec<Handover>,
    beam_switches: Vec<BeamSwitch>,
    serving: Vec<ServingInterval>,
    current: Option<(f64, StationId, i32)>,
    boxes: BoxCounter<'a>,
}

impl Recorder<'_> {
    fn close(&mut self, x: f64) {
        if let Some((start, station, beam)) = self.current.take() {
            self.serving.push(ServingInterval {
                start,
                end: x,
                station,
                beam,
            });
        }
    }
}

impl TraceSink for Recorder<'_> {
    fn begin(&mut self, x: f64, station: StationId, beam: i32) {
        self.current = Some((x, station, beam));
    }

    fn handover(&mut self, x: f64, from: StationId, to: StationId, beam: i32) {
        self.close(x);
        self.current = Some((x, to, beam));
        self.handovers.push(Handover { x, from, to });
        self.boxes.handover(x);
    }

    fn beam_switch(&mut self, x: f64, station: StationId, old: i32, new: i32) {
        self.close(x);
        self.current = Some((x, station, new));
        self.beam_switches.push(BeamSwitch {
            x,
            station,
            old,
            new,
        });
        self.boxes.switch(x);
    }

    fn end(&mut self, x: f64) {
        self.close(x);
    }
}

#[derive(Serialize)]
struct EventRow {
    realization_id: u64,
    x_m: f64,
    event: &'static str,
    from: String,
    to: String,
}

/// Writes the event log as CSV: `realization_id,x_m,event,from,to`.
/// Handovers (`HO`) name stations as `side:index`; beam switches (`BS`)
/// give the old and new beam index of the serving station.
pub fn write_event_log<'a, W: Write>(
    out: W,
    traces: impl IntoIterator<Item = (u64, &'a TraceResult)>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["realization_id", "x_m", "event", "from", "to"])?;
    for (id, trace) in traces {
        for (_, event) in trace.events() {
            let row = match event {
                Event::Handover(h) => EventRow {
                    realization_id: id,
                    x_m: h.x,
                    event: "HO",
                    from: h.from.to_string(),
                    to: h.to.to_string(),
                },
                Event::BeamSwitch(s) => EventRow {
                    realization_id: id,
                    x_m: s.x,
                    event: "BS",
                    from: s.old.to_string(),
                    to: s.new.to_string(),
                },
            };
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}
