//! Traces one sampled world event by event and prints the event log and
//! beam sojourn times.

use hwbeam::monte_carlo::*;
use hwbeam::{Codebook, LaneGeometry, LosModel};

fn main() -> hwbeam::Result<()> {
    let world = WorldConfig {
        l_h: 600.0,
        lambda_bs_top: 0.006,
        lambda_bs_bottom: 0.006,
        los: LosModel::clear(),
        geometry: LaneGeometry::from_lane(4, 3.7, 2, 0.0)?,
        codebook: Codebook::new(16)?,
        deployment: Deployment::Both,
        trace: TraceOptions::default(),
    };
    let r = world.sample(7, 0)?;
    println!("top stations    {:?}", r.bs_top.points());
    println!("bottom stations {:?}", r.bs_bottom.points());

    let t = trace_realization(&r, world.trace);
    println!("{} handovers, {} beam switches", t.handovers.len(), t.beam_switches.len());
    for s in &t.serving {
        println!("  [{:7.2}, {:7.2}) {} beam {:+}", s.start, s.end, s.station, s.beam);
    }
    let secs = sojourn_times(&t, 60.0 / 3.6)?;
    let mean = secs.iter().sum::<f64>() / secs.len() as f64;
    println!("mean sojourn at 60 km/h: {:.3} s", mean);

    write_event_log(std::io::stdout().lock(), [(0, &t)])?;
    Ok(())
}
