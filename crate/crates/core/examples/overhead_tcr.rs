//! Beam training overhead and the training-to-connectivity ratio for given
//! event counts, and the CSI-RS periodicities short enough for the beams.

use hwbeam::overhead::*;

fn main() -> hwbeam::Result<()> {
    let l_h = 10_000.0;
    let (n_ho, n_bs) = (180.0, 4700.0);
    println!("{:>10} {:>10} {:>12} {:>8} {:>8}", "km/h", "T_ho ms", "T_bswitch ms", "TCR", "share");
    for kmh in [30.0, 60.0, 90.0, 120.0] {
        let cfg = OverheadConfig {
            speed_mps: kmh / 3.6,
            ..OverheadConfig::default()
        };
        let r = overhead_report(n_ho, n_bs, l_h, &cfg)?;
        println!("{kmh:>10} {:>10.0} {:>12.0} {:>8.4} {:>8.3}", r.t_ho_ms, r.t_bswitch_ms, r.tcr, r.switch_share);

        let sojourn_ms = travel_time_ms(l_h, &cfg) / (n_ho + n_bs + 1.0);
        let csi = feasible_csi_periods(sojourn_ms, &cfg)?;
        println!("{:>10} mean sojourn {sojourn_ms:.1} ms, CSI-RS periods {:?} slots", "", csi.periods_slots);
    }

    let saturated = OverheadConfig {
        speed_mps: 300.0,
        ..OverheadConfig::default()
    };
    if let Err(e) = tcr(n_ho, 50_000.0, l_h, &saturated) {
        println!("at 300 m/s: {e}");
    }
    Ok(())
}
