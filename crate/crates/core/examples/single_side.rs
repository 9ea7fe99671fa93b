//! Stations on one side only: closed-form counts next to a simulated
//! ensemble, across codebook sizes.

use hwbeam::closed_form::{bsn_single_side, expected_switches_neighbor, hon_single_side, SingleSideParams};
use hwbeam::monte_carlo::{run_ensemble, Deployment, TraceOptions, WorldConfig};
use hwbeam::{Codebook, LaneGeometry, LosModel};

fn main() -> hwbeam::Result<()> {
    let (lambda, w, l_h) = (0.008, 10.0, 10_000.0);
    println!("lambda {} /km, W {w} m, L_h {} km", lambda * 1e3, l_h / 1e3);
    println!("{:>4} {:>10} {:>10} {:>18} {:>8} {:>14}", "N_c", "per gap", "BSN", "simulated", "HON", "simulated");
    for n_c in [8, 16, 32, 64] {
        let codebook = Codebook::new(n_c)?;
        let p = SingleSideParams::new(lambda, w, codebook.clone(), l_h)?;
        let world = WorldConfig {
            l_h,
            lambda_bs_top: lambda,
            lambda_bs_bottom: 0.0,
            los: LosModel::clear(),
            geometry: LaneGeometry::new(w, 2.0 * w, 3.7, 4)?,
            codebook,
            deployment: Deployment::Top,
            trace: TraceOptions::default(),
        };
        let s = run_ensemble(&world, 4000, 1)?;
        println!(
            "{n_c:>4} {:>10.3} {:>10.2} {:>10.2} +- {:<5.2} {:>8.1} {:>7.2} +- {:.2}",
            expected_switches_neighbor(&p),
            bsn_single_side(&p),
            s.bsn.mean,
            s.bsn.ci95,
            hon_single_side(&p),
            s.hon.mean,
            s.hon.ci95
        );
    }
    Ok(())
}
