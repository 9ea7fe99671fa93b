//! Stations on both sides: cross-side handover probability, the law of the
//! number of serving bottom stations in a box, and the box totals.

use hwbeam::closed_form::*;
use hwbeam::Codebook;

fn main() -> hwbeam::Result<()> {
    let p = DoubleSideParams::new(0.01, 0.01, 10.0, 20.0, Codebook::new(32)?, 10_000.0)?;
    let ctl = SeriesControl::default();
    println!("P_tb = {:.5}", prob_handover_tb(&p)?);

    let cross = expected_switches_cross(&p);
    println!("switches on a top-to-bottom handover: {:.3} + {:.3} = {:.3}", cross.e_th, cross.e_hb, cross.e_ntb);

    for n_b in [1, 2, 3, 5] {
        let pmf = conditional_pmf_nbv(n_b, &p)?;
        let shown: Vec<String> = pmf.iter().map(|q| format!("{q:.4}")).collect();
        println!("n_b = {n_b}: P(n_bv = 0..) = [{}]", shown.join(", "));
    }

    let ns = expected_switches_box(&p, ctl)?;
    let nh = expected_handovers_box(&p, ctl)?;
    println!("per box: NS {:.4} ({} terms), NH {:.4} ({} terms)", ns.value, ns.terms, nh.value, nh.terms);
    println!("highway: BSN {:.1}, HON {:.1}", bsn_double_side(&p, ctl)?, hon_double_side(&p, ctl)?);
    Ok(())
}
