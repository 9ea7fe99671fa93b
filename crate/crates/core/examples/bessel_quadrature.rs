//! The improper integral behind the cross-side handover probability,
//! evaluated with the adaptive quadrature and compared with z K1(z) from the
//! integral representation of K1.

use hwbeam::quadrature::{integrate_to_infinity, QuadratureOptions};

fn main() -> hwbeam::Result<()> {
    let opts = QuadratureOptions::default();
    println!("{:>8} {:>20} {:>20} {:>10}", "z", "int e^-sqrt(v^2+z^2)", "z K1(z)", "evals");
    for z in [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let direct = integrate_to_infinity(|v: f64| (-(v * v + z * z).sqrt()).exp(), 0.0, opts)?;
        let k1 = integrate_to_infinity(|t: f64| t.cosh() * (-z * t.cosh()).exp(), 0.0, opts)?;
        println!("{z:>8} {:>20.15} {:>20.15} {:>10}", direct.value, z * k1.value, direct.evaluations);
    }
    Ok(())
}
