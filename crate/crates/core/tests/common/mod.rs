//! Oracles shared by the integration tests. None of them calls into the
//! closed-form module.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

use rand::Rng;

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite 10-point Gauss-Legendre on `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            let half = 0.5 * h;
            GL_X.iter()
                .zip(GL_W)
                .map(|(x, w)| w * (f(mid - half * x) + f(mid + half * x)))
                .sum::<f64>()
                * half
        })
        .sum()
}

/// `int_a^inf f` through `y = a + scale * s / (1 - s)`; `scale` should be
/// the length over which `f` decays.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, a: f64, scale: f64, panels: usize) -> f64 {
    gauss_legendre(
        |s| {
            let t = 1.0 - s;
            scale * f(a + scale * s / t) / (t * t)
        },
        0.0,
        1.0,
        panels,
    )
}

/// `z K_1(z)` from `K_1(z) = int_0^inf cosh t e^{-z cosh t} dt`, by the
/// trapezoid rule, which converges geometrically for this integrand.
pub fn z_k1(z: f64) -> f64 {
    let t_max = (2.0 * (40.0 / z).ln().max(1.0) + 5.0).max(10.0);
    let n = 200_000;
    let h = t_max / n as f64;
    let g = |t: f64| t.cosh() * (-z * t.cosh()).exp();
    let inner: f64 = (1..n).map(|i| g(i as f64 * h)).sum();
    z * h * (0.5 * g(0.0) + inner + 0.5 * g(t_max))
}

/// Beam sector of a ray at angle `theta` from broadside with `n_c` beams,
/// sector 0 spanning `(-pi/n_c, pi/n_c)`.
pub fn sector(theta: f64, n_c: u32) -> i64 {
    let width = 2.0 * PI / f64::from(n_c);
    ((theta + PI / f64::from(n_c)) / width).floor() as i64
}

/// Beam changes seen by a vehicle driving between two same-side stations
/// `d` apart at lateral distance `w`, from the ray angles at the handover
/// midpoint: each station sweeps from broadside to the midpoint.
pub fn ray_traced_switches(d: f64, w: f64, n_c: u32) -> u64 {
    let leaving = sector((0.5 * d).atan2(w), n_c).unsigned_abs();
    let arriving = sector((-0.5 * d).atan2(w), n_c).unsigned_abs();
    leaving + arriving
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 5% critical value of the one-sample KS distance.
pub fn ks_critical_5pct(n: usize) -> f64 {
    1.358 / (n as f64).sqrt()
}

/// One pass through a box as a Markov walk: from the top state, step to a
/// bottom station with `p_tb`; from a bottom station keep the next one with
/// `p_bb` or return to the top for good. The walk visits the `n_b` bottom
/// stations in order and returns how many served.
pub fn box_walk(n_b: usize, p_tb: f64, p_bb: f64, rng: &mut impl Rng) -> usize {
    let mut on_bottom = false;
    let mut served = 0;
    for _ in 0..n_b {
        let take = if on_bottom {
            rng.random::<f64>() < p_bb
        } else {
            rng.random::<f64>() < p_tb
        };
        if take {
            served += 1;
            on_bottom = true;
        } else if on_bottom {
            // back on the top side; later bottom stations are not reached
            break;
        }
    }
    served
}
