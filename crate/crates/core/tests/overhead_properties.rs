use hwbeam::overhead::*;
use proptest::prelude::*;

fn cfg(bs: u32, vu: u32, speed_mps: f64) -> OverheadConfig {
    OverheadConfig {
        codebook_bs: bs,
        codebook_vu: vu,
        speed_mps,
        ..OverheadConfig::default()
    }
}

proptest! {
    #[test]
    fn costs_are_linear_in_counts(n in 0.0f64..1e4, k in 0.0f64..10.0, bs in 1u32..256, vu in 1u32..16) {
        let c = cfg(bs, vu, 20.0);
        let scale = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        prop_assert!(scale(t_handover(k * n, &c), k * t_handover(n, &c)));
        prop_assert!(scale(t_beamswitch(k * n, &c), k * t_beamswitch(n, &c)));
        prop_assert_eq!(t_handover(0.0, &c), 0.0);
    }

    #[test]
    fn ssb_count_covers_every_beam_pair(bs in 1u32..512, vu in 1u32..32) {
        let c = cfg(bs, vu, 20.0);
        let n = c.ssb_count();
        prop_assert_eq!(n.fract(), 0.0);
        prop_assert!(n * 64.0 >= f64::from(bs * vu));
        prop_assert!((n - 1.0) * 64.0 < f64::from(bs * vu));
        let frac = OverheadConfig { ssb_rounding: SsbRounding::Fractional, ..c };
        prop_assert!(frac.ssb_count() <= n);
    }

    #[test]
    fn tcr_grows_with_speed_and_counts(
        ho in 0.0f64..200.0, bs in 0.0f64..3000.0, v1 in 1.0f64..40.0, dv in 0.0f64..20.0, extra in 0.0f64..100.0,
    ) {
        let l_h = 1e4;
        let slow = tcr(ho, bs, l_h, &cfg(72, 2, v1));
        let fast = tcr(ho, bs, l_h, &cfg(72, 2, v1 + dv));
        if let (Ok(a), Ok(b)) = (slow, fast) {
            prop_assert!(a >= 0.0);
            prop_assert!(b >= a);
        }
        let c = cfg(72, 2, v1);
        if let (Ok(a), Ok(b)) = (tcr(ho, bs, l_h, &c), tcr(ho + extra, bs + extra, l_h, &c)) {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn csi_periods_are_a_prefix(mean in 0.01f64..200.0, sym in 0.01f64..0.2) {
        let c = OverheadConfig { tau_sym_ms: sym, ..OverheadConfig::default() };
        let f = feasible_csi_periods(mean, &c).unwrap();
        prop_assert_eq!(&f.periods_slots[..], &CSI_PERIODS_SLOTS[..f.periods_slots.len()]);
        prop_assert!(f.periods_ms.iter().all(|&p| p < mean));
        prop_assert_eq!(f.advisory, f.periods_slots.is_empty());
        let longer = feasible_csi_periods(mean * 2.0, &c).unwrap();
        prop_assert!(longer.periods_slots.len() >= f.periods_slots.len());
    }
}

#[test]
fn saturation_is_an_error() {
    let c = cfg(72, 2, 1000.0);
    assert!(tcr(1e4, 1e6, 100.0, &c).is_err());
    assert!(tcr(-1.0, 0.0, 100.0, &c).is_err());
    assert!(tcr(f64::NAN, 0.0, 100.0, &c).is_err());
}
