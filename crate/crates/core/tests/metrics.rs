use osa_core::metrics::{mse, nrmse, psnr_db, rmse, snr_db, SignalPair, SnrBand};
use proptest::prelude::*;

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..64).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )
    })
}

proptest! {
    #[test]
    fn snr_is_antisymmetric(a in 1e-9f64..1e9, b in 1e-9f64..1e9) {
        prop_assert_eq!(snr_db(a, b).unwrap(), -snr_db(b, a).unwrap());
    }

    #[test]
    fn metrics_ignore_joint_permutation((r, e) in pairs(), rot in 0usize..64) {
        let k = rot % r.len();
        let mut r2 = r.clone();
        let mut e2 = e.clone();
        r2.rotate_left(k);
        e2.rotate_left(k);
        r2.reverse();
        e2.reverse();
        let a = SignalPair::new(&r, &e).unwrap();
        let b = SignalPair::new(&r2, &e2).unwrap();
        let tol = 1e-12 * (1.0 + mse(&a));
        prop_assert!((mse(&a) - mse(&b)).abs() <= tol);
        prop_assert!((rmse(&a) - rmse(&b)).abs() <= tol);
        prop_assert!((nrmse(&a, -10.0, 10.0).unwrap() - nrmse(&b, -10.0, 10.0).unwrap()).abs() <= tol);
        prop_assert!((rmse(&a).powi(2) - mse(&a)).abs() <= tol);
    }

    #[test]
    fn psnr_strictly_decreasing(max in 0.01f64..100.0, m1 in 1e-9f64..1e3, grow in 1.000001f64..10.0) {
        let m2 = m1 * grow;
        prop_assert!(psnr_db(max, m2).unwrap() < psnr_db(max, m1).unwrap());
    }

    #[test]
    fn nrmse_scales_inversely_with_range((r, e) in pairs(), lo in -5.0f64..0.0, width in 0.1f64..10.0) {
        let p = SignalPair::new(&r, &e).unwrap();
        let a = nrmse(&p, lo, lo + width).unwrap();
        let b = nrmse(&p, lo, lo + 2.0 * width).unwrap();
        prop_assert!((a - 2.0 * b).abs() <= 1e-12 * a.max(1.0));
    }
}

#[test]
fn reference_snr_falls_in_satisfying_band() {
    assert_eq!(SnrBand::classify(27.4231), SnrBand::Satisfying);
    assert_eq!(SnrBand::classify(11.99).label(), "serious problem");
    assert_eq!(SnrBand::classify(30.5), SnrBand::Suitable);
}

#[test]
fn psnr_edge_cases() {
    assert_eq!(psnr_db(2.0, 4.0).unwrap(), 0.0);
    assert_eq!(psnr_db(1.0, 0.0).unwrap(), f64::INFINITY);
    assert!(psnr_db(-1.0, 0.1).is_err());
    assert!(psnr_db(1.0, -0.1).is_err());
}
