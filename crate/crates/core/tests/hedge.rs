use proptest::prelude::*;
use rahr::hedge::*;
use rahr::stats::{sample_covariance, sample_variance};
use rahr::synthetic::NormalStream;

fn moments() -> impl Strategy<Value = MomentSet> {
    (-0.01f64..0.01, 1e-5f64..1e-2, -1.5f64..1.5).prop_map(|(e, var_f, ratio)| MomentSet {
        e_rf: e,
        var_f,
        cov_sf: ratio * var_f,
        var_s: None,
    })
}

proptest! {
    #[test]
    fn sides_average_to_mvhr(m in moments(), lambda in 0.01f64..50.0) {
        let long = rahr(&m, lambda, HedgerSide::Long).unwrap().beta;
        let short = rahr(&m, lambda, HedgerSide::Short).unwrap().beta;
        let mv = m.minimum_variance_ratio();
        prop_assert!((long + short - 2.0 * mv).abs() <= 1e-10 * (1.0 + long.abs() + short.abs()));
    }

    #[test]
    fn martingale_futures_give_mvhr(m in moments(), lambda in 0.01f64..50.0) {
        let m = MomentSet { e_rf: 0.0, ..m };
        for side in HedgerSide::BOTH {
            prop_assert_eq!(rahr(&m, lambda, side).unwrap().beta, m.minimum_variance_ratio());
        }
    }

    #[test]
    fn gap_shrinks_with_risk_aversion(m in moments(), l1 in 0.01f64..10.0, k in 1.01f64..100.0) {
        prop_assume!(m.e_rf != 0.0);
        let mv = m.minimum_variance_ratio();
        for side in HedgerSide::BOTH {
            let g1 = (rahr(&m, l1, side).unwrap().beta - mv).abs();
            let g2 = (rahr(&m, l1 * k, side).unwrap().beta - mv).abs();
            prop_assert!(g2 < g1);
        }
    }

    #[test]
    fn positive_drift_orders_ratios(m in moments(), lambda in 0.01f64..50.0) {
        prop_assume!(m.e_rf > 1e-9);
        let mv = m.minimum_variance_ratio();
        let short = rahr(&m, lambda, HedgerSide::Short).unwrap().beta;
        let long = rahr(&m, lambda, HedgerSide::Long).unwrap().beta;
        prop_assert!(short < mv && mv < long);
    }

    #[test]
    fn mvhr_scale_invariant(seed in 0u64..1000, k in 0.01f64..100.0) {
        let mut z = NormalStream::new(seed);
        let f: Vec<f64> = (0..40).map(|_| 0.02 * z.next_normal()).collect();
        let s: Vec<f64> = f.iter().map(|x| 0.9 * x + 0.01 * z.next_normal()).collect();
        let b1 = mvhr_values(&s, &f).unwrap().beta;
        let ks: Vec<f64> = s.iter().map(|x| k * x).collect();
        let kf: Vec<f64> = f.iter().map(|x| k * x).collect();
        let b2 = mvhr_values(&ks, &kf).unwrap().beta;
        prop_assert!((b1 - b2).abs() < 1e-10);
    }
}

#[test]
fn infinite_risk_aversion_limit() {
    let m = MomentSet::new(0.0011, 0.0025, 0.0025 * 1.006, None).unwrap();
    for side in HedgerSide::BOTH {
        let b = rahr(&m, 1e9, side).unwrap().beta;
        assert!((b - m.minimum_variance_ratio()).abs() < 1e-6);
    }
}

#[test]
fn independent_series_have_small_mvhr() {
    let mut z = NormalStream::new(5);
    let s: Vec<f64> = (0..100_000).map(|_| z.next_normal()).collect();
    let f: Vec<f64> = (0..100_000).map(|_| z.next_normal()).collect();
    assert!(mvhr_values(&s, &f).unwrap().beta.abs() < 0.02);
}

#[test]
fn sample_moments_feed_the_ratio() {
    let s = [0.02, -0.01, 0.03, 0.00, -0.02, 0.01];
    let f = [0.01, -0.02, 0.02, 0.01, -0.01, 0.00];
    let m = MomentSet::from_sample(&s, &f).unwrap();
    assert_eq!(m.var_f, sample_variance(&f));
    assert_eq!(m.cov_sf, sample_covariance(&s, &f));
    assert!((m.minimum_variance_ratio() - 69.0 / 65.0).abs() < 1e-12);
    assert!(MomentSet::from_sample(&s, &f[..5]).is_err());
}
