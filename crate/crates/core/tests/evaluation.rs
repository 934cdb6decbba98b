use chrono::{Days, NaiveDate};
use rahr::evaluation::*;
use rahr::garch::{FitConfig, GarchParams};
use rahr::hedge::{mvhr_values, HedgerSide, MomentSet};
use rahr::market_data::{Frequency, ReturnSeries};
use rahr::rolling::{rolling_hedges, HedgeMode, HedgePath, HedgeRecord, WindowSpec};
use rahr::stats::sample_sd;
use rahr::synthetic::{simulate, SimSpec};
use rahr::Error;

fn dates(n: usize) -> Vec<NaiveDate> {
    let d0 = NaiveDate::from_ymd_opt(2003, 1, 1).unwrap();
    (0..n as u64).map(|i| d0 + Days::new(7 * i)).collect()
}

fn series(xs: &[f64]) -> ReturnSeries {
    ReturnSeries::new(Frequency::Weekly, dates(xs.len()), xs.to_vec()).unwrap()
}

/// Textbook one-pass formulas, kept apart from the library's two-pass code.
fn brute_eu(xs: &[f64], lambda: f64) -> f64 {
    let n = xs.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in xs {
        sum += x;
        sum_sq += x * x;
    }
    let m = sum / n;
    let var = (sum_sq - n * m * m) / (n - 1.0);
    m - lambda / 2.0 * var
}

fn fixtures() -> Vec<(Vec<f64>, Vec<f64>, f64)> {
    vec![
        (
            vec![0.01, -0.02, 0.015, 0.0, 0.005],
            vec![0.03, -0.05, 0.04, 0.01, -0.02],
            0.339,
        ),
        (
            vec![0.002, 0.001, -0.003, 0.004],
            vec![0.02, -0.01, 0.03, -0.04],
            2.0,
        ),
        (
            vec![-0.011, 0.007, 0.019, -0.004, 0.0, 0.012, -0.008],
            vec![-0.031, 0.027, 0.049, -0.024, 0.01, 0.022, -0.038],
            0.75,
        ),
        (vec![0.1, -0.1], vec![0.2, 0.3], 5.0),
        (
            vec![0.0005, 0.0012, -0.0007, 0.0003, 0.0009, -0.0001],
            vec![0.059, -0.061, 0.058, -0.057, 0.062, -0.06],
            0.01,
        ),
    ]
}

#[test]
fn matches_brute_force_oracle() {
    for (hedged, unhedged, lambda) in fixtures() {
        let eu = expected_utility(&series(&hedged), lambda).unwrap();
        assert!((eu - brute_eu(&hedged, lambda)).abs() < 1e-10);
        let he = effectiveness(&series(&hedged), &series(&unhedged), lambda).unwrap();
        let oracle = brute_eu(&hedged, lambda) - brute_eu(&unhedged, lambda);
        assert!((he - oracle).abs() < 1e-10, "{he} vs {oracle}");
    }
}

#[test]
fn worked_expected_utility() {
    let eu = expected_utility_from_moments(0.0012, 0.059 * 0.059, 0.339);
    assert!((eu - 0.000610).abs() < 5e-7, "{eu}");
}

#[test]
fn flat_hedge_against_volatile_exposure() {
    let unhedged = [0.03, -0.01, -0.04, 0.02, 0.0, 0.01, -0.01];
    let lambda = 1.7;
    let mean = unhedged.iter().sum::<f64>() / 7.0;
    assert!(mean.abs() < 1e-18);
    let var = unhedged.iter().map(|x| x * x).sum::<f64>() / 6.0;
    let he = effectiveness(&series(&[0.0; 7]), &series(&unhedged), lambda).unwrap();
    assert!((he - 0.5 * lambda * var).abs() < 1e-15);
    assert_eq!(
        effectiveness(&series(&unhedged), &series(&unhedged), lambda).unwrap(),
        0.0
    );
}

#[test]
fn effectiveness_is_antisymmetric() {
    for (a, b, lambda) in fixtures() {
        let ab = effectiveness(&series(&a), &series(&b), lambda).unwrap();
        let ba = effectiveness(&series(&b), &series(&a), lambda).unwrap();
        assert!((ab + ba).abs() < 1e-15);
    }
}

#[test]
fn span_mismatch_is_an_alignment_error() {
    let a = series(&[0.01, 0.02, 0.03]);
    let b = ReturnSeries::new(
        Frequency::Weekly,
        dates(4)[1..].to_vec(),
        vec![0.01, 0.02, 0.03],
    )
    .unwrap();
    assert!(matches!(
        effectiveness(&a, &b, 1.0),
        Err(Error::Alignment(_))
    ));
}

#[test]
fn eu_decreases_with_variance() {
    let narrow = [0.01, -0.01, 0.01, -0.01];
    let wide = [0.02, -0.02, 0.02, -0.02];
    assert!(
        expected_utility_values(&wide, 0.5).unwrap()
            < expected_utility_values(&narrow, 0.5).unwrap()
    );
}

#[test]
fn welch_oracle() {
    // scipy.stats.ttest_ind(a, b, equal_var=False)
    let a = [0.52, 0.61, 0.47, 0.55, 0.70, 0.58];
    let b = [0.31, 0.45, 0.38, 0.29, 0.50, 0.41];
    let c = compare_means("fixture", &a, &b).unwrap();
    assert!((c.statistic - 3.9306405305616714).abs() < 1e-8);
    assert!((c.p_value - 0.0028189441978691103).abs() < 1e-8);
    assert!((0.0..=1.0).contains(&c.p_value));
}

#[test]
fn welch_separation_and_identity() {
    let x: Vec<f64> = (0..200)
        .map(|i| 0.1 * ((i % 7) as f64 - 3.0) / 2.0)
        .collect();
    let y: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
    assert!(compare_means("sep", &x, &y).unwrap().p_value < 1e-6);
    let same = compare_means("same", &x, &x).unwrap();
    assert_eq!(same.statistic, 0.0);
    assert_eq!(same.p_value, 1.0);
    assert!(matches!(
        compare_means("flat", &[1.0; 4], &[2.0; 4]),
        Err(Error::DegenerateInput(_))
    ));
    assert!(compare_means("short", &[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
}

fn path_with(side: HedgerSide, ds: &[NaiveDate], rahr: &[f64], mvhr: &[f64]) -> HedgePath {
    let moments = MomentSet::new(0.001, 0.002, 0.0018, None).unwrap();
    HedgePath {
        records: ds
            .iter()
            .zip(rahr.iter().zip(mvhr))
            .map(|(&date, (&r, &m))| HedgeRecord {
                date,
                side,
                lambda: 0.4,
                moments,
                rahr: r,
                mvhr: m,
                mode: HedgeMode::InSample,
                converged: true,
            })
            .collect(),
        warnings: vec![],
    }
}

fn market(n: usize, seed: u64, drift_f: f64) -> (ReturnSeries, ReturnSeries) {
    let p = GarchParams::new(1e-5, 0.05, 0.90).unwrap();
    let sim =
        simulate(&SimSpec::new(n, 0.0005, 0.5, p, seed).with_pair(0.9, Some(drift_f))).unwrap();
    (sim.returns, sim.companion.unwrap())
}

#[test]
fn degenerate_beta_paths() {
    let (s, f) = market(60, 3, 0.001);
    let ds = &s.dates()[..50];
    let mv: Vec<f64> = (0..50).map(|i| 0.9 + 0.002 * i as f64).collect();
    for side in HedgerSide::BOTH {
        let rows = score_strategies(&s, &f, &path_with(side, ds, &[0.0; 50], &mv)).unwrap();
        let (r, m, none) = (rows[0], rows[1], rows[2]);
        assert_eq!(
            (r.strategy, m.strategy, none.strategy),
            (Strategy::Rahr, Strategy::Mvhr, Strategy::NoHedge)
        );
        assert_eq!(
            (r.mean, r.sd, r.eu, r.he),
            (none.mean, none.sd, none.eu, 0.0)
        );
        assert_eq!(none.he, 0.0);
        assert_eq!(r.n, 50);

        let rows = score_strategies(&s, &f, &path_with(side, ds, &mv, &mv)).unwrap();
        assert_eq!(
            (rows[0].mean, rows[0].sd, rows[0].eu, rows[0].he),
            (rows[1].mean, rows[1].sd, rows[1].eu, rows[1].he)
        );
    }
}

#[test]
fn last_record_has_nothing_to_score() {
    let (s, f) = market(10, 4, 0.0);
    let ds = &s.dates()[5..];
    let path = path_with(HedgerSide::Short, ds, &[1.0; 5], &[1.0; 5]);
    let real = realize(&s, &f, &path).unwrap();
    assert_eq!(real.dates, s.dates()[6..].to_vec());
    let x = s.values()[6] - f.values()[6];
    assert_eq!(real.rahr[0], x);
    assert_eq!(real.no_hedge[0], s.values()[6]);
}

#[test]
fn in_sample_mvhr_never_adds_variance() {
    for seed in 0..20 {
        let (s, f) = market(300, 100 + seed, 0.001);
        let beta = mvhr_values(s.values(), f.values()).unwrap().beta;
        for side in HedgerSide::BOTH {
            let hedged: Vec<f64> = s
                .values()
                .iter()
                .zip(f.values())
                .map(|(rs, rf)| rahr::hedge::portfolio_return(*rs, *rf, beta, side))
                .collect();
            let raw: Vec<f64> = s.values().iter().map(|rs| side.spot_sign() * rs).collect();
            assert!(sample_sd(&hedged) <= sample_sd(&raw) + 1e-10);
        }
    }
}

#[test]
fn short_hedge_pays_drift_and_cuts_risk() {
    let cfg = FitConfig {
        restarts: 0,
        ..FitConfig::default()
    };
    let spec = WindowSpec {
        step: 4,
        ..WindowSpec::new(260)
    };
    let (s, f) = market(700, 77, 0.004);
    let path = rolling_hedges(&s, &f, HedgerSide::Short, &spec, &cfg).unwrap();
    let rows = score_strategies(&s, &f, &path).unwrap();
    let (mvhr, none) = (rows[1], rows[2]);
    assert!(none.mean > mvhr.mean, "{} vs {}", none.mean, mvhr.mean);
    assert!(mvhr.sd < none.sd);
}
