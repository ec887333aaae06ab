use edgeprovision::analytic::{self, AirInterface, InferenceWorkload, Scenario};
use edgeprovision::experiments::{self, format_sig12, Axis, Metric, RowStatus, SweepResult, SweepRow};
use edgeprovision::numerics::{EmpiricalCdf, RngStream};
use proptest::prelude::*;

fn lambda_hat() -> impl Strategy<Value = f64> {
    (-1.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn rate() -> impl Strategy<Value = f64> {
    (-2.0f64..1.0).prop_map(|e| 10f64.powf(e))
}

fn mse_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..5.0, 1.0f64..4.0).prop_map(|(mc, k)| (mc, mc * k))
}

proptest! {
    #[test]
    fn mse_ordering(lh in lambda_hat(), r in rate(), (mc, md) in mse_pair()) {
        let s = Scenario::normalized(lh, r, mc, md).unwrap();
        let asy = analytic::asymptotic_mse(&s.workload, &s.air);
        let avg = analytic::avg_mse(&s);
        prop_assert!(mc <= asy && asy <= avg && avg <= md);
    }

    #[test]
    fn denser_aps_never_hurt(lh in lambda_hat(), k in 1.0f64..10.0, r in rate(), (mc, md) in mse_pair()) {
        let sparse = Scenario::normalized(lh, r, mc, md).unwrap();
        let dense = Scenario::normalized(lh * k, r, mc, md).unwrap();
        prop_assert!(analytic::avg_mse(&dense) <= analytic::avg_mse(&sparse));
    }

    #[test]
    fn delay_cdf_is_a_cdf(lh in lambda_hat(), r in rate(), a in 1e-3f64..50.0, b in 1e-3f64..50.0) {
        let s = Scenario::normalized(lh, r, 1.0, 1.5).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = analytic::delay_cdf(&s, lo).unwrap();
        let f_hi = analytic::delay_cdf(&s, hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&f_lo) && f_lo <= f_hi && f_hi <= 1.0);
    }

    #[test]
    fn inverse_c_round_trip(y in 0.0f64..1e4) {
        let x = analytic::inverse_c(y).unwrap();
        let back = analytic::aux_c(x).unwrap();
        prop_assert!((back - y).abs() <= 1e-10 * y.max(1.0));
    }

    #[test]
    fn critical_density_meets_target(r in rate(), (mc, md) in mse_pair(), frac in 0.02f64..0.98, lu in 0.1f64..10.0) {
        let w = InferenceWorkload::from_rate(r, mc, md).unwrap();
        let air = AirInterface::normalized();
        let asy = analytic::asymptotic_mse(&w, &air);
        prop_assume!(md - asy > 1e-6 * md);
        let target = asy + (md - asy) * frac;
        let lc = analytic::critical_density(&w, &air, lu, target).unwrap();
        let s = Scenario::new(analytic::DeploymentConfig::new(lc, lu).unwrap(), w, air).unwrap();
        prop_assert!((analytic::avg_mse(&s) - target).abs() <= 1e-9 * target);
    }

    #[test]
    fn targets_below_asymptote_are_infeasible(r in rate(), (mc, md) in mse_pair(), frac in 0.0f64..1.0) {
        let w = InferenceWorkload::from_rate(r, mc, md).unwrap();
        let air = AirInterface::normalized();
        let asy = analytic::asymptotic_mse(&w, &air);
        let target = mc + (asy - mc) * frac;
        let infeasible = matches!(
            analytic::critical_density(&w, &air, 1.0, target),
            Err(edgeprovision::Error::InfeasibleTarget { .. })
        );
        prop_assert!(infeasible);
    }

    #[test]
    fn sig12_parses_back_stably(x in prop::num::f64::NORMAL) {
        let s = format_sig12(x);
        let y: f64 = s.parse().unwrap();
        prop_assert_eq!(format_sig12(y), s);
        prop_assert!((y - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(
        (1e-3f64..1e3, prop::option::of(-1e6f64..1e6), prop::option::of(0.0f64..1.0), 0usize..3),
        1..20,
    )) {
        let res = SweepResult {
            axis: Axis::RMin,
            rows: rows
                .into_iter()
                .map(|(v, a, se, st)| SweepRow {
                    axis_value: v,
                    metric: Metric::AvgMse,
                    analytic: a,
                    simulated: a.map(|x| x + 1.0),
                    sim_stderr: se,
                    status: [RowStatus::Ok, RowStatus::Infeasible, RowStatus::Invalid][st],
                })
                .collect(),
        };
        let text = experiments::to_csv_string(&res);
        let parsed = experiments::parse_csv(&text).unwrap();
        prop_assert_eq!(experiments::to_csv_string(&parsed), text);
        for (a, b) in res.rows.iter().zip(&parsed.rows) {
            prop_assert_eq!(format_sig12(a.axis_value), format_sig12(b.axis_value));
            prop_assert_eq!(a.analytic.map(format_sig12), b.analytic.map(format_sig12));
            prop_assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn empirical_cdf_is_monotone(mut xs in prop::collection::vec(-1e3f64..1e3, 1..200), q in -2e3f64..2e3) {
        let cdf = EmpiricalCdf::new(xs.clone()).unwrap();
        xs.sort_by(f64::total_cmp);
        let below = xs.iter().filter(|&&x| x <= q).count() as f64 / xs.len() as f64;
        prop_assert_eq!(cdf.eval(q), below);
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), id in any::<u64>()) {
        let mut a = RngStream::new(seed, id);
        let mut b = RngStream::new(seed, id);
        for _ in 0..8 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }
}
