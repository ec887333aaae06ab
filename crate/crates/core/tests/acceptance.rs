//! Acceptance criteria A1–A9. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p edgeprovision --test acceptance -- --nocapture`.

use std::sync::OnceLock;

use edgeprovision::analytic::{self, AirInterface, DeploymentConfig, InferenceWorkload, Scenario};
use edgeprovision::experiments::{self, Axis, Metric, SweepSpec};
use edgeprovision::validation::{self, ValidationConfig, ValidationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Reference values from a 40-digit evaluation.
const PI_4: f64 = std::f64::consts::FRAC_PI_4;
const AVG_MSE_REF: f64 = 1.2720309361170019;
const EDGE_MSE_REF: f64 = 1.3676052489742913;
const CRITICAL_DENSITY_REF: f64 = 8.885272668618394;

fn report(id: &str, pass: bool, detail: String) {
    println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Scenario with `ν̄·r_min = 1` at `λ̂ = 1`.
fn unit_loaded(mc: f64, md: f64) -> Scenario {
    Scenario::normalized(1.0, 1.0 / analytic::mean_load_for_ratio(1.0), mc, md).unwrap()
}

#[test]
fn a1_exact_values() {
    let c1 = analytic::aux_c(1.0).unwrap();
    let m = analytic::avg_mse(&unit_loaded(1.0, 1.5));
    let e = analytic::critical_edge_mse(&unit_loaded(1.0, 1.5), 1.2).unwrap();
    let w = InferenceWorkload::from_rate(1.0, 1.0, 1.5).unwrap();
    let lc = analytic::critical_density(&w, &AirInterface::normalized(), 1.0, 1.3).unwrap();

    let errs = [rel(c1, PI_4), rel(m, AVG_MSE_REF), rel(e, EDGE_MSE_REF), rel(lc, CRITICAL_DENSITY_REF)];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    report(
        "A1",
        worst <= 1e-6,
        format!("C(1) = {c1}, avg MSE = {m}, m_d,max = {e}, λ_c = {lc}; worst relative error {worst:.2e} (tolerance 1e-6)"),
    );
}

#[test]
fn a2_bounds_and_limits() {
    let (mc, md) = (1.0, 1.5);
    let lambda_hats = Axis::LambdaHat.default_grid().unwrap();
    let rates = Axis::RMin.default_grid().unwrap();
    let mut violations = Vec::new();
    for &lh in &lambda_hats {
        for &r in &rates {
            let s = Scenario::normalized(lh, r, mc, md).unwrap();
            let asy = analytic::asymptotic_mse(&s.workload, &s.air);
            let avg = analytic::avg_mse(&s);
            if !(mc <= asy && asy <= avg && avg <= md) {
                violations.push(format!("λ̂ = {lh}, r_min = {r}: m_asy = {asy}, m̄ = {avg}"));
            }
        }
    }
    let tol = 1e-3 * (md - mc);
    let asy_at = |r: f64| {
        let w = InferenceWorkload::from_rate(r, mc, md).unwrap();
        analytic::asymptotic_mse(&w, &AirInterface::normalized())
    };
    let low = asy_at(1e-4) - mc;
    let high = md - asy_at(60.0);
    report(
        "A2",
        violations.is_empty() && low <= tol && high <= tol,
        format!(
            "{} of {} grid points out of order; m_asy − m_c at r_min = 1e-4: {low:.3e}; m_d − m_asy at r_min = 60: {high:.3e} (tolerance {tol:.1e})",
            violations.len(),
            lambda_hats.len() * rates.len()
        ),
    );
}

#[test]
fn a3_inverse_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.random_range(lo.ln()..hi.ln())).exp();
    let mut worst_density = 0.0_f64;
    let mut worst_edge = 0.0_f64;
    for _ in 0..100 {
        let lambda_hat = log_uniform(&mut rng, 0.1, 100.0);
        let r_min = log_uniform(&mut rng, 0.01, 3.0);
        let mc = rng.random_range(0.5..2.0);
        let md = mc * rng.random_range(1.1..3.0);
        let lambda_dev = log_uniform(&mut rng, 0.1, 10.0);
        let w = InferenceWorkload::from_rate(r_min, mc, md).unwrap();
        let air = AirInterface::normalized();

        let asy = analytic::asymptotic_mse(&w, &air);
        let target = asy + (md - asy) * rng.random_range(0.05..0.95);
        let lc = analytic::critical_density(&w, &air, lambda_dev, target).unwrap();
        let at_lc = Scenario::new(DeploymentConfig::new(lc, lambda_dev).unwrap(), w, air).unwrap();
        worst_density = worst_density.max(rel(analytic::avg_mse(&at_lc), target));

        let s = Scenario::normalized(lambda_hat, r_min, mc, md).unwrap();
        let target = mc * rng.random_range(1.01..2.0);
        let edge = analytic::critical_edge_mse(&s, target).unwrap();
        let mut with_edge = s;
        with_edge.workload.mse_edge = edge;
        worst_edge = worst_edge.max(rel(analytic::avg_mse(&with_edge), target));
    }
    report(
        "A3",
        worst_density <= 1e-6 && worst_edge <= 1e-6,
        format!(
            "100 random pairs; worst relative error via λ_c {worst_density:.2e}, via m_d,max {worst_edge:.2e} (tolerance 1e-6)"
        ),
    );
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

#[test]
fn a4_monotonicity() {
    let (mc, md) = (1.0, 1.5);
    let lambda_hats = Axis::LambdaHat.default_grid().unwrap();
    let rates = Axis::RMin.default_grid().unwrap();
    let mut failures = Vec::new();

    for &r in &rates {
        let v: Vec<f64> = lambda_hats
            .iter()
            .map(|&lh| analytic::avg_mse(&Scenario::normalized(lh, r, mc, md).unwrap()))
            .collect();
        if !non_increasing(&v) {
            failures.push(format!("avg MSE vs λ̂ at r_min = {r}"));
        }
        let v: Vec<f64> = lambda_hats
            .iter()
            .map(|&lh| {
                analytic::critical_edge_mse(&Scenario::normalized(lh, r, mc, md).unwrap(), 1.2).unwrap()
            })
            .collect();
        if !non_decreasing(&v) {
            failures.push(format!("m_d,max vs λ̂ at r_min = {r}"));
        }
    }
    for &lh in &lambda_hats {
        let v: Vec<f64> = rates
            .iter()
            .map(|&r| analytic::avg_mse(&Scenario::normalized(lh, r, mc, md).unwrap()))
            .collect();
        if !non_decreasing(&v) {
            failures.push(format!("avg MSE vs r_min at λ̂ = {lh}"));
        }
        let v: Vec<f64> = rates
            .iter()
            .map(|&r| {
                analytic::critical_edge_mse(&Scenario::normalized(lh, r, mc, md).unwrap(), 1.2).unwrap()
            })
            .collect();
        if !non_increasing(&v) {
            failures.push(format!("m_d,max vs r_min at λ̂ = {lh}"));
        }
    }

    // λ_c over r_min: non-decreasing while feasible, and once infeasible it stays so.
    let air = AirInterface::normalized();
    for &mt in &[1.05, 1.2, 1.3, 1.45] {
        let v: Vec<Option<f64>> = rates
            .iter()
            .map(|&r| analytic::critical_density(&InferenceWorkload::from_rate(r, mc, md).unwrap(), &air, 1.0, mt).ok())
            .collect();
        let feasible: Vec<f64> = v.iter().map_while(|x| *x).collect();
        if !non_decreasing(&feasible) || v[feasible.len()..].iter().any(Option::is_some) {
            failures.push(format!("λ_c vs r_min at m_t = {mt}"));
        }
    }
    // λ_c over m_t on a grid spanning (m_asy, m_d].
    for &r in &rates {
        let w = InferenceWorkload::from_rate(r, mc, md).unwrap();
        let asy = analytic::asymptotic_mse(&w, &air);
        if md - asy < 1e-9 {
            continue;
        }
        let targets = experiments::linear_grid(asy + (md - asy) / 31.0, md, 31);
        let v: Vec<f64> = targets
            .iter()
            .map(|&mt| analytic::critical_density(&w, &air, 1.0, mt).unwrap())
            .collect();
        if !non_increasing(&v) {
            failures.push(format!("λ_c vs m_t at r_min = {r}"));
        }
    }

    report(
        "A4",
        failures.is_empty(),
        if failures.is_empty() {
            "avg MSE, λ_c and m_d,max monotone on the default grids".into()
        } else {
            format!("not monotone: {}", failures.join("; "))
        },
    );
}

fn validation_report() -> &'static ValidationReport {
    static REPORT: OnceLock<ValidationReport> = OnceLock::new();
    REPORT.get_or_init(|| validation::run_validation(&ValidationConfig::default()).unwrap())
}

fn criterion_line(ids: &[&str]) -> (bool, String) {
    let rep = validation_report();
    let mut pass = true;
    let mut parts = Vec::new();
    for id in ids {
        let c = rep.criteria.iter().find(|c| c.id == *id).expect("criterion present");
        pass &= c.pass;
        parts.push(format!("{} = {:.5} (threshold {})", c.description, c.value, c.threshold));
    }
    (pass, parts.join("; "))
}

#[test]
fn a5_delay_law() {
    let (pass, detail) = criterion_line(&["A5"]);
    report("A5", pass, format!("{detail}; {} trials", validation_report().trials));
}

#[test]
fn a6_cloud_use_and_mse() {
    let (pass, detail) = criterion_line(&["A6-cloud-use", "A6-mse"]);
    report("A6", pass, detail);
}

#[test]
fn a7_mean_load() {
    let (pass, detail) = criterion_line(&["A7-lambda_hat-0.5", "A7-lambda_hat-1", "A7-lambda_hat-2"]);
    report("A7", pass, detail);
}

#[test]
fn a8_determinism() {
    let first = validation_report().to_json();
    let again = validation::run_validation(&ValidationConfig::default()).unwrap().to_json();
    let other_workers = validation::run_validation(&ValidationConfig {
        workers: Some(3),
        ..ValidationConfig::default()
    })
    .unwrap()
    .to_json();
    report(
        "A8",
        first == again && first == other_workers,
        format!(
            "repeat run identical: {}; 3-worker run identical: {} ({} bytes)",
            first == again,
            first == other_workers,
            first.len()
        ),
    );
}

#[test]
fn a9_round_trips() {
    let base = Scenario::normalized(1.0, 0.5, 1.0, 1.5).unwrap();
    let mut failures = Vec::new();
    for axis in [Axis::LambdaHat, Axis::RMin] {
        let mut spec = SweepSpec::new(
            base,
            axis,
            axis.default_grid().unwrap(),
            vec![
                Metric::AvgMse,
                Metric::AsymptoticMse,
                Metric::CriticalDensity,
                Metric::CriticalEdgeMse,
                Metric::CloudUseProb,
            ],
        );
        spec.mse_target = Some(1.2);
        let res = experiments::run_sweep(&spec).unwrap();
        let text = experiments::to_csv_string(&res);
        let parsed = experiments::parse_csv(&text).unwrap();
        if experiments::to_csv_string(&parsed) != text || parsed.rows.len() != res.rows.len() {
            failures.push(format!("CSV emit→parse→emit differs for axis {}", axis.name()));
        }
    }

    let mut worst = 0.0_f64;
    for k in 0..=100_000 {
        let y = k as f64 * 1e-3;
        let back = analytic::aux_c(analytic::inverse_c(y).unwrap()).unwrap();
        worst = worst.max((back - y).abs());
    }
    if worst > 1e-10 {
        failures.push(format!("C(C⁻¹(y)) off by {worst:.2e}"));
    }
    report(
        "A9",
        failures.is_empty(),
        format!(
            "CSV round trip {}; worst |C(C⁻¹(y)) − y| on [0, 100] = {worst:.2e} (tolerance 1e-10)",
            if failures.iter().any(|f| f.starts_with("CSV")) { "differs" } else { "identical" }
        ),
    );
}
