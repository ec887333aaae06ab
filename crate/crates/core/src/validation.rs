//! Simulator-versus-closed-form agreement report.
//!
//! The closed-form delay law is derived for a network in which every AP has
//! an uplink transmitter on the tagged resource block and the serving cell
//! is loaded at its mean. The delay-law and cloud-use checks therefore run
//! the simulator under those two conditions, which isolates the remaining
//! approximation: the uplink SINR distribution. The mean-load checks use the
//! realised load. A fully realistic run (silent empty cells, realised load)
//! is reported alongside as a diagnostic without a pass/fail verdict.

use serde::Serialize;

use crate::analytic::{self, AirInterface, DeploymentConfig, InferenceWorkload, Scenario};
use crate::error::Result;
use crate::geomsim::{self, LoadModel, Scheduling, SimConfig, SimSummary};
use crate::numerics::ks_distance_within;

pub const KS_THRESHOLD: f64 = 0.05;
pub const CLOUD_USE_THRESHOLD: f64 = 0.03;
pub const LOAD_RELATIVE_THRESHOLD: f64 = 0.05;
pub const LOAD_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

/// Half-side of the torus window; 256 expected APs at unit AP density.
const WINDOW_HALF_SIDE: f64 = 8.0;
const DELAY_BUDGET: f64 = 1.0;
const COMPUTE_DELAY: f64 = 0.25;
const BANDWIDTH: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationConfig {
    pub seed: u64,
    pub trials: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10_000,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Criterion {
    fn at_most(id: &str, description: String, value: f64, threshold: f64) -> Self {
        Self {
            id: id.into(),
            description,
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementStats {
    pub scheduling: Scheduling,
    pub load_model: LoadModel,
    pub ks_distance: f64,
    pub cloud_use_simulated: f64,
    pub cloud_use_stderr: f64,
    pub cloud_use_closed_form: f64,
    pub mse_simulated: f64,
    pub mse_closed_form: f64,
    pub mean_load_simulated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub trials: u64,
    pub lambda_hat: f64,
    pub loaded_rate: f64,
    pub criteria: Vec<Criterion>,
    pub model_conditions: AgreementStats,
    pub realistic_network: AgreementStats,
    pub all_pass: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data") + "\n"
    }
}

/// Scenario of the agreement runs: λ̂ = 1, interference-limited, with the
/// inference rate chosen so that `ν̄·r_min = 1`.
pub fn agreement_scenario() -> Scenario {
    let deployment = DeploymentConfig::new(1.0, 1.0).expect("valid");
    let r_min = 1.0 / analytic::mean_load(&deployment);
    let window = DELAY_BUDGET - COMPUTE_DELAY;
    Scenario::new(
        deployment,
        InferenceWorkload::new(r_min * BANDWIDTH * window, DELAY_BUDGET, COMPUTE_DELAY, 1.0, 1.5).expect("valid"),
        AirInterface::interference_limited(BANDWIDTH).expect("valid"),
    )
    .expect("valid")
}

fn run(cfg: &SimConfig, workers: Option<usize>) -> Result<SimSummary> {
    match workers {
        Some(n) => geomsim::run_trials_with_workers(cfg, n),
        None => geomsim::run_trials(cfg),
    }
}

fn agreement(cfg: &SimConfig, workers: Option<usize>) -> Result<AgreementStats> {
    let s = cfg.scenario;
    let sim = run(cfg, workers)?;
    let dc = s.workload.compute_delay;
    let model = |d: f64| if d <= dc { 0.0 } else { analytic::delay_cdf(&s, d).unwrap_or(0.0) };
    Ok(AgreementStats {
        scheduling: cfg.scheduling,
        load_model: cfg.load_model,
        ks_distance: ks_distance_within(&sim.delay_samples, model, dc, 10.0 * s.workload.delay_budget),
        cloud_use_simulated: sim.cloud_use_fraction,
        cloud_use_stderr: sim.cloud_use_stderr,
        cloud_use_closed_form: analytic::cloud_use_probability(&s),
        mse_simulated: sim.mse_estimate,
        mse_closed_form: analytic::avg_mse(&s),
        mean_load_simulated: sim.mean_load,
    })
}

pub fn run_validation(cfg: &ValidationConfig) -> Result<ValidationReport> {
    let scenario = agreement_scenario();
    let mut sim = SimConfig::new(scenario);
    sim.window_radius = WINDOW_HALF_SIDE;
    sim.trials = cfg.trials;
    sim.master_seed = cfg.seed;

    let model_conditions = agreement(
        &SimConfig {
            scheduling: Scheduling::FullBuffer,
            load_model: LoadModel::Mean,
            ..sim
        },
        cfg.workers,
    )?;
    let realistic_network = agreement(&sim, cfg.workers)?;

    let spread = scenario.workload.mse_edge - scenario.workload.mse_cloud;
    let mut criteria = vec![
        Criterion::at_most(
            "A5",
            "KS distance between simulated cloud-delay CDF and closed form on (d_c, 10·d_t]".into(),
            model_conditions.ks_distance,
            KS_THRESHOLD,
        ),
        Criterion::at_most(
            "A6-cloud-use",
            "|simulated cloud-use fraction − exp(−C(T(ν̄·r_min)))|".into(),
            (model_conditions.cloud_use_simulated - model_conditions.cloud_use_closed_form).abs(),
            CLOUD_USE_THRESHOLD,
        ),
        Criterion::at_most(
            "A6-mse",
            "|simulated MSE − closed-form average MSE| / (m_d − m_c)".into(),
            (model_conditions.mse_simulated - model_conditions.mse_closed_form).abs() / spread,
            CLOUD_USE_THRESHOLD,
        ),
    ];

    for (k, &ratio) in LOAD_RATIOS.iter().enumerate() {
        let deployment = DeploymentConfig::new(1.0, 1.0 / ratio)?;
        let mut load_cfg = sim;
        load_cfg.scenario.deployment = deployment;
        // Distinct streams from the agreement runs.
        load_cfg.master_seed = cfg.seed.wrapping_add(k as u64 + 1);
        let measured = run(&load_cfg, cfg.workers)?.mean_load;
        let expected = analytic::mean_load(&deployment);
        criteria.push(Criterion::at_most(
            &format!("A7-lambda_hat-{ratio}"),
            format!("relative error of simulated mean load vs 1 + 1.28/λ̂ at λ̂ = {ratio} (expected {expected})"),
            (measured - expected).abs() / expected,
            LOAD_RELATIVE_THRESHOLD,
        ));
    }

    let all_pass = criteria.iter().all(|c| c.pass);
    Ok(ValidationReport {
        seed: cfg.seed,
        trials: cfg.trials,
        lambda_hat: scenario.deployment.lambda_hat(),
        loaded_rate: scenario.loaded_rate(),
        criteria,
        model_conditions,
        realistic_network,
        all_pass,
    })
}
