//! Closed-form delay and accuracy model for delay-gated edge/cloud inference.
//!
//! A device runs a local (edge) model and, in parallel, ships its input to a
//! cloud model over the uplink. The cloud answer is used when it arrives
//! within the delay budget. With APs and devices scattered as independent
//! Poisson processes, pathloss-inversion uplink power control and pathloss
//! exponent 4, the probability that the cloud answer is in time is
//! `exp(-C(T(ν̄·r_min)))`, where
//!
//! * `C(x) = √x·atan(√x)` ([`aux_c`]),
//! * `T(x) = 2^x − 1` ([`aux_t`]),
//! * `ν̄ = 1 + 1.28/λ̂` is the mean serving-cell load ([`mean_load`]),
//! * `r_min = q / (b·(d_t − d_c))` is the inference rate ([`inference_rate`]).
//!
//! Everything else in this module follows from that expression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect;

/// Coefficient in the mean-load approximation `ν̄ = 1 + 1.28/λ̂`.
pub const LOAD_COEFFICIENT: f64 = 1.28;

/// Spatial side of the model: AP and device densities (per unit area).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConfig {
    pub lambda_ap: f64,
    pub lambda_dev: f64,
}

impl DeploymentConfig {
    pub fn new(lambda_ap: f64, lambda_dev: f64) -> Result<Self> {
        let d = Self {
            lambda_ap,
            lambda_dev,
        };
        into_result(d, d.violations())
    }

    /// Deployment with unit device density and the given AP/device ratio.
    pub fn from_ratio(lambda_hat: f64) -> Result<Self> {
        Self::new(lambda_hat, 1.0)
    }

    /// `λ̂ = λ_ap / λ_dev`.
    pub fn lambda_hat(&self) -> f64 {
        self.lambda_ap / self.lambda_dev
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        positive(&mut v, "deployment.lambda_ap", self.lambda_ap);
        positive(&mut v, "deployment.lambda_dev", self.lambda_dev);
        if v.is_empty() {
            let r = self.lambda_hat();
            if !(r.is_finite() && r > 0.0) {
                v.push(format!("deployment: lambda_ap/lambda_dev = {r} must be finite and > 0"));
            }
        }
        v
    }
}

/// Application side: payload, delay budget, cloud compute delay and the two
/// model MSEs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceWorkload {
    /// Cumulative uplink + downlink payload in bits.
    pub payload_bits: f64,
    /// Delay budget `d_t` in seconds.
    pub delay_budget: f64,
    /// Fixed cloud compute delay `d_c` in seconds.
    pub compute_delay: f64,
    pub mse_cloud: f64,
    pub mse_edge: f64,
}

impl InferenceWorkload {
    /// Edge MSE assumed when none is given: `m_d = 1.5·m_c`.
    pub const DEFAULT_EDGE_RATIO: f64 = 1.5;

    pub fn new(
        payload_bits: f64,
        delay_budget: f64,
        compute_delay: f64,
        mse_cloud: f64,
        mse_edge: f64,
    ) -> Result<Self> {
        let w = Self {
            payload_bits,
            delay_budget,
            compute_delay,
            mse_cloud,
            mse_edge,
        };
        into_result(w, w.violations())
    }

    /// Workload expressed directly through its inference rate, in
    /// normalised units (`b = 1`, `d_t = 1`, `d_c = 0`, so `q = r_min`).
    /// Pair it with [`AirInterface::normalized`].
    pub fn from_rate(r_min: f64, mse_cloud: f64, mse_edge: f64) -> Result<Self> {
        Self::new(r_min, 1.0, 0.0, mse_cloud, mse_edge)
    }

    /// Remaining time after cloud compute, `d_t − d_c`.
    pub fn transfer_window(&self) -> f64 {
        self.delay_budget - self.compute_delay
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        positive(&mut v, "workload.q", self.payload_bits);
        finite(&mut v, "workload.d_t", self.delay_budget);
        finite(&mut v, "workload.d_c", self.compute_delay);
        positive(&mut v, "workload.m_c", self.mse_cloud);
        finite(&mut v, "workload.m_d", self.mse_edge);
        if self.compute_delay < 0.0 {
            v.push(format!("workload.d_c = {} must be >= 0", self.compute_delay));
        }
        if !(self.delay_budget > self.compute_delay) {
            v.push(format!(
                "workload.d_t = {} must exceed workload.d_c = {}",
                self.delay_budget, self.compute_delay
            ));
        }
        if self.mse_edge < self.mse_cloud {
            v.push(format!(
                "workload.m_d = {} must be >= workload.m_c = {}",
                self.mse_edge, self.mse_cloud
            ));
        }
        v
    }
}

/// Link side: uplink bandwidth and composite SNR `p_u·L_0/N_0`.
/// An infinite SNR means the uplink is interference-limited.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AirInterface {
    pub bandwidth_hz: f64,
    pub snr: f64,
}

impl AirInterface {
    pub fn new(bandwidth_hz: f64, snr: f64) -> Result<Self> {
        let a = Self { bandwidth_hz, snr };
        into_result(a, a.violations())
    }

    pub fn interference_limited(bandwidth_hz: f64) -> Result<Self> {
        Self::new(bandwidth_hz, f64::INFINITY)
    }

    /// Unit bandwidth, no noise. Matches [`InferenceWorkload::from_rate`].
    pub fn normalized() -> Self {
        Self {
            bandwidth_hz: 1.0,
            snr: f64::INFINITY,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        positive(&mut v, "air.b", self.bandwidth_hz);
        if !(self.snr > 0.0) {
            v.push(format!("air.snr = {} must be > 0", self.snr));
        }
        v
    }
}

/// A complete, validated model input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub deployment: DeploymentConfig,
    pub workload: InferenceWorkload,
    pub air: AirInterface,
}

impl Scenario {
    pub fn new(deployment: DeploymentConfig, workload: InferenceWorkload, air: AirInterface) -> Result<Self> {
        let s = Self {
            deployment,
            workload,
            air,
        };
        into_result(s, s.violations())
    }

    /// Normalised scenario described only by `λ̂`, `r_min` and the MSEs.
    pub fn normalized(lambda_hat: f64, r_min: f64, mse_cloud: f64, mse_edge: f64) -> Result<Self> {
        Self::new(
            DeploymentConfig::from_ratio(lambda_hat)?,
            InferenceWorkload::from_rate(r_min, mse_cloud, mse_edge)?,
            AirInterface::normalized(),
        )
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = self.deployment.violations();
        v.extend(self.workload.violations());
        v.extend(self.air.violations());
        if v.is_empty() {
            let r = rate_of(&self.workload, &self.air);
            if !(r.is_finite() && r > 0.0) {
                v.push(format!("inference rate q/(b·(d_t − d_c)) = {r} must be finite and > 0"));
            }
        }
        v
    }

    /// `r_min` of this scenario.
    pub fn inference_rate(&self) -> f64 {
        rate_of(&self.workload, &self.air)
    }

    /// `ν̄·r_min`, the only combination the cloud-use probability depends on.
    pub fn loaded_rate(&self) -> f64 {
        mean_load(&self.deployment) * self.inference_rate()
    }
}

fn positive(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x.is_finite() && x > 0.0) {
        v.push(format!("{name} = {x} must be finite and > 0"));
    }
}

fn finite(v: &mut Vec<String>, name: &str, x: f64) {
    if !x.is_finite() {
        v.push(format!("{name} = {x} must be finite"));
    }
}

fn into_result<T>(value: T, violations: Vec<String>) -> Result<T> {
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(Error::Validation(violations))
    }
}

fn rate_of(w: &InferenceWorkload, air: &AirInterface) -> f64 {
    w.payload_bits / (air.bandwidth_hz * w.transfer_window())
}

fn check_nonneg(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, x, "must be finite and >= 0"))
    }
}

// Unchecked forms; both accept +∞ and map it to +∞.
fn c_of(x: f64) -> f64 {
    let r = x.sqrt();
    if r == 0.0 {
        0.0
    } else {
        r * r.atan()
    }
}

fn t_of(x: f64) -> f64 {
    if x < 1.0 {
        (x * std::f64::consts::LN_2).exp_m1()
    } else {
        x.exp2() - 1.0
    }
}

/// `C(x) = √x·atan(√x)`, strictly increasing from `C(0) = 0`.
pub fn aux_c(x: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    Ok(c_of(x))
}

/// `T(x) = 2^x − 1`, the SINR needed for spectral efficiency `x` bit/s/Hz.
pub fn aux_t(x: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    Ok(t_of(x))
}

/// Inverse of [`aux_c`].
///
/// Solves `u·atan(u) = y` for `u = √x` by bisection on a bracket that starts
/// at `[0, max(10, y + 2)]` and doubles until it contains the root.
pub fn inverse_c(y: f64) -> Result<f64> {
    check_nonneg("y", y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    let g = |u: f64| u * u.atan() - y;
    let mut hi = f64::max(10.0, y + 2.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    // Absolute 1e-13 on u, tightened to relative when u ~ √y is small.
    let tol = 1e-13 * y.sqrt().min(1.0);
    let u = bisect(g, 0.0, hi, tol)?;
    Ok(u * u)
}

/// `r_min = q / (b·(d_t − d_c))`.
pub fn inference_rate(s: &Scenario) -> Result<f64> {
    if !(s.workload.delay_budget > s.workload.compute_delay) {
        return Err(Error::InvalidScenario(format!(
            "delay budget d_t = {} must exceed compute delay d_c = {}",
            s.workload.delay_budget, s.workload.compute_delay
        )));
    }
    Ok(s.inference_rate())
}

/// Mean serving-cell load `ν̄ = 1 + 1.28/λ̂`.
pub fn mean_load(d: &DeploymentConfig) -> f64 {
    mean_load_for_ratio(d.lambda_hat())
}

pub fn mean_load_for_ratio(lambda_hat: f64) -> f64 {
    1.0 + LOAD_COEFFICIENT / lambda_hat
}

/// `exp(−C(T(x)))` for `x = ν̄·r_min ≥ 0`: probability that the uplink
/// spectral efficiency share reaches `x`.
pub fn cloud_probability_at(loaded_rate: f64) -> f64 {
    (-c_of(t_of(loaded_rate))).exp()
}

/// CDF of the cloud inference delay, `P(D ≤ d)`, for `d > d_c`.
pub fn delay_cdf(s: &Scenario, d: f64) -> Result<f64> {
    let dc = s.workload.compute_delay;
    if d.is_nan() || d <= dc {
        return Err(Error::domain("d", d, "delay CDF is defined only for d > d_c"));
    }
    if d == f64::INFINITY {
        return Ok(1.0);
    }
    let scaled = s.loaded_rate() * s.workload.transfer_window() / (d - dc);
    Ok(cloud_probability_at(scaled))
}

/// Probability that the cloud output arrives within the budget,
/// i.e. [`delay_cdf`] at `d = d_t`.
pub fn cloud_use_probability(s: &Scenario) -> f64 {
    cloud_probability_at(s.loaded_rate())
}

/// `m_d − (m_d − m_c)·p`; always within `[m_c, m_d]` for `p ∈ [0, 1]`.
pub fn mse_given_cloud_probability(w: &InferenceWorkload, p: f64) -> f64 {
    w.mse_edge - (w.mse_edge - w.mse_cloud) * p
}

/// Average output MSE under delay-gated selection.
pub fn avg_mse(s: &Scenario) -> f64 {
    mse_given_cloud_probability(&s.workload, cloud_use_probability(s))
}

/// Average MSE in the limit of infinite AP density (`ν̄ → 1`).
pub fn asymptotic_mse(w: &InferenceWorkload, air: &AirInterface) -> f64 {
    mse_given_cloud_probability(w, cloud_probability_at(rate_of(w, air)))
}

/// Minimum AP density for which the average MSE does not exceed `mse_target`.
///
/// Returns `0` when `mse_target ≥ m_d`, since any density meets it. Fails
/// with [`Error::InfeasibleTarget`] when `mse_target` is at or below the
/// asymptotic MSE.
pub fn critical_density(
    w: &InferenceWorkload,
    air: &AirInterface,
    lambda_dev: f64,
    mse_target: f64,
) -> Result<f64> {
    if !(lambda_dev.is_finite() && lambda_dev > 0.0) {
        return Err(Error::domain("lambda_dev", lambda_dev, "must be finite and > 0"));
    }
    if mse_target.is_nan() {
        return Err(Error::domain("mse_target", mse_target, "must be a number"));
    }
    if mse_target >= w.mse_edge {
        return Ok(0.0);
    }
    let m_asy = asymptotic_mse(w, air);
    let infeasible = Error::InfeasibleTarget {
        target: mse_target,
        asymptotic: m_asy,
    };
    if mse_target <= m_asy {
        return Err(infeasible);
    }

    let gain = ((w.mse_edge - w.mse_cloud) / (w.mse_edge - mse_target)).ln();
    let sinr = inverse_c(gain)?;
    let spectral = sinr.ln_1p() / std::f64::consts::LN_2;
    let bracket = spectral / rate_of(w, air) - 1.0;
    if !(bracket > 0.0) {
        return Err(infeasible);
    }
    Ok(LOAD_COEFFICIENT * lambda_dev / bracket)
}

/// Largest edge-model MSE for which the average MSE still meets
/// `mse_target`. The scenario's own `mse_edge` is ignored.
pub fn critical_edge_mse(s: &Scenario, mse_target: f64) -> Result<f64> {
    let m_c = s.workload.mse_cloud;
    if mse_target.is_nan() || mse_target < m_c {
        return Err(Error::domain(
            "mse_target",
            mse_target,
            "a target below the cloud MSE is unreachable",
        ));
    }
    let p = cloud_use_probability(s);
    if p >= 1.0 {
        return Err(Error::Degenerate(
            "cloud output is always in time (ν̄·r_min = 0); any edge MSE meets the target".into(),
        ));
    }
    Ok(m_c * (mse_target / m_c - p) / (1.0 - p))
}
