//! Parameter sweeps over the closed-form model, optionally paired with
//! simulator estimates, plus the spec-file and CSV formats around them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, AirInterface, DeploymentConfig, InferenceWorkload, Scenario};
use crate::error::{Error, Result};
use crate::geomsim::{self, Boundary, LoadModel, Scheduling, Shadowing, SimConfig, SimSummary};

pub const CSV_HEADER: &str = "axis,axis_value,metric,analytic,simulated,sim_stderr,status";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    LambdaHat,
    RMin,
    MseTarget,
    MseEdgeRatio,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::LambdaHat, Axis::RMin, Axis::MseTarget, Axis::MseEdgeRatio];

    pub fn name(self) -> &'static str {
        match self {
            Axis::LambdaHat => "lambda_hat",
            Axis::RMin => "r_min",
            Axis::MseTarget => "mse_target",
            Axis::MseEdgeRatio => "mse_edge_ratio",
        }
    }

    /// Log-spaced default grid, where one exists.
    pub fn default_grid(self) -> Option<Vec<f64>> {
        match self {
            Axis::LambdaHat => Some(log_grid(1e-1, 1e3, 31)),
            Axis::RMin => Some(log_grid(1e-2, 10.0, 31)),
            Axis::MseTarget | Axis::MseEdgeRatio => None,
        }
    }

    fn check_value(self, v: f64) -> Option<String> {
        let ok = match self {
            Axis::LambdaHat | Axis::RMin | Axis::MseTarget => v.is_finite() && v > 0.0,
            Axis::MseEdgeRatio => v.is_finite() && v >= 1.0,
        };
        (!ok).then(|| format!("sweep.grid value {v} is not valid for axis {}", self.name()))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axis `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    AvgMse,
    AsymptoticMse,
    CriticalDensity,
    CriticalEdgeMse,
    DelayCdfAt,
    CloudUseProb,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::AvgMse,
        Metric::AsymptoticMse,
        Metric::CriticalDensity,
        Metric::CriticalEdgeMse,
        Metric::DelayCdfAt,
        Metric::CloudUseProb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AvgMse => "avg_mse",
            Metric::AsymptoticMse => "asymptotic_mse",
            Metric::CriticalDensity => "critical_density",
            Metric::CriticalEdgeMse => "critical_edge_mse",
            Metric::DelayCdfAt => "delay_cdf_at",
            Metric::CloudUseProb => "cloud_use_prob",
        }
    }

    fn needs_target(self) -> bool {
        matches!(self, Metric::CriticalDensity | Metric::CriticalEdgeMse)
    }

    fn simulable(self) -> bool {
        matches!(self, Metric::AvgMse | Metric::DelayCdfAt | Metric::CloudUseProb)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

/// Simulator settings a sweep may override; unset fields keep the
/// [`SimConfig::new`] defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOverrides {
    pub trials: Option<u64>,
    pub window_radius: Option<f64>,
    pub seed: Option<u64>,
    pub shadowing: Option<Shadowing>,
    pub boundary: Option<Boundary>,
    pub scheduling: Option<Scheduling>,
    pub load_model: Option<LoadModel>,
}

impl SimOverrides {
    pub fn apply(&self, scenario: Scenario) -> SimConfig {
        let mut cfg = SimConfig::new(scenario);
        let boundary = self.boundary.unwrap_or(cfg.boundary);
        cfg.boundary = boundary;
        cfg.window_radius = self
            .window_radius
            .unwrap_or_else(|| geomsim::default_window_radius(scenario.deployment.lambda_ap, boundary));
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(s) = self.shadowing {
            cfg.shadowing = s;
        }
        if let Some(s) = self.scheduling {
            cfg.scheduling = s;
        }
        if let Some(l) = self.load_model {
            cfg.load_model = l;
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub outputs: Vec<Metric>,
    pub simulate: bool,
    pub sim: SimOverrides,
    /// Target MSE for the critical-density and critical-edge-MSE metrics.
    pub mse_target: Option<f64>,
    /// Query delay for `delay_cdf_at`; defaults to the delay budget.
    pub delay_at: Option<f64>,
}

impl SweepSpec {
    pub fn new(base: Scenario, axis: Axis, grid: Vec<f64>, outputs: Vec<Metric>) -> Self {
        Self {
            base,
            axis,
            grid,
            outputs,
            simulate: false,
            sim: SimOverrides::default(),
            mse_target: None,
            delay_at: None,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = self.base.violations();
        if self.grid.is_empty() {
            v.push("sweep.grid must not be empty".into());
        }
        v.extend(self.grid.iter().filter_map(|&g| self.axis.check_value(g)));
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            v.push("sweep.grid must be strictly increasing".into());
        }
        if self.outputs.is_empty() {
            v.push("sweep.outputs must name at least one metric".into());
        }
        let target_on_axis = self.axis == Axis::MseTarget;
        if !target_on_axis && self.mse_target.is_none() && self.outputs.iter().any(|m| m.needs_target()) {
            v.push("sweep.mse_target is required by critical_density / critical_edge_mse".into());
        }
        if let Some(d) = self.delay_at {
            if !(d > self.base.workload.compute_delay) {
                v.push(format!("sweep.delay_at = {d} must exceed workload.d_c"));
            }
        }
        if let Some(t) = self.sim.trials {
            if t == 0 {
                v.push("sweep.sim.trials must be >= 1".into());
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Scenario and target MSE at one grid value.
    fn point(&self, value: f64) -> Result<(Scenario, Option<f64>)> {
        let mut s = self.base;
        let mut target = self.mse_target;
        match self.axis {
            Axis::LambdaHat => s.deployment.lambda_ap = value * s.deployment.lambda_dev,
            Axis::RMin => {
                s.workload.payload_bits = value * s.air.bandwidth_hz * s.workload.transfer_window()
            }
            Axis::MseTarget => target = Some(value),
            Axis::MseEdgeRatio => s.workload.mse_edge = value * s.workload.mse_cloud,
        }
        Scenario::new(s.deployment, s.workload, s.air).map(|s| (s, target))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// No finite design meets the target at this point.
    Infeasible,
    /// The metric is undefined at this point (domain or degenerate input).
    Invalid,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Invalid => "invalid",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub metric: Metric,
    pub analytic: Option<f64>,
    pub simulated: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Analytic values of one metric in grid order, `None` where infeasible.
    pub fn series(&self, metric: Metric) -> Vec<(f64, Option<f64>)> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric)
            .map(|r| (r.axis_value, r.analytic))
            .collect()
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn analytic_value(metric: Metric, s: &Scenario, target: Option<f64>, delay_at: Option<f64>) -> (Option<f64>, RowStatus) {
    let outcome = match metric {
        Metric::AvgMse => Ok(analytic::avg_mse(s)),
        Metric::AsymptoticMse => Ok(analytic::asymptotic_mse(&s.workload, &s.air)),
        Metric::CloudUseProb => Ok(analytic::cloud_use_probability(s)),
        Metric::DelayCdfAt => analytic::delay_cdf(s, delay_at.unwrap_or(s.workload.delay_budget)),
        Metric::CriticalDensity => match target {
            Some(t) => analytic::critical_density(&s.workload, &s.air, s.deployment.lambda_dev, t),
            None => return (None, RowStatus::Invalid),
        },
        Metric::CriticalEdgeMse => match target {
            Some(t) => analytic::critical_edge_mse(s, t),
            None => return (None, RowStatus::Invalid),
        },
    };
    match outcome {
        Ok(v) => (Some(v), RowStatus::Ok),
        Err(Error::InfeasibleTarget { .. }) => (None, RowStatus::Infeasible),
        Err(_) => (None, RowStatus::Invalid),
    }
}

fn simulated_value(metric: Metric, sim: &SimSummary, s: &Scenario, delay_at: Option<f64>) -> Option<(f64, f64)> {
    let n = sim.trial_count as f64;
    match metric {
        Metric::AvgMse => Some((sim.mse_estimate, sim.mse_stderr)),
        Metric::CloudUseProb => Some((sim.cloud_use_fraction, sim.cloud_use_stderr)),
        Metric::DelayCdfAt => {
            let f = sim.delay_samples.eval(delay_at.unwrap_or(s.workload.delay_budget));
            Some((f, (f * (1.0 - f) / n).sqrt()))
        }
        _ => None,
    }
}

/// Evaluates every requested metric at every grid point. Rows are ordered
/// by grid index, then by the order of `spec.outputs`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let wants_sim = spec.simulate && spec.outputs.iter().any(|m| m.simulable());
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.outputs.len());

    for &value in &spec.grid {
        let point = spec.point(value);
        let sim = match (&point, wants_sim) {
            (Ok((s, _)), true) => Some(geomsim::run_trials(&spec.sim.apply(*s))?),
            _ => None,
        };
        for &metric in &spec.outputs {
            let row = match &point {
                Ok((s, target)) => {
                    let (analytic, status) = analytic_value(metric, s, *target, spec.delay_at);
                    let sim_pair = sim
                        .as_ref()
                        .filter(|_| status != RowStatus::Infeasible)
                        .and_then(|sim| simulated_value(metric, sim, s, spec.delay_at));
                    SweepRow {
                        axis_value: value,
                        metric,
                        analytic,
                        simulated: sim_pair.map(|p| p.0),
                        sim_stderr: sim_pair.map(|p| p.1),
                        status,
                    }
                }
                Err(_) => SweepRow {
                    axis_value: value,
                    metric,
                    analytic: None,
                    simulated: None,
                    sim_stderr: None,
                    status: RowStatus::Invalid,
                },
            };
            rows.push(row);
        }
    }
    Ok(SweepResult { axis: spec.axis, rows })
}

/// Formats `x` with 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_sig12).unwrap_or_default()
}

pub fn to_csv_string(res: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &res.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            res.axis,
            format_sig12(r.axis_value),
            r.metric,
            cell(r.analytic),
            cell(r.simulated),
            cell(r.sim_stderr),
            r.status.name()
        ));
    }
    out
}

pub fn emit_csv(res: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv_string(res)).map_err(|e| Error::io(path, e))
}

/// Parses CSV produced by [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let origin = Path::new("<csv>");
    let bad = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(bad(1, format!("expected header `{CSV_HEADER}`")));
    }

    let mut axis = None;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<Option<f64>> {
            match field(k) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(line, format!("`{s}` is not a number"))),
            }
        };
        let a: Axis = field(0).parse().map_err(|e| bad(line, e))?;
        if *axis.get_or_insert(a) != a {
            return Err(bad(line, "rows mix several axes".into()));
        }
        let status = match field(6) {
            "ok" => RowStatus::Ok,
            "infeasible" => RowStatus::Infeasible,
            "invalid" => RowStatus::Invalid,
            s => return Err(bad(line, format!("unknown status `{s}`"))),
        };
        rows.push(SweepRow {
            axis_value: num(1)?.ok_or_else(|| bad(line, "missing axis_value".into()))?,
            metric: field(2).parse().map_err(|e| bad(line, e))?,
            analytic: num(3)?,
            simulated: num(4)?,
            sim_stderr: num(5)?,
            status,
        });
    }
    let axis = axis.ok_or_else(|| bad(2, "no rows".into()))?;
    Ok(SweepResult { axis, rows })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

// On-disk spec document. Every field is optional here so that all missing
// fields can be reported at once.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    deployment: Option<RawDeployment>,
    workload: Option<RawWorkload>,
    air: Option<RawAir>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeployment {
    lambda_ap: Option<f64>,
    lambda_dev: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkload {
    q: Option<f64>,
    d_t: Option<f64>,
    d_c: Option<f64>,
    m_c: Option<f64>,
    m_d: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSnr {
    Value(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAir {
    b: Option<f64>,
    snr: Option<RawSnr>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    lo: f64,
    hi: f64,
    n: usize,
    #[serde(default)]
    scale: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawShadowing {
    Name(String),
    LogNormal { sigma_db: f64 },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    trials: Option<u64>,
    window_radius: Option<f64>,
    seed: Option<u64>,
    shadowing: Option<RawShadowing>,
    boundary: Option<String>,
    scheduling: Option<String>,
    load_model: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<String>,
    grid: Option<Vec<f64>>,
    range: Option<RawRange>,
    outputs: Option<Vec<String>>,
    #[serde(default)]
    simulate: bool,
    sim: Option<RawSim>,
    mse_target: Option<f64>,
    delay_at: Option<f64>,
}

/// Reads a TOML sweep document.
///
/// ```toml
/// [deployment]
/// lambda_ap = 1.0
/// lambda_dev = 1.0
///
/// [workload]
/// q = 1e6          # bits; optional when sweeping r_min
/// d_t = 0.06
/// d_c = 0.01
/// m_c = 1.0
/// m_d = 1.5        # optional, defaults to 1.5·m_c
///
/// [air]
/// b = 1e7
/// snr = "inf"      # or a linear ratio
///
/// [sweep]
/// axis = "lambda_hat"    # lambda_hat | r_min | mse_target | mse_edge_ratio
/// range = { lo = 0.1, hi = 1000.0, n = 31, scale = "log" }   # or grid = [...]
/// outputs = ["avg_mse", "asymptotic_mse"]
/// simulate = false
///
/// [sweep.sim]
/// trials = 10000
/// seed = 7
/// boundary = "torus"     # torus | disc
/// shadowing = "none"     # or { sigma_db = 8.0 }
/// ```
pub fn load_spec(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse {
        path: "<spec>".into(),
        message: e.to_string(),
    })?;

    let mut errs = Vec::new();
    let dep = raw.deployment.unwrap_or(RawDeployment {
        lambda_ap: None,
        lambda_dev: None,
    });
    let lambda_ap = required(&mut errs, "deployment.lambda_ap", dep.lambda_ap);
    let lambda_dev = required(&mut errs, "deployment.lambda_dev", dep.lambda_dev);

    let sweep = raw.sweep.unwrap_or(RawSweep {
        axis: None,
        grid: None,
        range: None,
        outputs: None,
        simulate: false,
        sim: None,
        mse_target: None,
        delay_at: None,
    });
    let axis = match sweep.axis.as_deref() {
        Some(a) => a.parse::<Axis>().map_err(|e| errs.push(format!("sweep.axis: {e}"))).ok(),
        None => {
            errs.push("sweep.axis: missing".into());
            None
        }
    };

    let grid = match (sweep.grid, sweep.range) {
        (Some(_), Some(_)) => {
            errs.push("sweep: give either grid or range, not both".into());
            Vec::new()
        }
        (Some(g), None) => g,
        (None, Some(r)) => match r.scale.as_deref().unwrap_or("linear") {
            "log" if r.lo > 0.0 && r.hi > 0.0 && r.n > 0 => log_grid(r.lo, r.hi, r.n),
            "linear" if r.n > 0 => linear_grid(r.lo, r.hi, r.n),
            s => {
                errs.push(format!("sweep.range: invalid (scale `{s}`, lo {}, hi {}, n {})", r.lo, r.hi, r.n));
                Vec::new()
            }
        },
        (None, None) => match axis.and_then(Axis::default_grid) {
            Some(g) => g,
            None => {
                errs.push("sweep.grid: missing and the axis has no default grid".into());
                Vec::new()
            }
        },
    };

    let wl = raw.workload.unwrap_or(RawWorkload {
        q: None,
        d_t: None,
        d_c: None,
        m_c: None,
        m_d: None,
    });
    let air = raw.air.unwrap_or(RawAir { b: None, snr: None });
    let d_t = required(&mut errs, "workload.d_t", wl.d_t);
    let d_c = required(&mut errs, "workload.d_c", wl.d_c);
    let m_c = required(&mut errs, "workload.m_c", wl.m_c);
    let b = required(&mut errs, "air.b (bandwidth_b)", air.b);
    let q = match (wl.q, axis, grid.first()) {
        (Some(q), _, _) => q,
        // Overwritten at every grid point; the first value keeps the base valid.
        (None, Some(Axis::RMin), Some(&r)) => r * b * (d_t - d_c),
        (None, _, _) => required(&mut errs, "workload.q (payload_q)", None),
    };
    let m_d = wl.m_d.unwrap_or(InferenceWorkload::DEFAULT_EDGE_RATIO * m_c);
    let snr = match air.snr {
        None => f64::INFINITY,
        Some(RawSnr::Value(v)) => v,
        Some(RawSnr::Text(t)) if matches!(t.as_str(), "inf" | "infinity" | "Inf") => f64::INFINITY,
        Some(RawSnr::Text(t)) => {
            errs.push(format!("air.snr: `{t}` is neither a number nor \"inf\""));
            f64::NAN
        }
    };

    let mut outputs = Vec::new();
    match sweep.outputs {
        Some(names) => {
            for n in names {
                match n.parse::<Metric>() {
                    Ok(m) => outputs.push(m),
                    Err(e) => errs.push(format!("sweep.outputs: {e}")),
                }
            }
        }
        None => errs.push("sweep.outputs: missing".into()),
    }

    let sim = match sweep.sim {
        Some(raw) => sim_overrides(raw, &mut errs),
        None => SimOverrides::default(),
    };

    let base = Scenario {
        deployment: DeploymentConfig {
            lambda_ap,
            lambda_dev,
        },
        workload: InferenceWorkload {
            payload_bits: q,
            delay_budget: d_t,
            compute_delay: d_c,
            mse_cloud: m_c,
            mse_edge: m_d,
        },
        air: AirInterface { bandwidth_hz: b, snr },
    };

    let Some(axis) = axis else {
        return Err(Error::Validation(errs));
    };
    let spec = SweepSpec {
        base,
        axis,
        grid,
        outputs,
        simulate: sweep.simulate,
        sim,
        mse_target: sweep.mse_target,
        delay_at: sweep.delay_at,
    };
    // Scenario checks on NaN placeholders would only repeat "missing".
    if errs.is_empty() {
        errs.extend(spec.violations());
    } else {
        errs.extend(spec.violations().into_iter().filter(|v| !v.contains("NaN")));
    }
    if errs.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Validation(errs))
    }
}

fn required(errs: &mut Vec<String>, key: &str, v: Option<f64>) -> f64 {
    v.unwrap_or_else(|| {
        errs.push(format!("{key}: missing"));
        f64::NAN
    })
}

fn sim_overrides(raw: RawSim, errs: &mut Vec<String>) -> SimOverrides {
    let shadowing = match raw.shadowing {
        None => None,
        Some(RawShadowing::Name(n)) if n == "none" => Some(Shadowing::None),
        Some(RawShadowing::Name(n)) => {
            errs.push(format!("sweep.sim.shadowing: unknown `{n}` (use \"none\" or {{ sigma_db = ... }})"));
            None
        }
        Some(RawShadowing::LogNormal { sigma_db }) => Some(Shadowing::LogNormal { sigma_db }),
    };
    let boundary = raw.boundary.and_then(|b| match b.as_str() {
        "torus" => Some(Boundary::Torus),
        "disc" => Some(Boundary::Disc),
        other => {
            errs.push(format!("sweep.sim.boundary: unknown `{other}`"));
            None
        }
    });
    let scheduling = raw.scheduling.and_then(|s| match s.as_str() {
        "occupied_cells" => Some(Scheduling::OccupiedCells),
        "full_buffer" => Some(Scheduling::FullBuffer),
        other => {
            errs.push(format!("sweep.sim.scheduling: unknown `{other}`"));
            None
        }
    });
    let load_model = raw.load_model.and_then(|s| match s.as_str() {
        "realized" => Some(LoadModel::Realized),
        "mean" => Some(LoadModel::Mean),
        other => {
            errs.push(format!("sweep.sim.load_model: unknown `{other}`"));
            None
        }
    });
    SimOverrides {
        trials: raw.trials,
        window_radius: raw.window_radius,
        seed: raw.seed,
        shadowing,
        boundary,
        scheduling,
        load_model,
    }
}
