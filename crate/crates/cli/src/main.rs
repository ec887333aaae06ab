//! `edgeprovision`: command-line access to the closed-form model, the
//! simulator, sweeps and the validation report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use edgeprovision::analytic::{self, AirInterface, DeploymentConfig, InferenceWorkload, Scenario};
use edgeprovision::experiments::{self, SweepResult};
use edgeprovision::geomsim::{self, Boundary, LoadModel, Scheduling, Shadowing, SimConfig};
use edgeprovision::validation::{self, ValidationConfig};
use edgeprovision::Error;

#[derive(Parser, Debug)]
#[command(name = "edgeprovision", version, about = "Provisioning model for edge/cloud inference over cellular networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Average output MSE.
    AvgMse(ModelCmd),
    /// Average MSE at infinite AP density.
    AsymptoticMse(ModelCmd),
    /// P(cloud delay <= d).
    DelayCdf {
        #[command(flatten)]
        model: ModelCmd,
        /// Delay query point in seconds (must exceed --dc).
        #[arg(long)]
        d: f64,
    },
    /// Probability that the cloud output arrives within the budget.
    CloudProb(ModelCmd),
    /// Minimum AP density meeting the target MSE --mt.
    CriticalDensity(ModelCmd),
    /// Largest edge-model MSE meeting the target MSE --mt.
    CriticalEdgeMse(ModelCmd),
    /// Monte Carlo estimate of cloud use and MSE.
    Simulate {
        #[command(flatten)]
        model: ModelCmd,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Parameter sweep described by a TOML spec file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulator-versus-closed-form agreement report.
    Validate {
        #[arg(long, env = "EDGEPROVISION_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Worker threads (results do not depend on it).
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ModelCmd {
    #[command(flatten)]
    params: ModelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    #[arg(long)]
    lambda_ap: Option<f64>,
    #[arg(long)]
    lambda_dev: Option<f64>,
    /// AP-to-device density ratio (device density defaults to 1).
    #[arg(long)]
    lambda_hat: Option<f64>,
    /// Payload in bits (uplink + downlink).
    #[arg(long)]
    q: Option<f64>,
    /// Uplink bandwidth in Hz.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Delay budget in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Cloud compute delay in seconds.
    #[arg(long)]
    dc: Option<f64>,
    /// Inference rate q/(b·(dt − dc)), instead of --q.
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    mc: Option<f64>,
    /// Edge MSE (defaults to 1.5·mc).
    #[arg(long)]
    md: Option<f64>,
    /// Target MSE.
    #[arg(long)]
    mt: Option<f64>,
    /// Linear SNR, or "inf" for interference-limited.
    #[arg(long, default_value = "inf")]
    snr: String,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, env = "EDGEPROVISION_SEED", default_value_t = 0)]
    seed: u64,
    /// Torus half-side or disc radius; sized for 256 APs when omitted.
    #[arg(long)]
    window_radius: Option<f64>,
    /// Use a disc window instead of the wrap-around torus.
    #[arg(long)]
    disc: bool,
    /// Lognormal shadowing standard deviation in dB.
    #[arg(long)]
    shadowing_db: Option<f64>,
    /// Give every cell a transmitter (virtual devices in empty cells).
    #[arg(long)]
    full_buffer: bool,
    /// Split bandwidth by the mean load instead of the realised load.
    #[arg(long)]
    mean_load: bool,
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Human,
    Json,
    Csv,
}

impl OutputArgs {
    fn mode(&self) -> Mode {
        if self.json {
            Mode::Json
        } else if self.csv {
            Mode::Csv
        } else {
            Mode::Human
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Validation(vec![msg.into()])
}

impl ModelArgs {
    fn snr(&self) -> Result<f64, Error> {
        match self.snr.as_str() {
            "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
            s => s.parse().map_err(|_| usage(format!("--snr: `{s}` is neither a number nor \"inf\""))),
        }
    }

    fn deployment(&self) -> Result<DeploymentConfig, Error> {
        match (self.lambda_hat, self.lambda_ap, self.lambda_dev) {
            (Some(h), Some(ap), Some(dev)) => {
                if ((ap / dev) - h).abs() > 1e-9 * h {
                    return Err(usage(format!(
                        "--lambda-hat {h} disagrees with --lambda-ap/--lambda-dev = {}",
                        ap / dev
                    )));
                }
                DeploymentConfig::new(ap, dev)
            }
            (Some(_), Some(_), None) => Err(usage("--lambda-hat with --lambda-ap also needs --lambda-dev")),
            (Some(h), None, dev) => {
                let dev = dev.unwrap_or(1.0);
                DeploymentConfig::new(h * dev, dev)
            }
            (None, Some(ap), Some(dev)) => DeploymentConfig::new(ap, dev),
            _ => Err(usage("give --lambda-hat, or both --lambda-ap and --lambda-dev")),
        }
    }

    fn lambda_dev(&self) -> f64 {
        self.lambda_dev.unwrap_or(1.0)
    }

    fn workload_and_air(&self) -> Result<(InferenceWorkload, AirInterface), Error> {
        let mc = self.mc.ok_or_else(|| usage("--mc is required"))?;
        let md = self.md.unwrap_or(InferenceWorkload::DEFAULT_EDGE_RATIO * mc);
        let snr = self.snr()?;
        let dc = self.dc.unwrap_or(0.0);
        let (q, b, dt) = match self.rmin {
            Some(r) => {
                let b = self.bandwidth.unwrap_or(1.0);
                let dt = self.dt.unwrap_or(dc + 1.0);
                let implied = r * b * (dt - dc);
                if let Some(q) = self.q {
                    if (q - implied).abs() > 1e-9 * implied.abs() {
                        return Err(usage(format!(
                            "--rmin {r} disagrees with --q/--bandwidth/--dt/--dc (which give r_min = {})",
                            q / (b * (dt - dc))
                        )));
                    }
                }
                (implied, b, dt)
            }
            None => {
                let missing: Vec<&str> = [("--q", self.q), ("--bandwidth", self.bandwidth), ("--dt", self.dt)]
                    .iter()
                    .filter(|(_, v)| v.is_none())
                    .map(|(n, _)| *n)
                    .collect();
                if !missing.is_empty() {
                    return Err(usage(format!("give --rmin, or all of --q --bandwidth --dt (missing {})", missing.join(" "))));
                }
                (self.q.unwrap(), self.bandwidth.unwrap(), self.dt.unwrap())
            }
        };
        Ok((InferenceWorkload::new(q, dt, dc, mc, md)?, AirInterface::new(b, snr)?))
    }

    fn scenario(&self) -> Result<Scenario, Error> {
        let (w, a) = self.workload_and_air()?;
        Scenario::new(self.deployment()?, w, a)
    }

    fn target(&self) -> Result<f64, Error> {
        self.mt.ok_or_else(|| usage("--mt is required"))
    }
}

/// Renders a fixed-key record in the requested mode.
fn render(fields: &[(&str, Value)], units: &[(&str, &str)], mode: Mode) -> String {
    match mode {
        Mode::Json => {
            let map: Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            serde_json::to_string(&Value::Object(map)).expect("plain values") + "\n"
        }
        Mode::Csv => {
            let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<String> = fields.iter().map(|(_, v)| v.to_string()).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        Mode::Human => fields
            .iter()
            .map(|(k, v)| {
                let unit = units.iter().find(|(u, _)| u == k).map(|(_, u)| format!(" {u}")).unwrap_or_default();
                format!("{k} = {v}{unit}\n")
            })
            .collect(),
    }
}

fn emit(text: &str, out: &OutputArgs) -> Result<(), Error> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep_text(res: &SweepResult, mode: Mode) -> String {
    match mode {
        Mode::Json => serde_json::to_string_pretty(res).expect("plain data") + "\n",
        _ => experiments::to_csv_string(res),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let (text, out, code) = match cli.command {
        Command::AvgMse(ModelCmd { params, out }) => {
            let s = params.scenario()?;
            let fields = [
                ("avg_mse", json!(analytic::avg_mse(&s))),
                ("mean_load", json!(analytic::mean_load(&s.deployment))),
                ("r_min", json!(s.inference_rate())),
            ];
            (render(&fields, &[("avg_mse", "(squared error)")], out.mode()), out, 0)
        }
        Command::AsymptoticMse(ModelCmd { params, out }) => {
            let (w, a) = params.workload_and_air()?;
            let fields = [
                ("asymptotic_mse", json!(analytic::asymptotic_mse(&w, &a))),
                ("r_min", json!(w.payload_bits / (a.bandwidth_hz * w.transfer_window()))),
            ];
            (render(&fields, &[("asymptotic_mse", "(squared error)")], out.mode()), out, 0)
        }
        Command::DelayCdf { model, d } => {
            let s = model.params.scenario()?;
            let fields = [("delay_cdf", json!(analytic::delay_cdf(&s, d)?)), ("d", json!(d))];
            (render(&fields, &[("d", "s")], model.out.mode()), model.out, 0)
        }
        Command::CloudProb(ModelCmd { params, out }) => {
            let s = params.scenario()?;
            let fields = [("cloud_use_probability", json!(analytic::cloud_use_probability(&s)))];
            (render(&fields, &[], out.mode()), out, 0)
        }
        Command::CriticalDensity(ModelCmd { params, out }) => {
            let (w, a) = params.workload_and_air()?;
            let dev = params.lambda_dev();
            let lc = analytic::critical_density(&w, &a, dev, params.target()?)?;
            let fields = [("lambda_c", json!(lc)), ("lambda_hat_c", json!(lc / dev))];
            (render(&fields, &[("lambda_c", "APs per unit area")], out.mode()), out, 0)
        }
        Command::CriticalEdgeMse(ModelCmd { params, out }) => {
            let (mut w, a) = params.workload_and_air()?;
            // Edge MSE is the unknown here; keep the scenario valid.
            w.mse_edge = w.mse_cloud;
            let s = Scenario::new(params.deployment()?, w, a)?;
            let fields = [("mse_edge_max", json!(analytic::critical_edge_mse(&s, params.target()?)?))];
            (render(&fields, &[("mse_edge_max", "(squared error)")], out.mode()), out, 0)
        }
        Command::Simulate { model, sim } => {
            let s = model.params.scenario()?;
            let mut cfg = SimConfig::new(s);
            cfg.trials = sim.trials;
            cfg.master_seed = sim.seed;
            if sim.disc {
                cfg.boundary = Boundary::Disc;
            }
            cfg.window_radius = sim
                .window_radius
                .unwrap_or_else(|| geomsim::default_window_radius(s.deployment.lambda_ap, cfg.boundary));
            if let Some(sigma_db) = sim.shadowing_db {
                cfg.shadowing = Shadowing::LogNormal { sigma_db };
            }
            if sim.full_buffer {
                cfg.scheduling = Scheduling::FullBuffer;
            }
            if sim.mean_load {
                cfg.load_model = LoadModel::Mean;
            }
            for w in cfg.warnings() {
                eprintln!("warning: {w}");
            }
            let r = geomsim::run_trials(&cfg)?;
            let fields = [
                ("trials", json!(r.trial_count)),
                ("cloud_use_fraction", json!(r.cloud_use_fraction)),
                ("cloud_use_stderr", json!(r.cloud_use_stderr)),
                ("mse_estimate", json!(r.mse_estimate)),
                ("mse_stderr", json!(r.mse_stderr)),
                ("mean_load", json!(r.mean_load)),
                ("cloud_use_probability_closed_form", json!(analytic::cloud_use_probability(&s))),
                ("avg_mse_closed_form", json!(analytic::avg_mse(&s))),
                ("mean_load_closed_form", json!(analytic::mean_load(&s.deployment))),
            ];
            (render(&fields, &[], model.out.mode()), model.out, 0)
        }
        Command::Sweep { spec, out } => {
            let spec = experiments::load_spec(&spec)?;
            let res = experiments::run_sweep(&spec)?;
            (sweep_text(&res, out.mode()), out, 0)
        }
        Command::Validate {
            seed,
            trials,
            workers,
            out,
        } => {
            let report = validation::run_validation(&ValidationConfig { seed, trials, workers })?;
            let code = if report.all_pass { 0 } else { 1 };
            let text = match out.mode() {
                Mode::Json => report.to_json(),
                Mode::Csv => {
                    let mut t = String::from("id,value,threshold,pass\n");
                    for c in &report.criteria {
                        t.push_str(&format!("{},{},{},{}\n", c.id, c.value, c.threshold, c.pass));
                    }
                    t
                }
                Mode::Human => {
                    let mut t = String::new();
                    for c in &report.criteria {
                        let verdict = if c.pass { "PASS" } else { "FAIL" };
                        t.push_str(&format!("{verdict} {}: {} = {:.5} (threshold {})\n", c.id, c.description, c.value, c.threshold));
                    }
                    let r = &report.realistic_network;
                    t.push_str(&format!(
                        "info: realistic network (silent empty cells, realised load): KS {:.4}, cloud use {:.4} vs {:.4}\n",
                        r.ks_distance, r.cloud_use_simulated, r.cloud_use_closed_form
                    ));
                    t
                }
            };
            (text, out, code)
        }
    };
    emit(&text, &out)?;
    Ok(ExitCode::from(code))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleTarget { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                Error::InfeasibleTarget { target, asymptotic } => eprintln!(
                    "error: target MSE m_t = {target} is not above the asymptotic MSE m_asy = {asymptotic}; no finite AP density reaches it"
                ),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
