//! Monte Carlo realisation of the uplink system model.
//!
//! Each trial drops APs and devices as independent Poisson processes in a
//! finite window, adds the typical device at the origin, associates every
//! device to its minimum-pathloss AP, schedules one co-channel transmitter
//! in every other cell, and evaluates the typical device's SINR, rate,
//! cloud delay and output choice. Pathloss is `S·‖x − y‖⁴` and uplink power
//! control fully inverts each transmitter's own serving-link pathloss.
//!
//! Trial `i` draws every variate from [`RngStream`] `(master_seed, i)`, so a
//! run is bit-identical whatever the number of worker threads.

use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, InferenceWorkload, Scenario};
use crate::error::{Error, Result};
use crate::numerics::{exponential_variate, EmpiricalCdf, RngStream};

/// Expected AP count below which edge effects are noticeable.
pub const MIN_EXPECTED_APS: f64 = 100.0;

/// Expected AP count used to size the window when no radius is given.
pub const DEFAULT_EXPECTED_APS: f64 = 256.0;

/// Density multiplier for the auxiliary layers that place a virtual
/// transmitter in otherwise empty cells.
const FILL_LAYER_DENSITY: f64 = 4.0;
const MAX_FILL_LAYERS: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Simulation window. Both shapes are centred on the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// `[-half_side, half_side]²` with wrap-around distances.
    Torus { half_side: f64 },
    Disc { radius: f64 },
}

impl Window {
    pub fn new(boundary: Boundary, radius: f64) -> Self {
        match boundary {
            Boundary::Torus => Window::Torus { half_side: radius },
            Boundary::Disc => Window::Disc { radius },
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Window::Torus { half_side } => 4.0 * half_side * half_side,
            Window::Disc { radius } => std::f64::consts::PI * radius * radius,
        }
    }

    fn sample_point(&self, stream: &mut RngStream) -> Point {
        match *self {
            Window::Torus { half_side } => Point::new(
                (2.0 * stream.uniform() - 1.0) * half_side,
                (2.0 * stream.uniform() - 1.0) * half_side,
            ),
            Window::Disc { radius } => {
                let r = radius * stream.uniform().sqrt();
                let theta = std::f64::consts::TAU * stream.uniform();
                Point::new(r * theta.cos(), r * theta.sin())
            }
        }
    }

    pub fn distance_sq(&self, a: Point, b: Point) -> f64 {
        let (mut dx, mut dy) = (a.x - b.x, a.y - b.y);
        if let Window::Torus { half_side } = *self {
            let side = 2.0 * half_side;
            dx -= side * (dx / side).round();
            dy -= side * (dy / side).round();
        }
        dx * dx + dy * dy
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Torus,
    Disc,
}

/// Large-scale fading law, i.i.d. per device–AP pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shadowing {
    #[default]
    None,
    LogNormal { sigma_db: f64 },
}

/// Which non-serving cells put a transmitter on the tagged resource block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduling {
    /// Cells with at least one associated device schedule one of them,
    /// chosen uniformly; empty cells are silent.
    #[default]
    OccupiedCells,
    /// Every cell transmits. Empty cells get a virtual device placed
    /// uniformly at random inside the cell.
    FullBuffer,
}

/// Load used to split the serving AP's bandwidth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadModel {
    /// The realised number of devices sharing the serving AP.
    #[default]
    Realized,
    /// The mean load `1 + 1.28/λ̂`, the way the closed form treats it.
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub scenario: Scenario,
    /// Half-side of the torus square or radius of the disc.
    pub window_radius: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub shadowing: Shadowing,
    pub boundary: Boundary,
    pub scheduling: Scheduling,
    pub load_model: LoadModel,
}

impl SimConfig {
    /// Torus window sized for [`DEFAULT_EXPECTED_APS`] APs, 10⁴ trials,
    /// seed 0, no shadowing.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            window_radius: default_window_radius(scenario.deployment.lambda_ap, Boundary::Torus),
            trials: 10_000,
            master_seed: 0,
            shadowing: Shadowing::None,
            boundary: Boundary::Torus,
            scheduling: Scheduling::OccupiedCells,
            load_model: LoadModel::Realized,
        }
    }

    pub fn window(&self) -> Window {
        Window::new(self.boundary, self.window_radius)
    }

    pub fn expected_ap_count(&self) -> f64 {
        self.scenario.deployment.lambda_ap * self.window().area()
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = self.scenario.violations();
        if self.trials == 0 {
            v.push("sim.trials must be >= 1".into());
        }
        if !(self.window_radius.is_finite() && self.window_radius > 0.0) {
            v.push(format!("sim.window_radius = {} must be finite and > 0", self.window_radius));
        }
        if let Shadowing::LogNormal { sigma_db } = self.shadowing {
            if !(sigma_db.is_finite() && sigma_db >= 0.0) {
                v.push(format!("sim.shadowing sigma_db = {sigma_db} must be finite and >= 0"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Non-fatal configuration problems.
    pub fn warnings(&self) -> Vec<String> {
        let n = self.expected_ap_count();
        if n < MIN_EXPECTED_APS {
            vec![format!(
                "window holds {n:.1} APs on average (< {MIN_EXPECTED_APS}); boundary effects may bias results"
            )]
        } else {
            Vec::new()
        }
    }
}

/// Window radius giving [`DEFAULT_EXPECTED_APS`] expected APs.
pub fn default_window_radius(lambda_ap: f64, boundary: Boundary) -> f64 {
    let area = DEFAULT_EXPECTED_APS / lambda_ap;
    match boundary {
        Boundary::Torus => 0.5 * area.sqrt(),
        Boundary::Disc => (area / std::f64::consts::PI).sqrt(),
    }
}

/// One sampled network snapshot as seen by the typical device.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRealization {
    pub ap_points: Vec<Point>,
    /// Device 0 is the typical device at the origin.
    pub dev_points: Vec<Point>,
    pub serving_ap: usize,
    pub load: u32,
    pub interferers: Vec<Point>,
    pub sinr: f64,
    pub rate: f64,
    pub delay: f64,
    pub used_cloud: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimSummary {
    pub delay_samples: EmpiricalCdf,
    pub sinr_samples: EmpiricalCdf,
    pub cloud_use_fraction: f64,
    pub cloud_use_stderr: f64,
    pub mse_estimate: f64,
    pub mse_stderr: f64,
    pub mean_load: f64,
    pub trial_count: u64,
}

/// Homogeneous Poisson point process of the given density on `window`.
pub fn sample_ppp(stream: &mut RngStream, density: f64, window: &Window) -> Vec<Point> {
    let mean = density * window.area();
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).map(|p| p.sample(stream) as usize).unwrap_or(0);
    (0..count).map(|_| window.sample_point(stream)).collect()
}

/// Minimum-pathloss association. `shadowing[j]` is the large-scale gain
/// towards AP `j` (pass an empty slice for none). Returns the serving index
/// and its pathloss `S·d⁴`; ties go to the lowest index.
pub fn associate(device: Point, aps: &[Point], shadowing: &[f64], window: &Window) -> Result<(usize, f64)> {
    if aps.is_empty() {
        return Err(Error::NoAccessPoints);
    }
    let mut best = (0, f64::INFINITY);
    for (j, &ap) in aps.iter().enumerate() {
        let d2 = window.distance_sq(device, ap);
        let loss = shadowing.get(j).copied().unwrap_or(1.0) * d2 * d2;
        if loss < best.1 {
            best = (j, loss);
        }
    }
    Ok(best)
}

/// Received interference at the tagged AP from one power-controlled
/// transmitter: `L_X·H_X / L(X, tagged AP)`.
pub fn interference_term(own_pathloss: f64, fading: f64, pathloss_to_tagged: f64) -> f64 {
    own_pathloss * fading / pathloss_to_tagged
}

/// `H₀ / (SNR⁻¹ + I)`. The received signal is exactly `H₀` because power
/// control inverts the serving-link pathloss.
pub fn uplink_sinr(serving_fading: f64, interference: f64, snr: f64) -> f64 {
    serving_fading / (snr.recip() + interference)
}

/// `(b/load)·log₂(1 + SINR)`.
pub fn uplink_rate(sinr: f64, bandwidth_hz: f64, load: u32) -> f64 {
    shared_rate(sinr, bandwidth_hz, load as f64)
}

fn shared_rate(sinr: f64, bandwidth_hz: f64, load: f64) -> f64 {
    bandwidth_hz / load * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Cloud round-trip `q/rate + d_c`, with the downlink rate taken equal to
/// the uplink rate.
pub fn cloud_delay(rate: f64, w: &InferenceWorkload) -> f64 {
    w.payload_bits / rate + w.compute_delay
}

/// Cloud output is used iff it arrives within the (inclusive) budget.
/// Returns the choice and the MSE it contributes.
pub fn select_output(delay: f64, w: &InferenceWorkload) -> (bool, f64) {
    if delay <= w.delay_budget {
        (true, w.mse_cloud)
    } else {
        (false, w.mse_edge)
    }
}

/// Uniform bucket grid over the window for nearest-AP queries. Gives the
/// same answer as a full scan, ties included.
struct ApIndex<'a> {
    aps: &'a [Point],
    window: Window,
    half: f64,
    cells: usize,
    cell: f64,
    buckets: Vec<Vec<u32>>,
}

impl<'a> ApIndex<'a> {
    fn new(aps: &'a [Point], window: Window) -> Self {
        let half = match window {
            Window::Torus { half_side } => half_side,
            Window::Disc { radius } => radius,
        };
        // About two APs per bucket.
        let cells = ((aps.len() as f64 / 2.0).sqrt().floor() as usize).clamp(1, 1024);
        let cell = 2.0 * half / cells as f64;
        let mut buckets = vec![Vec::new(); cells * cells];
        let mut index = Self {
            aps,
            window,
            half,
            cells,
            cell,
            buckets: Vec::new(),
        };
        for (j, &p) in aps.iter().enumerate() {
            let (cx, cy) = index.cell_of(p);
            buckets[cy * cells + cx].push(j as u32);
        }
        index.buckets = buckets;
        index
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let f = |v: f64| (((v + self.half) / self.cell).floor().max(0.0) as usize).min(self.cells - 1);
        (f(p.x), f(p.y))
    }

    fn consider(&self, p: Point, j: usize, best: &mut (usize, f64)) {
        let d2 = self.window.distance_sq(p, self.aps[j]);
        if d2 < best.1 || (d2 == best.1 && j < best.0) {
            *best = (j, d2);
        }
    }

    /// Nearest AP and its squared distance.
    fn nearest(&self, p: Point) -> (usize, f64) {
        let n = self.cells as isize;
        let torus = matches!(self.window, Window::Torus { .. });
        let (cx, cy) = self.cell_of(p);
        let mut best = (usize::MAX, f64::INFINITY);
        for k in 0..=n {
            if 2 * k + 1 >= n {
                // The ring would alias or leave the grid: finish with a scan.
                for j in 0..self.aps.len() {
                    self.consider(p, j, &mut best);
                }
                break;
            }
            for dy in -k..=k {
                for dx in -k..=k {
                    if dx.abs() != k && dy.abs() != k {
                        continue;
                    }
                    let (mut x, mut y) = (cx as isize + dx, cy as isize + dy);
                    if torus {
                        x = x.rem_euclid(n);
                        y = y.rem_euclid(n);
                    } else if x < 0 || y < 0 || x >= n || y >= n {
                        continue;
                    }
                    for &j in &self.buckets[(y * n + x) as usize] {
                        self.consider(p, j as usize, &mut best);
                    }
                }
            }
            // Everything beyond ring k is at least k cells away.
            let reach = k as f64 * self.cell;
            if best.1 < reach * reach {
                break;
            }
        }
        best
    }
}

struct DeviceLink {
    serving: usize,
    own_loss: f64,
    loss_to_tagged: f64,
}

/// Draws the shadowing row for one device (empty when shadowing is off).
fn shadow_row(stream: &mut RngStream, shadowing: Shadowing, n_aps: usize, row: &mut Vec<f64>) {
    row.clear();
    if let Shadowing::LogNormal { sigma_db } = shadowing {
        let normal = Normal::new(0.0, sigma_db).expect("sigma validated");
        row.extend((0..n_aps).map(|_| 10f64.powf(normal.sample(stream) / 10.0)));
    }
}

fn link(
    stream: &mut RngStream,
    cfg: &SimConfig,
    index: &ApIndex<'_>,
    tagged: Option<usize>,
    p: Point,
    row: &mut Vec<f64>,
) -> DeviceLink {
    let (aps, window) = (index.aps, &index.window);
    shadow_row(stream, cfg.shadowing, aps.len(), row);
    let (serving, own_loss) = if row.is_empty() {
        let (j, d2) = index.nearest(p);
        (j, d2 * d2)
    } else {
        associate(p, aps, row, window).expect("APs are non-empty")
    };
    let loss_to_tagged = tagged.map_or(own_loss, |t| {
        let d2 = window.distance_sq(p, aps[t]);
        row.get(t).copied().unwrap_or(1.0) * d2 * d2
    });
    DeviceLink {
        serving,
        own_loss,
        loss_to_tagged,
    }
}

/// Runs trial `index` of `cfg` and returns the full realisation.
pub fn run_trial(cfg: &SimConfig, index: u64) -> TrialRealization {
    let mut stream = RngStream::new(cfg.master_seed, index);
    let window = cfg.window();
    let scenario = &cfg.scenario;

    // Condition on at least one AP; with the usual window sizes this never
    // triggers.
    let mut aps = sample_ppp(&mut stream, scenario.deployment.lambda_ap, &window);
    while aps.is_empty() {
        aps = sample_ppp(&mut stream, scenario.deployment.lambda_ap, &window);
    }
    let mut devs = vec![Point::ORIGIN];
    devs.extend(sample_ppp(&mut stream, scenario.deployment.lambda_dev, &window));

    let index = ApIndex::new(&aps, window);
    let mut row = Vec::new();
    let typical = link(&mut stream, cfg, &index, None, Point::ORIGIN, &mut row);
    let tagged = typical.serving;

    // Reservoir choice of one transmitter per non-tagged cell.
    let mut chosen: Vec<Option<(Point, f64, f64)>> = vec![None; aps.len()];
    let mut seen = vec![0u32; aps.len()];
    let mut load = 1u32;
    for &p in &devs[1..] {
        let l = link(&mut stream, cfg, &index, Some(tagged), p, &mut row);
        if l.serving == tagged {
            load += 1;
            continue;
        }
        seen[l.serving] += 1;
        let k = seen[l.serving];
        if k == 1 || stream.uniform() * (k as f64) < 1.0 {
            chosen[l.serving] = Some((p, l.own_loss, l.loss_to_tagged));
        }
    }

    if cfg.scheduling == Scheduling::FullBuffer {
        fill_empty_cells(&mut stream, cfg, &index, tagged, &mut chosen, &mut row);
    }

    drop(index);
    let mut interference = 0.0;
    let mut interferers = Vec::new();
    for (j, c) in chosen.iter().enumerate() {
        if j == tagged {
            continue;
        }
        if let Some((p, own, to_tagged)) = *c {
            let h = exponential_variate(&mut stream, 1.0);
            interference += interference_term(own, h, to_tagged);
            interferers.push(p);
        }
    }

    let h0 = exponential_variate(&mut stream, 1.0);
    let sinr = uplink_sinr(h0, interference, scenario.air.snr);
    let effective_load = match cfg.load_model {
        LoadModel::Realized => load as f64,
        LoadModel::Mean => analytic::mean_load(&scenario.deployment),
    };
    let rate = shared_rate(sinr, scenario.air.bandwidth_hz, effective_load);
    let mut delay = cloud_delay(rate, &scenario.workload);
    if !delay.is_finite() {
        delay = f64::INFINITY;
    }
    let (used_cloud, _) = select_output(delay, &scenario.workload);

    TrialRealization {
        ap_points: aps,
        dev_points: devs,
        serving_ap: tagged,
        load,
        interferers,
        sinr,
        rate,
        delay,
        used_cloud,
    }
}

/// Gives every silent non-tagged cell a transmitter placed uniformly in the
/// cell: Poisson layers are dropped until each such cell has caught at least
/// one point, and one caught point is kept per cell.
fn fill_empty_cells(
    stream: &mut RngStream,
    cfg: &SimConfig,
    index: &ApIndex<'_>,
    tagged: usize,
    chosen: &mut [Option<(Point, f64, f64)>],
    row: &mut Vec<f64>,
) {
    let mut missing = chosen
        .iter()
        .enumerate()
        .filter(|&(j, c)| j != tagged && c.is_none())
        .count();
    let density = FILL_LAYER_DENSITY * cfg.scenario.deployment.lambda_ap;
    let n_aps = index.aps.len();
    let mut layer_pick: Vec<Option<(Point, f64, f64)>> = vec![None; n_aps];
    let mut layer_seen = vec![0u32; n_aps];

    for _ in 0..MAX_FILL_LAYERS {
        if missing == 0 {
            break;
        }
        layer_pick.iter_mut().for_each(|c| *c = None);
        layer_seen.iter_mut().for_each(|c| *c = 0);
        for p in sample_ppp(stream, density, &index.window) {
            let l = link(stream, cfg, index, Some(tagged), p, row);
            if l.serving == tagged || chosen[l.serving].is_some() {
                continue;
            }
            layer_seen[l.serving] += 1;
            let k = layer_seen[l.serving];
            if k == 1 || stream.uniform() * (k as f64) < 1.0 {
                layer_pick[l.serving] = Some((p, l.own_loss, l.loss_to_tagged));
            }
        }
        for (slot, pick) in chosen.iter_mut().zip(&layer_pick) {
            if slot.is_none() && pick.is_some() {
                *slot = *pick;
                missing -= 1;
            }
        }
    }
}

#[derive(Clone, Copy)]
struct TrialOutcome {
    delay: f64,
    sinr: f64,
    load: u32,
    used_cloud: bool,
}

/// Runs all trials on the global rayon pool.
pub fn run_trials(cfg: &SimConfig) -> Result<SimSummary> {
    cfg.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let t = run_trial(cfg, i);
            TrialOutcome {
                delay: t.delay,
                sinr: t.sinr,
                load: t.load,
                used_cloud: t.used_cloud,
            }
        })
        .collect();
    summarize(cfg, outcomes)
}

/// Runs all trials on a dedicated pool of `workers` threads. Results are
/// identical to [`run_trials`] for any worker count.
pub fn run_trials_with_workers(cfg: &SimConfig, workers: usize) -> Result<SimSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Degenerate(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_trials(cfg))
}

fn summarize(cfg: &SimConfig, outcomes: Vec<TrialOutcome>) -> Result<SimSummary> {
    let n = outcomes.len() as f64;
    let w = &cfg.scenario.workload;
    let cloud = outcomes.iter().filter(|o| o.used_cloud).count() as f64;
    let load_sum: u64 = outcomes.iter().map(|o| o.load as u64).sum();

    let fraction = cloud / n;
    let stderr = (fraction * (1.0 - fraction) / n).sqrt();
    Ok(SimSummary {
        delay_samples: EmpiricalCdf::new(outcomes.iter().map(|o| o.delay).collect())?,
        sinr_samples: EmpiricalCdf::new(outcomes.iter().map(|o| o.sinr).collect())?,
        cloud_use_fraction: fraction,
        cloud_use_stderr: stderr,
        mse_estimate: fraction * w.mse_cloud + (1.0 - fraction) * w.mse_edge,
        mse_stderr: (w.mse_edge - w.mse_cloud) * stderr,
        mean_load: load_sum as f64 / n,
        trial_count: outcomes.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plane() -> Window {
        Window::Disc { radius: 1e9 }
    }

    fn small_cfg() -> SimConfig {
        let s = Scenario::normalized(1.0, 0.5, 1.0, 1.5).unwrap();
        let mut cfg = SimConfig::new(s);
        cfg.window_radius = 4.0;
        cfg.trials = 200;
        cfg.master_seed = 99;
        cfg
    }

    #[test]
    fn associate_examples() {
        let w = plane();
        assert_eq!(associate(Point::ORIGIN, &[Point::new(2.0, 0.0)], &[], &w).unwrap(), (0, 16.0));
        let aps = [Point::new(0.0, 2.0), Point::new(1.0, 0.0)];
        assert_eq!(associate(Point::ORIGIN, &aps, &[], &w).unwrap().0, 1);
        let aps = [Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert_eq!(associate(Point::ORIGIN, &aps, &[20.0, 1.0], &w).unwrap(), (1, 16.0));
        assert!(matches!(associate(Point::ORIGIN, &[], &[], &w), Err(Error::NoAccessPoints)));
    }

    #[test]
    fn grid_index_matches_full_scan() {
        for (seed, window) in [
            (1, Window::Torus { half_side: 6.0 }),
            (2, Window::Disc { radius: 6.0 }),
            (3, Window::Torus { half_side: 1.0 }),
        ] {
            let mut s = RngStream::new(seed, 0);
            let aps = sample_ppp(&mut s, 1.0, &window);
            let index = ApIndex::new(&aps, window);
            for _ in 0..2000 {
                let p = window.sample_point(&mut s);
                let (j, d2) = index.nearest(p);
                assert_eq!((j, d2 * d2), associate(p, &aps, &[], &window).unwrap());
            }
        }
    }

    #[test]
    fn associate_breaks_ties_by_lowest_index() {
        let aps = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0)];
        assert_eq!(associate(Point::ORIGIN, &aps, &[], &plane()).unwrap().0, 0);
    }

    #[test]
    fn torus_distance_wraps() {
        let w = Window::Torus { half_side: 5.0 };
        assert_relative_eq!(w.distance_sq(Point::new(4.5, 0.0), Point::new(-4.5, 0.0)), 1.0, epsilon = 1e-12);
        assert_relative_eq!(w.distance_sq(Point::new(1.0, 1.0), Point::new(2.0, 3.0)), 5.0);
        assert_eq!(w.area(), 100.0);
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(uplink_sinr(1.0, 0.0, 10.0), 10.0);
        assert_eq!(uplink_sinr(1.0, interference_term(2.0, 1.0, 4.0), f64::INFINITY), 2.0);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(uplink_rate(1.0, 1.0, 2), 0.5);
        assert_relative_eq!(uplink_rate(3.0, 10.0, 1), 20.0, max_relative = 1e-15);
        let tiny = uplink_rate(1e-12, 1.0, 1);
        assert!(tiny > 0.0 && tiny < 1e-11);
    }

    #[test]
    fn delay_and_selection_examples() {
        let w = InferenceWorkload::new(1.0, 0.6, 0.1, 1.0, 1.5).unwrap();
        assert_relative_eq!(cloud_delay(2.0, &w), 0.6);
        assert_eq!(cloud_delay(f64::INFINITY, &w), 0.1);
        // Rate exactly q/(d_t − d_c) lands exactly on the budget and is accepted.
        let w2 = InferenceWorkload::new(1.0, 2.0, 1.0, 1.0, 1.5).unwrap();
        assert_eq!(cloud_delay(1.0, &w2), 2.0);
        assert_eq!(select_output(cloud_delay(1.0, &w2), &w2), (true, 1.0));

        assert_eq!(select_output(0.5, &w), (true, 1.0));
        assert_eq!(select_output(0.7, &w), (false, 1.5));
        assert_eq!(select_output(0.6, &w), (true, 1.0));
    }

    #[test]
    fn ppp_count_moments() {
        let w = Window::Torus { half_side: 5.0 };
        let mut s = RngStream::new(1, 1);
        let n = 10_000;
        let counts: Vec<f64> = (0..n).map(|_| sample_ppp(&mut s, 1.0, &w).len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Standard errors: mean 0.1, variance ≈ 100·√(2/n) ≈ 1.41.
        assert!((mean - 100.0).abs() < 0.3, "{mean}");
        assert!((var - 100.0).abs() < 4.5, "{var}");
    }

    #[test]
    fn ppp_points_inside_window_and_reproducible() {
        let w = Window::Disc { radius: 3.0 };
        let a = sample_ppp(&mut RngStream::new(4, 2), 2.0, &w);
        let b = sample_ppp(&mut RngStream::new(4, 2), 2.0, &w);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.x.hypot(p.y) <= 3.0));
        assert!(sample_ppp(&mut RngStream::new(4, 2), 1e-12, &w).is_empty());
    }

    #[test]
    fn trial_invariants() {
        let cfg = small_cfg();
        for i in 0..50 {
            let t = run_trial(&cfg, i);
            let window = cfg.window();
            let served = t
                .dev_points
                .iter()
                .filter(|&&p| associate(p, &t.ap_points, &[], &window).unwrap().0 == t.serving_ap)
                .count();
            assert_eq!(t.load as usize, served);
            assert!(t.load >= 1);
            assert!(t.interferers.len() < t.ap_points.len());
            assert!(t.sinr > 0.0 && t.rate > 0.0);
            assert!(t.delay > cfg.scenario.workload.compute_delay);
            assert_eq!(t.used_cloud, t.delay <= cfg.scenario.workload.delay_budget);
            // One transmitter per distinct non-serving cell.
            let mut cells: Vec<usize> = t
                .interferers
                .iter()
                .map(|&p| associate(p, &t.ap_points, &[], &window).unwrap().0)
                .collect();
            assert!(cells.iter().all(|&c| c != t.serving_ap));
            cells.sort_unstable();
            cells.dedup();
            assert_eq!(cells.len(), t.interferers.len());
        }
    }

    #[test]
    fn full_buffer_fills_every_cell() {
        let mut cfg = small_cfg();
        cfg.scheduling = Scheduling::FullBuffer;
        for i in 0..20 {
            let t = run_trial(&cfg, i);
            assert_eq!(t.interferers.len(), t.ap_points.len() - 1);
        }
    }

    #[test]
    fn mse_identity_and_equal_mses() {
        let cfg = small_cfg();
        let s = run_trials(&cfg).unwrap();
        let w = cfg.scenario.workload;
        assert_eq!(
            s.mse_estimate,
            s.cloud_use_fraction * w.mse_cloud + (1.0 - s.cloud_use_fraction) * w.mse_edge
        );

        let mut flat = cfg;
        flat.scenario.workload.mse_edge = flat.scenario.workload.mse_cloud;
        assert_eq!(run_trials(&flat).unwrap().mse_estimate, 1.0);
    }

    #[test]
    fn delay_cdf_zero_below_compute_delay() {
        let s = run_trials(&small_cfg()).unwrap();
        assert_eq!(s.delay_samples.eval(0.0), 0.0);
    }

    #[test]
    fn bandwidth_coupling_is_monotone() {
        let cfg = small_cfg();
        let mut wide = cfg;
        wide.scenario.air.bandwidth_hz *= 3.0;
        for i in 0..30 {
            assert!(run_trial(&wide, i).rate >= run_trial(&cfg, i).rate);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small_cfg();
        let a = run_trials_with_workers(&cfg, 1).unwrap();
        let b = run_trials_with_workers(&cfg, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lognormal_shadowing_runs() {
        let mut cfg = small_cfg();
        cfg.shadowing = Shadowing::LogNormal { sigma_db: 8.0 };
        cfg.trials = 20;
        let s = run_trials(&cfg).unwrap();
        assert_eq!(s.trial_count, 20);
        cfg.shadowing = Shadowing::LogNormal { sigma_db: -1.0 };
        assert!(run_trials(&cfg).is_err());
    }

    #[test]
    fn small_window_warns() {
        let mut cfg = small_cfg();
        cfg.window_radius = 2.0;
        assert_eq!(cfg.warnings().len(), 1);
        cfg.window_radius = 8.0;
        assert!(cfg.warnings().is_empty());
    }
}
