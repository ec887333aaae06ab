//! Numerical plumbing shared by the model and the simulator: seeded random
//! streams, a bracketing root finder, and empirical-distribution statistics.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A reproducible random stream addressed by `(master_seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id selecting one of its 2^64
/// independent keystreams, so the variates a trial sees depend only on its
/// address and never on which worker thread runs it.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform variate on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Maps a uniform variate `u ∈ [0, 1)` to an exponential variate with the
/// given mean through the inverse CDF `-mean·ln(1 - u)`.
pub fn exponential_from_uniform(u: f64, mean: f64) -> f64 {
    -mean * (-u).ln_1p()
}

/// Draws an exponential variate by inverse-CDF transform.
pub fn exponential_variate(stream: &mut RngStream, mean: f64) -> f64 {
    exponential_from_uniform(stream.uniform(), mean)
}

/// Result of a bisection run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bisection {
    pub root: f64,
    /// Number of function evaluations after the two endpoint evaluations.
    pub iterations: u32,
}

/// Finds a root of `f` in `[lo, hi]` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
/// Halving stops once the bracket is no wider than `tol` or floating-point
/// resolution is exhausted; the midpoint of the final bracket is returned.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    bisect_with_stats(f, lo, hi, tol).map(|b| b.root)
}

pub fn bisect_with_stats<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Bisection>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::domain("tol", tol, "tolerance must be positive and finite"));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("bracket", if lo.is_finite() { hi } else { lo }, "bracket endpoints must be finite"));
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }

    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Bisection { root: lo, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Bisection { root: hi, iterations: 0 });
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    let mut iterations = 0;
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(Bisection { root: mid, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection {
        root: lo + 0.5 * (hi - lo),
        iterations,
    })
}

/// Step-function CDF of a finite sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Builds the CDF; samples may include `+∞` but not NaN.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(&bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(Error::domain("sample", bad, "NaN samples have no ordering"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }
}

/// Two-sided Kolmogorov–Smirnov distance `sup |F_n − F|` between an
/// empirical CDF and a model CDF.
pub fn ks_distance<F>(emp: &EmpiricalCdf, model: F) -> f64
where
    F: Fn(f64) -> f64,
{
    ks_distance_within(emp, model, f64::NEG_INFINITY, f64::INFINITY)
}

/// KS distance with the supremum taken over `x ∈ (lo, hi]` only.
///
/// The empirical CDF is still normalised by the full sample count, so mass
/// outside the window shifts it the way it would in the unrestricted
/// statistic. Both window edges are checked as well as the sample steps.
pub fn ks_distance_within<F>(emp: &EmpiricalCdf, model: F, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let n = emp.len() as f64;
    let xs = emp.samples();
    let start = xs.partition_point(|&x| x <= lo);
    let end = xs.partition_point(|&x| x <= hi);

    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate().take(end).skip(start) {
        let f = model(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    if hi.is_finite() {
        d = d.max((end as f64 / n - model(hi)).abs());
    }
    if lo.is_finite() {
        // Right limit of the model at lo, approached from inside the window.
        let lo_plus = if lo == 0.0 { f64::MIN_POSITIVE } else { lo + lo.abs() * f64::EPSILON };
        d = d.max((start as f64 / n - model(lo_plus)).abs());
    }
    d
}
