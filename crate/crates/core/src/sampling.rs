//! Random subsets of `P(n)` and the maximum-antichain experiments run on them.
//!
//! Membership of vertex `v` in trial `i` is decided by a counter-based draw keyed on
//! `(seed, i, v)`, so any trial can be regenerated on its own and in any order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::antichain::max_antichain_exact;
use crate::error::{Error, Result};
use crate::lattice::{self, VertexSet, MAX_N};

/// Ceiling on the expected number of comparable pairs in a sample, `p^2 (3^n - 2^n)`.
pub const MAX_EXPECTED_PAIRS: f64 = 1e8;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` determined by `(seed, trial, vertex)`.
#[inline]
pub fn unit_draw(seed: u64, trial: u64, vertex: u32) -> f64 {
    let h = mix64(mix64(mix64(seed.wrapping_add(GOLDEN)) ^ trial) ^ u64::from(vertex));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    pub n: u32,
    pub p: f64,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(n: u32, p: f64, seed: u64) -> Result<Self> {
        lattice::LatticeParams::new(n)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("p={p} must lie in [0, 1]")));
        }
        Ok(Self { n, p, seed })
    }
}

/// `P(n)_p` for one trial.
pub fn sample_power_set(config: &SampleConfig, trial: u64) -> VertexSet {
    let ids = (0..1u32 << config.n).filter(|&v| unit_draw(config.seed, trial, v) < config.p);
    VertexSet::from_sorted_unchecked(config.n, ids.collect())
}

/// `p^2 (3^n - 2^n)`, the expected number of comparable pairs in `P(n)_p`.
pub fn expected_comparable_pairs(n: u32, p: f64) -> f64 {
    let n = f64::from(n);
    p * p * (libm::pow(3.0, n) - libm::pow(2.0, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExperimentMode {
    /// `p = c / n`, `t = 1`.
    Threshold,
    /// Fixed `p` and `t`.
    Window,
}

impl ExperimentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentMode::Threshold => "threshold",
            ExperimentMode::Window => "window",
        }
    }
}

/// One `(n, t, p)` configuration of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentPoint {
    pub mode: ExperimentMode,
    pub n: u32,
    pub t: u32,
    /// `c` for threshold runs, `p` for window runs.
    pub c_or_p: f64,
    pub p: f64,
}

impl ExperimentPoint {
    pub fn threshold(n: u32, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("c={c} must be positive")));
        }
        if n == 0 {
            return Err(Error::Parameter("threshold runs need n >= 1".into()));
        }
        Ok(Self {
            mode: ExperimentMode::Threshold,
            n,
            t: 1,
            c_or_p: c,
            p: c / f64::from(n),
        })
    }

    pub fn window(n: u32, t: u32, p: f64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Parameter("t must be a positive integer".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Parameter(format!("p={p} must lie in (0, 1]")));
        }
        Ok(Self {
            mode: ExperimentMode::Window,
            n,
            t,
            c_or_p: p,
            p,
        })
    }

    /// Refuses points whose samples would be too large to solve exactly.
    pub fn check_feasible(&self) -> Result<()> {
        if self.n > MAX_N {
            return Err(Error::Feasibility(format!("n={} exceeds {MAX_N}", self.n)));
        }
        if self.p > 1.0 {
            return Err(Error::Feasibility(format!(
                "p = c/n = {} exceeds 1",
                self.p
            )));
        }
        let pairs = expected_comparable_pairs(self.n, self.p);
        if pairs > MAX_EXPECTED_PAIRS {
            return Err(Error::Feasibility(format!(
                "expected {pairs:.3e} comparable pairs at n={} p={} exceeds {MAX_EXPECTED_PAIRS:e}",
                self.n, self.p
            )));
        }
        Ok(())
    }

    /// `p m t`
    pub fn pmt(&self) -> f64 {
        self.p * lattice::middle_binomial(self.n) as f64 * f64::from(self.t)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExperimentRow {
    pub mode: ExperimentMode,
    pub n: u32,
    pub t: u32,
    pub c_or_p: f64,
    pub trial: u64,
    pub sample_size: u64,
    pub alpha: u64,
    pub pm_t: f64,
    pub ratio: f64,
    /// Wall time of the trial; left at 0 by the library.
    pub millis: u64,
}

/// Largest number of sampled vertices lying in a single layer; a lower bound on `alpha`.
pub fn max_layer_count(sample: &VertexSet) -> u64 {
    let mut counts = [0u64; MAX_N as usize + 1];
    for v in sample.iter() {
        counts[v.layer() as usize] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

/// Samples and solves one trial of `point`.
pub fn run_trial(point: &ExperimentPoint, seed: u64, trial: u64) -> Result<ExperimentRow> {
    point.check_feasible()?;
    let config = SampleConfig::new(point.n, point.p, seed)?;
    let sample = sample_power_set(&config, trial);
    let witness = max_antichain_exact(&sample)?;
    let floor = max_layer_count(&sample);
    if witness.alpha < floor {
        return Err(Error::Invariant(format!(
            "alpha={} is below the largest sampled layer count {floor}",
            witness.alpha
        )));
    }
    let pm_t = point.pmt();
    Ok(ExperimentRow {
        mode: point.mode,
        n: point.n,
        t: point.t,
        c_or_p: point.c_or_p,
        trial,
        sample_size: sample.len() as u64,
        alpha: witness.alpha,
        pm_t,
        ratio: witness.alpha as f64 / pm_t,
        millis: 0,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkippedPoint {
    pub c_or_p: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutcome {
    pub rows: Vec<ExperimentRow>,
    pub skipped: Vec<SkippedPoint>,
}

fn run_points(points: &[ExperimentPoint], trials: u64, seed: u64) -> Result<ExperimentOutcome> {
    let mut outcome = ExperimentOutcome::default();
    for point in points {
        if let Err(e) = point.check_feasible() {
            outcome.skipped.push(SkippedPoint {
                c_or_p: point.c_or_p,
                reason: format!("{e}"),
            });
            continue;
        }
        for trial in 0..trials {
            outcome.rows.push(run_trial(point, seed, trial)?);
        }
    }
    Ok(outcome)
}

/// `trials` samples at `p = c/n` for each `c`, in the given order.
pub fn threshold_experiment(
    n: u32,
    c_values: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ExperimentOutcome> {
    let points = c_values
        .iter()
        .map(|&c| ExperimentPoint::threshold(n, c))
        .collect::<Result<Vec<_>>>()?;
    run_points(&points, trials, seed)
}

/// `trials` samples at a fixed `(t, p)`.
pub fn window_experiment_t(
    n: u32,
    t: u32,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentOutcome> {
    run_points(&[ExperimentPoint::window(n, t, p)?], trials, seed)
}

/// Median of the ratio column for each distinct `c_or_p`, in first-seen order.
pub fn median_ratios(rows: &[ExperimentRow]) -> Vec<(f64, f64)> {
    let mut keys: Vec<f64> = Vec::new();
    for r in rows {
        if !keys.contains(&r.c_or_p) {
            keys.push(r.c_or_p);
        }
    }
    keys.into_iter()
        .map(|k| {
            let mut v: Vec<f64> = rows
                .iter()
                .filter(|r| r.c_or_p == k)
                .map(|r| r.ratio)
                .collect();
            v.sort_by(f64::total_cmp);
            let mid = v.len() / 2;
            let median = if v.len() % 2 == 1 {
                v[mid]
            } else {
                (v[mid - 1] + v[mid]) / 2.0
            };
            (k, median)
        })
        .collect()
}

/// Number of adjacent increases in a sequence of medians.
pub fn inversions(medians: &[f64]) -> usize {
    medians.windows(2).filter(|w| w[1] > w[0]).count()
}
