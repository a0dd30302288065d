//! Parallel fan-out over independent work items. Results are collected in input order, so
//! output never depends on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sperner_core::antichain::random_maximal_antichain;
use sperner_core::container::{census_item, ContainerCensus, ContainerParams};
use sperner_core::kleitman::{exhaustive_min_edges_all, kleitman_min_edges, randomized_min_edges};
use sperner_core::sampling::{run_trial, ExperimentOutcome, ExperimentPoint, SkippedPoint};
use sperner_core::VertexSet;

use crate::error::{LabError, LabResult};

/// Worker count: `max` or a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Jobs {
    #[default]
    Max,
    Count(usize),
}

impl std::str::FromStr for Jobs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "max" {
            return Ok(Jobs::Max);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected `max` or a positive integer, got `{s}`")),
            Ok(k) => Ok(Jobs::Count(k)),
        }
    }
}

impl Jobs {
    pub fn threads(self) -> usize {
        match self {
            Jobs::Max => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Jobs::Count(k) => k,
        }
    }

    /// Runs `f` inside a pool of this size.
    pub fn install<T: Send>(self, f: impl FnOnce() -> T + Send) -> LabResult<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads())
            .build()
            .map_err(|e| LabError::Failed(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Every feasible `(point, trial)` pair, solved in parallel; refused points are listed, not run.
pub fn run_experiment(
    points: &[ExperimentPoint],
    trials: u64,
    seed: u64,
    timing: bool,
) -> LabResult<ExperimentOutcome> {
    let mut skipped = Vec::new();
    let mut tasks = Vec::new();
    for point in points {
        match point.check_feasible() {
            Ok(()) => tasks.extend((0..trials).map(|i| (*point, i))),
            Err(e) => skipped.push(SkippedPoint {
                c_or_p: point.c_or_p,
                reason: e.to_string(),
            }),
        }
    }
    let rows = tasks
        .par_iter()
        .map(|(point, trial)| {
            let start = Instant::now();
            let mut row = run_trial(point, seed, *trial)?;
            if timing {
                row.millis = start.elapsed().as_millis() as u64;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, sperner_core::Error>>()?;
    Ok(ExperimentOutcome { rows, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KleitmanMode {
    Exhaustive,
    Randomized { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KleitmanRow {
    pub r: u64,
    pub segment_edges: u64,
    pub verified: bool,
}

pub fn kleitman_rows(n: u32, rs: &[u64], mode: KleitmanMode) -> LabResult<Vec<KleitmanRow>> {
    let minima = match mode {
        KleitmanMode::Exhaustive => Some(exhaustive_min_edges_all(n)?),
        KleitmanMode::Randomized { .. } => None,
    };
    let rows = rs
        .par_iter()
        .map(|&r| {
            let segment_edges = kleitman_min_edges(n, r)?;
            let verified = match (&minima, mode) {
                (Some(m), _) => m[r as usize] == segment_edges,
                (None, KleitmanMode::Randomized { samples, seed }) => {
                    samples == 0 || randomized_min_edges(n, r, samples, seed)? >= segment_edges
                }
                (None, KleitmanMode::Exhaustive) => unreachable!("minima computed above"),
            };
            Ok(KleitmanRow {
                r,
                segment_edges,
                verified,
            })
        })
        .collect::<Result<Vec<_>, sperner_core::Error>>()?;
    Ok(rows)
}

/// Seed of the `i`-th antichain of a batch.
pub fn batch_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i)
}

/// Builds and checks containers for `count` random maximal antichains of `P(n)`.
pub fn container_batch(params: &ContainerParams, count: u64, seed: u64) -> LabResult<ContainerCensus> {
    let n = params.n();
    let items = (0..count)
        .into_par_iter()
        .map(|i| {
            let antichain: VertexSet = random_maximal_antichain(n, batch_seed(seed, i))?;
            Ok(census_item(&antichain, params))
        })
        .collect::<Result<Vec<_>, sperner_core::Error>>()?;
    Ok(ContainerCensus::from_items(items))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jobs_parse() {
        assert_eq!("max".parse::<Jobs>(), Ok(Jobs::Max));
        assert_eq!("3".parse::<Jobs>(), Ok(Jobs::Count(3)));
        assert!("0".parse::<Jobs>().is_err());
        assert!("x".parse::<Jobs>().is_err());
    }

    #[test]
    fn experiment_independent_of_pool_size() {
        let points = [
            ExperimentPoint::threshold(10, 1.0).unwrap(),
            ExperimentPoint::threshold(10, 4.0).unwrap(),
        ];
        let one = Jobs::Count(1).install(|| run_experiment(&points, 6, 9, false)).unwrap().unwrap();
        let many = Jobs::Count(4).install(|| run_experiment(&points, 6, 9, false)).unwrap().unwrap();
        assert_eq!(one, many);
        let seq = sperner_core::sampling::threshold_experiment(10, &[1.0, 4.0], 6, 9).unwrap();
        assert_eq!(one, seq);
    }

    #[test]
    fn kleitman_modes_agree_at_n3() {
        let rs: Vec<u64> = (0..=8).collect();
        let ex = kleitman_rows(3, &rs, KleitmanMode::Exhaustive).unwrap();
        assert!(ex.iter().all(|r| r.verified));
        let rnd = kleitman_rows(3, &rs, KleitmanMode::Randomized { samples: 200, seed: 1 }).unwrap();
        assert_eq!(
            ex.iter().map(|r| r.segment_edges).collect::<Vec<_>>(),
            rnd.iter().map(|r| r.segment_edges).collect::<Vec<_>>()
        );
    }
}
