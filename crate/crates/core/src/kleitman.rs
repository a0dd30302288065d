//! Edge-minimality of centrality-order initial segments, checked against brute force at tiny
//! `n` and against random subsets above that, plus the density bound derived from it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{self, initial_segment, induced_edges, middle_binomial, VertexSet};

/// Largest `n` for which every subset of `P(n)` is enumerated.
pub const EXHAUSTIVE_MAX_N: u32 = 4;
/// Largest `n` accepted by the randomized falsification search.
pub const RANDOMIZED_MAX_N: u32 = 10;

fn check_r(n: u32, r: u64) -> Result<()> {
    let total = 1u64 << n;
    if r > total {
        return Err(Error::OutOfRange {
            what: "r",
            value: r,
            max: total,
        });
    }
    Ok(())
}

/// `e(G[I_r])` for the length-`r` initial segment of the centrality order.
pub fn kleitman_min_edges(n: u32, r: u64) -> Result<u64> {
    Ok(induced_edges(&initial_segment(n, r)?))
}

/// Comparability masks for `P(n)` with `n <= 6`, indexed by vertex id.
fn adjacency_masks(n: u32) -> Vec<u64> {
    (0..1u32 << n)
        .map(|a| {
            lattice::neighbours(a, n).fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect()
}

#[inline]
fn masked_edges(adj: &[u64], set: u64) -> u64 {
    let mut twice = 0u64;
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        twice += u64::from((adj[v] & set).count_ones());
    }
    twice / 2
}

/// Minimum of `e(G[U])` over all `U` of each size `r = 0..=2^n`, by full enumeration.
pub fn exhaustive_min_edges_all(n: u32) -> Result<Vec<u64>> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::Feasibility(format!(
            "exhaustive Kleitman check enumerates 2^(2^n) subsets; n={n} exceeds {EXHAUSTIVE_MAX_N}"
        )));
    }
    let vertices = 1u32 << n;
    let adj = adjacency_masks(n);
    let mut best = vec![u64::MAX; vertices as usize + 1];
    for set in 0..1u64 << vertices {
        let r = set.count_ones() as usize;
        let e = masked_edges(&adj, set);
        if e < best[r] {
            best[r] = e;
        }
    }
    Ok(best)
}

pub fn exhaustive_min_edges(n: u32, r: u64) -> Result<u64> {
    check_r(n, r)?;
    Ok(exhaustive_min_edges_all(n)?[r as usize])
}

/// Whether the initial segment attains the exhaustive minimum for size `r`.
pub fn verify_kleitman_exhaustive(n: u32, r: u64) -> Result<bool> {
    Ok(exhaustive_min_edges(n, r)? == kleitman_min_edges(n, r)?)
}

/// Fewest induced edges seen among `samples` uniformly random `r`-subsets of `P(n)`.
pub fn randomized_min_edges(n: u32, r: u64, samples: u64, seed: u64) -> Result<u64> {
    if n > RANDOMIZED_MAX_N {
        return Err(Error::Feasibility(format!(
            "randomized Kleitman search supports n <= {RANDOMIZED_MAX_N}, got {n}"
        )));
    }
    check_r(n, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ r.rotate_left(32));
    let mut pool: Vec<u32> = (0..1u32 << n).collect();
    let r = r as usize;
    let adj = (n <= 6).then(|| adjacency_masks(n));
    let mut best = u64::MAX;
    for _ in 0..samples {
        let (chosen, _) = pool.partial_shuffle(&mut rng, r);
        let edges = match &adj {
            Some(adj) => masked_edges(adj, chosen.iter().fold(0u64, |m, &v| m | 1 << v)),
            None => induced_edges(&VertexSet::from_ids(n, chosen.iter().copied())?),
        };
        best = best.min(edges);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// True iff no sampled `r`-subset has fewer induced edges than the initial segment.
pub fn verify_kleitman_randomized(n: u32, r: u64, samples: u64, seed: u64) -> Result<bool> {
    let segment = kleitman_min_edges(n, r)?;
    if samples == 0 {
        return Ok(true);
    }
    Ok(randomized_min_edges(n, r, samples, seed)? >= segment)
}

/// Hypotheses of the density corollary: `t >= 1` and `0 < eps <= 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityBoundParams {
    t: u32,
    eps: f64,
    n: u32,
}

impl DensityBoundParams {
    pub fn new(n: u32, t: u32, eps: f64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Parameter("t must be a positive integer".into()));
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::Parameter(format!("eps={eps} must lie in (0, 1/2]")));
        }
        lattice::LatticeParams::new(n)?;
        Ok(Self { t, eps, n })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Smallest `|U|` covered by the corollary, `(t + eps) m`, as a real.
    pub fn min_size(&self) -> f64 {
        (f64::from(self.t) + self.eps) * middle_binomial(self.n) as f64
    }
}

/// `eps n^t |U| / (2t)^(t+1)` without checking the size hypothesis.
pub fn density_bound_value(params: &DensityBoundParams, size_u: u64) -> f64 {
    let t = params.t as i32;
    params.eps * libm::pow(f64::from(params.n), f64::from(t)) * size_u as f64
        / libm::pow(2.0 * f64::from(t), f64::from(t + 1))
}

/// Lower bound that `e(G[U])` strictly exceeds whenever `|U| >= (t + eps) m`.
pub fn corollary_density_bound(params: &DensityBoundParams, size_u: u64) -> Result<f64> {
    if (size_u as f64) < params.min_size() {
        return Err(Error::Precondition(format!(
            "|U|={size_u} is below (t+eps)m={}",
            params.min_size()
        )));
    }
    Ok(density_bound_value(params, size_u))
}
