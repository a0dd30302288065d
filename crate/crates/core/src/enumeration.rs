//! Counting antichains of every size in small lattices, and building large antichains inside
//! the middle layers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::ln_binomial;
use crate::error::{Error, Result};
use crate::lattice::{
    self, centrality_order, comparable, induced_degrees, layer_vertices, middle_binomial,
    BitTable, SubsetVertex, VertexSet,
};

/// Largest `n` for which antichains are counted.
pub const CENSUS_MAX_N: u32 = 6;
/// Largest `n` handled by the layer-by-layer count.
const LAYER_DP_MAX_N: u32 = 5;

/// `counts[s]` is the number of antichains of size `s` in `P(n)`, for `s = 0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AntichainCensus {
    pub n: u32,
    pub counts: Vec<u64>,
}

impl AntichainCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn check_census_n(n: u32) -> Result<()> {
    if n > CENSUS_MAX_N {
        return Err(Error::Feasibility(format!(
            "antichain census supports n <= {CENSUS_MAX_N}, got {n}"
        )));
    }
    Ok(())
}

/// Grows antichains one vertex at a time in centrality order, tracking the still-compatible
/// vertices as a 64-bit mask.
pub fn census_dfs(n: u32) -> Result<Vec<u64>> {
    check_census_n(n)?;
    let order = centrality_order(n)?.to_vec();
    let comp: Vec<u64> = order
        .iter()
        .map(|&a| {
            order
                .iter()
                .enumerate()
                .filter(|&(_, &b)| comparable(a, b))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let all = if order.len() == 64 {
        u64::MAX
    } else {
        (1u64 << order.len()) - 1
    };
    let mut counts = vec![0u64; order.len() + 1];

    fn go(comp: &[u64], cand: u64, size: usize, counts: &mut [u64]) {
        counts[size] += 1;
        let mut rest = cand;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            go(comp, rest & !comp[i], size + 1, counts);
        }
    }
    go(&comp, all, 0, &mut counts);
    Ok(counts)
}

/// Sweeps layers from the top down; the state is the set of vertices in the current layer
/// lying below something already chosen.
fn census_layer_dp(n: u32) -> Vec<u64> {
    let layers: Vec<Vec<u32>> = (0..=n)
        .map(|k| layer_vertices(n, k).map(SubsetVertex::id).collect())
        .collect();
    // shadow[k][i]: vertices of layer k-1 below vertex i of layer k, as a mask over layer k-1
    let shadow: Vec<Vec<u64>> = (0..=n as usize)
        .map(|k| {
            layers[k]
                .iter()
                .map(|&v| {
                    if k == 0 {
                        return 0;
                    }
                    layers[k - 1]
                        .iter()
                        .enumerate()
                        .filter(|&(_, &w)| w & v == w)
                        .fold(0u64, |m, (j, _)| m | 1 << j)
                })
                .collect()
        })
        .collect();

    let mut states: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    states.insert(0, vec![1]);
    for k in (0..=n as usize).rev() {
        let full = (1u64 << layers[k].len()) - 1;
        let mut next: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (&blocked, poly) in &states {
            let free = full & !blocked;
            let mut chosen = free;
            loop {
                let size = chosen.count_ones() as usize;
                let down = blocked | chosen;
                let mut below = 0u64;
                let mut bits = down;
                while bits != 0 {
                    below |= shadow[k][bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                let slot = next.entry(below).or_default();
                if slot.len() < poly.len() + size {
                    slot.resize(poly.len() + size, 0);
                }
                for (j, &c) in poly.iter().enumerate() {
                    slot[j + size] += c;
                }
                if chosen == 0 {
                    break;
                }
                chosen = (chosen - 1) & free;
            }
        }
        states = next;
    }
    let mut counts = vec![0u64; (1usize << n) + 1];
    for poly in states.values() {
        for (j, &c) in poly.iter().enumerate() {
            counts[j] += c;
        }
    }
    counts
}

/// Candidate-list search in descending bitmask order with explicit comparability tests.
fn census_descending(n: u32) -> Vec<u64> {
    let verts: Vec<SubsetVertex> = (0..1u32 << n).rev().map(SubsetVertex::from_id).collect();
    let mut counts = vec![0u64; verts.len() + 1];
    let mut arena: Vec<SubsetVertex> = verts;

    fn go(arena: &mut Vec<SubsetVertex>, start: usize, size: usize, counts: &mut [u64]) {
        counts[size] += 1;
        let end = arena.len();
        for j in start..end {
            let v = arena[j];
            let base = arena.len();
            for k in j + 1..end {
                let w = arena[k];
                if !comparable(v, w) {
                    arena.push(w);
                }
            }
            go(arena, base, size + 1, counts);
            arena.truncate(base);
        }
    }
    go(&mut arena, 0, 0, &mut counts);
    counts
}

/// Counts by a second, unrelated method: layer DP for `n <= 5`, a descending-order search at 6.
pub fn census_independent(n: u32) -> Result<Vec<u64>> {
    check_census_n(n)?;
    Ok(if n <= LAYER_DP_MAX_N {
        census_layer_dp(n)
    } else {
        census_descending(n)
    })
}

/// Antichain counts by size, cross-checked between two enumerators.
pub fn census(n: u32) -> Result<AntichainCensus> {
    let a = census_dfs(n)?;
    let b = census_independent(n)?;
    if a != b {
        return Err(Error::Invariant(format!(
            "antichain enumerators disagree at n={n}: {a:?} vs {b:?}"
        )));
    }
    let m = middle_binomial(n) as usize;
    if a[m + 1..].iter().any(|&c| c != 0) {
        return Err(Error::Invariant(format!(
            "antichain larger than m={m} found at n={n}"
        )));
    }
    let mut counts = a;
    counts.truncate(m + 1);
    Ok(AntichainCensus { n, counts })
}

fn check_t(n: u32, t: u32) -> Result<()> {
    if t == 0 || t > n + 1 {
        return Err(Error::Parameter(format!(
            "t={t} must lie in 1..={} for n={n}",
            n + 1
        )));
    }
    Ok(())
}

/// Vertices of the `t` most central layers.
fn middle_layers(n: u32, t: u32) -> Result<Vec<u32>> {
    let order = centrality_order(n)?;
    let layers = &order.layer_sequence()[..t as usize];
    Ok(layers
        .iter()
        .flat_map(|&k| layer_vertices(n, k).map(SubsetVertex::id))
        .collect())
}

fn greedy_pass(n: u32, pool: &[u32], s: u64) -> Vec<u32> {
    let mut blocked = BitTable::new(n);
    let mut picked = Vec::new();
    for &v in pool {
        if picked.len() as u64 == s {
            break;
        }
        if blocked.contains(v) {
            continue;
        }
        picked.push(v);
        for w in lattice::neighbours(v, n) {
            blocked.insert(w);
        }
    }
    picked
}

/// An antichain of size `s` inside the `t` middle layers: one randomized greedy pass, then a
/// deterministic pass in layer order if that falls short.
pub fn greedy_middle_layers(n: u32, t: u32, s: u64, seed: u64) -> Result<VertexSet> {
    lattice::LatticeParams::new(n)?;
    check_t(n, t)?;
    let mut pool = middle_layers(n, t)?;
    let deterministic = greedy_pass(n, &pool, s);
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let randomized = greedy_pass(n, &pool, s);
    for picked in [randomized, deterministic.clone()] {
        if picked.len() as u64 == s {
            return VertexSet::from_ids(n, picked);
        }
    }
    Err(Error::Construction {
        requested: s,
        achieved: deterministic.len() as u64,
    })
}

/// Log-scale bracket around the number of `s`-antichains.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Bracket {
    /// `ln C(tm - slack, s)`.
    pub lower: f64,
    /// `ln C((t + 2 eps) m, s)`.
    pub upper: f64,
    pub slack: u64,
    /// Vertices in the `t` middle layers.
    pub pool: u64,
    /// Most comparable partners of one pool vertex inside the pool.
    pub max_degree: u64,
}

/// Lower bound from greedily extending in the `t` middle layers, each choice excluding at most
/// `max_degree` others; upper bound from the count of `s`-subsets of a `(t+2eps)m`-set.
pub fn proposition_bracket(n: u32, s: u64, t: u32, eps: f64) -> Result<Bracket> {
    let m = middle_binomial(n);
    check_t(n, t)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Parameter(format!("eps={eps} must be positive")));
    }
    let cap = (f64::from(t) + 2.0 * eps) * m as f64;
    if s as f64 > cap {
        return Err(Error::Precondition(format!(
            "s={s} exceeds (t+2eps)m={cap}"
        )));
    }
    let pool_ids = middle_layers(n, t)?;
    let pool = pool_ids.len() as u64;
    let max_degree = induced_degrees(&VertexSet::from_ids(n, pool_ids)?)
        .into_iter()
        .max()
        .map_or(0, u64::from);
    if s == 0 {
        return Ok(Bracket {
            lower: 0.0,
            upper: 0.0,
            slack: 0,
            pool,
            max_degree,
        });
    }
    let tm = u64::from(t) * m;
    let slack = tm.saturating_sub(pool) + (s - 1) * max_degree;
    let lower = ln_binomial(tm.saturating_sub(slack) as f64, s as f64);
    let upper = ln_binomial(cap, s as f64);
    Ok(Bracket {
        lower,
        upper,
        slack,
        pool,
        max_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antichain::is_antichain;
    use crate::lattice::induced_edges;

    #[test]
    fn totals() {
        let want = [2u64, 3, 6, 20, 168, 7581];
        for (n, &w) in want.iter().enumerate() {
            let c = census(n as u32).unwrap();
            assert_eq!(c.total(), w, "n={n}");
            assert_eq!(c.counts.len() as u64, middle_binomial(n as u32) + 1);
        }
        assert_eq!(census(2).unwrap().counts, [1, 4, 1]);
        assert!(matches!(census(7), Err(Error::Feasibility(_))));
    }

    #[test]
    fn pair_counts_match_edges() {
        for n in 2..=5 {
            let c = census(n).unwrap();
            let v = 1u64 << n;
            assert_eq!(c.counts[1], v);
            let e = induced_edges(&VertexSet::full(n).unwrap());
            assert_eq!(c.counts[2], v * (v - 1) / 2 - e);
            assert_eq!(*c.counts.last().unwrap(), if n % 2 == 0 { 1 } else { 2 });
        }
    }

    #[test]
    fn greedy_examples() {
        let a = greedy_middle_layers(4, 1, 6, 0).unwrap();
        assert_eq!(a.len(), 6);
        assert!(is_antichain(&a));
        assert!(matches!(
            greedy_middle_layers(4, 1, 7, 0),
            Err(Error::Construction { requested: 7, .. })
        ));
        // no antichain of P(6) exceeds 20
        assert!(matches!(
            greedy_middle_layers(6, 2, 25, 0),
            Err(Error::Construction { requested: 25, .. })
        ));
        let b = greedy_middle_layers(10, 2, 100, 3).unwrap();
        assert_eq!(b.len(), 100);
        assert!(is_antichain(&b));
        assert!(b.iter().all(|v| v.layer() == 5 || v.layer() == 6));
        assert!(greedy_middle_layers(4, 0, 1, 0).is_err());
        assert!(greedy_middle_layers(4, 1, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn brackets() {
        let b = proposition_bracket(10, 0, 1, 0.1).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let b = proposition_bracket(10, 1, 1, 0.1).unwrap();
        assert_eq!(b.pool, 252);
        assert_eq!(b.max_degree, 0);
        assert!((b.lower - libm::log(252.0)).abs() < 1e-9);
        assert!(b.lower <= b.upper);
        let b = proposition_bracket(8, 20, 2, 0.1).unwrap();
        assert!(b.lower <= b.upper);
        assert_eq!(b.pool, 70 + 56);
        assert!(matches!(
            proposition_bracket(8, 200, 2, 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bracket_contains_true_count_at_n4() {
        // t = 1: every s-subset of the middle layer is an antichain
        let c = census(4).unwrap();
        for s in 1..=6u64 {
            let b = proposition_bracket(4, s, 1, 0.25).unwrap();
            let truth = libm::log(c.counts[s as usize] as f64);
            assert!(b.lower <= truth + 1e-9, "s={s}");
            assert!(b.lower <= b.upper);
        }
    }
}
