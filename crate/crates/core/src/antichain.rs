//! Maximum antichains of arbitrary subfamilies of `P(n)`.
//!
//! Containment is transitive, so a chain cover of `S` is a path cover of the containment DAG
//! and Dilworth's theorem reduces to bipartite matching: split every member into a left and a
//! right copy, join `A_left -> B_right` whenever `A ⊊ B`, and the minimum number of chains is
//! `|S| - ν`. The König vertex cover of that bipartite graph yields an antichain of the same
//! size, so every solve carries its own optimality certificate.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{self, proper_submasks, BitTable, SubsetVertex, VertexSet, NAIVE_EDGE_LIMIT};
use crate::matching::{hopcroft_karp, Csr, NONE};

/// Solver refuses families larger than this.
pub const MAX_SOLVER_VERTICES: usize = 1 << 20;
/// Solver refuses families with more comparable pairs than this.
pub const MAX_SOLVER_EDGES: u64 = 100_000_000;
/// Membership probes `Σ 2^|B|` spent generating edges.
pub const MAX_SOLVER_PROBES: u64 = 4_000_000_000;
/// Brute-force oracle size limit.
pub const BRUTEFORCE_MAX: usize = 25;

/// True iff no two members are comparable.
pub fn is_antichain(s: &VertexSet) -> bool {
    if s.len() <= NAIVE_EDGE_LIMIT {
        let ids = s.ids();
        !ids.iter()
            .enumerate()
            .any(|(i, &a)| ids[i + 1..].iter().any(|&b| a & b == a))
    } else {
        comparable_pairs(s).next().is_none()
    }
}

/// Streams every containment `(A, B)` with `A ⊊ B` inside a family.
///
/// Pairs are grouped by `B` in ascending order; within a group `A` descends. Each pair is found
/// by probing the proper submasks of `B` against a membership table.
pub struct ComparablePairs<'a> {
    members: &'a [u32],
    table: BitTable,
    idx: usize,
    sub: Option<u32>,
}

impl Iterator for ComparablePairs<'_> {
    type Item = (SubsetVertex, SubsetVertex);

    fn next(&mut self) -> Option<Self::Item> {
        while self.idx < self.members.len() {
            let b = self.members[self.idx];
            while let Some(a) = self.sub {
                self.sub = if a == 0 { None } else { Some((a - 1) & b) };
                if self.table.contains(a) {
                    return Some((SubsetVertex::from_id(a), SubsetVertex::from_id(b)));
                }
            }
            self.idx += 1;
            self.sub = self.members.get(self.idx).and_then(|&b| first_proper_submask(b));
        }
        None
    }
}

fn first_proper_submask(b: u32) -> Option<u32> {
    (b != 0).then(|| (b - 1) & b)
}

pub fn comparable_pairs(s: &VertexSet) -> ComparablePairs<'_> {
    ComparablePairs {
        members: s.ids(),
        table: s.membership(),
        idx: 0,
        sub: s.ids().first().and_then(|&b| first_proper_submask(b)),
    }
}

/// Exact maximum antichain together with a minimum chain cover proving it optimal.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MatchingWitness {
    pub alpha: u64,
    pub antichain: Vec<SubsetVertex>,
    /// Each chain is listed from its smallest set upward.
    pub chain_cover: Vec<Vec<SubsetVertex>>,
    pub matching_size: u64,
    /// Comparable pairs in the family.
    pub edges: u64,
}

impl MatchingWitness {
    pub fn antichain_set(&self, n: u32) -> VertexSet {
        VertexSet::from_vertices(n, self.antichain.iter().copied())
            .expect("witness ids come from a valid family")
    }

    /// Re-checks the Dilworth certificate against the family it was computed for.
    pub fn verify(&self, s: &VertexSet) -> bool {
        let n = s.n();
        let Ok(witness) = VertexSet::from_vertices(n, self.antichain.iter().copied()) else {
            return false;
        };
        if witness.len() != self.antichain.len()
            || witness.len() as u64 != self.alpha
            || !witness.is_subset(s)
            || !is_antichain(&witness)
        {
            return false;
        }
        if self.chain_cover.len() as u64 != self.alpha
            || self.alpha + self.matching_size != s.len() as u64
        {
            return false;
        }
        let chains_ordered = self.chain_cover.iter().all(|c| {
            !c.is_empty()
                && c.windows(2)
                    .all(|w| w[0] != w[1] && w[0].is_subset_of(w[1]))
        });
        if !chains_ordered {
            return false;
        }
        let covered: usize = self.chain_cover.iter().map(Vec::len).sum();
        match VertexSet::from_vertices(n, self.chain_cover.iter().flatten().copied()) {
            Ok(all) => covered == s.len() && all == *s,
            Err(_) => false,
        }
    }
}

fn index_of(ids: &[u32], id: u32) -> u32 {
    ids.binary_search(&id).expect("member of the family") as u32
}

/// Exact maximum antichain via Hopcroft–Karp on the split containment graph.
pub fn max_antichain_exact(s: &VertexSet) -> Result<MatchingWitness> {
    let ids = s.ids();
    let k = ids.len();
    if k > MAX_SOLVER_VERTICES {
        return Err(Error::Feasibility(format!(
            "family has {k} members, solver limit is {MAX_SOLVER_VERTICES}"
        )));
    }
    let probes: u64 = ids.iter().map(|&b| 1u64 << b.count_ones()).sum();
    if probes > MAX_SOLVER_PROBES {
        return Err(Error::Feasibility(format!(
            "edge generation needs {probes} membership probes, limit is {MAX_SOLVER_PROBES}"
        )));
    }

    // Count supersets of every member, then fill rows; both passes walk B in ascending order.
    let table = s.membership();
    let mut offsets = vec![0usize; k + 1];
    let mut edges = 0u64;
    for &b in ids {
        for a in proper_submasks(b) {
            if table.contains(a) {
                offsets[index_of(ids, a) as usize + 1] += 1;
                edges += 1;
            }
        }
    }
    if edges > MAX_SOLVER_EDGES {
        return Err(Error::Feasibility(format!(
            "family has {edges} comparable pairs, solver limit is {MAX_SOLVER_EDGES}"
        )));
    }
    for i in 0..k {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; edges as usize];
    for (bi, &b) in ids.iter().enumerate() {
        for a in proper_submasks(b) {
            if table.contains(a) {
                let ai = index_of(ids, a) as usize;
                targets[fill[ai]] = bi as u32;
                fill[ai] += 1;
            }
        }
    }
    drop(table);
    let adj = Csr { offsets, targets };
    let matching = hopcroft_karp(&adj, k);

    // Chains start at members whose right copy is unmatched (nothing below them in the cover).
    let mut chain_cover = Vec::new();
    for start in 0..k {
        if matching.right[start] != NONE {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = start as u32;
        loop {
            chain.push(SubsetVertex::from_id(ids[cur as usize]));
            let next = matching.left[cur as usize];
            if next == NONE {
                break;
            }
            cur = next;
        }
        chain_cover.push(chain);
    }

    // König: alternating reachability from free left vertices.
    let mut seen_left = vec![false; k];
    let mut seen_right = vec![false; k];
    let mut queue: VecDeque<u32> = (0..k as u32)
        .filter(|&u| matching.left[u as usize] == NONE)
        .collect();
    for &u in &queue {
        seen_left[u as usize] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in adj.row(u as usize) {
            if seen_right[v as usize] {
                continue;
            }
            seen_right[v as usize] = true;
            let w = matching.right[v as usize];
            debug_assert!(w != NONE, "free right vertex reachable: matching not maximum");
            if w != NONE && !seen_left[w as usize] {
                seen_left[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    // Neither copy in the cover (L \ Z) ∪ (R ∩ Z).
    let antichain: Vec<SubsetVertex> = (0..k)
        .filter(|&x| seen_left[x] && !seen_right[x])
        .map(|x| SubsetVertex::from_id(ids[x]))
        .collect();

    let alpha = (k - matching.size) as u64;
    debug_assert_eq!(antichain.len() as u64, alpha);
    debug_assert_eq!(chain_cover.len() as u64, alpha);
    Ok(MatchingWitness {
        alpha,
        antichain,
        chain_cover,
        matching_size: matching.size as u64,
        edges,
    })
}

/// Largest antichain in a family of at most 25 members, by branch and bound over subsets.
pub fn max_antichain_bruteforce(s: &VertexSet) -> Result<u64> {
    Ok(bruteforce_witness(s)?.len() as u64)
}

/// A maximum antichain found by the brute-force search.
pub fn bruteforce_witness(s: &VertexSet) -> Result<VertexSet> {
    let ids = s.ids();
    if ids.len() > BRUTEFORCE_MAX {
        return Err(Error::Feasibility(format!(
            "brute force handles at most {BRUTEFORCE_MAX} members, got {}",
            ids.len()
        )));
    }
    let adj: Vec<u32> = ids
        .iter()
        .map(|&a| {
            ids.iter().enumerate().fold(0u32, |m, (j, &b)| {
                if lattice::comparable(a.into(), b.into()) {
                    m | 1 << j
                } else {
                    m
                }
            })
        })
        .collect();

    fn search(adj: &[u32], cand: u32, cur: u32, best: &mut u32) {
        if cand == 0 {
            if cur.count_ones() > best.count_ones() {
                *best = cur;
            }
            return;
        }
        if cur.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros();
        let bit = 1u32 << v;
        search(adj, cand & !bit & !adj[v as usize], cur | bit, best);
        search(adj, cand & !bit, cur, best);
    }

    let all = if ids.is_empty() {
        0
    } else {
        u32::MAX >> (32 - ids.len())
    };
    let mut best = 0u32;
    search(&adj, all, 0, &mut best);
    Ok(VertexSet::from_sorted_unchecked(
        s.n(),
        (0..ids.len())
            .filter(|&j| best >> j & 1 == 1)
            .map(|j| ids[j])
            .collect(),
    ))
}

/// A maximal antichain grown greedily along a uniformly random ordering of `P(n)`.
pub fn random_maximal_antichain(n: u32, seed: u64) -> Result<VertexSet> {
    lattice::LatticeParams::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..=lattice::full_mask(n)).collect();
    order.shuffle(&mut rng);
    let mut blocked = BitTable::new(n);
    let mut chosen = Vec::new();
    for v in order {
        if blocked.contains(v) {
            continue;
        }
        chosen.push(v);
        blocked.insert(v);
        for w in lattice::neighbours(v, n) {
            blocked.insert(w);
        }
    }
    chosen.sort_unstable();
    Ok(VertexSet::from_sorted_unchecked(n, chosen))
}
