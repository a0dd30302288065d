//! Two-phase container construction on the comparability graph of `P(n)`.
//!
//! Given an antichain `I`, the process repeatedly takes the maximum-degree vertex `u` of the
//! surviving graph (ties broken by a fixed total order):
//!
//! * `u ∉ I`: delete `u`.
//! * `u ∈ I` with degree at least the phase threshold: record `u`, delete `u` and all of its
//!   surviving neighbours.
//! * `u ∈ I` below the threshold: record `u`, delete only `u`, and close the phase. Closing
//!   phase 1 fixes `f(S1)` as the survivors; closing phase 2 fixes `g(S1 ∪ S2)` and stops.
//!
//! Phase 1 uses the threshold `n^(t+0.9)` and records into `S1`; phase 2 uses `eps^2 n^t` and
//! records into `S2`. If the graph runs out before a phase closes, the outstanding sets are
//! empty.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::antichain::is_antichain;
use crate::error::{Error, Result};
use crate::lattice::{
    self, centrality_order, degree_in_full_lattice, induced_degrees, induced_edges,
    middle_binomial, BitTable, SubsetVertex, VertexSet,
};

/// Total order used to break degree ties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieOrder {
    /// Ascending vertex id.
    Bitmask,
    /// Position in the centrality order.
    Centrality,
    /// An explicit permutation of all `2^n` ids, earliest first.
    Custom(Vec<u32>),
}

impl TieOrder {
    /// `ranks[id]` is the position of `id` in the order.
    fn ranks(&self, n: u32) -> Result<Vec<u32>> {
        match self {
            TieOrder::Bitmask => Ok((0..1u32 << n).collect()),
            TieOrder::Centrality => Ok(centrality_order(n)?.positions()),
            TieOrder::Custom(seq) => {
                let size = 1usize << n;
                if seq.len() != size {
                    return Err(Error::Parameter(format!(
                        "tie order lists {} vertices, P({n}) has {size}",
                        seq.len()
                    )));
                }
                let mut ranks = alloc::vec![u32::MAX; size];
                for (pos, &id) in seq.iter().enumerate() {
                    let slot = ranks.get_mut(id as usize).ok_or_else(|| {
                        Error::Parameter(format!("tie order id {id} outside P({n})"))
                    })?;
                    if *slot != u32::MAX {
                        return Err(Error::Parameter(format!("tie order repeats id {id}")));
                    }
                    *slot = pos as u32;
                }
                Ok(ranks)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainerParams {
    n: u32,
    t: u32,
    eps: f64,
    theta1: f64,
    theta2: f64,
    tie_order: TieOrder,
}

impl ContainerParams {
    /// Parameters inside the lemma's range `0 < eps <= 1/(2t)^(t+1)`.
    pub fn new(n: u32, t: u32, eps: f64) -> Result<Self> {
        let params = Self::relaxed(n, t, eps)?;
        let cap = params.eps_cap();
        if eps > cap {
            return Err(Error::Parameter(format!(
                "eps={eps} exceeds 1/(2t)^(t+1)={cap} for t={t}"
            )));
        }
        Ok(params)
    }

    /// Accepts any `eps` in `(0, 1]`. The size guarantees are then no longer implied by the
    /// density corollary and have to be checked on each result.
    pub fn relaxed(n: u32, t: u32, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        lattice::LatticeParams::new(n)?;
        if t == 0 {
            return Err(Error::Parameter("t must be a positive integer".into()));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Parameter(format!("eps={eps} must lie in (0, 1]")));
        }
        let nf = f64::from(n);
        Ok(Self {
            n,
            t,
            eps,
            theta1: libm::pow(nf, f64::from(t) + 0.9),
            theta2: eps * eps * libm::pow(nf, f64::from(t)),
            tie_order: TieOrder::Bitmask,
        })
    }

    pub fn with_tie_order(mut self, tie_order: TieOrder) -> Self {
        self.tie_order = tie_order;
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Phase-1 threshold `n^(t+0.9)`.
    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// Phase-2 threshold `eps^2 n^t`.
    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn tie_order(&self) -> &TieOrder {
        &self.tie_order
    }

    pub fn eps_cap(&self) -> f64 {
        1.0 / libm::pow(2.0 * f64::from(self.t), f64::from(self.t + 1))
    }

    pub fn in_lemma_range(&self) -> bool {
        self.eps <= self.eps_cap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Branch {
    /// Not in `I`; deleted alone.
    NonMember,
    /// In `I` at or above the threshold; deleted with its neighbourhood.
    Heavy,
    /// In `I` below the threshold; closes the phase.
    Light,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TraceStep {
    pub step: u64,
    pub phase: u8,
    pub vertex: SubsetVertex,
    pub degree: u32,
    pub branch: Branch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainerResult {
    pub s1: VertexSet,
    pub s2: VertexSet,
    pub f_s1: VertexSet,
    pub g: VertexSet,
    pub trace: Option<Vec<TraceStep>>,
}

impl ContainerResult {
    /// `S1 ∪ S2`.
    pub fn selected(&self) -> VertexSet {
        self.s1.union(&self.s2)
    }

    /// Equality of the four sets, ignoring the trace.
    pub fn same_sets(&self, other: &ContainerResult) -> bool {
        self.s1 == other.s1 && self.s2 == other.s2 && self.f_s1 == other.f_s1 && self.g == other.g
    }
}

struct Pool {
    n: u32,
    alive: BitTable,
    degree: Vec<u32>,
}

impl Pool {
    fn full(n: u32) -> Self {
        let mut alive = BitTable::new(n);
        let mut degree = Vec::with_capacity(1 << n);
        for id in 0..1u32 << n {
            alive.insert(id);
            degree.push(degree_in_full_lattice(SubsetVertex::from_id(id), n) as u32);
        }
        Pool { n, alive, degree }
    }

    fn delete(&mut self, v: u32) {
        self.alive.remove(v);
        for w in lattice::neighbours(v, self.n) {
            if self.alive.contains(w) {
                self.degree[w as usize] -= 1;
            }
        }
    }

    fn delete_closed_neighbourhood(&mut self, u: u32) {
        let around: Vec<u32> = lattice::neighbours(u, self.n)
            .filter(|&w| self.alive.contains(w))
            .collect();
        self.delete(u);
        for w in around {
            self.delete(w);
        }
    }

    fn survivors(&self) -> VertexSet {
        VertexSet::from_table(self.n, &self.alive)
    }
}

/// Runs the two-phase process on antichain `i_set`.
pub fn build_containers(
    i_set: &VertexSet,
    params: &ContainerParams,
    want_trace: bool,
) -> Result<ContainerResult> {
    let n = params.n;
    if i_set.n() != n {
        return Err(Error::Parameter(format!(
            "antichain lives in P({}) but parameters are for P({n})",
            i_set.n()
        )));
    }
    if !is_antichain(i_set) {
        return Err(Error::Precondition("input family is not an antichain".into()));
    }
    let ranks = params.tie_order.ranks(n)?;
    let members = i_set.membership();
    let mut pool = Pool::full(n);

    // Max-heap on (degree, earliest in tie order). Degrees only fall, so an entry whose stored
    // degree exceeds the current one is stale and gets re-queued at its current value.
    let mut heap: BinaryHeap<(u32, Reverse<u32>, u32)> = (0..1u32 << n)
        .map(|v| (pool.degree[v as usize], Reverse(ranks[v as usize]), v))
        .collect();

    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let mut f_s1: Option<VertexSet> = None;
    let mut g: Option<VertexSet> = None;
    let mut trace = want_trace.then(Vec::new);
    let mut step = 0u64;

    while let Some((stored, rank, u)) = heap.pop() {
        if !pool.alive.contains(u) {
            continue;
        }
        let degree = pool.degree[u as usize];
        if stored != degree {
            heap.push((degree, rank, u));
            continue;
        }
        step += 1;
        let phase: u8 = if f_s1.is_none() { 1 } else { 2 };
        let threshold = if phase == 1 {
            params.theta1
        } else {
            params.theta2
        };
        let branch = if !members.contains(u) {
            pool.delete(u);
            Branch::NonMember
        } else {
            let recorded = if phase == 1 { &mut s1 } else { &mut s2 };
            recorded.push(u);
            if f64::from(degree) >= threshold {
                pool.delete_closed_neighbourhood(u);
                Branch::Heavy
            } else {
                pool.delete(u);
                Branch::Light
            }
        };
        if let Some(trace) = trace.as_mut() {
            trace.push(TraceStep {
                step,
                phase,
                vertex: SubsetVertex::from_id(u),
                degree,
                branch,
            });
        }
        if branch == Branch::Light {
            if phase == 1 {
                f_s1 = Some(pool.survivors());
            } else {
                g = Some(pool.survivors());
                break;
            }
        }
    }

    s1.sort_unstable();
    s2.sort_unstable();
    Ok(ContainerResult {
        s1: VertexSet::new(n, s1)?,
        s2: VertexSet::new(n, s2)?,
        f_s1: f_s1.unwrap_or_else(|| VertexSet::empty(n)),
        g: g.unwrap_or_else(|| VertexSet::empty(n)),
        trace,
    })
}

/// Re-runs the process on `S1 ∪ S2` and reports whether it reproduces all four sets.
pub fn rebuild_matches(result: &ContainerResult, params: &ContainerParams) -> Result<bool> {
    let again = build_containers(&result.selected(), params, false)?;
    Ok(result.same_sets(&again))
}

/// `f` and `g` depend only on the recorded vertices: building from `I` and from `S1 ∪ S2`
/// must agree.
pub fn verify_idempotence(i_set: &VertexSet, params: &ContainerParams) -> Result<bool> {
    let first = build_containers(i_set, params, false)?;
    rebuild_matches(&first, params)
}

/// Verdicts for every postcondition of the container construction.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InvariantReport {
    pub size_s1: u64,
    pub size_s2: u64,
    pub size_f_s1: u64,
    pub size_g: u64,
    pub max_degree_f_s1: u32,
    pub max_degree_g: u32,
    pub edges_g: u64,
    pub s1_s2_disjoint: bool,
    pub selected_within_i: bool,
    pub s2_within_f_s1: bool,
    pub selected_disjoint_from_g: bool,
    pub i_covered: bool,
    pub s1_size_bound: bool,
    pub selected_size_bound: bool,
    pub f_s1_size_bound: bool,
    pub g_size_bound: bool,
    pub f_s1_degree_bound: bool,
    pub g_degree_bound: bool,
    pub g_sparsity_bound: bool,
}

impl InvariantReport {
    /// Names of the violated postconditions.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("s1_s2_disjoint", self.s1_s2_disjoint),
            ("selected_within_i", self.selected_within_i),
            ("s2_within_f_s1", self.s2_within_f_s1),
            ("selected_disjoint_from_g", self.selected_disjoint_from_g),
            ("i_covered", self.i_covered),
            ("s1_size_bound", self.s1_size_bound),
            ("selected_size_bound", self.selected_size_bound),
            ("f_s1_size_bound", self.f_s1_size_bound),
            ("g_size_bound", self.g_size_bound),
            ("f_s1_degree_bound", self.f_s1_degree_bound),
            ("g_degree_bound", self.g_degree_bound),
            ("g_sparsity_bound", self.g_sparsity_bound),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }

    pub fn all_hold(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn check_invariants(
    i_set: &VertexSet,
    result: &ContainerResult,
    params: &ContainerParams,
) -> InvariantReport {
    let n = params.n;
    let t = f64::from(params.t);
    let m = middle_binomial(n) as f64;
    let n_t = libm::pow(f64::from(n), t);
    let eps = params.eps;
    let selected = result.selected();
    let max_degree = |u: &VertexSet| induced_degrees(u).into_iter().max().unwrap_or(0);
    let max_degree_f_s1 = max_degree(&result.f_s1);
    let max_degree_g = max_degree(&result.g);
    let edges_g = induced_edges(&result.g);
    let size = |u: &VertexSet| u.len() as u64;

    InvariantReport {
        size_s1: size(&result.s1),
        size_s2: size(&result.s2),
        size_f_s1: size(&result.f_s1),
        size_g: size(&result.g),
        max_degree_f_s1,
        max_degree_g,
        edges_g,
        s1_s2_disjoint: result.s1.is_disjoint(&result.s2),
        selected_within_i: selected.is_subset(i_set),
        s2_within_f_s1: result.s2.is_subset(&result.f_s1),
        selected_disjoint_from_g: selected.is_disjoint(&result.g),
        i_covered: i_set.is_subset(&selected.union(&result.g)),
        s1_size_bound: result.s1.len() as f64 * params.theta1 <= libm::exp2(f64::from(n)),
        selected_size_bound: selected.len() as f64 * eps * eps * n_t <= (t + 2.0) * m,
        f_s1_size_bound: (result.f_s1.len() as f64) < (t + 1.0 + eps) * m,
        g_size_bound: result.g.len() as f64 <= (t + eps) * m,
        f_s1_degree_bound: f64::from(max_degree_f_s1) <= params.theta1,
        g_degree_bound: f64::from(max_degree_g) <= params.theta2,
        g_sparsity_bound: edges_g as f64 <= params.theta2 * result.g.len() as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SizeStat {
    pub min: u64,
    pub median: u64,
    pub max: u64,
}

impl SizeStat {
    /// Lower median for even counts. `None` on empty input.
    pub fn of(mut values: Vec<u64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_unstable();
        Some(SizeStat {
            min: values[0],
            median: values[(values.len() - 1) / 2],
            max: values[values.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SizeStats {
    pub s1: SizeStat,
    pub s2: SizeStat,
    pub f_s1: SizeStat,
    pub g: SizeStat,
}

/// Outcome for one input of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusItem {
    pub report: Result<InvariantReport>,
    /// `None` when the build itself failed.
    pub idempotent: Option<bool>,
}

impl CensusItem {
    pub fn passed(&self) -> bool {
        matches!(&self.report, Ok(r) if r.all_hold()) && self.idempotent == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainerCensus {
    pub items: Vec<CensusItem>,
    /// Over successful builds only; `None` when there were none.
    pub sizes: Option<SizeStats>,
}

impl ContainerCensus {
    pub fn from_items(items: Vec<CensusItem>) -> Self {
        let ok: Vec<&InvariantReport> = items.iter().filter_map(|i| i.report.as_ref().ok()).collect();
        let stat = |f: fn(&InvariantReport) -> u64| SizeStat::of(ok.iter().map(|r| f(r)).collect());
        let sizes = match (
            stat(|r| r.size_s1),
            stat(|r| r.size_s2),
            stat(|r| r.size_f_s1),
            stat(|r| r.size_g),
        ) {
            (Some(s1), Some(s2), Some(f_s1), Some(g)) => Some(SizeStats { s1, s2, f_s1, g }),
            _ => None,
        };
        ContainerCensus { items, sizes }
    }

    pub fn passed(&self) -> usize {
        self.items.iter().filter(|i| i.passed()).count()
    }
}

/// Builds, checks and re-derives the containers of one antichain.
pub fn census_item(i_set: &VertexSet, params: &ContainerParams) -> CensusItem {
    match build_containers(i_set, params, false) {
        Ok(result) => {
            let report = check_invariants(i_set, &result, params);
            let idempotent = rebuild_matches(&result, params).ok();
            CensusItem {
                report: Ok(report),
                idempotent,
            }
        }
        Err(e) => CensusItem {
            report: Err(e),
            idempotent: None,
        },
    }
}

/// Per-input verdicts and aggregate sizes for a batch; failures do not stop the batch.
pub fn container_census(antichains: &[VertexSet], params: &ContainerParams) -> ContainerCensus {
    ContainerCensus::from_items(antichains.iter().map(|a| census_item(a, params)).collect())
}
