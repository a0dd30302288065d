//! The Boolean lattice `P(n)` as an implicit comparability graph.
//!
//! Nothing here stores edges. Comparability between two vertices is a bitmask test and the
//! neighbourhood of a vertex is enumerated from its sub- and super-masks on demand.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported ground-set size. `2^30` vertices keeps every id in a `u32`.
pub const MAX_N: u32 = 30;

/// Above this many members `induced_edges` switches from pairwise tests to the subset-sum
/// transform.
pub const NAIVE_EDGE_LIMIT: usize = 4096;

/// The subset-sum transform allocates a `u32` per lattice vertex; past this size it is skipped.
const SOS_MAX_N: u32 = 26;

fn check_n(n: u32) -> Result<()> {
    if n > MAX_N {
        return Err(Error::LatticeSize { n, max: MAX_N });
    }
    Ok(())
}

/// Exact binomial coefficient. Panics on overflow, which cannot happen for `n <= 62`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// `C(n, floor(n/2))`, the size of a middle layer.
pub fn middle_binomial(n: u32) -> u64 {
    binomial(n, n / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LatticeParams {
    n: u32,
    m: u64,
}

impl LatticeParams {
    pub fn new(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            m: middle_binomial(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Size of the middle layer.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.n
    }
}

/// A subset of `{1, ..., n}`; bit `i - 1` is set iff element `i` is present.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SubsetVertex(u32);

impl SubsetVertex {
    pub const EMPTY: SubsetVertex = SubsetVertex(0);

    pub const fn from_id(id: u32) -> Self {
        SubsetVertex(id)
    }

    /// Builds a vertex from 1-based elements.
    pub fn from_elements(elements: &[u32]) -> Self {
        let mut id = 0u32;
        for &e in elements {
            assert!((1..=32).contains(&e), "element {e} is not in 1..=32");
            id |= 1 << (e - 1);
        }
        SubsetVertex(id)
    }

    pub const fn id(self) -> u32 {
        self.0
    }

    /// Cardinality of the set, i.e. the layer it lives in.
    pub const fn layer(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_subset_of(self, other: SubsetVertex) -> bool {
        self.0 & other.0 == self.0
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let id = self.0;
        (0..32).filter(move |b| id >> b & 1 == 1).map(|b| b + 1)
    }
}

impl From<u32> for SubsetVertex {
    fn from(id: u32) -> Self {
        SubsetVertex(id)
    }
}

impl fmt::Debug for SubsetVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

/// Adjacency in the comparability graph: distinct and nested.
pub fn comparable(a: SubsetVertex, b: SubsetVertex) -> bool {
    a != b && (a.is_subset_of(b) || b.is_subset_of(a))
}

/// Number of vertices of `P(n)` comparable to `a`: `2^|a| + 2^(n-|a|) - 2`.
pub fn degree_in_full_lattice(a: SubsetVertex, n: u32) -> u64 {
    let k = a.layer();
    debug_assert!(k <= n);
    (1u64 << k) + (1u64 << (n - k)) - 2
}

/// Iterates the proper submasks of `mask` in decreasing order, ending with `0`.
pub fn proper_submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = if mask == 0 { None } else { Some((mask - 1) & mask) };
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Iterates the proper supersets of `mask` within `P(n)`.
pub fn proper_supersets(mask: u32, n: u32) -> impl Iterator<Item = u32> {
    let full = full_mask(n);
    let free = full & !mask;
    proper_submasks_inclusive(free)
        .filter(|&extra| extra != 0)
        .map(move |extra| mask | extra)
}

/// All submasks of `mask`, including `mask` itself and `0`.
fn proper_submasks_inclusive(mask: u32) -> impl Iterator<Item = u32> {
    core::iter::once(mask).chain(proper_submasks(mask))
}

/// Every vertex comparable to `mask` in `P(n)`.
pub fn neighbours(mask: u32, n: u32) -> impl Iterator<Item = u32> {
    proper_submasks(mask).chain(proper_supersets(mask, n))
}

pub(crate) const fn full_mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Vertices of layer `k` of `P(n)` in ascending bitmask order (Gosper's hack).
pub fn layer_vertices(n: u32, k: u32) -> impl Iterator<Item = SubsetVertex> {
    let limit = 1u64 << n;
    let mut next: Option<u64> = if k > n {
        None
    } else {
        Some((1u64 << k) - 1)
    };
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < limit).then_some(succ)
        };
        Some(SubsetVertex(cur as u32))
    })
}

/// Fixed-size membership table over all `2^n` vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitTable {
    words: Vec<u64>,
}

impl BitTable {
    pub fn new(n: u32) -> Self {
        let bits = 1usize << n;
        BitTable {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    #[inline]
    pub fn contains(&self, id: u32) -> bool {
        self.words[(id >> 6) as usize] >> (id & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, id: u32) {
        self.words[(id >> 6) as usize] |= 1 << (id & 63);
    }

    #[inline]
    pub fn remove(&mut self, id: u32) {
        self.words[(id >> 6) as usize] &= !(1 << (id & 63));
    }
}

/// A sorted, duplicate-free family of vertices of `P(n)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: u32,
    members: Vec<u32>,
}

impl VertexSet {
    /// Takes ids that must already be strictly increasing and below `2^n`.
    pub fn new(n: u32, members: Vec<u32>) -> Result<Self> {
        check_n(n)?;
        let limit = 1u64 << n;
        if let Some(&last) = members.last() {
            if u64::from(last) >= limit {
                return Err(Error::VertexSet(format!(
                    "id {last} does not fit in P({n})"
                )));
            }
        }
        if let Some(w) = members.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::VertexSet(format!(
                "ids must be strictly increasing, saw {} then {}",
                w[0], w[1]
            )));
        }
        Ok(VertexSet { n, members })
    }

    /// Sorts and deduplicates arbitrary ids.
    pub fn from_ids<I: IntoIterator<Item = u32>>(n: u32, ids: I) -> Result<Self> {
        let mut members: Vec<u32> = ids.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self::new(n, members)
    }

    pub fn from_vertices<I: IntoIterator<Item = SubsetVertex>>(n: u32, vs: I) -> Result<Self> {
        Self::from_ids(n, vs.into_iter().map(SubsetVertex::id))
    }

    pub(crate) fn from_sorted_unchecked(n: u32, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet { n, members }
    }

    pub fn empty(n: u32) -> Self {
        VertexSet {
            n,
            members: Vec::new(),
        }
    }

    /// All of `P(n)`.
    pub fn full(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(VertexSet {
            n,
            members: (0..=full_mask(n)).collect(),
        })
    }

    /// Layer `k` of `P(n)`.
    pub fn layer(n: u32, k: u32) -> Result<Self> {
        check_n(n)?;
        let mut members: Vec<u32> = layer_vertices(n, k).map(SubsetVertex::id).collect();
        members.sort_unstable();
        Ok(VertexSet { n, members })
    }

    pub(crate) fn from_table(n: u32, table: &BitTable) -> Self {
        let members = (0..=full_mask(n)).filter(|&v| table.contains(v)).collect();
        VertexSet { n, members }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids(&self) -> &[u32] {
        &self.members
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.members
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = SubsetVertex> + '_ {
        self.members.iter().map(|&id| SubsetVertex(id))
    }

    pub fn contains(&self, v: SubsetVertex) -> bool {
        self.members.binary_search(&v.id()).is_ok()
    }

    pub fn membership(&self) -> BitTable {
        let mut t = BitTable::new(self.n);
        for &v in &self.members {
            t.insert(v);
        }
        t
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| other.members.binary_search(&v).is_ok())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .members
            .iter()
            .all(|v| large.members.binary_search(v).is_err())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut members = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.members, &other.members);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    members.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    members.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    members.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        members.extend_from_slice(&a[i..]);
        members.extend_from_slice(&b[j..]);
        VertexSet {
            n: self.n.max(other.n),
            members,
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            n: self.n,
            members: self
                .members
                .iter()
                .copied()
                .filter(|v| other.members.binary_search(v).is_err())
                .collect(),
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexSet(n={}) ", self.n)?;
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Layers of `P(n)` visited middle-out: `h, h+1, h-1, h+2, h-2, ...` with `h = floor(n/2)`.
/// Inside a layer vertices appear in ascending bitmask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralityOrder {
    n: u32,
    layer_sequence: Vec<u32>,
}

impl CentralityOrder {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn layer_sequence(&self) -> &[u32] {
        &self.layer_sequence
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetVertex> + '_ {
        let n = self.n;
        self.layer_sequence
            .iter()
            .flat_map(move |&k| layer_vertices(n, k))
    }

    pub fn to_vec(&self) -> Vec<SubsetVertex> {
        self.iter().collect()
    }

    /// `positions()[id]` is the index of vertex `id` in the order.
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; 1usize << self.n];
        for (i, v) in self.iter().enumerate() {
            pos[v.id() as usize] = i as u32;
        }
        pos
    }
}

pub fn centrality_order(n: u32) -> Result<CentralityOrder> {
    check_n(n)?;
    let h = n / 2;
    let mut layer_sequence = Vec::with_capacity(n as usize + 1);
    layer_sequence.push(h);
    for d in 1..=n {
        if h + d <= n {
            layer_sequence.push(h + d);
        }
        if d <= h {
            layer_sequence.push(h - d);
        }
    }
    Ok(CentralityOrder { n, layer_sequence })
}

/// The first `r` vertices of the centrality order.
pub fn initial_segment(n: u32, r: u64) -> Result<VertexSet> {
    let order = centrality_order(n)?;
    let total = 1u64 << n;
    if r > total {
        return Err(Error::OutOfRange {
            what: "r",
            value: r,
            max: total,
        });
    }
    let mut members: Vec<u32> = order.iter().take(r as usize).map(SubsetVertex::id).collect();
    members.sort_unstable();
    Ok(VertexSet { n, members })
}

/// Number of comparable pairs inside `u`, choosing the faster algorithm.
pub fn induced_edges(u: &VertexSet) -> u64 {
    if u.len() > NAIVE_EDGE_LIMIT && u.n <= SOS_MAX_N {
        induced_edges_sos(u)
    } else {
        induced_edges_naive(u)
    }
}

/// Pairwise containment tests, `O(|u|^2)`.
pub fn induced_edges_naive(u: &VertexSet) -> u64 {
    let ids = &u.members;
    let mut edges = 0u64;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            // a < b numerically, so only a ⊂ b is possible.
            if a & b == a {
                edges += 1;
            }
        }
    }
    edges
}

/// Subset-sum (zeta) transform over the indicator of `u`: for each member `A`, the number of
/// members below it is `count(A) - 1`.
pub fn induced_edges_sos(u: &VertexSet) -> u64 {
    let below = subset_counts(u);
    u.members
        .iter()
        .map(|&a| u64::from(below[a as usize]) - 1)
        .sum()
}

fn indicator(u: &VertexSet) -> Vec<u32> {
    let mut f = vec![0u32; 1usize << u.n];
    for &a in &u.members {
        f[a as usize] = 1;
    }
    f
}

/// `out[x]` = number of members of `u` that are subsets of `x` (including `x`).
fn subset_counts(u: &VertexSet) -> Vec<u32> {
    let mut f = indicator(u);
    for bit in 0..u.n {
        let step = 1usize << bit;
        for block in f.chunks_exact_mut(step * 2) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter().zip(hi) {
                *h += *l;
            }
        }
    }
    f
}

/// `out[x]` = number of members of `u` that are supersets of `x` (including `x`).
fn superset_counts(u: &VertexSet) -> Vec<u32> {
    let mut f = indicator(u);
    for bit in 0..u.n {
        let step = 1usize << bit;
        for block in f.chunks_exact_mut(step * 2) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l += *h;
            }
        }
    }
    f
}

/// Degree of each member of `u` inside `G[u]`, aligned with `u.ids()`.
pub fn induced_degrees(u: &VertexSet) -> Vec<u32> {
    if u.len() > NAIVE_EDGE_LIMIT && u.n <= SOS_MAX_N {
        let down = subset_counts(u);
        let up = superset_counts(u);
        u.members
            .iter()
            .map(|&a| down[a as usize] + up[a as usize] - 2)
            .collect()
    } else {
        let mut deg = vec![0u32; u.len()];
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                let (a, b) = (u.members[i], u.members[j]);
                if a & b == a {
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
        }
        deg
    }
}
