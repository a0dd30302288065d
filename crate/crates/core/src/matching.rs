//! Hopcroft–Karp maximum bipartite matching over a compressed adjacency list.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

pub(crate) const NONE: u32 = u32::MAX;

/// Left-to-right adjacency in compressed sparse row form.
pub(crate) struct Csr {
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
}

impl Csr {
    #[inline]
    pub fn row(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn left_count(&self) -> usize {
        self.offsets.len() - 1
    }
}

pub(crate) struct Matching {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub size: usize,
}

/// Maximum matching; free left vertices are tried in ascending index order so the result is
/// reproducible.
pub(crate) fn hopcroft_karp(adj: &Csr, right_count: usize) -> Matching {
    let left_count = adj.left_count();
    let mut mate_left = vec![NONE; left_count];
    let mut mate_right = vec![NONE; right_count];
    let mut size = 0usize;

    // Cheap greedy start; augmenting phases fix whatever it gets wrong.
    for (u, mate) in mate_left.iter_mut().enumerate() {
        if let Some(&v) = adj.row(u).iter().find(|&&v| mate_right[v as usize] == NONE) {
            *mate = v;
            mate_right[v as usize] = u as u32;
            size += 1;
        }
    }

    let mut dist = vec![u32::MAX; left_count];
    let mut cursor = vec![0usize; left_count];
    let mut queue = VecDeque::new();
    let mut stack: Vec<u32> = Vec::new();
    let mut via: Vec<u32> = Vec::new();

    loop {
        // Layer the graph from every free left vertex.
        queue.clear();
        for u in 0..left_count {
            if mate_left[u] == NONE {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in adj.row(u as usize) {
                let w = mate_right[v as usize];
                if w == NONE {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        for (u, c) in cursor.iter_mut().enumerate() {
            *c = adj.offsets[u];
        }
        for root in 0..left_count {
            if mate_left[root] != NONE {
                continue;
            }
            stack.clear();
            via.clear();
            stack.push(root as u32);
            while let Some(&u) = stack.last() {
                let u = u as usize;
                let end = adj.offsets[u + 1];
                let mut advanced = false;
                while cursor[u] < end {
                    let v = adj.targets[cursor[u]];
                    cursor[u] += 1;
                    let w = mate_right[v as usize];
                    if w == NONE {
                        via.push(v);
                        // augment along the stack
                        for (&a, &b) in stack.iter().zip(via.iter()) {
                            mate_left[a as usize] = b;
                            mate_right[b as usize] = a;
                        }
                        size += 1;
                        stack.clear();
                        advanced = true;
                        break;
                    }
                    if dist[w as usize] == dist[u] + 1 {
                        via.push(v);
                        stack.push(w);
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    dist[u] = u32::MAX;
                    stack.pop();
                    via.pop();
                }
            }
        }
    }

    Matching {
        left: mate_left,
        right: mate_right,
        size,
    }
}
