//! Ranking of paths inside their fiber.
//!
//! The fiber of a vertex `v` at level `n` is the set of root paths ending
//! at `v`, totally ordered lexicographically. The rank of a path is its
//! position in that order, so fiber successor is rank + 1.

use crate::diagram::OrderedDiagram;
use crate::error::{Error, Result};
use crate::path::FinitePath;

/// Fiber sizes and edge offsets up to a fixed depth.
///
/// `offsets[n][e]` is the number of paths into `r(e)` that are smaller than
/// every path ending with `e`, so `rank(p·e) = offsets[n][e] + rank(p)`.
#[derive(Debug, Clone)]
pub struct Fibers<'a> {
    d: &'a OrderedDiagram,
    counts: Vec<Vec<u128>>,
    offsets: Vec<Vec<u128>>,
}

impl<'a> Fibers<'a> {
    pub fn new(d: &'a OrderedDiagram, depth: usize) -> Result<Self> {
        let mut counts = vec![vec![1u128]];
        let mut offsets = vec![Vec::new()];
        for n in 1..=depth {
            let level = d.level(n)?;
            let prev = &counts[n - 1];
            let mut cur = vec![0u128; level.vertex_count()];
            let mut off = vec![0u128; level.edge_count()];
            for (v, slot) in cur.iter_mut().enumerate() {
                let mut acc = 0u128;
                for &e in level.in_edges(v) {
                    off[e] = acc;
                    acc = acc
                        .checked_add(prev[level.edge(e).src])
                        .ok_or(Error::Overflow { level: n })?;
                }
                *slot = acc;
            }
            counts.push(cur);
            offsets.push(off);
        }
        Ok(Fibers { d, counts, offsets })
    }

    pub fn diagram(&self) -> &'a OrderedDiagram {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self, n: usize) -> &[u128] {
        &self.counts[n]
    }

    pub fn size(&self, n: usize, v: usize) -> u128 {
        self.counts[n][v]
    }

    pub fn offset(&self, n: usize, e: usize) -> u128 {
        self.offsets[n][e]
    }

    /// Rank of a valid path of length at most `depth()`.
    pub fn rank(&self, p: &[usize]) -> u128 {
        p.iter()
            .enumerate()
            .map(|(i, &e)| self.offsets[i + 1][e])
            .sum()
    }

    /// Path of rank `r` in the fiber of `v` at level `n`.
    pub fn unrank(&self, n: usize, mut v: usize, mut r: u128) -> Option<FinitePath> {
        if r >= self.counts[n][v] {
            return None;
        }
        let mut edges = vec![0usize; n];
        for k in (1..=n).rev() {
            let level = self.d.lvl(k);
            let ins = level.in_edges(v);
            // offsets increase along the ord order
            let idx = ins.partition_point(|&e| self.offsets[k][e] <= r) - 1;
            let e = ins[idx];
            r -= self.offsets[k][e];
            edges[k - 1] = e;
            v = level.edge(e).src;
        }
        Some(FinitePath::new(edges))
    }
}
