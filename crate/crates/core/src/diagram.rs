//! Ordered Bratteli diagrams.
//!
//! A diagram is stored as a finite `prefix` of levels followed by a `block`
//! of levels repeated forever. An empty block makes the diagram a finite
//! truncation whose depth is the prefix length. Level `n` (for `n >= 1`)
//! holds the edges from `V_{n-1}` to `V_n`; level 0 is the implicit root.
//!
//! Edge identity is the position of the edge in its level's edge list. The
//! order among edges sharing a range vertex is stored explicitly in `ord`
//! (0 = minimal) and validated to be a permutation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::EventuallyPeriodicPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub src: usize,
    pub dst: usize,
    pub ord: usize,
}

impl EdgeSpec {
    pub fn new(src: usize, dst: usize, ord: usize) -> Self {
        EdgeSpec { src, dst, ord }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub vertex_count: usize,
    pub edges: Vec<EdgeSpec>,
}

impl LevelSpec {
    pub fn new(vertex_count: usize, edges: Vec<EdgeSpec>) -> Self {
        LevelSpec {
            vertex_count,
            edges,
        }
    }

    /// Same level with edges sorted by `(dst, ord)`, the serialized order.
    pub fn canonical(&self) -> LevelSpec {
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| (e.dst, e.ord, e.src));
        LevelSpec::new(self.vertex_count, edges)
    }

    pub fn is_canonical(&self) -> bool {
        self.edges
            .windows(2)
            .all(|w| (w[0].dst, w[0].ord) < (w[1].dst, w[1].ord))
    }
}

/// A vertex addressed by level and position within the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexRef {
    pub level: usize,
    pub index: usize,
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyLevel { level: usize },
    SrcOutOfRange { level: usize, edge: usize, src: usize },
    DstOutOfRange { level: usize, edge: usize, dst: usize },
    Source(VertexRef),
    Sink(VertexRef),
    OrdNotPermutation(VertexRef),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyLevel { level } => write!(f, "level {level} has no vertices"),
            Violation::SrcOutOfRange { level, edge, src } => {
                write!(f, "edge {edge} of level {level} has source {src} out of range")
            }
            Violation::DstOutOfRange { level, edge, dst } => {
                write!(f, "edge {edge} of level {level} has range {dst} out of range")
            }
            Violation::Source(v) => write!(f, "source at {v}"),
            Violation::Sink(v) => write!(f, "sink at {v}"),
            Violation::OrdNotPermutation(v) => write!(f, "ord not a permutation at {v}"),
        }
    }
}

/// Every violated structural invariant of a diagram; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn spec_at<'a>(prefix: &'a [LevelSpec], block: &'a [LevelSpec], n: usize) -> Option<&'a LevelSpec> {
    if n == 0 {
        return None;
    }
    if n <= prefix.len() {
        Some(&prefix[n - 1])
    } else if block.is_empty() {
        None
    } else {
        Some(&block[(n - prefix.len() - 1) % block.len()])
    }
}

/// Checks a raw prefix/block presentation against the structural axioms.
///
/// Levels `1..=|prefix|+|block|+1` are checked so that the seam where the
/// block wraps onto itself is covered.
pub fn validate(prefix: &[LevelSpec], block: &[LevelSpec]) -> ValidationReport {
    let mut violations = Vec::new();
    let last = if block.is_empty() {
        prefix.len()
    } else {
        prefix.len() + block.len() + 1
    };
    let seam = prefix.len() + block.len() + 1;
    let count_at = |n: usize| -> usize {
        if n == 0 {
            1
        } else {
            spec_at(prefix, block, n).map_or(0, |l| l.vertex_count)
        }
    };
    for n in 1..=last {
        let level = spec_at(prefix, block, n).expect("level in range");
        let prev = count_at(n - 1);
        // the seam level repeats block[0]; only its link to the previous level is new
        let full_check = block.is_empty() || n != seam;
        if level.vertex_count == 0 {
            if full_check {
                violations.push(Violation::EmptyLevel { level: n });
            }
            continue;
        }
        let mut outdeg = vec![0usize; prev];
        let mut ords: Vec<Vec<usize>> = vec![Vec::new(); level.vertex_count];
        for (id, e) in level.edges.iter().enumerate() {
            if e.src >= prev {
                violations.push(Violation::SrcOutOfRange {
                    level: n,
                    edge: id,
                    src: e.src,
                });
            } else {
                outdeg[e.src] += 1;
            }
            if e.dst >= level.vertex_count {
                if full_check {
                    violations.push(Violation::DstOutOfRange {
                        level: n,
                        edge: id,
                        dst: e.dst,
                    });
                }
            } else {
                ords[e.dst].push(e.ord);
            }
        }
        for (u, &d) in outdeg.iter().enumerate() {
            if d == 0 {
                violations.push(Violation::Sink(VertexRef {
                    level: n - 1,
                    index: u,
                }));
            }
        }
        if full_check {
            for (v, o) in ords.iter_mut().enumerate() {
                let vref = VertexRef { level: n, index: v };
                if o.is_empty() {
                    violations.push(Violation::Source(vref));
                    continue;
                }
                o.sort_unstable();
                if o.iter().enumerate().any(|(i, &x)| i != x) {
                    violations.push(Violation::OrdNotPermutation(vref));
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Which extreme of the edge order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extreme {
    Max,
    Min,
}

/// A validated level with adjacency indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    spec: LevelSpec,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl Level {
    fn build(spec: LevelSpec, source_count: usize) -> Level {
        let mut in_edges = vec![Vec::new(); spec.vertex_count];
        let mut out_edges = vec![Vec::new(); source_count];
        for (id, e) in spec.edges.iter().enumerate() {
            in_edges[e.dst].push(id);
            out_edges[e.src].push(id);
        }
        for list in &mut in_edges {
            list.sort_by_key(|&id| spec.edges[id].ord);
        }
        Level {
            spec,
            in_edges,
            out_edges,
        }
    }

    pub fn spec(&self) -> &LevelSpec {
        &self.spec
    }

    pub fn vertex_count(&self) -> usize {
        self.spec.vertex_count
    }

    pub fn source_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.spec.edges.len()
    }

    pub fn edge(&self, id: usize) -> &EdgeSpec {
        &self.spec.edges[id]
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.spec.edges
    }

    /// Edges into `v`, sorted by `ord`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Edges out of `u` (a vertex of the previous level), by id.
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out_edges[u]
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.in_edges[v].len()
    }

    pub fn is_max(&self, id: usize) -> bool {
        let e = &self.spec.edges[id];
        e.ord + 1 == self.in_edges[e.dst].len()
    }

    pub fn is_min(&self, id: usize) -> bool {
        self.spec.edges[id].ord == 0
    }

    pub fn is_extreme(&self, id: usize, kind: Extreme) -> bool {
        match kind {
            Extreme::Max => self.is_max(id),
            Extreme::Min => self.is_min(id),
        }
    }

    pub fn extreme_edge(&self, v: usize, kind: Extreme) -> usize {
        let list = &self.in_edges[v];
        match kind {
            Extreme::Max => *list.last().expect("no sources"),
            Extreme::Min => list[0],
        }
    }

    /// Next edge in the order of edges sharing this edge's range.
    pub fn ord_successor(&self, id: usize) -> Option<usize> {
        let e = &self.spec.edges[id];
        self.in_edges[e.dst].get(e.ord + 1).copied()
    }

    pub fn ord_predecessor(&self, id: usize) -> Option<usize> {
        let e = &self.spec.edges[id];
        e.ord.checked_sub(1).map(|o| self.in_edges[e.dst][o])
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut entries = vec![vec![0u64; self.vertex_count()]; self.source_count()];
        for e in &self.spec.edges {
            entries[e.src][e.dst] += 1;
        }
        IncidenceMatrix { level: 0, entries }
    }
}

/// Entry `(w, v)` counts the edges from `w` in `V_{n-1}` to `v` in `V_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub level: usize,
    pub entries: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, w: usize, v: usize) -> u64 {
        self.entries[w][v]
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.cols())
            .map(|v| self.entries.iter().map(|r| r[v]).sum())
            .collect()
    }

    /// `Mᵀ x`: pushes a vector on `V_{n-1}` forward to `V_n`.
    pub fn push_forward(&self, x: &[u128]) -> Option<Vec<u128>> {
        let mut out = vec![0u128; self.cols()];
        for (w, row) in self.entries.iter().enumerate() {
            for (v, &m) in row.iter().enumerate() {
                out[v] = out[v].checked_add((m as u128).checked_mul(x[w])?)?;
            }
        }
        Some(out)
    }
}

/// An ordered Bratteli diagram: finite truncation or eventually periodic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedDiagram {
    prefix: Vec<Level>,
    block: Vec<Level>,
}

impl OrderedDiagram {
    pub fn new(prefix: Vec<LevelSpec>, block: Vec<LevelSpec>) -> Result<Self> {
        let report = validate(&prefix, &block);
        if !report.is_valid() {
            return Err(Error::InvalidDiagram(report));
        }
        let mut count = 1;
        let mut built_prefix = Vec::with_capacity(prefix.len());
        for spec in prefix {
            let next = spec.vertex_count;
            built_prefix.push(Level::build(spec, count));
            count = next;
        }
        let built_block = block
            .into_iter()
            .map(|spec| {
                let next = spec.vertex_count;
                let l = Level::build(spec, count);
                count = next;
                l
            })
            .collect();
        Ok(OrderedDiagram {
            prefix: built_prefix,
            block: built_block,
        })
    }

    pub fn finite(levels: Vec<LevelSpec>) -> Result<Self> {
        Self::new(levels, Vec::new())
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn block_len(&self) -> usize {
        self.block.len()
    }

    pub fn is_finite(&self) -> bool {
        self.block.is_empty()
    }

    /// Depth of a finite truncation, `None` for infinite diagrams.
    pub fn truncation_depth(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    pub fn prefix_specs(&self) -> Vec<LevelSpec> {
        self.prefix.iter().map(|l| l.spec.clone()).collect()
    }

    pub fn block_specs(&self) -> Vec<LevelSpec> {
        self.block.iter().map(|l| l.spec.clone()).collect()
    }

    pub fn has_level(&self, n: usize) -> bool {
        n >= 1 && (!self.is_finite() || n <= self.prefix.len())
    }

    pub fn level(&self, n: usize) -> Result<&Level> {
        if n == 0 {
            return Err(Error::Precondition("level 0 is the implicit root".into()));
        }
        if n <= self.prefix.len() {
            Ok(&self.prefix[n - 1])
        } else if self.block.is_empty() {
            Err(Error::DepthExceedsTruncation {
                requested: n,
                depth: self.prefix.len(),
            })
        } else {
            Ok(&self.block[(n - self.prefix.len() - 1) % self.block.len()])
        }
    }

    /// Level lookup for callers that already know the level exists.
    pub(crate) fn lvl(&self, n: usize) -> &Level {
        self.level(n).expect("level must exist")
    }

    pub fn materialize_level(&self, n: usize) -> Result<LevelSpec> {
        self.level(n).map(|l| l.spec.clone())
    }

    pub fn vertex_count(&self, n: usize) -> Result<usize> {
        if n == 0 {
            Ok(1)
        } else {
            self.level(n).map(Level::vertex_count)
        }
    }

    pub fn incidence_matrix(&self, n: usize) -> Result<IncidenceMatrix> {
        let mut m = self.level(n)?.incidence();
        m.level = n;
        Ok(m)
    }

    /// Number of root-to-`v` paths for each vertex `v` of level `n`.
    pub fn path_counts(&self, n: usize) -> Result<Vec<u128>> {
        let mut counts = vec![1u128];
        for k in 1..=n {
            counts = self
                .incidence_matrix(k)?
                .push_forward(&counts)
                .ok_or(Error::Overflow { level: k })?;
        }
        Ok(counts)
    }

    /// The unique path of length `n` into `v` using only extreme edges.
    pub fn extreme_path_to(&self, n: usize, v: usize, kind: Extreme) -> Result<Vec<usize>> {
        let mut edges = self.chase(n, 0, v, kind)?;
        edges.reverse();
        Ok(edges)
    }

    /// Follows extreme edges backwards from `v` at level `hi` to level `lo`;
    /// edges are returned deepest first.
    fn chase(&self, hi: usize, lo: usize, mut v: usize, kind: Extreme) -> Result<Vec<usize>> {
        let mut edges = Vec::with_capacity(hi - lo);
        for n in (lo + 1..=hi).rev() {
            let level = self.level(n)?;
            let e = level.extreme_edge(v, kind);
            edges.push(e);
            v = level.edge(e).src;
        }
        Ok(edges)
    }

    fn chase_vertex(&self, hi: usize, lo: usize, mut v: usize, kind: Extreme) -> usize {
        for n in (lo + 1..=hi).rev() {
            let level = self.lvl(n);
            v = level.edge(level.extreme_edge(v, kind)).src;
        }
        v
    }

    /// All infinite paths made only of maximal (or minimal) edges.
    ///
    /// Extreme paths correspond to periodic points of the map sending a
    /// vertex at level `P + B` to the vertex reached at level `P` by chasing
    /// extreme edges back through one copy of the block.
    pub fn extreme_paths(&self, kind: Extreme) -> Result<Vec<EventuallyPeriodicPath>> {
        if self.is_finite() {
            return Err(Error::FiniteDiagram);
        }
        let p = self.prefix.len();
        let b = self.block.len();
        let count = self.vertex_count(p)?;
        let step: Vec<usize> = (0..count)
            .map(|x| self.chase_vertex(p + b, p, x, kind))
            .collect();
        let mut out = BTreeSet::new();
        for x in 0..count {
            let mut y = step[x];
            let mut period = 1;
            while y != x && period <= count {
                y = step[y];
                period += 1;
            }
            if y != x {
                continue;
            }
            let head = self.extreme_path_to(p, x, kind)?;
            let mut cycle = self.chase(p + period * b, p, x, kind)?;
            cycle.reverse();
            out.insert(EventuallyPeriodicPath::new(self, head, cycle)?);
        }
        Ok(out.into_iter().collect())
    }

    /// Primitivity of the block's incidence product, tested up to the
    /// Wielandt bound.
    pub fn is_simple_heuristic(&self) -> Result<bool> {
        if self.is_finite() {
            return Err(Error::FiniteDiagram);
        }
        let p = self.prefix.len();
        let c = self.vertex_count(p)?;
        let mut reach = vec![vec![false; c]; c];
        for (u, row) in reach.iter_mut().enumerate() {
            let mut frontier = vec![false; c];
            frontier[u] = true;
            for n in p + 1..=p + self.block.len() {
                let level = self.lvl(n);
                let mut next = vec![false; level.vertex_count()];
                for e in level.edges() {
                    if frontier[e.src] {
                        next[e.dst] = true;
                    }
                }
                frontier = next;
            }
            *row = frontier;
        }
        let bound = (c - 1) * (c - 1) + 1;
        let mut power = reach.clone();
        for _ in 0..bound {
            if power.iter().all(|r| r.iter().all(|&x| x)) {
                return Ok(true);
            }
            power = bool_mul(&power, &reach);
        }
        Ok(power.iter().all(|r| r.iter().all(|&x| x)))
    }

    /// Finite diagram made of levels `1..=n`.
    pub fn truncate(&self, n: usize) -> Result<OrderedDiagram> {
        let levels = (1..=n)
            .map(|k| self.materialize_level(k))
            .collect::<Result<Vec<_>>>()?;
        OrderedDiagram::finite(levels)
    }

    /// Copy of the diagram with level `n` replaced. Periodic diagrams are
    /// unrolled far enough that the change affects that single level.
    pub fn with_level(&self, n: usize, spec: LevelSpec) -> Result<OrderedDiagram> {
        self.level(n)?;
        if self.is_finite() {
            let mut levels = self.prefix_specs();
            levels[n - 1] = spec;
            return OrderedDiagram::finite(levels);
        }
        let p = self.prefix.len();
        let b = self.block.len();
        let copies = n.saturating_sub(p).div_ceil(b);
        let mut prefix = (1..=p + copies * b)
            .map(|k| self.materialize_level(k))
            .collect::<Result<Vec<_>>>()?;
        prefix[n - 1] = spec;
        OrderedDiagram::new(prefix, self.block_specs())
    }

    /// Validates `edges` as a root path and returns its terminal vertex.
    pub fn check_path(&self, edges: &[usize]) -> Result<usize> {
        let mut v = 0;
        for (i, &id) in edges.iter().enumerate() {
            let level = self.level(i + 1)?;
            if id >= level.edge_count() {
                return Err(Error::InvalidPath(format!(
                    "edge {id} does not exist at level {}",
                    i + 1
                )));
            }
            let e = level.edge(id);
            if e.src != v {
                return Err(Error::InvalidPath(format!(
                    "edge {id} at level {} starts at vertex {} but the path is at vertex {v}",
                    i + 1,
                    e.src
                )));
            }
            v = e.dst;
        }
        Ok(v)
    }

    /// Terminal vertex of a path already known to be valid.
    pub(crate) fn terminal(&self, edges: &[usize]) -> usize {
        match edges.last() {
            None => 0,
            Some(&id) => self.lvl(edges.len()).edge(id).dst,
        }
    }

    /// True when every edge of the path is extreme.
    pub fn is_all_extreme(&self, edges: &[usize], kind: Extreme) -> bool {
        edges
            .iter()
            .enumerate()
            .all(|(i, &id)| self.lvl(i + 1).is_extreme(id, kind))
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![false; m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k] {
                for j in 0..m {
                    out[i][j] |= b[k][j];
                }
            }
        }
    }
    out
}
