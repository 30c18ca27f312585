//! Return times to a clopen base set and Kakutani-Rokhlin partitions.

use std::collections::BTreeMap;

use crate::clopen::ClopenSet;
use crate::diagram::{Extreme, OrderedDiagram};
use crate::error::{Error, Result};
use crate::fibers::Fibers;
use crate::path::{EventuallyPeriodicPath, FinitePath};
use crate::vershik::{image_exact, succ_fiber};

/// Upper bound on return-time values explored before giving up.
pub const MAX_RETURN_TIME: usize = 1 << 20;

/// `W = ⋃_v [min path into v]` over the vertices of level `n`.
pub fn canonical_w(d: &OrderedDiagram, n: usize) -> Result<ClopenSet> {
    let mut stems = Vec::new();
    for v in 0..d.vertex_count(n)? {
        let p = d.extreme_path_to(n, v, Extreme::Min)?;
        if d.is_all_extreme(&p, Extreme::Max) {
            return Err(Error::DegenerateDiagram(format!(
                "the minimal path into vertex {v} of level {n} is also maximal"
            )));
        }
        stems.push(FinitePath::new(p));
    }
    Ok(ClopenSet::from_valid(d, stems))
}

/// Points whose forward orbit enters `W` after one step, or which sit on a
/// maximal path (the return is then counted as immediate).
pub fn first_return_set(d: &OrderedDiagram, w: &ClopenSet, cap: usize) -> Result<ClopenSet> {
    if d.is_finite() {
        return Err(Error::FiniteDiagram);
    }
    let dw = w.depth();
    if dw > cap {
        return Err(Error::CapExceeded { cap });
    }
    let mut min_in_w = vec![false; cap + 1];
    for (l, slot) in min_in_w.iter_mut().enumerate().skip(dw) {
        *slot = (0..d.vertex_count(l)?)
            .all(|v| w.covers(&d.extreme_path_to(l, v, Extreme::Min).expect("level exists")));
    }
    let mut out = Vec::new();
    let mut buf = Vec::new();
    first_return_walk(d, w, cap, &min_in_w, 0, true, &mut buf, &mut out)?;
    Ok(ClopenSet::from_valid(d, out))
}

#[allow(clippy::too_many_arguments)]
fn first_return_walk(
    d: &OrderedDiagram,
    w: &ClopenSet,
    cap: usize,
    min_in_w: &[bool],
    v: usize,
    all_max: bool,
    buf: &mut Vec<usize>,
    out: &mut Vec<FinitePath>,
) -> Result<()> {
    let len = buf.len();
    if !all_max {
        let next = succ_fiber(d, &FinitePath::new(buf.clone()))?;
        if w.covers(next.edges()) {
            out.push(FinitePath::new(buf.clone()));
            return Ok(());
        }
        if !w.meets(next.edges()) {
            return Ok(());
        }
    } else if len >= w.depth() && min_in_w[len] {
        out.push(FinitePath::new(buf.clone()));
        return Ok(());
    }
    if len >= cap {
        return Err(Error::CapExceeded { cap });
    }
    let level = d.lvl(len + 1);
    for &e in level.out_edges(v) {
        buf.push(e);
        first_return_walk(d, w, cap, min_in_w, level.edge(e).dst, all_max && level.is_max(e), buf, out)?;
        buf.pop();
    }
    Ok(())
}

/// Piecewise-constant return time `r̃_W` as a partition of the path space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnTimeTable {
    pieces: Vec<(ClopenSet, usize)>,
}

impl ReturnTimeTable {
    /// Pieces in increasing order of value; empty pieces are omitted.
    pub fn pieces(&self) -> &[(ClopenSet, usize)] {
        &self.pieces
    }

    pub fn value_at(&self, x: &EventuallyPeriodicPath) -> Option<usize> {
        self.pieces.iter().find(|(c, _)| c.contains(x)).map(|&(_, v)| v)
    }

    pub fn max_value(&self) -> usize {
        self.pieces.last().map_or(0, |&(_, v)| v)
    }
}

fn check_base(d: &OrderedDiagram, w: &ClopenSet) -> Result<()> {
    for x in d.extreme_paths(Extreme::Min)? {
        if !w.contains(&x) {
            return Err(Error::Precondition(format!("W misses the minimal path {x}")));
        }
    }
    for x in d.extreme_paths(Extreme::Max)? {
        if w.contains(&x) {
            return Err(Error::Precondition(format!("W contains the maximal path {x}")));
        }
    }
    Ok(())
}

/// Computes `r̃_W` by peeling: `R_1 = K`, `R_k = λ⁻¹(R_{k-1} \ W)`.
pub fn return_time(d: &OrderedDiagram, w: &ClopenSet, cap: usize) -> Result<ReturnTimeTable> {
    check_base(d, w)?;
    let k = first_return_set(d, w, cap)?;
    let mut rest = k.difference(d, w);
    let mut pieces = vec![(k, 1)];
    let mut value = 1;
    while !rest.is_empty() {
        value += 1;
        if value > MAX_RETURN_TIME {
            return Err(Error::CapExceeded { cap });
        }
        let r = image_exact(d, &rest, -1, cap)?;
        rest = r.difference(d, w);
        pieces.push((r, value));
    }
    let mut seen = ClopenSet::empty();
    for (c, _) in &pieces {
        if !c.is_disjoint(d, &seen) {
            return Err(Error::KrConditionsFailed("return-time pieces overlap".into()));
        }
        seen = seen.union(d, c);
    }
    if !seen.is_full() {
        return Err(Error::KrConditionsFailed("return-time pieces do not cover the space".into()));
    }
    pieces.retain(|(c, _)| !c.is_empty());
    Ok(ReturnTimeTable { pieces })
}

/// A tower of clopen sets `E(k,1), ..., E(k,J_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<ClopenSet>,
}

impl Tower {
    pub fn new(levels: Vec<ClopenSet>) -> Self {
        Tower { levels }
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[ClopenSet] {
        &self.levels
    }

    pub fn base(&self) -> &ClopenSet {
        &self.levels[0]
    }

    pub fn top(&self) -> &ClopenSet {
        self.levels.last().expect("towers are non-empty")
    }
}

/// Towers sorted by height (ties by base).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRPartition {
    towers: Vec<Tower>,
}

impl KRPartition {
    pub fn new(mut towers: Vec<Tower>) -> Self {
        towers.sort_by(|a, b| (a.height(), a.base()).cmp(&(b.height(), b.base())));
        KRPartition { towers }
    }

    /// Keeps the given tower order.
    pub fn new_unsorted(towers: Vec<Tower>) -> Self {
        KRPartition { towers }
    }

    pub fn towers(&self) -> &[Tower] {
        &self.towers
    }

    pub fn heights(&self) -> Vec<usize> {
        self.towers.iter().map(Tower::height).collect()
    }

    /// `(k, j, E(k,j))` with 0-based `k` and `j`.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize, &ClopenSet)> {
        self.towers
            .iter()
            .enumerate()
            .flat_map(|(k, t)| t.levels.iter().enumerate().map(move |(j, e)| (k, j, e)))
    }

    pub fn base_union(&self, d: &OrderedDiagram) -> ClopenSet {
        self.towers.iter().fold(ClopenSet::empty(), |acc, t| acc.union(d, t.base()))
    }

    pub fn top_union(&self, d: &OrderedDiagram) -> ClopenSet {
        self.towers.iter().fold(ClopenSet::empty(), |acc, t| acc.union(d, t.top()))
    }

    /// Union of towers of equal height, level by level.
    pub fn merge_equal_heights(&self, d: &OrderedDiagram) -> KRPartition {
        let mut by_height: BTreeMap<usize, Vec<ClopenSet>> = BTreeMap::new();
        for t in &self.towers {
            let slot = by_height
                .entry(t.height())
                .or_insert_with(|| vec![ClopenSet::empty(); t.height()]);
            for (acc, e) in slot.iter_mut().zip(&t.levels) {
                *acc = acc.union(d, e);
            }
        }
        KRPartition::new(by_height.into_values().map(Tower::new).collect())
    }

    /// Descriptions of every failed condition; empty means the partition is
    /// a KR partition with base `⋃ bases`.
    pub fn check_conditions(&self, d: &OrderedDiagram, cap: usize) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        let mut seen = ClopenSet::empty();
        for (k, j, e) in self.elements() {
            if e.is_empty() {
                failures.push(format!("partition: E({k},{j}) is empty"));
            }
            if !e.is_disjoint(d, &seen) {
                failures.push(format!("partition: E({k},{j}) overlaps an earlier element"));
            }
            seen = seen.union(d, e);
        }
        if !seen.is_full() {
            failures.push("partition: elements do not cover the space".into());
        }
        let tops = self.top_union(d);
        let w = self.base_union(d);
        for x in d.extreme_paths(Extreme::Max)? {
            if !tops.contains(&x) {
                failures.push(format!("condition 1: maximal path {x} is not in a top level"));
            }
        }
        for x in d.extreme_paths(Extreme::Min)? {
            if !w.contains(&x) {
                failures.push(format!("condition 1: minimal path {x} is not in a base"));
            }
        }
        for (k, t) in self.towers.iter().enumerate() {
            for j in 0..t.height().saturating_sub(1) {
                match image_exact(d, &t.levels[j], 1, cap) {
                    Ok(img) if img == t.levels[j + 1] => {}
                    Ok(_) => failures.push(format!("condition 2: λ(E({k},{j})) differs from E({k},{})", j + 1)),
                    Err(Error::Domain(_)) => {
                        failures.push(format!("condition 2: λ is undefined on part of E({k},{j})"))
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if failures.is_empty() {
            let k = first_return_set(d, &w, cap)?;
            if k != tops {
                failures.push("condition 3: the top levels are not the points that return to the base in one step".into());
            }
        }
        Ok(failures)
    }

    pub fn validate(&self, d: &OrderedDiagram, cap: usize) -> Result<()> {
        let failures = self.check_conditions(d, cap)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::KrConditionsFailed(failures.join("; ")))
        }
    }
}

/// KR partition with base `w`: one tower per return-time value.
pub fn build_kr(d: &OrderedDiagram, w: &ClopenSet, cap: usize) -> Result<KRPartition> {
    let table = return_time(d, w, cap)?;
    let mut towers = Vec::new();
    for (piece, value) in table.pieces() {
        let base = piece.intersection(d, w);
        if base.is_empty() {
            continue;
        }
        let levels = (0..*value as i64)
            .map(|j| image_exact(d, &base, j, cap))
            .collect::<Result<Vec<_>>>()?;
        towers.push(Tower::new(levels));
    }
    let p = KRPartition::new(towers);
    p.validate(d, cap)?;
    Ok(p)
}

/// Partition of level `n` by fiber: tower `v` has the cylinders of the
/// paths into vertex `v` in lexicographic order.
pub fn build_kr_canonical(d: &OrderedDiagram, n: usize) -> Result<KRPartition> {
    let fib = Fibers::new(d, n)?;
    let mut towers = Vec::new();
    for v in 0..d.vertex_count(n)? {
        let size = usize::try_from(fib.size(n, v)).map_err(|_| Error::Overflow { level: n })?;
        let levels = (0..size)
            .map(|r| ClopenSet::from_valid(d, vec![fib.unrank(n, v, r as u128).expect("rank in range")]))
            .collect();
        towers.push(Tower::new(levels));
    }
    Ok(KRPartition::new_unsorted(towers))
}
