//! Telescoping, graded isomorphism of finite diagrams, and a bounded
//! search for equivalence.

use std::collections::HashMap;

use serde::Serialize;

use crate::diagram::{EdgeSpec, LevelSpec, OrderedDiagram};
use crate::error::{Error, Result};

/// Strictly increasing level sequence `0 = m_0 < m_1 < ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Telescoping(Vec<usize>);

impl Telescoping {
    pub fn new(levels: Vec<usize>) -> Result<Self> {
        if levels.first() != Some(&0) {
            return Err(Error::InvalidTelescoping("sequence must start at 0".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTelescoping("sequence must be strictly increasing".into()));
        }
        Ok(Telescoping(levels))
    }

    pub fn identity(depth: usize) -> Self {
        Telescoping((0..=depth).collect())
    }

    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    /// Depth of the telescoped diagram.
    pub fn depth(&self) -> usize {
        self.0.len() - 1
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    /// `t.then(u)` telescopes by `t` and then by `u`; it equals telescoping
    /// once by `i -> t[u[i]]`.
    pub fn then(&self, u: &Telescoping) -> Result<Telescoping> {
        u.0.iter()
            .map(|&i| {
                self.0
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidTelescoping(format!("level {i} is past the end")))
            })
            .collect::<Result<Vec<_>>>()
            .and_then(Telescoping::new)
    }
}

type Composite = (usize, Vec<usize>);

/// Composite paths from `V_lo` into `w` at level `hi`, in fiber order; each
/// item is the source vertex and the edges of levels `lo+1..=hi`.
fn composite_paths(
    d: &OrderedDiagram,
    lo: usize,
    hi: usize,
    w: usize,
    memo: &mut HashMap<(usize, usize), Vec<Composite>>,
) -> Vec<Composite> {
    if hi == lo {
        return vec![(w, Vec::new())];
    }
    if let Some(v) = memo.get(&(hi, w)) {
        return v.clone();
    }
    let level = d.lvl(hi);
    let mut out = Vec::new();
    // the last edge is the most significant
    for &e in level.in_edges(w) {
        for (s, mut q) in composite_paths(d, lo, hi - 1, level.edge(e).src, memo) {
            q.push(e);
            out.push((s, q));
        }
    }
    memo.insert((hi, w), out.clone());
    out
}

/// Telescoped finite diagram plus, for every new edge, the original edges
/// it stands for.
pub fn telescope_with_paths(d: &OrderedDiagram, t: &Telescoping) -> Result<(OrderedDiagram, Vec<Vec<Vec<usize>>>)> {
    for n in 1..=t.last() {
        d.level(n)?;
    }
    let mut levels = Vec::new();
    let mut paths = Vec::new();
    for w in t.levels().windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut memo = HashMap::new();
        let mut edges = Vec::new();
        let mut level_paths = Vec::new();
        let count = d.vertex_count(hi)?;
        for v in 0..count {
            for (ord, (s, q)) in composite_paths(d, lo, hi, v, &mut memo).into_iter().enumerate() {
                edges.push(EdgeSpec::new(s, v, ord));
                level_paths.push(q);
            }
        }
        levels.push(LevelSpec::new(count, edges));
        paths.push(level_paths);
    }
    Ok((OrderedDiagram::finite(levels)?, paths))
}

pub fn telescope(d: &OrderedDiagram, t: &Telescoping) -> Result<OrderedDiagram> {
    telescope_with_paths(d, t).map(|(d, _)| d)
}

/// Level-wise vertex bijections with the induced edge bijections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedIsomorphism {
    pub vertex_maps: Vec<Vec<usize>>,
    pub edge_maps: Vec<Vec<usize>>,
}

impl GradedIsomorphism {
    /// Relabels `a` through the maps; the result equals the target diagram
    /// when the witness is sound.
    pub fn apply(&self, a: &OrderedDiagram) -> Result<OrderedDiagram> {
        let depth = a
            .truncation_depth()
            .ok_or(Error::Precondition("isomorphisms act on finite diagrams".into()))?;
        if self.vertex_maps.len() != depth + 1 || self.edge_maps.len() != depth {
            return Err(Error::Precondition("witness depth does not match".into()));
        }
        let mut levels = Vec::new();
        for n in 1..=depth {
            let level = a.level(n)?;
            let mut edges = vec![EdgeSpec::new(0, 0, 0); level.edge_count()];
            for (id, e) in level.edges().iter().enumerate() {
                let target = *self.edge_maps[n - 1]
                    .get(id)
                    .ok_or(Error::Precondition("edge map too short".into()))?;
                let slot = edges
                    .get_mut(target)
                    .ok_or(Error::Precondition("edge map out of range".into()))?;
                *slot = EdgeSpec::new(self.vertex_maps[n - 1][e.src], self.vertex_maps[n][e.dst], e.ord);
            }
            levels.push(LevelSpec::new(level.vertex_count(), edges));
        }
        OrderedDiagram::finite(levels)
    }
}

/// An order- and grading-preserving isomorphism between finite diagrams,
/// if one exists. Returns `None` for infinite inputs.
pub fn iso_check(a: &OrderedDiagram, b: &OrderedDiagram) -> Option<GradedIsomorphism> {
    let depth = a.truncation_depth()?;
    if b.truncation_depth()? != depth {
        return None;
    }
    let mut maps = vec![vec![0usize]];
    if !search_level(a, b, 1, depth, &mut maps) {
        return None;
    }
    let mut edge_maps = Vec::with_capacity(depth);
    for (n, sigma) in maps.iter().enumerate().skip(1) {
        let (la, lb) = (a.lvl(n), b.lvl(n));
        let mut map = vec![0usize; la.edge_count()];
        for (v, &w) in sigma.iter().enumerate() {
            for (&ea, &eb) in la.in_edges(v).iter().zip(lb.in_edges(w)) {
                map[ea] = eb;
            }
        }
        edge_maps.push(map);
    }
    Some(GradedIsomorphism {
        vertex_maps: maps,
        edge_maps,
    })
}

fn signatures(d: &OrderedDiagram, n: usize, prev: Option<&[usize]>) -> Vec<Vec<usize>> {
    let level = d.lvl(n);
    (0..level.vertex_count())
        .map(|v| {
            level
                .in_edges(v)
                .iter()
                .map(|&e| {
                    let s = level.edge(e).src;
                    prev.map_or(s, |m| m[s])
                })
                .collect()
        })
        .collect()
}

fn search_level(a: &OrderedDiagram, b: &OrderedDiagram, n: usize, depth: usize, maps: &mut Vec<Vec<usize>>) -> bool {
    if n > depth {
        return true;
    }
    let (la, lb) = (a.lvl(n), b.lvl(n));
    if la.vertex_count() != lb.vertex_count() || la.edge_count() != lb.edge_count() {
        return false;
    }
    let sig_a = signatures(a, n, Some(&maps[n - 1]));
    let sig_b = signatures(b, n, None);
    let candidates: Vec<Vec<usize>> = sig_a
        .iter()
        .map(|s| (0..sig_b.len()).filter(|&w| &sig_b[w] == s).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return false;
    }
    let mut current = vec![usize::MAX; la.vertex_count()];
    let mut used = vec![false; lb.vertex_count()];
    assign(a, b, n, depth, 0, &candidates, &mut current, &mut used, maps)
}

#[allow(clippy::too_many_arguments)]
fn assign(
    a: &OrderedDiagram,
    b: &OrderedDiagram,
    n: usize,
    depth: usize,
    v: usize,
    candidates: &[Vec<usize>],
    current: &mut Vec<usize>,
    used: &mut Vec<bool>,
    maps: &mut Vec<Vec<usize>>,
) -> bool {
    if v == candidates.len() {
        maps.push(current.clone());
        if search_level(a, b, n + 1, depth, maps) {
            return true;
        }
        maps.pop();
        return false;
    }
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        used[w] = true;
        current[v] = w;
        if assign(a, b, n, depth, v + 1, candidates, current, used, maps) {
            return true;
        }
        used[w] = false;
    }
    false
}

/// Telescopings of `a` and `b` whose results are isomorphic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub t1: Telescoping,
    pub t2: Telescoping,
    pub iso: GradedIsomorphism,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            t1: &'a [usize],
            t2: &'a [usize],
            vertex_maps: &'a [Vec<usize>],
        }
        serde_json::to_string(&Out {
            t1: self.t1.levels(),
            t2: self.t2.levels(),
            vertex_maps: &self.iso.vertex_maps,
        })
        .expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivOutcome {
    Certificate(Certificate),
    Undecided,
}

/// Sequences `0 = m_0 < ... < m_{len-1} = top` in lexicographic order.
fn telescopings_ending_at(top: usize, len: usize) -> Vec<Telescoping> {
    let mut out = Vec::new();
    if len == 0 || (top == 0) != (len == 1) || len > top + 1 {
        return out;
    }
    let mut cur = vec![0];
    fn rec(top: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Telescoping>) {
        if cur.len() == len - 1 {
            cur.push(top);
            out.push(Telescoping(cur.clone()));
            cur.pop();
            return;
        }
        let last = *cur.last().expect("non-empty");
        let remaining = len - 1 - cur.len();
        for m in last + 1..=top - remaining {
            cur.push(m);
            rec(top, len, cur, out);
            cur.pop();
        }
    }
    if len == 1 {
        out.push(Telescoping(vec![0]));
    } else {
        rec(top, len, &mut cur, &mut out);
    }
    out
}

/// Looks for telescopings of the depth-`budget` truncations that make them
/// isomorphic. Longer telescopings are tried first.
pub fn equiv_search(a: &OrderedDiagram, b: &OrderedDiagram, budget: usize) -> Result<EquivOutcome> {
    let depth_of = |d: &OrderedDiagram| d.truncation_depth().map_or(budget, |t| t.min(budget));
    let (da, db) = (depth_of(a), depth_of(b));
    let (ta, tb) = (a.truncate(da)?, b.truncate(db)?);
    for len in (1..=da.min(db) + 1).rev() {
        let left = telescopings_ending_at(da, len);
        let right = telescopings_ending_at(db, len);
        let tele_right: Vec<_> = right
            .iter()
            .map(|t| telescope(&tb, t).map(|d| (t, d)))
            .collect::<Result<_>>()?;
        for t1 in &left {
            let x = telescope(&ta, t1)?;
            for (t2, y) in &tele_right {
                if let Some(iso) = iso_check(&x, y) {
                    return Ok(EquivOutcome::Certificate(Certificate {
                        t1: t1.clone(),
                        t2: (*t2).clone(),
                        iso,
                    }));
                }
            }
        }
    }
    Ok(EquivOutcome::Undecided)
}
