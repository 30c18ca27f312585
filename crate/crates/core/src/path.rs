//! Finite paths and eventually periodic infinite paths.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::diagram::{Extreme, OrderedDiagram};
use crate::error::{Error, Result};

/// Root-anchored finite path, stored as edge ids (entry `i` at level `i+1`).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinitePath(Vec<usize>);

impl FinitePath {
    pub fn new(edges: Vec<usize>) -> Self {
        FinitePath(edges)
    }

    pub fn root() -> Self {
        FinitePath(Vec::new())
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn into_edges(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the path against `d`, returning its terminal vertex.
    pub fn validate(&self, d: &OrderedDiagram) -> Result<usize> {
        d.check_path(&self.0)
    }

    pub fn child(&self, e: usize) -> FinitePath {
        let mut v = self.0.clone();
        v.push(e);
        FinitePath(v)
    }

    pub fn parent(&self) -> Option<FinitePath> {
        (!self.0.is_empty()).then(|| FinitePath(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn truncated(&self, n: usize) -> FinitePath {
        FinitePath(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &[usize]) -> bool {
        other.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for FinitePath {
    fn from(v: Vec<usize>) -> Self {
        FinitePath(v)
    }
}

impl fmt::Display for FinitePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

impl FromStr for FinitePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_list(s).map(FinitePath)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[usize]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidPath(format!("`{}` is not an edge id", t.trim())))
        })
        .collect()
}

/// Lexicographic comparison of two paths into the same vertex: the path
/// with the larger edge at the deepest level where they differ is larger.
pub fn lex_compare(d: &OrderedDiagram, p: &FinitePath, q: &FinitePath) -> Result<Ordering> {
    if p.len() != q.len() {
        return Err(Error::IncomparablePaths(format!(
            "lengths {} and {} differ",
            p.len(),
            q.len()
        )));
    }
    let vp = p.validate(d)?;
    let vq = q.validate(d)?;
    if vp != vq {
        return Err(Error::IncomparablePaths(format!(
            "paths end at vertices {vp} and {vq}"
        )));
    }
    for i in (0..p.len()).rev() {
        if p.0[i] != q.0[i] {
            let level = d.level(i + 1)?;
            return Ok(level.edge(p.0[i]).ord.cmp(&level.edge(q.0[i]).ord));
        }
    }
    Ok(Ordering::Equal)
}

/// All paths of length `n`, in increasing order of their edge-id sequences.
pub fn paths_at_depth(d: &OrderedDiagram, n: usize) -> Result<Vec<FinitePath>> {
    for k in 1..=n {
        d.level(k)?;
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    fn walk(d: &OrderedDiagram, n: usize, v: usize, stack: &mut Vec<usize>, out: &mut Vec<FinitePath>) {
        if stack.len() == n {
            out.push(FinitePath(stack.clone()));
            return;
        }
        let level = d.lvl(stack.len() + 1);
        for &e in level.out_edges(v) {
            stack.push(e);
            walk(d, n, level.edge(e).dst, stack, out);
            stack.pop();
        }
    }
    walk(d, n, 0, &mut stack, &mut out);
    Ok(out)
}

/// How to continue a finite path to an infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionChoice {
    /// Always take the out-edge with the smallest id.
    FirstEdge,
    /// Always take the out-edge with the largest id.
    LastEdge,
    /// Always take the minimal edge into some vertex, when one exists.
    Extreme(Extreme),
}

/// Infinite path `head · cycle^∞` in normal form.
///
/// Normal form: `head` covers at least the prefix levels, the cycle length
/// is a multiple of the block length, the cycle is primitive, and `head`
/// is as short as those rules allow. Two values are equal exactly when
/// they denote the same infinite path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventuallyPeriodicPath {
    head: Vec<usize>,
    cycle: Vec<usize>,
}

impl EventuallyPeriodicPath {
    /// Validates and normalises `head · cycle^∞` as a path of `d`.
    pub fn new(d: &OrderedDiagram, head: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if d.is_finite() {
            return Err(Error::FiniteDiagram);
        }
        if cycle.is_empty() {
            return Err(Error::InvalidPath("cycle must be non-empty".into()));
        }
        let p = normalize(d.prefix_len(), d.block_len(), head, cycle);
        // one period plus the wrap edge covers every level pair by periodicity
        d.check_path(p.prefix(p.head.len() + p.cycle.len() + 1).edges())?;
        Ok(p)
    }

    /// Parses `HEAD|CYCLE`, both comma separated.
    pub fn parse(d: &OrderedDiagram, s: &str) -> Result<Self> {
        let (h, c) = s
            .split_once('|')
            .ok_or_else(|| Error::InvalidPath(format!("`{s}` lacks the `|` separating head and cycle")))?;
        Self::new(d, parse_list(h)?, parse_list(c)?)
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Edge at 0-based position `i` (level `i + 1`).
    pub fn edge_at(&self, i: usize) -> usize {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    /// First `n` edges.
    pub fn prefix(&self, n: usize) -> FinitePath {
        FinitePath((0..n).map(|i| self.edge_at(i)).collect())
    }

    /// Replaces the first `new_prefix.len()` edges; the caller guarantees
    /// that the result is still a path.
    pub(crate) fn replace_prefix(&self, d: &OrderedDiagram, new_prefix: &[usize]) -> Self {
        let k = new_prefix.len();
        let mut head = self.head.clone();
        let mut cycle = self.cycle.clone();
        while head.len() < k {
            head.push(cycle[0]);
            cycle.rotate_left(1);
        }
        head[..k].copy_from_slice(new_prefix);
        normalize(d.prefix_len(), d.block_len(), head, cycle)
    }

    /// Continues a finite path forever by a deterministic edge choice.
    pub fn extend(d: &OrderedDiagram, p: &FinitePath, choice: ExtensionChoice) -> Result<Self> {
        if d.is_finite() {
            return Err(Error::FiniteDiagram);
        }
        let mut v = p.validate(d)?;
        let mut edges = p.0.clone();
        let pl = d.prefix_len();
        let bl = d.block_len();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        loop {
            let n = edges.len();
            if n >= pl && (n - pl).is_multiple_of(bl) {
                if let Some(&pos) = seen.get(&v) {
                    let cycle = edges.split_off(pos);
                    return Ok(normalize(pl, bl, edges, cycle));
                }
                seen.insert(v, n);
            }
            let level = d.lvl(n + 1);
            let outs = level.out_edges(v);
            let e = match choice {
                ExtensionChoice::FirstEdge => outs[0],
                ExtensionChoice::LastEdge => *outs.last().expect("no sinks"),
                ExtensionChoice::Extreme(kind) => outs
                    .iter()
                    .copied()
                    .find(|&e| level.is_extreme(e, kind))
                    .unwrap_or(outs[0]),
            };
            edges.push(e);
            v = level.edge(e).dst;
        }
    }

    pub fn is_all_extreme(&self, d: &OrderedDiagram, kind: Extreme) -> bool {
        d.is_all_extreme(self.prefix(self.head.len() + self.cycle.len()).edges(), kind)
    }
}

impl fmt::Display for EventuallyPeriodicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.head)?;
        f.write_str("|")?;
        write_list(f, &self.cycle)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn normalize(pl: usize, bl: usize, mut head: Vec<usize>, mut cycle: Vec<usize>) -> EventuallyPeriodicPath {
    while head.len() < pl {
        head.push(cycle[0]);
        cycle.rotate_left(1);
    }
    // the period must be a multiple of the block length
    let target = cycle.len() / gcd(cycle.len(), bl) * bl;
    let reps = target / cycle.len();
    cycle = cycle.repeat(reps);
    // shortest period that is a multiple of bl and divides the length
    let len = cycle.len();
    for q in (bl..=len).step_by(bl) {
        if len.is_multiple_of(q) && (q..len).all(|i| cycle[i] == cycle[i - q]) {
            cycle.truncate(q);
            break;
        }
    }
    // absorb the tail of the head into the cycle
    while head.len() > pl && head.last() == cycle.last() {
        head.pop();
        cycle.rotate_right(1);
    }
    EventuallyPeriodicPath { head, cycle }
}
