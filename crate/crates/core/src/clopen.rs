//! Clopen subsets of the path space as finite unions of cylinders.
//!
//! A set is stored as its unique minimal family of stems: no stem is a
//! prefix of another, and no vertex has all of its child cylinders present
//! (those are merged into the parent). Equality of values is therefore set
//! equality.

use std::collections::BTreeSet;
use std::fmt;

use crate::diagram::OrderedDiagram;
use crate::error::{Error, Result};
use crate::path::{EventuallyPeriodicPath, FinitePath};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenSet {
    stems: Vec<FinitePath>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet { stems: Vec::new() }
    }

    pub fn full() -> Self {
        ClopenSet {
            stems: vec![FinitePath::root()],
        }
    }

    pub fn cylinder(d: &OrderedDiagram, p: FinitePath) -> Result<Self> {
        p.validate(d)?;
        Ok(ClopenSet { stems: vec![p] })
    }

    /// Union of the cylinders of `stems`, which may overlap or be redundant.
    pub fn from_stems<I: IntoIterator<Item = FinitePath>>(d: &OrderedDiagram, stems: I) -> Result<Self> {
        let stems: Vec<FinitePath> = stems.into_iter().collect();
        for s in &stems {
            s.validate(d)?;
        }
        Ok(Self::from_valid(d, stems))
    }

    pub(crate) fn from_valid(d: &OrderedDiagram, stems: Vec<FinitePath>) -> Self {
        ClopenSet {
            stems: canonicalize(d, stems),
        }
    }

    pub fn stems(&self) -> &[FinitePath] {
        &self.stems
    }

    /// Smallest depth at which the set is a union of cylinders.
    pub fn depth(&self) -> usize {
        self.stems.iter().map(FinitePath::len).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.stems.len() == 1 && self.stems[0].is_empty()
    }

    /// The same set written as cylinders of uniform length `depth`.
    pub fn refine(&self, d: &OrderedDiagram, depth: usize) -> Result<Vec<FinitePath>> {
        if depth < self.depth() {
            return Err(Error::Precondition(format!(
                "cannot refine a set of depth {} to depth {depth}",
                self.depth()
            )));
        }
        for n in 1..=depth {
            d.level(n)?;
        }
        let mut out = Vec::new();
        for s in &self.stems {
            let mut buf = s.edges().to_vec();
            extend_all(d, depth, d.terminal(&buf), &mut buf, &mut out);
        }
        out.sort();
        Ok(out)
    }

    /// `[p] ⊆ self`.
    pub fn covers(&self, p: &[usize]) -> bool {
        (0..=p.len()).any(|k| {
            self.stems
                .binary_search_by(|s| s.edges().cmp(&p[..k]))
                .is_ok()
        })
    }

    /// `[p] ∩ self ≠ ∅`.
    pub fn meets(&self, p: &[usize]) -> bool {
        self.covers(p) || self.has_strict_extension(p)
    }

    fn has_strict_extension(&self, p: &[usize]) -> bool {
        let i = self.stems.partition_point(|s| s.edges() <= p);
        self.stems
            .get(i)
            .is_some_and(|s| s.len() > p.len() && s.edges().starts_with(p))
    }

    pub fn contains(&self, x: &EventuallyPeriodicPath) -> bool {
        self.covers(x.prefix(self.depth()).edges())
    }

    pub fn union(&self, d: &OrderedDiagram, other: &ClopenSet) -> ClopenSet {
        let mut stems = self.stems.clone();
        stems.extend(other.stems.iter().cloned());
        Self::from_valid(d, stems)
    }

    pub fn intersection(&self, d: &OrderedDiagram, other: &ClopenSet) -> ClopenSet {
        let stems = self
            .stems
            .iter()
            .filter(|s| other.covers(s.edges()))
            .chain(other.stems.iter().filter(|s| self.covers(s.edges())))
            .cloned()
            .collect();
        Self::from_valid(d, stems)
    }

    pub fn complement(&self, d: &OrderedDiagram) -> ClopenSet {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        self.complement_walk(d, 0, &mut buf, &mut out);
        out.sort();
        debug_assert_eq!(out, canonicalize(d, out.clone()));
        ClopenSet { stems: out }
    }

    fn complement_walk(&self, d: &OrderedDiagram, v: usize, buf: &mut Vec<usize>, out: &mut Vec<FinitePath>) {
        if self.covers(buf) {
            return;
        }
        if !self.has_strict_extension(buf) {
            out.push(FinitePath::new(buf.clone()));
            return;
        }
        let level = d.lvl(buf.len() + 1);
        for &e in level.out_edges(v) {
            buf.push(e);
            self.complement_walk(d, level.edge(e).dst, buf, out);
            buf.pop();
        }
    }

    pub fn difference(&self, d: &OrderedDiagram, other: &ClopenSet) -> ClopenSet {
        self.intersection(d, &other.complement(d))
    }

    pub fn is_subset(&self, d: &OrderedDiagram, other: &ClopenSet) -> bool {
        self.difference(d, other).is_empty()
    }

    pub fn is_disjoint(&self, d: &OrderedDiagram, other: &ClopenSet) -> bool {
        self.intersection(d, other).is_empty()
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.stems.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{s}]")?;
        }
        f.write_str("}")
    }
}

fn extend_all(d: &OrderedDiagram, depth: usize, v: usize, buf: &mut Vec<usize>, out: &mut Vec<FinitePath>) {
    if buf.len() == depth {
        out.push(FinitePath::new(buf.clone()));
        return;
    }
    let level = d.lvl(buf.len() + 1);
    for &e in level.out_edges(v) {
        buf.push(e);
        extend_all(d, depth, level.edge(e).dst, buf, out);
        buf.pop();
    }
}

fn canonicalize(d: &OrderedDiagram, mut stems: Vec<FinitePath>) -> Vec<FinitePath> {
    stems.sort();
    stems.dedup();
    // drop stems lying under another stem; in sorted order an ancestor
    // comes right before its descendants
    let mut anti: Vec<FinitePath> = Vec::with_capacity(stems.len());
    for s in stems {
        if anti.last().is_some_and(|a| a.is_prefix_of(s.edges())) {
            continue;
        }
        anti.push(s);
    }
    let max_len = anti.iter().map(FinitePath::len).max().unwrap_or(0);
    let mut set: BTreeSet<FinitePath> = anti.into_iter().collect();
    for len in (1..=max_len).rev() {
        let layer: Vec<FinitePath> = set.iter().filter(|s| s.len() == len).cloned().collect();
        let mut i = 0;
        while i < layer.len() {
            let parent = &layer[i].edges()[..len - 1];
            let mut j = i;
            while j < layer.len() && &layer[j].edges()[..len - 1] == parent {
                j += 1;
            }
            let needed = d.lvl(len).out_edges(d.terminal(parent)).len();
            if j - i == needed {
                for s in &layer[i..j] {
                    set.remove(s);
                }
                set.insert(FinitePath::new(parent.to_vec()));
            }
            i = j;
        }
    }
    set.into_iter().collect()
}
