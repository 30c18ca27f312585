//! The ordered diagram read off a nested sequence of KR partitions, and the
//! map `φ` sending a path to its itinerary through the towers.
//!
//! Each tower `k` of `P_n` is cut into consecutive runs, each run being a
//! full pass through some tower `m` of `P_{n-1}`. A run starting at height
//! `j'` (0-based) becomes an edge `m -> k` labelled `(n, m, k, j')`; runs
//! lower in the tower are smaller in the order.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::diagram::{EdgeSpec, Extreme, LevelSpec, OrderedDiagram};
use crate::error::{Error, Result};
use crate::kr::{build_kr_canonical, KRPartition};
use crate::path::{paths_at_depth, EventuallyPeriodicPath, ExtensionChoice, FinitePath};
use crate::vershik::{succ_fiber, vershik};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub level: usize,
    pub source_tower: usize,
    pub target_tower: usize,
    pub offset: usize,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.level, self.source_tower, self.target_tower, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RebuiltDiagram {
    diagram: OrderedDiagram,
    labels: Vec<Vec<EdgeLabel>>,
    heights: Vec<Vec<usize>>,
    by_label: HashMap<EdgeLabel, usize>,
}

impl RebuiltDiagram {
    pub fn diagram(&self) -> &OrderedDiagram {
        &self.diagram
    }

    /// `labels()[n-1][e]` is the label of edge `e` at level `n`.
    pub fn labels(&self) -> &[Vec<EdgeLabel>] {
        &self.labels
    }

    /// Tower heights of each partition, starting with `P_0`.
    pub fn heights(&self) -> &[Vec<usize>] {
        &self.heights
    }

    pub fn edge_for(&self, label: &EdgeLabel) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    /// One line per edge, then the tower heights of every level.
    pub fn audit_log(&self) -> String {
        let mut out = String::new();
        for (i, labels) in self.labels.iter().enumerate() {
            let level = self.diagram.lvl(i + 1);
            for (e, label) in labels.iter().enumerate() {
                let spec = level.edge(e);
                let _ = writeln!(
                    out,
                    "level {} edge {e}: {} -> {} ord {} label {label}",
                    i + 1,
                    spec.src,
                    spec.dst,
                    spec.ord
                );
            }
        }
        for (n, h) in self.heights.iter().enumerate() {
            let hs: Vec<String> = h.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "heights {n}: {}", hs.join(" "));
        }
        out
    }

    /// Copy with the orders of two edges into the same vertex exchanged.
    pub fn with_swapped_order(&self, level: usize, a: usize, b: usize) -> Result<RebuiltDiagram> {
        let mut spec = self.diagram.materialize_level(level)?;
        if a >= spec.edges.len() || b >= spec.edges.len() || spec.edges[a].dst != spec.edges[b].dst {
            return Err(Error::Precondition("edges must exist and share their range".into()));
        }
        let (oa, ob) = (spec.edges[a].ord, spec.edges[b].ord);
        spec.edges[a].ord = ob;
        spec.edges[b].ord = oa;
        let mut out = self.clone();
        out.diagram = self.diagram.with_level(level, spec)?;
        Ok(out)
    }
}

/// Maps the stems of every element of a partition to `(tower, height)`.
#[derive(Debug, Clone)]
struct PartitionIndex {
    map: HashMap<Vec<usize>, (usize, usize)>,
    max_len: usize,
}

impl PartitionIndex {
    fn new(p: &KRPartition) -> Self {
        let mut map = HashMap::new();
        let mut max_len = 0;
        for (k, j, e) in p.elements() {
            for s in e.stems() {
                max_len = max_len.max(s.len());
                map.insert(s.edges().to_vec(), (k, j));
            }
        }
        PartitionIndex { map, max_len }
    }

    fn locate(&self, p: &[usize]) -> Option<(usize, usize)> {
        (0..=p.len().min(self.max_len)).find_map(|l| self.map.get(&p[..l]).copied())
    }

    fn locate_point(&self, x: &EventuallyPeriodicPath) -> Option<(usize, usize)> {
        self.locate(x.prefix(self.max_len).edges())
    }
}

/// Reads the ordered diagram off `P_0 ⊇ P_1 ⊇ ... ⊇ P_N`.
pub fn rebuild_from_partitions(partitions: &[KRPartition]) -> Result<RebuiltDiagram> {
    let first = partitions
        .first()
        .ok_or_else(|| Error::Precondition("need at least the trivial partition".into()))?;
    if first.towers().len() != 1 || first.heights() != vec![1] || !first.towers()[0].base().is_full() {
        return Err(Error::Precondition("the first partition must be the trivial one".into()));
    }
    let mut levels = Vec::new();
    let mut labels = Vec::new();
    let mut by_label = HashMap::new();
    let mut heights = vec![first.heights()];
    for n in 1..partitions.len() {
        let coarse = &partitions[n - 1];
        let fine = &partitions[n];
        let index = PartitionIndex::new(coarse);
        let coarse_heights = coarse.heights();
        let mut runs: Vec<(usize, usize, usize)> = Vec::new();
        for (k, tower) in fine.towers().iter().enumerate() {
            let mut parents = Vec::with_capacity(tower.height());
            for (j, e) in tower.levels().iter().enumerate() {
                let stem = e
                    .stems()
                    .first()
                    .ok_or_else(|| Error::NotNested(format!("E({k},{j}) of partition {n} is empty")))?;
                let (m, i) = index.locate(stem.edges()).ok_or_else(|| {
                    Error::NotNested(format!("E({k},{j}) of partition {n} is not inside one element of partition {}", n - 1))
                })?;
                let parent = &coarse.towers()[m].levels()[i];
                if !e.stems().iter().all(|s| parent.covers(s.edges())) {
                    return Err(Error::NotNested(format!(
                        "E({k},{j}) of partition {n} is not inside one element of partition {}",
                        n - 1
                    )));
                }
                parents.push((m, i));
            }
            let mut j = 0;
            while j < parents.len() {
                let (m, i) = parents[j];
                let h = coarse_heights[m];
                let ok = i == 0 && j + h <= parents.len() && (0..h).all(|t| parents[j + t] == (m, t));
                if !ok {
                    return Err(Error::NotNested(format!(
                        "tower {k} of partition {n} does not pass fully through tower {m} at height {j}"
                    )));
                }
                runs.push((k, j, m));
                j += h;
            }
        }
        runs.sort();
        let mut edges = Vec::with_capacity(runs.len());
        let mut level_labels = Vec::with_capacity(runs.len());
        let mut ord = 0;
        for (idx, &(k, j, m)) in runs.iter().enumerate() {
            if idx > 0 && runs[idx - 1].0 != k {
                ord = 0;
            }
            let label = EdgeLabel {
                level: n,
                source_tower: m,
                target_tower: k,
                offset: j,
            };
            by_label.insert(label, edges.len());
            edges.push(EdgeSpec::new(m, k, ord));
            level_labels.push(label);
            ord += 1;
        }
        levels.push(LevelSpec::new(fine.towers().len(), edges));
        labels.push(level_labels);
        heights.push(fine.heights());
    }
    Ok(RebuiltDiagram {
        diagram: OrderedDiagram::finite(levels)?,
        labels,
        heights,
        by_label,
    })
}

/// The rebuilt diagram of the canonical partitions `P_0, ..., P_n`.
pub fn rebuild_diagram(d: &OrderedDiagram, n: usize) -> Result<RebuiltDiagram> {
    BvModel::canonical(d, n).map(|m| m.rebuilt)
}

/// Outcome of a conjugacy check: an empty failure list means it passed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConjugacyReport {
    pub points_checked: usize,
    pub failures: Vec<String>,
}

impl ConjugacyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A nested partition sequence with its rebuilt diagram.
#[derive(Debug, Clone)]
pub struct BvModel {
    partitions: Vec<KRPartition>,
    indices: Vec<PartitionIndex>,
    rebuilt: RebuiltDiagram,
}

impl BvModel {
    pub fn from_partitions(partitions: Vec<KRPartition>) -> Result<Self> {
        let rebuilt = rebuild_from_partitions(&partitions)?;
        let indices = partitions.iter().map(PartitionIndex::new).collect();
        Ok(BvModel {
            partitions,
            indices,
            rebuilt,
        })
    }

    /// Canonical partitions of levels `0..=n`.
    pub fn canonical(d: &OrderedDiagram, n: usize) -> Result<Self> {
        let levels: Vec<usize> = (0..=n).collect();
        Self::at_levels(d, &levels)
    }

    /// Canonical partitions of the given levels, which must start at 0.
    pub fn at_levels(d: &OrderedDiagram, levels: &[usize]) -> Result<Self> {
        let partitions = levels
            .iter()
            .map(|&n| build_kr_canonical(d, n))
            .collect::<Result<Vec<_>>>()?;
        Self::from_partitions(partitions)
    }

    pub fn partitions(&self) -> &[KRPartition] {
        &self.partitions
    }

    pub fn rebuilt(&self) -> &RebuiltDiagram {
        &self.rebuilt
    }

    pub fn depth(&self) -> usize {
        self.partitions.len() - 1
    }

    /// Replaces the rebuilt diagram, keeping the partitions.
    pub fn with_rebuilt(mut self, rebuilt: RebuiltDiagram) -> Self {
        self.rebuilt = rebuilt;
        self
    }

    /// `(tower, height)` of the element of `P_n` containing `x`.
    pub fn locate(&self, n: usize, x: &EventuallyPeriodicPath) -> Result<(usize, usize)> {
        self.indices[n]
            .locate_point(x)
            .ok_or_else(|| Error::Precondition(format!("{x} lies in no element of partition {n}")))
    }

    /// The first `depth()` edges of `φ(x)` in the rebuilt diagram.
    pub fn phi(&self, x: &EventuallyPeriodicPath) -> Result<FinitePath> {
        let mut edges = Vec::with_capacity(self.depth());
        let (mut prev_k, mut prev_j) = self.locate(0, x)?;
        for n in 1..=self.depth() {
            let (k, j) = self.locate(n, x)?;
            let offset = j
                .checked_sub(prev_j)
                .ok_or_else(|| Error::NotNested(format!("height decreases at partition {n}")))?;
            let label = EdgeLabel {
                level: n,
                source_tower: prev_k,
                target_tower: k,
                offset,
            };
            let e = self
                .rebuilt
                .edge_for(&label)
                .ok_or_else(|| Error::NotNested(format!("no edge labelled {label}")))?;
            edges.push(e);
            prev_k = k;
            prev_j = j;
        }
        Ok(FinitePath::new(edges))
    }

    /// Tests `φ ∘ λ = λ' ∘ φ` and the compatibility of `φ` with towers and
    /// extreme paths on two representatives of every depth-`check_depth`
    /// cylinder.
    pub fn verify_conjugacy(&self, d: &OrderedDiagram, check_depth: usize) -> Result<ConjugacyReport> {
        let rd = self.rebuilt.diagram();
        let big_n = self.depth();
        let mut report = ConjugacyReport::default();
        let mut image_of: HashMap<(usize, usize), FinitePath> = HashMap::new();
        let mut owner_of: HashMap<FinitePath, (usize, usize)> = HashMap::new();
        for p in paths_at_depth(d, check_depth)? {
            let mut reps = vec![EventuallyPeriodicPath::extend(d, &p, ExtensionChoice::FirstEdge)?];
            let last = EventuallyPeriodicPath::extend(d, &p, ExtensionChoice::LastEdge)?;
            if last != reps[0] {
                reps.push(last);
            }
            for x in reps {
                report.points_checked += 1;
                let fx = self.phi(&x)?;
                for n in 0..=big_n {
                    let (k, j) = self.locate(n, &x)?;
                    let height = self.partitions[n].towers()[k].height();
                    let prefix = &fx.edges()[..n];
                    if (j + 1 == height) != rd.is_all_extreme(prefix, Extreme::Max) {
                        report.failures.push(format!("{x}: top of partition {n} does not match a maximal image"));
                    }
                    if (j == 0) != rd.is_all_extreme(prefix, Extreme::Min) {
                        report.failures.push(format!("{x}: base of partition {n} does not match a minimal image"));
                    }
                }
                let cell = self.locate(big_n, &x)?;
                if let Some(prev) = image_of.insert(cell, fx.clone()) {
                    if prev != fx {
                        report.failures.push(format!("{x}: φ is not constant on its cell"));
                    }
                }
                if let Some(prev) = owner_of.insert(fx.clone(), cell) {
                    if prev != cell {
                        report.failures.push(format!("{x}: φ identifies two cells"));
                    }
                }
                let Ok(y) = vershik(d, &x) else { continue };
                let fy = self.phi(&y)?;
                let expected_ok = match succ_fiber(rd, &fx) {
                    Ok(s) => s == fy,
                    Err(Error::FiberMaximal) => rd.is_all_extreme(fy.edges(), Extreme::Min),
                    Err(e) => return Err(e),
                };
                if !expected_ok {
                    report.failures.push(format!("{x}: φ(λx) = {fy} does not follow φ(x) = {fx}"));
                }
            }
        }
        if !d.is_finite() {
            for (kind, name) in [(Extreme::Max, "maximal"), (Extreme::Min, "minimal")] {
                for xi in d.extreme_paths(kind)? {
                    if !rd.is_all_extreme(self.phi(&xi)?.edges(), kind) {
                        report.failures.push(format!("{name} path {xi} is not sent to a {name} path"));
                    }
                }
            }
        }
        Ok(report)
    }
}

/// `φ(x)` truncated to `n` edges for the canonical partitions.
pub fn phi(d: &OrderedDiagram, x: &EventuallyPeriodicPath, n: usize) -> Result<FinitePath> {
    BvModel::canonical(d, n)?.phi(x)
}

/// Conjugacy check for the canonical model of depth `n`.
pub fn verify_conjugacy(d: &OrderedDiagram, n: usize, check_depth: usize) -> Result<bool> {
    Ok(BvModel::canonical(d, n)?.verify_conjugacy(d, check_depth)?.passed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn twomax_rebuild_matches_original() {
        let tm = gen::twomax();
        let r = rebuild_diagram(&tm, 4).unwrap();
        for n in 1..=4 {
            assert_eq!(r.diagram().materialize_level(n).unwrap().canonical(), tm.materialize_level(n).unwrap().canonical());
        }
        assert_eq!(r.heights()[2], vec![3, 2]);
        // the order into the left vertex is L < R < L, at heights 0, 1, 2
        let l2 = &r.labels()[1];
        let into_left: Vec<_> = l2.iter().filter(|l| l.target_tower == 0).map(|l| (l.source_tower, l.offset)).collect();
        assert_eq!(into_left, vec![(0, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn phi_is_the_identity_on_canonical_models() {
        let tm = gen::twomax();
        let x = EventuallyPeriodicPath::parse(&tm, "1,1,0,3|4").unwrap();
        let fx = phi(&tm, &x, 5).unwrap();
        let r = rebuild_diagram(&tm, 5).unwrap();
        // identical up to the edge relabelling (dst, ord)
        for (i, (&a, &b)) in x.prefix(5).edges().iter().zip(fx.edges()).enumerate() {
            let ea = tm.lvl(i + 1).edge(a);
            let eb = r.diagram().lvl(i + 1).edge(b);
            assert_eq!((ea.src, ea.dst, ea.ord), (eb.src, eb.dst, eb.ord));
        }
    }

    #[test]
    fn conjugacy_and_mutation() {
        let tm = gen::twomax();
        let model = BvModel::canonical(&tm, 5).unwrap();
        assert!(model.verify_conjugacy(&tm, 5).unwrap().passed());
        let into_left: Vec<usize> = model.rebuilt().labels()[1]
            .iter()
            .enumerate()
            .filter(|(_, l)| l.target_tower == 0)
            .map(|(e, _)| e)
            .collect();
        let bad = model.rebuilt().with_swapped_order(2, into_left[0], into_left[1]).unwrap();
        let mutated = model.clone().with_rebuilt(bad);
        assert!(!mutated.verify_conjugacy(&tm, 5).unwrap().passed());
    }

    #[test]
    fn non_nested_sequence_is_rejected() {
        let tm = gen::twomax();
        let p0 = build_kr_canonical(&tm, 0).unwrap();
        let p2 = build_kr_canonical(&tm, 2).unwrap();
        let p1 = build_kr_canonical(&tm, 1).unwrap();
        assert!(matches!(
            rebuild_from_partitions(&[p0.clone(), p2, p1]),
            Err(Error::NotNested(_))
        ));
        assert!(matches!(rebuild_from_partitions(&[]), Err(Error::Precondition(_))));
        assert!(rebuild_from_partitions(&[p0]).is_ok());
    }
}
