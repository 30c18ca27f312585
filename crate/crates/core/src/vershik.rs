//! The Vershik map, its inverse, and the partial action it generates on
//! clopen sets.
//!
//! Images of clopen sets are computed by rank arithmetic: on a cylinder
//! `[p]` with `p` of rank `r` in a fiber of size `S`, the power `λⁿ` acts as
//! `[p] -> [unrank(r + n)]` whenever `0 <= r + n < S`. Cylinders where that
//! fails are split into children until a depth cap is reached.

use crate::clopen::ClopenSet;
use crate::diagram::{Extreme, OrderedDiagram};
use crate::error::{Error, Result};
use crate::fibers::Fibers;
use crate::path::{paths_at_depth, EventuallyPeriodicPath, FinitePath};

pub const DEFAULT_CAP: usize = 24;

/// Successor and predecessor inside a fiber; the Vershik dynamics is built
/// on top of this rule.
pub trait FiberStep {
    fn succ(&self, p: &FinitePath) -> Result<FinitePath>;
    fn pred(&self, p: &FinitePath) -> Result<FinitePath>;
}

impl FiberStep for OrderedDiagram {
    fn succ(&self, p: &FinitePath) -> Result<FinitePath> {
        succ_fiber(self, p)
    }

    fn pred(&self, p: &FinitePath) -> Result<FinitePath> {
        pred_fiber(self, p)
    }
}

fn step_fiber(d: &OrderedDiagram, p: &FinitePath, kind: Extreme) -> Result<FinitePath> {
    p.validate(d)?;
    let edges = p.edges();
    let Some(i) = (0..edges.len()).find(|&i| !d.lvl(i + 1).is_extreme(edges[i], kind)) else {
        return Err(match kind {
            Extreme::Max => Error::FiberMaximal,
            Extreme::Min => Error::FiberMinimal,
        });
    };
    let level = d.lvl(i + 1);
    let g = match kind {
        Extreme::Max => level.ord_successor(edges[i]),
        Extreme::Min => level.ord_predecessor(edges[i]),
    }
    .expect("non-extreme edge has a neighbour");
    let reset = match kind {
        Extreme::Max => Extreme::Min,
        Extreme::Min => Extreme::Max,
    };
    let mut out = d.extreme_path_to(i, level.edge(g).src, reset)?;
    out.push(g);
    out.extend_from_slice(&edges[i + 1..]);
    Ok(FinitePath::new(out))
}

/// Next path in the fiber of `r(p)`.
pub fn succ_fiber(d: &OrderedDiagram, p: &FinitePath) -> Result<FinitePath> {
    step_fiber(d, p, Extreme::Max)
}

/// Previous path in the fiber of `r(p)`.
pub fn pred_fiber(d: &OrderedDiagram, p: &FinitePath) -> Result<FinitePath> {
    step_fiber(d, p, Extreme::Min)
}

fn step_path(d: &OrderedDiagram, x: &EventuallyPeriodicPath, kind: Extreme) -> Result<EventuallyPeriodicPath> {
    let span = x.head().len() + x.cycle().len();
    let Some(i) = (0..span).find(|&i| !d.lvl(i + 1).is_extreme(x.edge_at(i), kind)) else {
        let what = match kind {
            Extreme::Max => "maximal",
            Extreme::Min => "minimal",
        };
        return Err(Error::Domain(format!("{x} is a {what} path")));
    };
    let stepped = step_fiber(d, &x.prefix(i + 1), kind)?;
    Ok(x.replace_prefix(d, stepped.edges()))
}

/// `λ(x)`, defined off the maximal paths.
pub fn vershik(d: &OrderedDiagram, x: &EventuallyPeriodicPath) -> Result<EventuallyPeriodicPath> {
    step_path(d, x, Extreme::Max)
}

/// `λ⁻¹(x)`, defined off the minimal paths.
pub fn vershik_inv(d: &OrderedDiagram, x: &EventuallyPeriodicPath) -> Result<EventuallyPeriodicPath> {
    step_path(d, x, Extreme::Min)
}

pub fn vershik_pow(d: &OrderedDiagram, x: &EventuallyPeriodicPath, n: i64) -> Result<EventuallyPeriodicPath> {
    let mut cur = x.clone();
    for _ in 0..n.unsigned_abs() {
        cur = if n > 0 { vershik(d, &cur)? } else { vershik_inv(d, &cur)? };
    }
    Ok(cur)
}

/// Domain and range of `λⁿ` as clopen sets (`Δ_{-n}` and `Δ_n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialActionWitness {
    pub n: i64,
    pub domain: ClopenSet,
    pub codomain: ClopenSet,
}

struct Walk<'a> {
    fib: Fibers<'a>,
    n: i64,
    cap: usize,
    hits: Vec<(FinitePath, FinitePath)>,
    residue: Vec<FinitePath>,
}

impl<'a> Walk<'a> {
    fn new(d: &'a OrderedDiagram, n: i64, cap: usize) -> Result<Self> {
        Ok(Walk {
            fib: Fibers::new(d, cap)?,
            n,
            cap,
            hits: Vec::new(),
            residue: Vec::new(),
        })
    }

    fn shifted(&self, rank: u128, size: u128) -> Option<u128> {
        let t = if self.n >= 0 {
            rank.checked_add(self.n as u128)?
        } else {
            rank.checked_sub(self.n.unsigned_abs() as u128)?
        };
        (t < size).then_some(t)
    }

    fn run(&mut self, buf: &mut Vec<usize>, v: usize, rank: u128) {
        let len = buf.len();
        let size = self.fib.size(len, v);
        if let Some(t) = self.shifted(rank, size) {
            let image = self.fib.unrank(len, v, t).expect("rank in range");
            self.hits.push((FinitePath::new(buf.clone()), image));
            return;
        }
        if len >= self.cap {
            self.residue.push(FinitePath::new(buf.clone()));
            return;
        }
        let d = self.fib.diagram();
        let level = d.lvl(len + 1);
        for &e in level.out_edges(v) {
            let r = self.fib.offset(len + 1, e) + rank;
            buf.push(e);
            self.run(buf, level.edge(e).dst, r);
            buf.pop();
        }
    }

    fn run_set(&mut self, c: &ClopenSet) {
        let d = self.fib.diagram();
        for s in c.stems() {
            let mut buf = s.edges().to_vec();
            let rank = self.fib.rank(&buf);
            self.run(&mut buf, d.terminal(s.edges()), rank);
        }
    }
}

fn collect(d: &OrderedDiagram, stems: impl Iterator<Item = FinitePath>) -> ClopenSet {
    ClopenSet::from_valid(d, stems.collect())
}

/// `λⁿ(c ∩ Δ^{cap}_{-n})` where `Δ^{cap}_{-n}` is the union of depth-`cap`
/// cylinders on which `λⁿ` is a cylinder translation.
pub fn image_clopen(d: &OrderedDiagram, c: &ClopenSet, n: i64, cap: usize) -> Result<ClopenSet> {
    if c.depth() > cap {
        return Err(Error::CapExceeded { cap });
    }
    let mut w = Walk::new(d, n, cap)?;
    w.run_set(c);
    Ok(collect(d, w.hits.into_iter().map(|(_, img)| img)))
}

type Step = fn(&OrderedDiagram, &EventuallyPeriodicPath) -> Result<EventuallyPeriodicPath>;

/// `λⁿ(c)` for `c` inside the domain of `λⁿ`.
///
/// Fails with `Domain` when `c` contains a point where `λⁿ` is undefined
/// and with `CapExceeded` when the image is not resolved within `cap`.
pub fn image_exact(d: &OrderedDiagram, c: &ClopenSet, n: i64, cap: usize) -> Result<ClopenSet> {
    if c.depth() > cap {
        return Err(Error::CapExceeded { cap });
    }
    if n != 0 && !c.is_empty() {
        let (kind, back): (Extreme, Step) = if n > 0 { (Extreme::Max, vershik_inv) } else { (Extreme::Min, vershik) };
        for xi in d.extreme_paths(kind)? {
            let mut y = xi;
            for j in 0..n.unsigned_abs() {
                if c.contains(&y) {
                    return Err(Error::Domain(format!(
                        "the set contains a point that reaches an extreme path after {j} steps"
                    )));
                }
                match back(d, &y) {
                    Ok(next) => y = next,
                    Err(_) => break,
                }
            }
        }
    }
    let mut w = Walk::new(d, n, cap)?;
    w.run_set(c);
    if !w.residue.is_empty() {
        return Err(Error::CapExceeded { cap });
    }
    Ok(collect(d, w.hits.into_iter().map(|(_, img)| img)))
}

/// Domain and range of `λⁿ`, each resolved down to depth `cap`.
pub fn domain_of_power(d: &OrderedDiagram, n: i64, cap: usize) -> Result<PartialActionWitness> {
    let mut w = Walk::new(d, n, cap)?;
    w.run(&mut Vec::new(), 0, 0);
    let (dom, cod): (Vec<_>, Vec<_>) = w.hits.into_iter().unzip();
    Ok(PartialActionWitness {
        n,
        domain: collect(d, dom.into_iter()),
        codomain: collect(d, cod.into_iter()),
    })
}

fn iterate<R: FiberStep + ?Sized>(rule: &R, p: &FinitePath, k: i64) -> Result<FinitePath> {
    let mut cur = p.clone();
    for _ in 0..k.unsigned_abs() {
        cur = if k > 0 { rule.succ(&cur)? } else { rule.pred(&cur)? };
    }
    Ok(cur)
}

/// Checks the partial-action axioms for `θ = λ` at the pair `(s, t)`.
pub fn check_pa_axioms(d: &OrderedDiagram, s: i64, t: i64, cap: usize) -> Result<bool> {
    check_pa_axioms_with(d, d, s, t, cap)
}

/// Same as [`check_pa_axioms`] with the domains `Δ_n` computed from `d`
/// and the maps applied pointwise through `rule` on depth-`cap` cylinders.
pub fn check_pa_axioms_with<R: FiberStep + ?Sized>(
    d: &OrderedDiagram,
    rule: &R,
    s: i64,
    t: i64,
    cap: usize,
) -> Result<bool> {
    let delta = |k: i64| domain_of_power(d, k, cap).map(|w| w.codomain);
    let apply = |set: &ClopenSet, k: i64| -> Result<Option<ClopenSet>> {
        let mut out = Vec::new();
        for p in set.refine(d, cap)? {
            match iterate(rule, &p, k) {
                Ok(q) if q.validate(d).is_ok() => out.push(q),
                Ok(_) | Err(Error::FiberMaximal) | Err(Error::FiberMinimal) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(ClopenSet::from_valid(d, out)))
    };

    if !delta(0)?.is_full() || apply(&ClopenSet::full(), 0)? != Some(ClopenSet::full()) {
        return Ok(false);
    }

    let lhs_dom = delta(-t)?.intersection(d, &delta(s)?);
    let rhs = delta(t)?.intersection(d, &delta(t + s)?);
    if apply(&lhs_dom, t)? != Some(rhs) {
        return Ok(false);
    }

    let comp_dom = delta(-s)?.intersection(d, &delta(-s - t)?);
    for p in comp_dom.refine(d, cap)? {
        let two = iterate(rule, &p, s).and_then(|q| iterate(rule, &q, t));
        let one = iterate(rule, &p, s + t);
        match (two, one) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => return Ok(false),
            (Err(Error::FiberMaximal | Error::FiberMinimal), _)
            | (_, Err(Error::FiberMaximal | Error::FiberMinimal)) => return Ok(false),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(true)
}

/// Orbit-coverage test for minimality: does the two-sided orbit of `x`,
/// run for `budget` steps each way, meet every cylinder of length `depth`?
pub fn empirical_minimality(d: &OrderedDiagram, x: &EventuallyPeriodicPath, depth: usize, budget: usize) -> Result<bool> {
    let total = paths_at_depth(d, depth)?.len();
    let mut seen = std::collections::HashSet::new();
    seen.insert(x.prefix(depth));
    for forward in [true, false] {
        let mut cur = x.clone();
        for _ in 0..budget {
            if seen.len() == total {
                return Ok(true);
            }
            let next = if forward { vershik(d, &cur) } else { vershik_inv(d, &cur) };
            match next {
                Ok(y) => {
                    seen.insert(y.prefix(depth));
                    cur = y;
                }
                Err(Error::Domain(_)) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(seen.len() == total)
}
