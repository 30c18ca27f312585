//! Property checks of the library against independent oracles.

use std::cmp::Ordering;

use bratteli::{
    build_kr, build_kr_canonical, canonical_w, domain_of_power, gen, image_clopen, image_exact, iso_check, lex_compare,
    paths_at_depth, rebuild_from_partitions, return_time, succ_fiber, telescope, telescope_with_paths, vershik,
    vershik_inv, BvModel, ClopenSet, EdgeSpec, Error, EventuallyPeriodicPath, ExtensionChoice, Extreme, FinitePath,
    LevelSpec, OrderedDiagram, Telescoping, DEFAULT_CAP,
};
use proptest::prelude::*;

fn random_walk(d: &OrderedDiagram, choices: &[u8]) -> FinitePath {
    let mut v = 0;
    let mut edges = Vec::new();
    for (i, &c) in choices.iter().enumerate() {
        let level = d.level(i + 1).unwrap();
        let outs = level.out_edges(v);
        let e = outs[c as usize % outs.len()];
        edges.push(e);
        v = level.edge(e).dst;
    }
    FinitePath::new(edges)
}

fn random_point(d: &OrderedDiagram, choices: &[u8], last: bool) -> EventuallyPeriodicPath {
    let choice = if last { ExtensionChoice::LastEdge } else { ExtensionChoice::FirstEdge };
    EventuallyPeriodicPath::extend(d, &random_walk(d, choices), choice).unwrap()
}

fn random_set(d: &OrderedDiagram, picks: &[Vec<u8>]) -> ClopenSet {
    ClopenSet::from_stems(d, picks.iter().map(|c| random_walk(d, c))).unwrap()
}

fn diagram(seed: u64) -> OrderedDiagram {
    match seed % 8 {
        0 => gen::twomax(),
        1 => gen::odometer(),
        _ => gen::random(seed),
    }
}

fn ords_are_permutations(d: &OrderedDiagram, depth: usize) -> bool {
    (1..=depth).all(|n| {
        let level = d.level(n).unwrap();
        (0..level.vertex_count()).all(|v| {
            let mut o: Vec<usize> = level.in_edges(v).iter().map(|&e| level.edge(e).ord).collect();
            o.sort();
            o.iter().enumerate().all(|(i, &x)| i == x)
        })
    })
}

/// Direct first-return time by running the orbit.
fn orbit_return_time(d: &OrderedDiagram, w: &ClopenSet, x: &EventuallyPeriodicPath) -> usize {
    let mut y = x.clone();
    for n in 1.. {
        match vershik(d, &y) {
            Err(Error::Domain(_)) => return n,
            Ok(z) if w.contains(&z) => return n,
            Ok(z) => y = z,
            Err(e) => panic!("{e}"),
        }
    }
    unreachable!()
}

#[test]
fn paper_examples_fiber_totality() {
    for d in [gen::twomax(), gen::odometer()] {
        for n in 0..=6 {
            let all = paths_at_depth(&d, n).unwrap();
            for v in 0..d.vertex_count(n).unwrap() {
                let fiber: Vec<_> = all.iter().filter(|p| d.check_path(p.edges()).unwrap() == v).cloned().collect();
                let mut cur = FinitePath::new(d.extreme_path_to(n, v, Extreme::Min).unwrap());
                let mut seen = vec![cur.clone()];
                while let Ok(next) = succ_fiber(&d, &cur) {
                    seen.push(next.clone());
                    cur = next;
                }
                assert!(d.is_all_extreme(cur.edges(), Extreme::Max));
                let mut sorted = seen.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), seen.len());
                assert_eq!(sorted, fiber);
            }
        }
    }
}

#[test]
fn lex_order_is_total_on_fibers() {
    for d in [gen::twomax(), gen::odometer()] {
        for n in 0..=6 {
            let all = paths_at_depth(&d, n).unwrap();
            for v in 0..d.vertex_count(n).unwrap() {
                let mut fiber: Vec<_> =
                    all.iter().filter(|p| d.check_path(p.edges()).unwrap() == v).cloned().collect();
                fiber.sort_by(|a, b| lex_compare(&d, a, b).unwrap());
                // strict agreement with one linear order on all pairs gives
                // totality, antisymmetry and transitivity at once
                for i in 0..fiber.len() {
                    for j in 0..fiber.len() {
                        assert_eq!(lex_compare(&d, &fiber[i], &fiber[j]).unwrap(), i.cmp(&j));
                    }
                }
            }
        }
    }
}

#[test]
fn extreme_paths_disjoint_and_nested_bases() {
    for seed in 0..40 {
        let d = diagram(seed);
        let max = d.extreme_paths(Extreme::Max).unwrap();
        let min = d.extreme_paths(Extreme::Min).unwrap();
        assert!(max.iter().all(|x| !min.contains(x)));
        for n in 2..=9 {
            let (a, b) = (canonical_w(&d, n).unwrap(), canonical_w(&d, n + 1).unwrap());
            assert!(b.is_subset(&d, &a));
        }
        let w10 = canonical_w(&d, 10).unwrap();
        for x in &min {
            assert!(w10.contains(x));
        }
        for x in &max {
            assert!(!w10.contains(x));
        }
    }
}

#[test]
fn return_time_matches_orbit_simulation() {
    for seed in 0..24 {
        let d = diagram(seed);
        for n in 2..=3 {
            let w = canonical_w(&d, n).unwrap();
            let table = return_time(&d, &w, DEFAULT_CAP).unwrap();
            for p in paths_at_depth(&d, n + 2).unwrap() {
                for choice in [ExtensionChoice::FirstEdge, ExtensionChoice::LastEdge] {
                    let x = EventuallyPeriodicPath::extend(&d, &p, choice).unwrap();
                    assert_eq!(table.value_at(&x), Some(orbit_return_time(&d, &w, &x)), "seed {seed} n {n} x {x}");
                }
            }
        }
    }
}

#[test]
fn kr_towers_follow_orbits() {
    for seed in 0..16 {
        let d = diagram(seed);
        let w = canonical_w(&d, 3).unwrap();
        let p = build_kr(&d, &w, DEFAULT_CAP).unwrap();
        for t in p.towers() {
            for s in t.base().stems() {
                let mut x = EventuallyPeriodicPath::extend(&d, s, ExtensionChoice::FirstEdge).unwrap();
                for (j, level) in t.levels().iter().enumerate() {
                    assert!(level.contains(&x));
                    if j + 1 < t.height() {
                        x = vershik(&d, &x).unwrap();
                    }
                }
            }
        }
    }
}

#[test]
fn nested_partitions_rebuild() {
    for seed in 0..16 {
        let d = diagram(seed);
        let parts: Vec<_> = (0..=4).map(|n| build_kr_canonical(&d, n).unwrap()).collect();
        let r = rebuild_from_partitions(&parts).unwrap();
        assert!(ords_are_permutations(r.diagram(), 4));
        assert!(iso_check(r.diagram(), &d.truncate(4).unwrap()).is_some());
        // level subsequences rebuild to the telescoped original
        let levels = [0, 1, 3, 4];
        let m = BvModel::at_levels(&d, &levels).unwrap();
        let t = Telescoping::new(levels.to_vec()).unwrap();
        let tele = telescope(&d, &t).unwrap();
        assert!(iso_check(m.rebuilt().diagram(), &tele).is_some());
        assert!(m.verify_conjugacy(&d, 4).unwrap().passed());
    }
}

#[test]
fn telescope_composition_exhaustive() {
    fn sequences(top: usize) -> Vec<Vec<usize>> {
        // every strictly increasing sequence from 0 with entries <= top
        let mut out = Vec::new();
        for mask in 0u32..(1 << top) {
            let mut s = vec![0];
            s.extend((1..=top).filter(|i| mask & (1 << (i - 1)) != 0));
            out.push(s);
        }
        out
    }
    for seed in [0u64, 1, 2, 5] {
        let d = diagram(seed).truncate(4).unwrap();
        for s1 in sequences(4) {
            let t1 = Telescoping::new(s1).unwrap();
            let once = telescope(&d, &t1).unwrap();
            for s2 in sequences(t1.depth()) {
                let t2 = Telescoping::new(s2).unwrap();
                let twice = telescope(&once, &t2).unwrap();
                assert_eq!(twice, telescope(&d, &t1.then(&t2).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn telescoped_order_is_lexicographic() {
    for seed in [0u64, 1, 3, 4] {
        let d = diagram(seed);
        for t in [vec![0, 3], vec![0, 1, 3], vec![0, 2, 3]] {
            let t = Telescoping::new(t).unwrap();
            let (tel, paths) = telescope_with_paths(&d, &t).unwrap();
            for (i, w) in t.levels().windows(2).enumerate() {
                let level = tel.level(i + 1).unwrap();
                for v in 0..level.vertex_count() {
                    let ins = level.in_edges(v);
                    for pair in ins.windows(2) {
                        let (a, b) = (&paths[i][pair[0]], &paths[i][pair[1]]);
                        // deepest differing original edge decides
                        let k = (0..a.len()).rev().find(|&k| a[k] != b[k]).unwrap();
                        let orig = d.level(w[0] + k + 1).unwrap();
                        assert!(orig.edge(a[k]).ord < orig.edge(b[k]).ord);
                    }
                }
            }
            assert!(ords_are_permutations(&tel, tel.truncation_depth().unwrap()));
        }
    }
}

/// Finite diagram with up to four vertices per level.
fn arb_finite() -> impl Strategy<Value = OrderedDiagram> {
    (1usize..=5, proptest::collection::vec((1usize..=4, proptest::collection::vec(any::<u16>(), 12)), 5)).prop_map(
        |(depth, raw)| {
            let mut levels = Vec::new();
            let mut prev = 1;
            for (count, noise) in raw.into_iter().take(depth) {
                let mut edges = Vec::new();
                let mut indeg = vec![0usize; count];
                // one edge per source, then one per target, then extras
                for u in 0..prev {
                    let v = noise[u % noise.len()] as usize % count;
                    edges.push((u, v));
                    indeg[v] += 1;
                }
                for (v, deg) in indeg.iter_mut().enumerate() {
                    if *deg == 0 {
                        edges.push((noise[(v + 4) % noise.len()] as usize % prev, v));
                        *deg += 1;
                    }
                }
                let extra = noise[11] as usize % 3;
                for k in 0..extra {
                    let u = noise[(k + 6) % noise.len()] as usize % prev;
                    let v = noise[(k + 9) % noise.len()] as usize % count;
                    edges.push((u, v));
                }
                let mut ords = vec![0usize; count];
                let specs = edges
                    .into_iter()
                    .map(|(u, v)| {
                        ords[v] += 1;
                        EdgeSpec::new(u, v, ords[v] - 1)
                    })
                    .collect();
                levels.push(LevelSpec::new(count, specs));
                prev = count;
            }
            OrderedDiagram::finite(levels).unwrap()
        },
    )
}

fn brute_iso(a: &OrderedDiagram, b: &OrderedDiagram) -> bool {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    fn rec(a: &OrderedDiagram, b: &OrderedDiagram, n: usize, depth: usize, prev: &[usize]) -> bool {
        if n > depth {
            return true;
        }
        let (la, lb) = (a.level(n).unwrap(), b.level(n).unwrap());
        if la.vertex_count() != lb.vertex_count() {
            return false;
        }
        perms(la.vertex_count()).into_iter().any(|sigma| {
            let mut ea: Vec<_> = la.edges().iter().map(|e| (prev[e.src], sigma[e.dst], e.ord)).collect();
            let mut eb: Vec<_> = lb.edges().iter().map(|e| (e.src, e.dst, e.ord)).collect();
            ea.sort();
            eb.sort();
            ea == eb && rec(a, b, n + 1, depth, &sigma)
        })
    }
    let depth = a.truncation_depth().unwrap();
    depth == b.truncation_depth().unwrap() && rec(a, b, 1, depth, &[0])
}

/// Relabels vertices and re-lists edges of a finite diagram.
fn scramble(d: &OrderedDiagram, noise: &[u16]) -> OrderedDiagram {
    let depth = d.truncation_depth().unwrap();
    let mut perms = vec![vec![0usize]];
    for n in 1..=depth {
        let c = d.vertex_count(n).unwrap();
        let mut p: Vec<usize> = (0..c).collect();
        for i in (1..c).rev() {
            p.swap(i, noise[(n * 7 + i) % noise.len()] as usize % (i + 1));
        }
        perms.push(p);
    }
    let levels = (1..=depth)
        .map(|n| {
            let spec = d.materialize_level(n).unwrap();
            let mut edges: Vec<_> = spec
                .edges
                .iter()
                .map(|e| EdgeSpec::new(perms[n - 1][e.src], perms[n][e.dst], e.ord))
                .collect();
            let shift = noise[n % noise.len()] as usize % edges.len().max(1);
            edges.rotate_left(shift);
            LevelSpec::new(spec.vertex_count, edges)
        })
        .collect();
    OrderedDiagram::finite(levels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn iso_check_sound_and_complete(a in arb_finite(), b in arb_finite(), noise in proptest::collection::vec(any::<u16>(), 16)) {
        let c = scramble(&a, &noise);
        for (x, y) in [(&a, &b), (&a, &c)] {
            let w = iso_check(x, y);
            prop_assert_eq!(w.is_some(), brute_iso(x, y));
            if let Some(w) = w {
                prop_assert_eq!(&w.apply(x).unwrap(), y);
                prop_assert_eq!(bratteli::serialize_diagram(&w.apply(x).unwrap()), bratteli::serialize_diagram(y));
            }
        }
        prop_assert!(iso_check(&a, &c).is_some());
    }

    #[test]
    fn periodic_materialization(seed in any::<u64>(), n in 2usize..40) {
        let d = diagram(seed);
        prop_assert_eq!(d.materialize_level(n).unwrap(), d.materialize_level(n + d.block_len()).unwrap());
        prop_assert!(ords_are_permutations(&d, 6));
    }

    #[test]
    fn vershik_inverse_pairs(seed in any::<u64>(), choices in proptest::collection::vec(any::<u8>(), 0..12), last in any::<bool>()) {
        let d = diagram(seed);
        let x = random_point(&d, &choices, last);
        match vershik(&d, &x) {
            Ok(y) => prop_assert_eq!(vershik_inv(&d, &y).unwrap(), x.clone()),
            Err(_) => prop_assert!(x.is_all_extreme(&d, Extreme::Max)),
        }
        match vershik_inv(&d, &x) {
            Ok(y) => prop_assert_eq!(vershik(&d, &y).unwrap(), x),
            Err(_) => prop_assert!(x.is_all_extreme(&d, Extreme::Min)),
        }
    }

    #[test]
    fn refine_keeps_membership(
        seed in any::<u64>(),
        picks in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..5), 0..6),
        choices in proptest::collection::vec(any::<u8>(), 0..10),
        last in any::<bool>(),
        extra in 0usize..3,
    ) {
        let d = diagram(seed);
        let c = random_set(&d, &picks);
        let x = random_point(&d, &choices, last);
        let depth = c.depth() + extra;
        let refined = ClopenSet::from_stems(&d, c.refine(&d, depth).unwrap()).unwrap();
        prop_assert_eq!(&refined, &c);
        let naive = c.refine(&d, depth).unwrap().iter().any(|s| s.is_prefix_of(x.prefix(depth).edges()));
        prop_assert_eq!(c.contains(&x), naive);
    }

    #[test]
    fn boolean_algebra_laws(
        seed in any::<u64>(),
        a in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..8), 0..5),
        b in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..8), 0..5),
    ) {
        let d = diagram(seed);
        let (a, b) = (random_set(&d, &a), random_set(&d, &b));
        prop_assert_eq!(a.union(&d, &a), a.clone());
        prop_assert_eq!(a.intersection(&d, &a), a.clone());
        prop_assert_eq!(a.union(&d, &b).complement(&d), a.complement(&d).intersection(&d, &b.complement(&d)));
        prop_assert_eq!(a.intersection(&d, &b).complement(&d), a.complement(&d).union(&d, &b.complement(&d)));
        prop_assert_eq!(a.union(&d, &a.intersection(&d, &b)), a.clone());
        prop_assert_eq!(a.intersection(&d, &a.union(&d, &b)), a.clone());
        prop_assert!(a.union(&d, &a.complement(&d)).is_full());
    }

    #[test]
    fn image_composition(
        seed in any::<u64>(),
        picks in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..6), 1..5),
        n in -3i64..=3,
        m in -3i64..=3,
    ) {
        let d = diagram(seed);
        let cap = 8;
        let c = random_set(&d, &picks);
        let dom = domain_of_power(&d, m, cap).unwrap().domain
            .intersection(&d, &domain_of_power(&d, m + n, cap).unwrap().domain);
        let a = c.intersection(&d, &dom);
        let stepwise = image_clopen(&d, &image_clopen(&d, &a, m, cap).unwrap(), n, cap).unwrap();
        prop_assert_eq!(stepwise, image_clopen(&d, &a, m + n, cap).unwrap());
    }

    #[test]
    fn pointwise_images_land_in_set_image(
        seed in any::<u64>(),
        picks in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..6), 1..4),
        samples in proptest::collection::vec((proptest::collection::vec(any::<u8>(), 8), any::<bool>()), 50),
    ) {
        let d = diagram(seed);
        let cap = 8;
        let c = random_set(&d, &picks);
        let dom = domain_of_power(&d, 1, cap).unwrap().domain;
        let a = c.intersection(&d, &dom);
        let img = image_exact(&d, &a, 1, cap).unwrap();
        for (choices, last) in &samples {
            let x = random_point(&d, choices, *last);
            if a.contains(&x) {
                prop_assert!(img.contains(&vershik(&d, &x).unwrap()));
            } else if let Ok(y) = vershik(&d, &x) {
                prop_assert!(!img.contains(&y));
            }
        }
    }
}

#[test]
fn lex_compare_rejects_other_fibers() {
    let tm = gen::twomax();
    let a = FinitePath::new(vec![0, 0]);
    let b = FinitePath::new(vec![0, 3]);
    assert!(matches!(lex_compare(&tm, &a, &b), Err(Error::IncomparablePaths(_))));
    assert_eq!(lex_compare(&tm, &a, &a).unwrap(), Ordering::Equal);
}
