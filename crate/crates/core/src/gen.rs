//! Built-in example diagrams and the seeded random generator.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{EdgeSpec, LevelSpec, OrderedDiagram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Odometer,
    Twomax,
    Random,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odometer" => Ok(Generator::Odometer),
            "twomax" => Ok(Generator::Twomax),
            "random" => Ok(Generator::Random),
            other => Err(Error::Precondition(format!("unknown generator `{other}`"))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Odometer => "odometer",
            Generator::Twomax => "twomax",
            Generator::Random => "random",
        })
    }
}

pub fn generate(g: Generator, seed: u64) -> OrderedDiagram {
    match g {
        Generator::Odometer => odometer(),
        Generator::Twomax => twomax(),
        Generator::Random => random(seed),
    }
}

/// Binary odometer: one vertex per level, two edges (digit 0 < digit 1).
pub fn odometer() -> OrderedDiagram {
    let block = LevelSpec::new(1, vec![EdgeSpec::new(0, 0, 0), EdgeSpec::new(0, 0, 1)]);
    OrderedDiagram::new(Vec::new(), vec![block]).expect("odometer is valid")
}

/// Stationary diagram with incidence `[[2,1],[1,1]]` and two maximal paths.
///
/// Vertex 0 is the left vertex. Into the left vertex the order is
/// `L < R < L`; into the right vertex it is `L < R`.
pub fn twomax() -> OrderedDiagram {
    let root = LevelSpec::new(2, vec![EdgeSpec::new(0, 0, 0), EdgeSpec::new(0, 1, 0)]);
    let block = LevelSpec::new(
        2,
        vec![
            EdgeSpec::new(0, 0, 0),
            EdgeSpec::new(1, 0, 1),
            EdgeSpec::new(0, 0, 2),
            EdgeSpec::new(0, 1, 0),
            EdgeSpec::new(1, 1, 1),
        ],
    );
    OrderedDiagram::new(vec![root], vec![block]).expect("twomax is valid")
}

/// Two disjoint odometers; not simple.
pub fn reducible() -> OrderedDiagram {
    let root = LevelSpec::new(2, vec![EdgeSpec::new(0, 0, 0), EdgeSpec::new(0, 1, 0)]);
    let block = LevelSpec::new(
        2,
        vec![
            EdgeSpec::new(0, 0, 0),
            EdgeSpec::new(0, 0, 1),
            EdgeSpec::new(1, 1, 0),
            EdgeSpec::new(1, 1, 1),
        ],
    );
    OrderedDiagram::new(vec![root], vec![block]).expect("reducible example is valid")
}

const MAX_EDGES: usize = 6;

/// Deterministic stationary diagram for a seed.
///
/// The block has 1 to 3 vertices, every vertex has at least two incoming
/// edges, there are at most six edges, and the incidence is primitive.
/// Edges are listed in `(dst, ord)` order.
pub fn random(seed: u64) -> OrderedDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(d) = attempt(&mut rng) {
            return d;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng) -> Option<OrderedDiagram> {
    let c = rng.gen_range(1..=3usize);
    let mut indeg = vec![2usize; c];
    let mut spare = MAX_EDGES - 2 * c;
    for slot in indeg.iter_mut() {
        let extra = rng.gen_range(0..=spare);
        *slot += extra;
        spare -= extra;
    }
    let mut edges = Vec::new();
    for (v, &k) in indeg.iter().enumerate() {
        let mut srcs: Vec<usize> = (0..k).map(|_| rng.gen_range(0..c)).collect();
        // random order: shuffle by drawing sources in sequence
        for i in (1..srcs.len()).rev() {
            let j = rng.gen_range(0..=i);
            srcs.swap(i, j);
        }
        for (ord, src) in srcs.into_iter().enumerate() {
            edges.push(EdgeSpec::new(src, v, ord));
        }
    }
    let root = LevelSpec::new(c, (0..c).map(|v| EdgeSpec::new(0, v, 0)).collect());
    let block = LevelSpec::new(c, edges);
    let d = OrderedDiagram::new(vec![root], vec![block]).ok()?;
    match d.is_simple_heuristic() {
        Ok(true) => Some(d),
        _ => None,
    }
}
