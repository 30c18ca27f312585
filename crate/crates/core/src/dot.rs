//! Graphviz rendering of the first levels of a diagram.

use std::fmt::Write as _;

use crate::diagram::OrderedDiagram;
use crate::error::Result;

/// Layered DOT graph of levels `0..=depth`; edge labels are the orders.
pub fn render_dot(d: &OrderedDiagram, depth: usize) -> Result<String> {
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle, label=\"\"];\n");
    for n in 0..=depth {
        let count = d.vertex_count(n)?;
        let _ = write!(out, "  {{ rank=same;");
        for v in 0..count {
            let _ = write!(out, " v{n}_{v};");
        }
        out.push_str(" }\n");
    }
    for n in 1..=depth {
        let level = d.level(n)?;
        for e in level.edges() {
            let _ = writeln!(out, "  v{}_{} -> v{n}_{} [label=\"{}\"];", n - 1, e.src, e.dst, e.ord);
        }
    }
    out.push_str("}\n");
    Ok(out)
}
