use crate::error::{Error, Result};
use crate::graph::{measure_y, Basis, Graph, Outcome, VertexId};
use crate::lattice::Coord;

use super::canvas::Canvas;

/// Checks the merging preconditions: path `y1 - y3 - y2`, `y3` of degree
/// two, and no neighbor of `y1` (besides `y3`) adjacent to or equal to `y2`.
pub fn check_merge(g: &Graph, y1: VertexId, y3: VertexId, y2: VertexId) -> Result<()> {
    for (a, b) in [(y1, y3), (y3, y2)] {
        if !g.has_edge(a, b) {
            g.require(a)?;
            g.require(b)?;
            return Err(Error::NotAdjacent(a, b));
        }
    }
    if g.degree(y3)? != 2 {
        return Err(Error::MergePrecondition(y3, *g.neighbors(y3)?.iter().find(|v| **v != y1 && **v != y2).unwrap()));
    }
    let n2 = g.neighbors(y2)?;
    for &r in g.neighbors(y1)? {
        if r != y3 && (r == y2 || n2.contains(&r)) {
            return Err(Error::MergePrecondition(y1, r));
        }
    }
    Ok(())
}

/// Merges the subgraph around `y1` into `y2` through the bridge `y3`:
/// Y on `y1`, then Y on `y3`. Afterwards `y2` is adjacent to its old
/// neighbors (minus `y3`) and to those of `y1`.
pub fn merge_subgraphs(g: &Graph, y1: VertexId, y3: VertexId, y2: VertexId) -> Result<Graph> {
    check_merge(g, y1, y3, y2)?;
    merge_unchecked(g, y1, y3)
}

/// The two Y measurements without the precondition check.
pub fn merge_unchecked(g: &Graph, y1: VertexId, y3: VertexId) -> Result<Graph> {
    let g = measure_y(g, y1, Outcome::Plus)?.graph;
    Ok(measure_y(&g, y3, Outcome::Plus)?.graph)
}

/// Merge on the canvas; `y2` must be protected or otherwise kept by the caller.
pub fn merge_on_canvas(canvas: &mut Canvas, y1: Coord, y3: Coord, y2: Coord) -> Result<()> {
    check_merge(canvas.graph(), canvas.id(y1), canvas.id(y3), canvas.id(y2))?;
    canvas.measure(y1, Basis::Y, None, "merge-Y1")?;
    canvas.measure(y3, Basis::Y, None, "merge-Y3")
}
