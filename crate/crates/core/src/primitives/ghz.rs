use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Basis, FramedGraph, Graph, GraphStep, Outcome, VertexId};

/// The vertex adjacent to every other member while the others share no edge,
/// if the subgraph on `members` is such a star.
pub fn star_center(g: &Graph, members: &BTreeSet<VertexId>) -> Option<VertexId> {
    let h = g.induced(members.iter());
    if members.len() < 2 || h.vertex_count() != members.len() || h.edge_count() != members.len() - 1 {
        return None;
    }
    let mut hubs = members.iter().copied().filter(|v| h.degree(*v).ok() == Some(members.len() - 1));
    match (hubs.next(), hubs.next()) {
        // a single edge has two centers; report the smaller id
        (Some(c), _) => Some(c),
        _ => None,
    }
}

fn check_chain(g: &Graph, center: VertexId, path: &[VertexId], next: VertexId) -> Result<()> {
    if path.is_empty() {
        return Err(Error::planning("collection path", "needs at least one vertex"));
    }
    let chain: Vec<VertexId> = [center].into_iter().chain(path.iter().copied()).chain([next]).collect();
    for w in chain.windows(2) {
        g.require(w[0])?;
        g.require(w[1])?;
        if !g.has_edge(w[0], w[1]) {
            return Err(Error::NotAdjacent(w[0], w[1]));
        }
    }
    Ok(())
}

/// X measurements along `path`, each with the star's center as special
/// neighbor. This is the plain zipper; it moves the center onto `next`
/// only for odd path lengths.
pub fn zipper_chain_steps(g: &Graph, center: VertexId, path: &[VertexId], next: VertexId) -> Result<Vec<GraphStep>> {
    check_chain(g, center, path, next)?;
    Ok(path.iter().map(|p| GraphStep::Measure(*p, Basis::X, Some(center))).collect())
}

/// Steps that add `next` to the star around `center` and make `next` the new
/// center.
///
/// Odd paths are X-measured directly. Even paths first Z-measure the two
/// `aux` vertices beside the first and last path vertex, zip the interior,
/// apply local complementation at the old center, and finish with Y on the
/// last and then the first path vertex.
pub fn ghz_collect_steps(
    g: &Graph,
    center: VertexId,
    path: &[VertexId],
    next: VertexId,
    aux: Option<(VertexId, VertexId)>,
) -> Result<Vec<GraphStep>> {
    if path.len() % 2 == 1 {
        return zipper_chain_steps(g, center, path, next);
    }
    check_chain(g, center, path, next)?;
    let (z1, z2) = aux.ok_or_else(|| Error::NoRoom(format!("even path from {center} to {next} needs two auxiliary vertices")))?;
    g.require(z1)?;
    g.require(z2)?;
    let (y1, y2) = (path[0], path[path.len() - 1]);
    let mut steps = vec![GraphStep::Measure(z1, Basis::Z, None), GraphStep::Measure(z2, Basis::Z, None)];
    steps.extend(path[1..path.len() - 1].iter().map(|p| GraphStep::Measure(*p, Basis::X, Some(y1))));
    steps.push(GraphStep::LocalComplement(center));
    steps.push(GraphStep::Measure(y2, Basis::Y, None));
    steps.push(GraphStep::Measure(y1, Basis::Y, None));
    Ok(steps)
}

/// Runs a step list from the bare graph with all outcomes `+`.
pub fn run_steps(g: &Graph, steps: &[GraphStep]) -> Result<FramedGraph> {
    let mut fg = FramedGraph::new(g.clone());
    for s in steps {
        fg.apply(*s, Outcome::Plus)?;
    }
    Ok(fg)
}

/// Graph after one collection step (see [`ghz_collect_steps`]).
pub fn ghz_collect_step(
    g: &Graph,
    center: VertexId,
    path: &[VertexId],
    next: VertexId,
    aux: Option<(VertexId, VertexId)>,
) -> Result<Graph> {
    Ok(run_steps(g, &ghz_collect_steps(g, center, path, next, aux)?)?.graph)
}
