use crate::error::{Error, Result};
use crate::graph::Basis;
use crate::lattice::{manhattan, Coord};

use super::canvas::Canvas;
use super::zipper::zipper_connect;

/// Which neighbor of the hub was routed to which endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HubResult {
    pub links: Vec<(Coord, Coord)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Connects the interior site `a` to four endpoints, giving the star on
/// `a` and the endpoints.
///
/// Each lattice neighbor of `a` is zipped to one endpoint (assignment of least
/// total distance) and cut off from everything else; Y on the four
/// neighbors then hands their endpoints over to `a`.
pub fn hub_connect_degree4(canvas: &mut Canvas, a: Coord, endpoints: [Coord; 4]) -> Result<HubResult> {
    let spec = canvas.spec();
    let ring: Vec<Coord> = spec.neighbors(a).collect();
    if ring.len() != 4 || ring.iter().any(|y| !canvas.is_spare(*y)) || canvas.degree(a) != 4 {
        return Err(Error::Degree(a));
    }
    for e in endpoints {
        spec.check(e)?;
        if manhattan(a, e) <= 1 {
            return Err(Error::Adjacency(a));
        }
        if !canvas.alive(e) {
            return Err(Error::planning(format!("endpoint {e}"), "already measured"));
        }
    }
    let cost = |perm: &[usize]| -> u32 { perm.iter().enumerate().map(|(i, &j)| manhattan(ring[i], endpoints[j])).sum() };
    let best = permutations(4).into_iter().min_by_key(|p| cost(p)).expect("24 permutations");
    let links: Vec<(Coord, Coord)> = best.iter().enumerate().map(|(i, &j)| (ring[i], endpoints[j])).collect();

    let mut trial = canvas.clone();
    trial.protect(a);
    let outward = |y: Coord| Coord::new(2 * y.x - a.x, 2 * y.y - a.y);
    for &(y, e) in &links {
        trial.protect(y);
        trial.protect(e);
        trial.reserve(outward(y));
    }
    let mut order = links.clone();
    order.sort_by_key(|(y, e)| (manhattan(*y, *e), y.row_major()));
    for &(y, e) in &order {
        trial.release(outward(y));
        zipper_connect(&mut trial, y, e)?;
    }
    for &(y, e) in &links {
        let mut nbrs = trial.neighbors(y);
        nbrs.sort();
        let mut want = vec![a, e];
        want.sort();
        if nbrs != want {
            return Err(Error::planning(format!("hub neighbor {y}"), "not reduced to a bridge"));
        }
        trial.unprotect(y);
        trial.measure(y, Basis::Y, None, "merge")?;
    }
    if !canvas.is_protected(a) {
        trial.unprotect(a);
    }
    *canvas = trial;
    Ok(HubResult { links })
}
