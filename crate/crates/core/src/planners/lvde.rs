use std::collections::BTreeMap;

use crate::error::Result;
use crate::lattice::{manhattan, Coord};
use crate::primitives::Plan;

use super::builder::Builder;
use super::request::ExtractionRequest;

/// Rough center of the partners of `v`, used to aim expansions.
pub(crate) fn partner_center(v: Coord, partners: &[Coord]) -> Option<Coord> {
    if partners.is_empty() {
        return None;
    }
    let n = partners.len() as i32;
    let (sx, sy) = partners.iter().fold((0, 0), |(x, y), c| (x + c.x - v.x, y + c.y - v.y));
    Some(v.offset(sx / n, sy / n))
}

/// Lattice edges between targets that the request does not ask for are cut
/// first. Returns the requested edges that still have to be made.
pub(crate) fn settle_native(b: &mut Builder) -> Result<Vec<(Coord, Coord)>> {
    let requested = b.requested();
    let native = b.native();
    for (u, v) in native.difference(&requested).copied().collect::<Vec<_>>() {
        b.add_pending(u, 1);
        b.add_pending(v, 1);
    }
    b.refresh_rings(&[], &[]);
    for (u, v) in native.difference(&requested).copied().collect::<Vec<_>>() {
        b.remove_native(u, v)?;
    }
    Ok(requested.difference(&native).copied().collect())
}

/// Local vertex degree expansion: every target first gets enough free
/// neighbors (expanding where the lattice's four are not enough), then every
/// edge gets its own zipper, shortest first.
pub fn plan_lvde(req: &ExtractionRequest) -> Result<Plan> {
    let mut b = Builder::new(req)?;
    let mut todo = settle_native(&mut b)?;
    todo.sort_by_key(|(u, v)| (manhattan(*u, *v), u.row_major(), v.row_major()));

    let mut partners: BTreeMap<Coord, Vec<Coord>> = BTreeMap::new();
    for &(u, v) in &todo {
        partners.entry(u).or_default().push(v);
        partners.entry(v).or_default().push(u);
    }
    for (t, ps) in &partners {
        b.add_pending(*t, ps.len());
    }
    b.refresh_rings(&[], &[]);
    let mut order: Vec<Coord> = partners.keys().copied().collect();
    order.sort_by_key(|t| (std::cmp::Reverse(partners[t].len()), b.name(*t)));
    for t in order {
        b.ensure_degree(t, partners[&t].len(), partner_center(t, &partners[&t]))?;
    }
    for (u, v) in todo {
        b.connect_edge(u, v, None)?;
    }
    b.finish("lvde")
}
