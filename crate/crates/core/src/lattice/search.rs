use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Coord, GridPattern, Role};
use crate::error::{Error, Result};

/// Result of a nearest-candidate search from an existing pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nearest {
    /// Candidate reached first.
    pub n: Coord,
    /// Pattern cell the search left from.
    pub j: Coord,
    pub distance: u32,
    /// Free cells strictly between `j` and `n`.
    pub path: Vec<Coord>,
}

/// A cell can serve as a junction if two orthogonal neighbors are free: one
/// for the merge vertex and one for its isolation.
fn admits_junction(p: &GridPattern, c: Coord) -> bool {
    c.around().iter().filter(|n| p.is_free(**n)).count() >= 2
}

/// Multi-source breadth-first search (all steps cost one) from the junction-
/// capable cells of `sources` through free cells to the closest member of
/// `candidates`. Ties break on candidate then source in row-major order.
pub fn dijkstra_nearest(
    pattern: &GridPattern,
    sources: &BTreeSet<Coord>,
    candidates: &BTreeSet<Coord>,
) -> Result<Nearest> {
    let no_path = || Error::NoPath {
        from: sources.first().copied().unwrap_or(Coord::new(0, 0)),
        to: candidates.first().copied().unwrap_or(Coord::new(0, 0)),
    };
    let mut starts: Vec<Coord> = sources.iter().copied().filter(|c| admits_junction(pattern, *c)).collect();
    starts.sort_by_key(|c| c.row_major());

    let mut parent: BTreeMap<Coord, Option<Coord>> = BTreeMap::new();
    let mut origin: BTreeMap<Coord, Coord> = BTreeMap::new();
    let mut frontier: VecDeque<(Coord, u32)> = VecDeque::new();
    for s in starts {
        parent.insert(s, None);
        origin.insert(s, s);
        frontier.push_back((s, 0));
    }

    let mut best: Option<(u32, (i32, i32), (i32, i32), Coord, Coord)> = None;
    while let Some((c, d)) = frontier.pop_front() {
        if best.as_ref().is_some_and(|b| d + 1 > b.0) {
            break;
        }
        for nb in c.around() {
            if candidates.contains(&nb) && !sources.contains(&nb) {
                let key = (d + 1, nb.row_major(), origin[&c].row_major(), nb, c);
                if best.as_ref().is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                    best = Some(key);
                }
            } else if pattern.is_free(nb) && !parent.contains_key(&nb) {
                parent.insert(nb, Some(c));
                origin.insert(nb, origin[&c]);
                frontier.push_back((nb, d + 1));
            }
        }
    }

    let (distance, _, _, n, last) = best.ok_or_else(no_path)?;
    let mut path = Vec::new();
    let mut cur = last;
    while let Some(Some(prev)) = parent.get(&cur) {
        path.push(cur);
        cur = *prev;
    }
    path.reverse();
    Ok(Nearest { n, j: cur, distance, path })
}

/// Monotone staircase from `from` (exclusive) to `to` (inclusive),
/// alternating unit steps in x and y, x first, then straight once one axis is done.
pub fn staircase(from: Coord, to: Coord) -> Vec<Coord> {
    let (sx, sy) = ((to.x - from.x).signum(), (to.y - from.y).signum());
    let mut out = Vec::new();
    let mut cur = from;
    let mut x_turn = true;
    while cur != to {
        let step_x = cur.x != to.x && (x_turn || cur.y == to.y);
        cur = if step_x { cur.offset(sx, 0) } else { cur.offset(0, sy) };
        x_turn = !step_x;
        out.push(cur);
    }
    out
}

/// Crossing of the diagonal through `a` with the opposite diagonal through
/// `b`. The ascending-first branch turns at `x = (a_x - a_y + b_x + b_y) / 2`,
/// the other at `x = (a_x + a_y + b_x - b_y) / 2`; halves round down.
pub fn turning_point(a: Coord, b: Coord, ascending_first: bool) -> Coord {
    if ascending_first {
        let xi = (a.x - a.y + b.x + b.y).div_euclid(2);
        Coord::new(xi, xi + a.y - a.x)
    } else {
        let xi = (a.x + a.y + b.x - b.y).div_euclid(2);
        Coord::new(xi, a.x + a.y - xi)
    }
}

fn one_turn_branch(a: Coord, b: Coord, ascending_first: bool, p: &GridPattern) -> Option<Vec<Coord>> {
    let apex = turning_point(a, b, ascending_first);
    if !p.spec().contains(apex) {
        return None;
    }
    let mut cells = vec![a];
    cells.extend(staircase(a, apex));
    cells.extend(staircase(apex, b));
    let cells = shortcut(&cells, |p, q| super::manhattan(p, q) == 1);
    let inner = cells[1..cells.len() - 1].to_vec();
    let mut seen = BTreeSet::from([a, b]);
    inner.iter().all(|c| p.is_free(*c) && seen.insert(*c)).then_some(inner)
}

/// Drops detours from a walk: whenever a later vertex is adjacent to the
/// current one, jump straight to the last such vertex. The result has no chords.
pub fn shortcut<T: Copy + PartialEq>(walk: &[T], adjacent: impl Fn(T, T) -> bool) -> Vec<T> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < walk.len() {
        out.push(walk[i]);
        let jump = (i + 1..walk.len()).rev().find(|&j| adjacent(walk[i], walk[j]) || walk[i] == walk[j]);
        i = match jump {
            Some(j) if walk[i] == walk[j] => j + 1,
            Some(j) => j,
            None => i + 1,
        };
    }
    out
}

/// One-turn staircase between `j` and `n`: up the ascending diagonal through
/// `j` to its crossing with the descending diagonal through `n`, or failing
/// that the mirrored pair. Path cells (endpoints excluded) become X.
pub fn one_turn_zipper(n: Coord, j: Coord, pattern: &GridPattern) -> Result<(GridPattern, Vec<Coord>)> {
    let spec = pattern.spec();
    spec.check(n)?;
    spec.check(j)?;
    if n == j {
        return Err(Error::NoPath { from: j, to: n });
    }
    let path = one_turn_branch(j, n, true, pattern)
        .or_else(|| one_turn_branch(j, n, false, pattern))
        .ok_or(Error::NoPath { from: j, to: n })?;
    let mut out = pattern.clone();
    for c in &path {
        out.set(*c, Role::MeasX)?;
    }
    Ok((out, path))
}

/// A maximal 4-connected region of free cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub cells: BTreeSet<Coord>,
}

impl Patch {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Connected components of the free cells, in row-major order of their first cell.
pub fn find_free_patches(pattern: &GridPattern) -> Vec<Patch> {
    let mut seen = BTreeSet::new();
    let mut patches = Vec::new();
    for start in pattern.spec().coords() {
        if !pattern.is_free(start) || !seen.insert(start) {
            continue;
        }
        let mut cells = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for nb in c.around() {
                if pattern.is_free(nb) && seen.insert(nb) {
                    cells.insert(nb);
                    queue.push_back(nb);
                }
            }
        }
        patches.push(Patch { cells });
    }
    patches
}
