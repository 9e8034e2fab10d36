use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::{dijkstra_nearest, manhattan, Coord, GridPattern, Role};
use crate::primitives::{merge_on_canvas, Plan};

use super::builder::{pair, Builder};
use super::lvde::{partner_center, settle_native};
use super::request::ExtractionRequest;

/// Part of a planned tree: the route from `parent` to `child`, endpoints
/// excluded. When `child` is a relay, the last cell is the bridge that later
/// merges the relay's star into `parent`.
#[derive(Debug, Clone)]
struct Segment {
    parent: Coord,
    child: Coord,
    cells: Vec<Coord>,
}

/// Star of `v` laid out on the pattern: relays collect leaves; each relay
/// hangs below its parent through a bridge.
#[derive(Debug, Clone)]
struct Tree {
    center: Coord,
    root: Coord,
    relays: BTreeSet<Coord>,
    segments: Vec<Segment>,
    /// Leaves the search could not attach.
    direct: Vec<Coord>,
}

impl Tree {
    fn bridges(&self) -> BTreeSet<Coord> {
        self.segments.iter().filter(|s| self.relays.contains(&s.child)).filter_map(|s| s.cells.last().copied()).collect()
    }
}

/// Stars in processing order: descending requested degree, ties by label.
/// Each star holds the edges of its center not covered by earlier stars.
fn stars(b: &Builder, todo: &[(Coord, Coord)]) -> Vec<(Coord, Vec<Coord>)> {
    let mut order: Vec<(Coord, String)> = b.req.targets.iter().map(|t| (t.coord(), t.label.clone())).collect();
    order.sort_by_key(|(_, l)| (Reverse(b.req.degree(l)), l.clone()));
    let mut open: BTreeSet<(Coord, Coord)> = todo.iter().copied().collect();
    let mut out = Vec::new();
    for (v, _) in order {
        let mut leaves: Vec<Coord> = open
            .iter()
            .filter_map(|&(p, q)| if p == v { Some(q) } else if q == v { Some(p) } else { None })
            .collect();
        leaves.sort_by_key(|c| b.name(*c));
        for &u in &leaves {
            open.remove(&pair(v, u));
        }
        if !leaves.is_empty() {
            out.push((v, leaves));
        }
    }
    out
}

struct Layout<'a> {
    b: &'a Builder<'a>,
    v: Coord,
    pattern: GridPattern,
    tree: Tree,
}

impl Layout<'_> {
    fn targets_near(&self, c: Coord) -> Vec<Coord> {
        c.around().into_iter().filter(|n| self.b.is_target(*n)).collect()
    }

    /// A relay or bridge may only touch the targets it is meant to touch.
    fn clean(&self, c: Coord, allowed: &[Coord]) -> bool {
        self.targets_near(c).iter().all(|t| allowed.contains(t))
    }

    fn touches_structure(&self, c: Coord, except: &[Coord]) -> bool {
        let bridges = self.tree.bridges();
        c.around()
            .iter()
            .any(|n| !except.contains(n) && (self.tree.relays.contains(n) || bridges.contains(n)))
    }

    /// Blocks the free cells beside a bridge so that no route passes there;
    /// they are Z-measured when the bridge is merged.
    fn seal(&mut self, bridge: Coord) {
        for n in bridge.around() {
            if self.pattern.is_free(n) {
                let _ = self.pattern.set(n, Role::MeasZ);
            }
        }
    }

    fn mark_route(&mut self, cells: &[Coord]) {
        for c in cells {
            let _ = self.pattern.set(*c, Role::MeasX);
        }
    }

    /// Path cells that may become relays: never the first cell of a segment
    /// (its bridge would coincide with the parent) and never a relay's bridge.
    fn junction_sources(&self) -> BTreeSet<Coord> {
        let mut out: BTreeSet<Coord> = self.tree.relays.clone();
        for s in &self.tree.segments {
            if s.parent == self.v {
                continue;
            }
            let child_is_relay = self.tree.relays.contains(&s.child);
            let m = s.cells.len();
            for i in 1..m {
                if child_is_relay && i + 1 >= m {
                    continue;
                }
                let c = s.cells[i];
                let bridge = s.cells[i - 1];
                let own = [bridge, s.cells.get(i + 1).copied().unwrap_or(s.child)];
                if self.clean(c, &[s.child])
                    && self.clean(bridge, &[s.parent])
                    && !self.touches_structure(c, &own)
                    && !self.touches_structure(bridge, &[c, if i >= 2 { s.cells[i - 2] } else { s.parent }])
                {
                    out.insert(c);
                }
            }
        }
        out
    }

    fn split(&mut self, j: Coord) {
        let Some(k) = self.tree.segments.iter().position(|s| s.cells.contains(&j)) else { return };
        let s = self.tree.segments.remove(k);
        let i = s.cells.iter().position(|c| *c == j).unwrap();
        self.tree.segments.push(Segment { parent: s.parent, child: j, cells: s.cells[..i].to_vec() });
        self.tree.segments.push(Segment { parent: j, child: s.child, cells: s.cells[i + 1..].to_vec() });
        self.tree.relays.insert(j);
        let _ = self.pattern.set(j, Role::Junction);
        self.seal(s.cells[i - 1]);
    }
}

/// Lays out the star of `v` on the pattern with repeated nearest searches
/// from the growing tree. `None` when not even a root relay fits.
fn plan_tree(b: &Builder, v: Coord, leaves: &[Coord]) -> Option<Tree> {
    let canvas = &b.canvas;
    let leafset: BTreeSet<Coord> = leaves.iter().copied().collect();
    let mut pattern = canvas.pattern().clone();
    for c in canvas.spec().coords() {
        if !canvas.alive(c) || b.is_target(c) {
            continue;
        }
        let near_star = c.around().iter().any(|n| *n == v || leafset.contains(n));
        let blocked = !canvas.is_spare(c) && !(b.in_ring(c) && near_star);
        // the first cell off v becomes a bridge and must not touch other targets
        let dirty_port = c.around().contains(&v) && c.around().iter().any(|n| *n != v && b.is_target(*n));
        if blocked || dirty_port {
            pattern.set(c, Role::MeasZ).ok()?;
        }
    }
    let first = dijkstra_nearest(&pattern, &BTreeSet::from([v]), &leafset).ok()?;
    let mut lay = Layout {
        b,
        v,
        pattern,
        tree: Tree { center: v, root: v, relays: BTreeSet::new(), segments: Vec::new(), direct: Vec::new() },
    };
    let path = &first.path;
    let i = (1..path.len()).find(|&i| {
        let allowed = if i + 1 == path.len() { vec![first.n] } else { vec![] };
        lay.clean(path[i], &allowed) && lay.clean(path[i - 1], &[v])
    })?;
    lay.tree.root = path[i];
    lay.tree.relays.insert(path[i]);
    lay.tree.segments.push(Segment { parent: v, child: path[i], cells: path[..i].to_vec() });
    lay.tree.segments.push(Segment { parent: path[i], child: first.n, cells: path[i + 1..].to_vec() });
    lay.mark_route(path);
    let _ = lay.pattern.set(path[i], Role::Junction);
    lay.seal(path[i - 1]);
    // the rest of v's ring stays clear of the tree
    for n in v.around() {
        if lay.pattern.is_free(n) {
            let _ = lay.pattern.set(n, Role::MeasZ);
        }
    }

    let mut remaining: BTreeSet<Coord> = leafset;
    remaining.remove(&first.n);
    while !remaining.is_empty() {
        let sources = lay.junction_sources();
        let Ok(next) = dijkstra_nearest(&lay.pattern, &sources, &remaining) else { break };
        if !lay.tree.relays.contains(&next.j) {
            lay.split(next.j);
        }
        lay.mark_route(&next.path);
        lay.tree.segments.push(Segment { parent: next.j, child: next.n, cells: next.path });
        remaining.remove(&next.n);
    }
    let mut direct: Vec<Coord> = remaining.into_iter().collect();
    direct.sort_by_key(|c| b.name(*c));
    lay.tree.direct = direct;
    Some(lay.tree)
}

/// Z-measures everything hanging on `c` except the protected sites.
fn strip(b: &mut Builder, c: Coord) -> Result<()> {
    let mut loose: Vec<Coord> = b.canvas.neighbors(c).into_iter().filter(|n| !b.canvas.is_protected(*n)).collect();
    loose.sort_by_key(|n| n.row_major());
    for n in &loose {
        b.canvas.release(*n);
    }
    b.canvas.measure_z_all(loose, "isolation")?;
    b.refresh_rings(&[], &[]);
    Ok(())
}

fn build(b: &mut Builder, tree: &Tree, node: Coord) -> Result<()> {
    for s in tree.segments.iter().filter(|s| s.parent == node) {
        if tree.relays.contains(&s.child) {
            build(b, tree, s.child)?;
            link(b, tree, s)?;
        } else {
            for c in &s.cells {
                b.canvas.release(*c);
            }
            let keep = [true, b.pending(s.child) > 1];
            b.connect(node, s.child, Some(s.cells.clone()), keep)?;
            b.done(s.child);
        }
    }
    Ok(())
}

/// Joins the finished star of relay `s.child` to `s.parent` through the
/// bridge at the end of the segment, then merges it in.
fn link(b: &mut Builder, tree: &Tree, s: &Segment) -> Result<()> {
    let (p, j) = (s.parent, s.child);
    let (&y3, route) = s.cells.split_last().expect("relay segments carry a bridge");
    for c in route {
        b.canvas.release(*c);
    }
    if !route.is_empty() {
        let keep = [!b.is_target(p) || b.pending(p) > 1, false];
        b.connect(p, y3, Some(route.to_vec()), keep)?;
    }
    strip(b, y3)?;
    strip(b, j)?;
    merge_on_canvas(&mut b.canvas, j, y3, p)
        .map_err(|e| Error::planning(format!("junction {j} of {}", b.name(tree.center)), e))?;
    if b.is_target(p) {
        b.done(p);
    }
    Ok(())
}

fn realize(b: &mut Builder, tree: &Tree) -> Result<()> {
    for &r in &tree.relays {
        b.canvas.protect(r);
        b.canvas.mark_junction(r)?;
    }
    let bridges = tree.bridges();
    for &y in &bridges {
        b.canvas.protect(y);
    }
    for s in &tree.segments {
        for c in &s.cells {
            if !bridges.contains(c) {
                b.canvas.reserve(*c);
            }
        }
    }
    b.refresh_rings(&[], &[]);
    let root = tree.segments.iter().find(|s| s.parent == tree.center).expect("tree has a root segment").clone();
    build(b, tree, tree.root)?;
    link(b, tree, &root)
}

/// Relay sites for a star whose leaves sit together away from `v`, best
/// first: the site `j`, its bridge toward `v`, and the leaves closer to `j`
/// than to `v`, nearest first. Sites are spread apart so that the options differ.
fn relay_sites(b: &Builder, v: Coord, leaves: &[Coord], count: usize) -> Vec<(Coord, Coord, Vec<Coord>)> {
    let canvas = &b.canvas;
    let clear = |c: Coord| canvas.is_spare(c) && c.around().iter().all(|n| !b.is_target(*n));
    let mut ranked: Vec<((u32, (i32, i32)), Coord, Coord)> = Vec::new();
    // a relay sharing a spare neighbor with a target would lose it when
    // that target is closed off
    let roomy = |c: Coord| b.req.targets.iter().all(|t| manhattan(t.coord(), c) > 2);
    for j in canvas.spec().coords().filter(|c| clear(*c) && roomy(*c)) {
        let Some(y3) = j
            .around()
            .into_iter()
            .filter(|y| canvas.spec().contains(*y) && clear(*y))
            .min_by_key(|y| (manhattan(*y, v), y.row_major()))
        else {
            continue;
        };
        let cost = manhattan(v, y3) + leaves.iter().map(|l| manhattan(j, *l).min(manhattan(v, *l))).sum::<u32>();
        ranked.push(((cost, j.row_major()), j, y3));
    }
    ranked.sort();
    let mut out: Vec<(Coord, Coord, Vec<Coord>)> = Vec::new();
    for (_, j, y3) in ranked {
        if out.len() == count {
            break;
        }
        if out.iter().any(|(o, _, _)| manhattan(*o, j) < 2) {
            continue;
        }
        let mut mine: Vec<Coord> = leaves.iter().copied().filter(|l| manhattan(j, *l) < manhattan(v, *l)).collect();
        mine.sort_by_key(|l| (manhattan(j, *l), l.row_major()));
        if mine.len() >= 2 {
            out.push((j, y3, mine));
        }
    }
    out
}

/// Zippers every leaf to the relay `j`, joins `v` to the bridge `y3` and
/// merges the relay's star into `v`.
fn realize_relay(b: &mut Builder, v: Coord, j: Coord, y3: Coord, leaves: &[Coord]) -> Result<()> {
    b.canvas.protect(j);
    b.canvas.mark_junction(j)?;
    b.canvas.protect(y3);
    b.add_pending(j, leaves.len());
    b.refresh_rings(&[], &[]);
    b.ensure_degree(j, leaves.len(), partner_center(j, leaves))?;
    let mut order = leaves.to_vec();
    order.sort_by_key(|l| (manhattan(j, *l), l.row_major()));
    for l in order {
        let keep = [b.pending(j) > 1, b.pending(l) > 1];
        b.connect(j, l, None, keep)?;
        b.done(j);
        b.done(l);
    }
    let keep = [b.pending(v) > 1, false];
    b.connect(v, y3, None, keep)?;
    strip(b, y3)?;
    strip(b, j)?;
    merge_on_canvas(&mut b.canvas, j, y3, v)
        .map_err(|e| Error::planning(format!("relay {j} of {}", b.name(v)), e))?;
    b.done(v);
    Ok(())
}

/// Zippers the leaves of `v` that no tree or relay took. `used` says
/// whether a tree or relay already spent one free neighbor of `v`.
fn finish_direct(b: &mut Builder, v: Coord, direct: &[Coord], used: bool) -> Result<()> {
    b.add_pending(v, direct.len() - usize::from(!used));
    if !direct.is_empty() {
        b.ensure_degree(v, b.pending(v), partner_center(v, direct))?;
    }
    let mut order = direct.to_vec();
    order.sort_by_key(|u| {
        let (x, y) = pair(v, *u);
        (manhattan(x, y), x.row_major(), y.row_major())
    });
    for u in order {
        let (x, y) = pair(v, u);
        b.connect_edge(x, y, None)?;
    }
    Ok(())
}

/// Optimized vertex degree expansion: the star of each vertex is collected
/// along a branching measurement pattern. Leaves hang on relays; relays
/// merge into their parents through bridge sites, and the top relay merges
/// into the vertex itself, so the vertex spends a single free neighbor on
/// its whole star. Per star the grown tree, a few single relays placed by
/// the leaves, and plain zippers are tried, and the cheapest is kept.
pub fn plan_ovde(req: &ExtractionRequest) -> Result<Plan> {
    let mut b = Builder::new(req)?;
    let todo = settle_native(&mut b)?;
    let stars = stars(&b, &todo);

    let mut need: BTreeMap<Coord, usize> = BTreeMap::new();
    for (v, leaves) in &stars {
        *need.entry(*v).or_default() += 1;
        for u in leaves {
            *need.entry(*u).or_default() += 1;
        }
    }
    for (t, n) in &need {
        b.add_pending(*t, *n);
    }
    b.refresh_rings(&[], &[]);
    let mut order: Vec<Coord> = need.keys().copied().collect();
    order.sort_by_key(|t| (Reverse(need[t]), b.name(*t)));
    for t in order {
        let partners: Vec<Coord> = todo
            .iter()
            .filter_map(|&(p, q)| if p == t { Some(q) } else if q == t { Some(p) } else { None })
            .collect();
        b.ensure_degree(t, need[&t], partner_center(t, &partners))?;
    }

    for (v, leaves) in stars {
        let mut options: Vec<Builder> = Vec::new();
        let mut direct = b.clone();
        let direct_err = finish_direct(&mut direct, v, &leaves, false).err();
        if direct_err.is_none() {
            options.push(direct);
        }
        if leaves.len() >= 2 {
            if let Some(tree) = plan_tree(&b, v, &leaves) {
                let mut t = b.clone();
                if realize(&mut t, &tree).and_then(|_| finish_direct(&mut t, v, &tree.direct, true)).is_ok() {
                    options.push(t);
                }
            }
            for (j, y3, mine) in relay_sites(&b, v, &leaves, RELAY_OPTIONS) {
                let mut t = b.clone();
                if relay_then_direct(&mut t, v, &leaves, (j, y3, &mine)).is_ok() {
                    options.push(t);
                }
                if mine.len() > RELAY_LEAVES {
                    let mut t = b.clone();
                    if relay_chain(&mut t, v, &leaves, (j, y3, &mine[..RELAY_LEAVES])).is_ok() {
                        options.push(t);
                    }
                }
            }
        }
        b = match options.into_iter().min_by_key(score) {
            Some(t) => t,
            None => return Err(direct_err.expect("direct zippers failed")),
        };
    }
    b.finish("ovde")
}

/// Relay sites tried per star.
const RELAY_OPTIONS: usize = 5;

/// Leaves a relay in a chain takes: as many as its lattice ports allow.
const RELAY_LEAVES: usize = 3;

/// Steps so far plus the cleanup the finished targets still need.
fn score(b: &Builder) -> usize {
    let loose: BTreeSet<Coord> = b
        .req
        .targets
        .iter()
        .map(|t| t.coord())
        .filter(|t| b.pending(*t) == 0)
        .flat_map(|t| b.canvas.neighbors(t))
        .filter(|n| !b.is_target(*n) && (b.canvas.is_spare(*n) || b.in_ring(*n)))
        .collect();
    b.canvas.steps().len() + loose.len()
}

fn relay_then_direct(b: &mut Builder, v: Coord, leaves: &[Coord], (j, y3, mine): (Coord, Coord, &[Coord])) -> Result<()> {
    realize_relay(b, v, j, y3, mine)?;
    let rest: Vec<Coord> = leaves.iter().copied().filter(|l| !mine.contains(l)).collect();
    finish_direct(b, v, &rest, true)
}

/// Relays of at most `RELAY_LEAVES` leaves each, placed one after another
/// until fewer than two leaves are left for direct zippers.
fn relay_chain(b: &mut Builder, v: Coord, leaves: &[Coord], first: (Coord, Coord, &[Coord])) -> Result<()> {
    // one free neighbor of v stays reserved while leaves are left
    b.add_pending(v, 1);
    realize_relay(b, v, first.0, first.1, first.2)?;
    let mut rest: Vec<Coord> = leaves.iter().copied().filter(|l| !first.2.contains(l)).collect();
    while rest.len() >= 2 {
        let Some((j, y3, mut mine)) = relay_sites(b, v, &rest, 1).into_iter().next() else { break };
        mine.truncate(RELAY_LEAVES);
        if mine.len() < rest.len() {
            b.add_pending(v, 1);
        }
        realize_relay(b, v, j, y3, &mine)?;
        rest.retain(|l| !mine.contains(l));
    }
    if rest.is_empty() {
        return Ok(());
    }
    finish_direct(b, v, &rest, false)
}
