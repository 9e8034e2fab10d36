use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Basis;
use crate::lattice::Coord;
use crate::primitives::Plan;

use super::builder::Builder;
use super::request::{ExtractionRequest, Region};

/// Logical gate on two wires of the central processor, named by the labels
/// the wires carry at that moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "wires")]
pub enum Gate {
    #[serde(rename = "CZ")]
    Cz(String, String),
    #[serde(rename = "SWAP")]
    Swap(String, String),
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Cz(a, b) => write!(f, "CZ({a},{b})"),
            Gate::Swap(a, b) => write!(f, "SWAP({a},{b})"),
        }
    }
}

/// Gate schedule on a line of wires in label order. Each label in turn walks
/// right by swaps, applying CZ with every right neighbor it still owes an
/// edge, and stops once it owes none. Labels to its left at the start of its
/// walk have already settled all their edges, so nothing is missed.
pub fn cg_schedule(labels: &[String], edges: &[(String, String)]) -> Vec<Gate> {
    let mut owed: BTreeSet<(String, String)> = BTreeSet::new();
    for (a, b) in edges {
        owed.insert(if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) });
    }
    let key = |a: &str, b: &str| if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
    let mut line: Vec<String> = labels.to_vec();
    let mut out = Vec::new();
    for walker in labels {
        let mut p = line.iter().position(|l| l == walker).unwrap();
        while p + 1 < line.len() {
            if !owed.iter().any(|(a, b)| a == walker || b == walker) {
                break;
            }
            let right = line[p + 1].clone();
            if owed.remove(&key(walker, &right)) {
                out.push(Gate::Cz(walker.clone(), right.clone()));
            }
            if !owed.iter().any(|(a, b)| a == walker || b == walker) {
                break;
            }
            out.push(Gate::Swap(walker.clone(), right));
            line.swap(p, p + 1);
            p += 1;
        }
    }
    out
}

/// Spacing of the output wires along their row.
const PITCH: i32 = 3;

/// Smallest processor block for `n` wires: one row of outputs `PITCH` apart
/// with room for stacked detours above and below.
pub fn cg_region_size(n: usize) -> (u32, u32) {
    let n = n.max(1) as u32;
    (PITCH as u32 * n, n + 4)
}

/// Layout facts of a central-generation plan.
#[derive(Debug, Clone)]
pub struct CgLayout {
    pub region: Region,
    pub schedule: Vec<Gate>,
    /// Output sites, left to right.
    pub outputs: Vec<Coord>,
    /// Steps that run inside the region.
    pub processor_steps: Range<usize>,
}

fn clear_of_targets(b: &Builder, r: &Region) -> bool {
    b.req.targets.iter().all(|t| {
        let c = t.coord();
        !(c.x >= r.x - 1 && c.y >= r.y - 1 && c.x <= r.x + r.width as i32 && c.y <= r.y + r.height as i32)
    })
}

fn choose_region(b: &Builder, n: usize) -> Result<Region> {
    let (w, h) = cg_region_size(n);
    let grid = b.req.grid;
    if let Some(r) = b.req.cg_region {
        if r.width < w || r.height < h {
            return Err(Error::planning("cg region", format!("needs {w}x{h} sites, {}x{} available", r.width, r.height)));
        }
        if !clear_of_targets(b, &r) {
            return Err(Error::planning("cg region", format!("{r} touches a target")));
        }
        return Ok(r);
    }
    if grid.width < w || grid.height < h {
        return Err(Error::planning("cg region", format!("needs {w}x{h} sites, grid is {}x{}", grid.width, grid.height)));
    }
    let (cx, cy) = (grid.width as i32 - w as i32, grid.height as i32 - h as i32);
    let mut best: Option<((i32, i32, i32), Region)> = None;
    for y in 0..=cy {
        for x in 0..=cx {
            let r = Region { x, y, width: w, height: h };
            if !clear_of_targets(b, &r) {
                continue;
            }
            let key = ((2 * x - cx).abs() + (2 * y - cy).abs(), y, x);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, r));
            }
        }
    }
    best.map(|(_, r)| r).ok_or_else(|| {
        Error::planning("cg region", format!("no {w}x{h} block of the {}x{} grid is clear of targets", grid.width, grid.height))
    })
}

/// Central generation: the requested graph is built on a row of output
/// sites inside a processor block by a CZ/SWAP schedule, then each output
/// is carried to its target by a zipper and an X measurement.
pub fn plan_cg(req: &ExtractionRequest) -> Result<Plan> {
    plan_cg_detailed(req).map(|(p, _)| p)
}

pub fn plan_cg_detailed(req: &ExtractionRequest) -> Result<(Plan, CgLayout)> {
    let mut b = Builder::new(req)?;
    let labels: Vec<String> = req.targets.iter().map(|t| t.label.clone()).collect();
    let schedule = cg_schedule(&labels, &req.edges);
    let n = labels.len();

    // outputs pass their whole neighborhood on, so targets start bare
    let native: Vec<_> = b.native().into_iter().collect();
    for &(u, v) in &native {
        b.add_pending(u, 1);
        b.add_pending(v, 1);
    }
    b.refresh_rings(&[], &[]);
    for (u, v) in native {
        b.remove_native(u, v)?;
    }

    let region = choose_region(&b, n)?;
    let (w, _) = cg_region_size(n);
    let x0 = region.x + (region.width - w) as i32 / 2;
    let row = region.y + region.height as i32 / 2;
    let outputs: Vec<Coord> = (0..n as i32).map(|k| Coord::new(x0 + 1 + PITCH * k, row)).collect();

    let outside: Vec<Coord> =
        req.grid.coords().filter(|c| !region.contains(*c) && b.canvas.is_spare(*c)).collect();
    for c in &outside {
        b.canvas.reserve(*c);
    }
    for (k, &o) in outputs.iter().enumerate() {
        b.canvas.protect(o);
        b.add_pending(o, req.degree(&labels[k]) + 1);
    }
    for t in &req.targets {
        b.add_pending(t.coord(), 1);
    }
    b.refresh_rings(&[], &[]);
    let start = b.canvas.steps().len();
    for &o in &outputs {
        b.ensure_degree(o, b.pending(o), None)?;
    }
    // wires keep their output site; a SWAP only changes which wires are
    // neighbors on the line, and the zipper for a later CZ crosses over
    for g in &schedule {
        if let Gate::Cz(x, y) = g {
            let (i, j) = (labels.iter().position(|l| l == x).unwrap(), labels.iter().position(|l| l == y).unwrap());
            b.connect_edge(outputs[i], outputs[j], None)?;
        }
    }
    let end = b.canvas.steps().len();
    if let Some(s) = b.canvas.steps()[start..end].iter().find(|s| !region.contains(s.coord())) {
        return Err(Error::planning("cg region", format!("processor step at {} left {region}", s.coord())));
    }
    for c in outside {
        b.canvas.release(c);
    }
    b.refresh_rings(&[], &[]);

    for (k, &o) in outputs.iter().enumerate() {
        let t = req.coord_of(&labels[k]).expect("validated label");
        b.connect_edge(o, t, None)?;
        b.canvas.measure(o, Basis::X, Some(t), "transport")?;
    }
    let plan = b.finish("cg")?;
    Ok((plan, CgLayout { region, schedule, outputs, processor_steps: start..end }))
}
