use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Basis;
use crate::lattice::Coord;

use super::canvas::Canvas;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Right, Direction::Left, Direction::Down, Direction::Up];

    /// Site `along` steps in this direction and `across` steps sideways from `v`.
    pub fn place(self, v: Coord, along: i32, across: i32) -> Coord {
        match self {
            Direction::Right => v.offset(along, across),
            Direction::Left => v.offset(-along, across),
            Direction::Down => v.offset(across, along),
            Direction::Up => v.offset(across, -along),
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Some(match s {
            "up" => Direction::Up,
            "down" => Direction::Down,
            "left" => Direction::Left,
            "right" => Direction::Right,
            _ => return None,
        })
    }
}

/// New neighbors of the expanded vertex and the number of measurements spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub stubs: Vec<Coord>,
    pub measurements: usize,
}

fn require_space(canvas: &Canvas, cells: impl IntoIterator<Item = Coord>) -> Result<()> {
    for c in cells {
        if !canvas.is_spare(c) {
            return Err(Error::Space(c));
        }
    }
    Ok(())
}

fn new_stubs(canvas: &Canvas, v: Coord, before: &BTreeSet<Coord>) -> Vec<Coord> {
    let mut out: Vec<Coord> = canvas.neighbors(v).into_iter().filter(|c| !before.contains(c)).collect();
    out.sort_by_key(|c| c.row_major());
    out
}

/// Sites consumed by `n_exp` unidirectional applications, stubs included.
pub fn expand_footprint(v: Coord, direction: Direction, n_exp: usize) -> Vec<Coord> {
    let n = n_exp as i32;
    let mut cells = Vec::new();
    for along in 1..=2 * n + 1 {
        for across in -1..=1 {
            cells.push(direction.place(v, along, across));
        }
    }
    cells
}

/// Raises the degree of `v` by two per application. Application `k` Z-measures
/// the two sites beside `(2k-1, 0)` and then merges through Y on `(2k, 0)`
/// followed by Y on `(2k-1, 0)`, so `v` picks up `(2k, ±1)` and `(2k+1, 0)`.
pub fn expand_degree(canvas: &mut Canvas, v: Coord, direction: Direction, n_exp: usize) -> Result<Expansion> {
    if !canvas.alive(v) {
        return Err(Error::planning(format!("vertex {v}"), "already measured"));
    }
    require_space(canvas, expand_footprint(v, direction, n_exp))?;
    let before: BTreeSet<Coord> = canvas.neighbors(v).into_iter().collect();
    let start = canvas.measurement_count();
    for k in 1..=n_exp as i32 {
        let y3 = direction.place(v, 2 * k - 1, 0);
        let y1 = direction.place(v, 2 * k, 0);
        for side in [-1, 1] {
            canvas.measure(direction.place(v, 2 * k - 1, side), Basis::Z, None, "expand")?;
        }
        canvas.measure(y1, Basis::Y, None, "expand")?;
        canvas.measure(y3, Basis::Y, None, "expand")?;
    }
    Ok(Expansion { stubs: new_stubs(canvas, v, &before), measurements: canvas.measurement_count() - start })
}

/// Sites consumed by the bar expansion: three rows in front of `v`, `2 n_exp`
/// sites to either side of the center column.
pub fn u_footprint(v: Coord, opening: Direction, n_exp: usize) -> Vec<Coord> {
    let half = 2 * n_exp as i32;
    let mut cells = Vec::new();
    for along in 1..=3 {
        for across in -half..=half {
            cells.push(opening.place(v, along, across));
        }
    }
    cells
}

/// Degree expansion whose new edges all leave toward `opening`.
///
/// A first expansion in the opening direction puts a bar of two lines one
/// row ahead of `v`. Each further round extends both lines sideways by one
/// merge and Z-measures the stub that would point back toward `v`, so every
/// round adds one forward stub per side. The line ends are finally capped so
/// that they too only face forward. Cost: `10 n_exp - 4` measurements for a
/// degree increase of `2 n_exp`.
pub fn expand_degree_u_shaped(canvas: &mut Canvas, v: Coord, opening: Direction, n_exp: usize) -> Result<Expansion> {
    if !canvas.alive(v) {
        return Err(Error::planning(format!("vertex {v}"), "already measured"));
    }
    if n_exp == 0 {
        return Ok(Expansion { stubs: Vec::new(), measurements: 0 });
    }
    require_space(canvas, u_footprint(v, opening, n_exp))?;
    let before: BTreeSet<Coord> = canvas.neighbors(v).into_iter().collect();
    let start = canvas.measurement_count();
    let at = |along: i32, across: i32| opening.place(v, along, across);
    let tag = "expand-u";

    for side in [-1, 1] {
        canvas.measure(at(1, side), Basis::Z, None, tag)?;
    }
    canvas.measure(at(2, 0), Basis::Y, None, tag)?;
    canvas.measure(at(1, 0), Basis::Y, None, tag)?;

    for side in [-1, 1] {
        let mut end = side;
        for _ in 1..n_exp {
            // the line end must hang on v alone before it serves as the bridge
            canvas.measure_z_all([at(3, end), at(1, end)], tag)?;
            canvas.measure(at(2, end + side), Basis::Y, None, tag)?;
            canvas.measure(at(2, end), Basis::Y, None, tag)?;
            canvas.measure(at(1, end + side), Basis::Z, None, tag)?;
            end += 2 * side;
        }
        canvas.measure_z_all([at(2, end + side), at(1, end)], tag)?;
    }
    Ok(Expansion { stubs: new_stubs(canvas, v, &before), measurements: canvas.measurement_count() - start })
}
