//! The rectangular cluster lattice: coordinates, measurement patterns and
//! grid searches.

mod search;

pub use search::{
    dijkstra_nearest, find_free_patches, one_turn_zipper, shortcut, staircase, turning_point, Nearest,
    Patch,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Lattice site. Signed so that off-grid intermediate results (e.g. a
/// staircase apex left of the grid) can be represented and then rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Coord {
        Coord { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Coord {
        Coord::new(self.x + dx, self.y + dy)
    }

    /// The four orthogonal neighbors, in the order +x, -x, +y, -y.
    pub fn around(self) -> [Coord; 4] {
        [self.offset(1, 0), self.offset(-1, 0), self.offset(0, 1), self.offset(0, -1)]
    }

    /// Row-major key used for deterministic ordering.
    pub fn row_major(self) -> (i32, i32) {
        (self.y, self.x)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

pub fn manhattan(a: Coord, b: Coord) -> u32 {
    a.x.abs_diff(b.x) + a.y.abs_diff(b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: u32,
    pub height: u32,
}

impl GridSpec {
    pub fn new(width: u32, height: u32) -> Result<GridSpec> {
        let spec = GridSpec { width, height };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::InvalidGrid(format!("{}x{} is smaller than 2x2", self.width, self.height)));
        }
        if (self.width as u64) * (self.height as u64) > VertexId::MAX as u64 {
            return Err(Error::InvalidGrid(format!("{}x{} has too many sites", self.width, self.height)));
        }
        Ok(())
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    pub fn check(&self, c: Coord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::OffGrid(c))
        }
    }

    pub fn site_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Vertex id `y * width + x`.
    pub fn id(&self, c: Coord) -> VertexId {
        debug_assert!(self.contains(c));
        c.y as VertexId * self.width + c.x as VertexId
    }

    pub fn coord(&self, v: VertexId) -> Coord {
        Coord::new((v % self.width) as i32, (v / self.width) as i32)
    }

    /// Sites in row-major order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.height as i32).flat_map(move |y| (0..self.width as i32).map(move |x| Coord::new(x, y)))
    }

    pub fn neighbors(&self, c: Coord) -> impl Iterator<Item = Coord> + '_ {
        c.around().into_iter().filter(|n| self.contains(*n))
    }

    pub fn is_boundary(&self, c: Coord) -> bool {
        c.x == 0 || c.y == 0 || c.x as u32 == self.width - 1 || c.y as u32 == self.height - 1
    }
}

/// The rectangular cluster graph with 4-neighbor edges.
pub fn cluster_graph(spec: GridSpec) -> Graph {
    let mut g = Graph::new();
    for c in spec.coords() {
        g.add_vertex(spec.id(c));
    }
    for c in spec.coords() {
        for n in [c.offset(1, 0), c.offset(0, 1)] {
            if spec.contains(n) {
                g.add_edge(spec.id(c), spec.id(n)).expect("grid sites exist");
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Role {
    #[default]
    Free,
    Target,
    MeasX,
    MeasY,
    MeasZ,
    Junction,
}

impl Role {
    pub fn letter(self) -> char {
        match self {
            Role::Free => '.',
            Role::Target => 'T',
            Role::MeasX => 'X',
            Role::MeasY => 'Y',
            Role::MeasZ => 'Z',
            Role::Junction => 'J',
        }
    }

    pub fn from_letter(c: char) -> Option<Role> {
        Some(match c {
            '.' => Role::Free,
            'T' => Role::Target,
            'X' => Role::MeasX,
            'Y' => Role::MeasY,
            'Z' => Role::MeasZ,
            'J' => Role::Junction,
            _ => return None,
        })
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Role::MeasX | Role::MeasY | Role::MeasZ | Role::Junction)
    }
}

/// Role of every lattice site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPattern {
    spec: GridSpec,
    cells: Vec<Role>,
}

impl GridPattern {
    pub fn new(spec: GridSpec) -> GridPattern {
        GridPattern { spec, cells: vec![Role::Free; spec.site_count()] }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    fn index(&self, c: Coord) -> Result<usize> {
        self.spec.check(c)?;
        Ok(self.spec.id(c) as usize)
    }

    /// Role at `c`; off-grid sites read as `None`.
    pub fn get(&self, c: Coord) -> Option<Role> {
        self.index(c).ok().map(|i| self.cells[i])
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.get(c) == Some(Role::Free)
    }

    /// Sets a role. Targets are never overwritten by anything else.
    pub fn set(&mut self, c: Coord, role: Role) -> Result<()> {
        let i = self.index(c)?;
        if self.cells[i] == Role::Target && role != Role::Target {
            return Err(Error::Space(c));
        }
        self.cells[i] = role;
        Ok(())
    }

    /// Non-free cells in row-major order.
    pub fn marked(&self) -> impl Iterator<Item = (Coord, Role)> + '_ {
        self.spec.coords().zip(self.cells.iter().copied()).filter(|(_, r)| *r != Role::Free)
    }

    pub fn count(&self, role: Role) -> usize {
        self.cells.iter().filter(|r| **r == role).count()
    }

    pub fn render_ascii(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() + self.spec.height as usize);
        for row in self.cells.chunks(self.spec.width as usize) {
            out.extend(row.iter().map(|r| r.letter()));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PatternJson::from(self)).expect("pattern serializes")
    }

    pub fn from_json(s: &str) -> Result<GridPattern> {
        GridPattern::try_from(serde_json::from_str::<PatternJson>(s)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PatternCell {
    pub x: i32,
    pub y: i32,
    pub role: String,
}

/// Wire form: only non-free cells, row-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PatternJson {
    pub width: u32,
    pub height: u32,
    pub cells: Vec<PatternCell>,
}

impl From<&GridPattern> for PatternJson {
    fn from(p: &GridPattern) -> Self {
        PatternJson {
            width: p.spec.width,
            height: p.spec.height,
            cells: p.marked().map(|(c, r)| PatternCell { x: c.x, y: c.y, role: r.letter().to_string() }).collect(),
        }
    }
}

impl TryFrom<PatternJson> for GridPattern {
    type Error = Error;

    fn try_from(raw: PatternJson) -> Result<GridPattern> {
        let mut p = GridPattern::new(GridSpec::new(raw.width, raw.height)?);
        for cell in raw.cells {
            let role = match cell.role.chars().collect::<Vec<_>>()[..] {
                [c] => Role::from_letter(c).filter(|r| *r != Role::Free),
                _ => None,
            }
            .ok_or_else(|| Error::Request(format!("unknown cell role {:?}", cell.role)))?;
            let i = p.index(Coord::new(cell.x, cell.y))?;
            p.cells[i] = role;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_sizes() {
        let g = cluster_graph(GridSpec::new(2, 2).unwrap());
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = cluster_graph(GridSpec::new(3, 3).unwrap());
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        let g = cluster_graph(GridSpec::new(4, 5).unwrap());
        assert_eq!(g.edge_count(), 2 * 4 * 5 - 4 - 5);
        assert!(GridSpec::new(1, 5).is_err());
    }

    #[test]
    fn ids_round_trip() {
        let spec = GridSpec::new(7, 4).unwrap();
        for c in spec.coords() {
            assert_eq!(spec.coord(spec.id(c)), c);
        }
        assert_eq!(spec.id(Coord::new(2, 3)), 23);
    }

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan(Coord::new(0, 0), Coord::new(0, 0)), 0);
        assert_eq!(manhattan(Coord::new(1, 2), Coord::new(4, 3)), 4);
    }

    #[test]
    fn pattern_json_and_ascii() {
        let mut p = GridPattern::new(GridSpec::new(3, 3).unwrap());
        assert_eq!(p.render_ascii(), "...\n...\n...\n");
        p.set(Coord::new(2, 0), Role::Target).unwrap();
        p.set(Coord::new(0, 1), Role::MeasX).unwrap();
        p.set(Coord::new(1, 2), Role::Junction).unwrap();
        assert_eq!(p.render_ascii(), "..T\nX..\n.J.\n");
        let json = p.to_json();
        assert_eq!(
            json,
            r#"{"width":3,"height":3,"cells":[{"x":2,"y":0,"role":"T"},{"x":0,"y":1,"role":"X"},{"x":1,"y":2,"role":"J"}]}"#
        );
        assert_eq!(GridPattern::from_json(&json).unwrap(), p);
        assert!(GridPattern::from_json(r#"{"width":3,"height":3,"cells":[{"x":5,"y":0,"role":"T"}]}"#).is_err());
        assert!(GridPattern::from_json(r#"{"width":3,"height":3,"cells":[{"x":0,"y":0,"role":"Q"}]}"#).is_err());
    }

    #[test]
    fn targets_are_never_overwritten() {
        let mut p = GridPattern::new(GridSpec::new(3, 3).unwrap());
        p.set(Coord::new(1, 1), Role::Target).unwrap();
        assert!(matches!(p.set(Coord::new(1, 1), Role::MeasZ), Err(Error::Space(_))));
        assert_eq!(p.get(Coord::new(1, 1)), Some(Role::Target));
    }
}
