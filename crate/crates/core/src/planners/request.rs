use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, GridSpec};
use crate::primitives::PlanTarget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Lvde,
    Ovde,
    Cg,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Lvde, Strategy::Ovde, Strategy::Cg];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Lvde => "lvde",
            Strategy::Ovde => "ovde",
            Strategy::Cg => "cg",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        Strategy::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Request(format!("unknown strategy {s:?}")))
    }
}

/// Axis-aligned block of sites, `x..x+width` by `y..y+height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub x: i32,
    pub y: i32,
    pub width: u32,
    pub height: u32,
}

impl Region {
    pub fn contains(&self, c: Coord) -> bool {
        c.x >= self.x && c.y >= self.y && c.x < self.x + self.width as i32 && c.y < self.y + self.height as i32
    }

    pub fn area(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (self.y..self.y + self.height as i32).flat_map(move |y| (self.x..self.x + self.width as i32).map(move |x| Coord::new(x, y)))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} at ({},{})", self.width, self.height, self.x, self.y)
    }
}

/// Which graph to extract, where its vertices sit, and how to plan it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRequest {
    pub grid: GridSpec,
    pub targets: Vec<PlanTarget>,
    #[serde(default, alias = "target_edges")]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cg_region: Option<Region>,
}

impl ExtractionRequest {
    pub fn new(grid: GridSpec, targets: &[(&str, Coord)], edges: &[(&str, &str)], strategy: Strategy) -> ExtractionRequest {
        ExtractionRequest {
            grid,
            targets: targets.iter().map(|(l, c)| PlanTarget { label: l.to_string(), x: c.x, y: c.y }).collect(),
            edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            strategy,
            cg_region: None,
        }
    }

    /// Parses and validates.
    pub fn from_json(s: &str) -> Result<ExtractionRequest> {
        let req: ExtractionRequest = serde_json::from_str(s)?;
        req.validate()?;
        Ok(req)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("request serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let mut labels = BTreeSet::new();
        let mut coords = BTreeSet::new();
        for t in &self.targets {
            if !labels.insert(t.label.as_str()) {
                return Err(Error::Request(format!("duplicate label {:?}", t.label)));
            }
            if !self.grid.contains(t.coord()) {
                return Err(Error::Request(format!("target {:?} at {} is outside the grid", t.label, t.coord())));
            }
            if !coords.insert(t.coord()) {
                return Err(Error::Request(format!("two targets share the site {}", t.coord())));
            }
        }
        let mut seen = BTreeSet::new();
        for (a, b) in &self.edges {
            for l in [a, b] {
                if !labels.contains(l.as_str()) {
                    return Err(Error::Request(format!("edge ({a},{b}) names unknown label {l:?}")));
                }
            }
            if a == b {
                return Err(Error::Request(format!("self-loop at {a:?}")));
            }
            if !seen.insert(if a < b { (a, b) } else { (b, a) }) {
                return Err(Error::Request(format!("edge ({a},{b}) listed twice")));
            }
        }
        if let Some(r) = &self.cg_region {
            let far = Coord::new(r.x + r.width as i32 - 1, r.y + r.height as i32 - 1);
            if r.width == 0 || r.height == 0 || !self.grid.contains(Coord::new(r.x, r.y)) || !self.grid.contains(far) {
                return Err(Error::Request(format!("cg_region {r} does not fit the grid")));
            }
        }
        Ok(())
    }

    pub fn coord_of(&self, label: &str) -> Option<Coord> {
        self.targets.iter().find(|t| t.label == label).map(|t| t.coord())
    }

    /// Requested edges as site pairs, in request order.
    pub fn edge_coords(&self) -> Vec<(Coord, Coord)> {
        self.edges
            .iter()
            .filter_map(|(a, b)| Some((self.coord_of(a)?, self.coord_of(b)?)))
            .collect()
    }

    /// Number of requested edges at each label.
    pub fn degree(&self, label: &str) -> usize {
        self.edges.iter().filter(|(a, b)| a == label || b == label).count()
    }
}
