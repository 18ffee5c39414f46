//! Named example configurations, stored as `key = value` files.

use crate::error::{Error, Result};
use crate::surface::{parse_arc_list, parse_arc_term, OrdinaryArc, Surface};
use crate::tpath::Labels;
use crate::triangulation::{CrossingSequence, IdealTriangulation, TaggedTriangulation};

const SOURCES: [(&str, &str); 5] = [
    ("folded-square", include_str!("../fixtures/folded-square.txt")),
    ("two-radii", include_str!("../fixtures/two-radii.txt")),
    ("around-folded", include_str!("../fixtures/around-folded.txt")),
    ("loop-on-wheel", include_str!("../fixtures/loop-on-wheel.txt")),
    ("radii-and-peripheral", include_str!("../fixtures/radii-and-peripheral.txt")),
];

pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub surface: Surface,
    pub ideal: IdealTriangulation,
    pub labels: Labels,
    pub gamma: Option<OrdinaryArc>,
    /// Walk `gamma` from its second endpoint to its first.
    pub reversed: bool,
}

impl Fixture {
    pub fn tagged(&self) -> TaggedTriangulation {
        self.ideal.tagged()
    }

    pub fn crossing_sequence(&self) -> Result<CrossingSequence> {
        let g = self.gamma.ok_or_else(|| Error::InvalidTriangulation(format!("{} has no arc", self.name)))?;
        self.ideal.crossing_sequence(&g, self.reversed)
    }
}

pub fn fixture(name: &str) -> Option<Fixture> {
    SOURCES.iter().find(|s| s.0 == name).map(|s| parse_fixture(s.0, s.1).expect("bundled fixture parses"))
}

pub fn all() -> Vec<Fixture> {
    names().into_iter().filter_map(fixture).collect()
}

/// Parses the `key = value` format; `#` starts a comment.
pub fn parse_fixture(name: &str, text: &str) -> Result<Fixture> {
    let mut n = None;
    let (mut tri, mut names, mut boundary, mut arc, mut reversed) = (None, None, None, None, false);
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected `key = value`, got `{line}`") })?;
        let v = v.trim().to_string();
        let list = |v: &str| v.split(',').map(|x| x.trim().to_string()).collect::<Vec<_>>();
        match k.trim() {
            "n" => n = Some(v.parse::<usize>().map_err(|e| Error::Parse { pos: 0, msg: e.to_string() })?),
            "triangulation" => tri = Some(v),
            "names" => names = Some(list(&v)),
            "boundary" => boundary = Some(list(&v)),
            "arc" => arc = Some(v),
            "reversed" => reversed = v == "true",
            other => return Err(Error::Parse { pos: 0, msg: format!("unknown key `{other}`") }),
        }
    }
    let n = n.ok_or_else(|| Error::Parse { pos: 0, msg: "missing n".into() })?;
    let surface = Surface::new(n)?;
    let arcs = parse_arc_list(tri.as_deref().unwrap_or(""), n)?
        .into_iter()
        .map(|a| a.ordinary(&surface))
        .collect::<Result<Vec<_>>>()?;
    let ideal = IdealTriangulation::new(surface, arcs)?;
    let defaults = Labels::default_for(n);
    let labels = Labels { arcs: names.unwrap_or(defaults.arcs), boundary: boundary.unwrap_or(defaults.boundary) };
    let gamma = arc.map(|a| parse_arc_term(&a, n).and_then(|t| t.ordinary(&surface))).transpose()?;
    Ok(Fixture { name: name.to_string(), surface, ideal, labels, gamma, reversed })
}
