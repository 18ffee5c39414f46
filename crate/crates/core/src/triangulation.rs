//! Ideal and tagged triangulations, flips, and the sequence of arcs crossed
//! by a curve, all computed on lifts to the universal cover.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{
    are_compatible, crossing_number, iota, iota_inverse, notch_at_puncture, ordinary_compatible, Lift,
    OrdinaryArc, Side, Surface, TaggedArc,
};

/// Vertex of the universal cover: a lift of a boundary vertex, or the
/// puncture at infinity. The derived order lists vertices clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum V {
    At(i64),
    Puncture,
}

/// Edge of the cover with endpoints in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub V, pub V);

impl Edge {
    pub fn new(a: V, b: V) -> Edge {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn has(&self, v: V) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: V) -> V {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn lift(&self) -> Lift {
        match (self.0, self.1) {
            (V::At(p), V::At(q)) => Lift::Chord(p, q),
            (V::At(c), V::Puncture) => Lift::Ray(c),
            _ => unreachable!("edge without a boundary endpoint"),
        }
    }
}

fn edge_of(l: Lift) -> Edge {
    match l {
        Lift::Chord(p, q) => Edge::new(V::At(p), V::At(q)),
        Lift::Ray(c) => Edge::new(V::At(c), V::Puncture),
    }
}

pub fn edge_side(s: &Surface, e: &Edge) -> Option<Side> {
    match (e.0, e.1) {
        (V::At(p), V::At(q)) => s.chord_side(p, q),
        (V::At(c), V::Puncture) => Some(s.ray_side(c)),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    /// Every radius is plain (at least two of them).
    AllPlain,
    /// The parallel pair of radii at this vertex.
    Parallel(usize),
    /// Every radius is notched (at least two of them).
    AllNotched,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedTriangulation {
    surface: Surface,
    arcs: Vec<TaggedArc>,
}

impl TaggedTriangulation {
    pub fn new(surface: Surface, arcs: Vec<TaggedArc>) -> Result<Self> {
        let n = surface.n();
        for a in &arcs {
            surface.check_tagged(a)?;
        }
        if arcs.len() != n {
            return Err(Error::InvalidTriangulation(format!("expected {n} arcs, got {}", arcs.len())));
        }
        for (i, a) in arcs.iter().enumerate() {
            for b in &arcs[i + 1..] {
                if a == b {
                    return Err(Error::InvalidTriangulation(format!("{a} listed twice")));
                }
                if !are_compatible(&surface, a, b) {
                    return Err(Error::InvalidTriangulation(format!("{a} and {b} are not compatible")));
                }
            }
        }
        Ok(TaggedTriangulation { surface, arcs })
    }

    /// All plain radii.
    pub fn wheel(surface: Surface) -> Self {
        TaggedTriangulation { surface, arcs: (0..surface.n()).map(TaggedArc::RadiusPlain).collect() }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn n(&self) -> usize {
        self.surface.n()
    }

    pub fn arcs(&self) -> &[TaggedArc] {
        &self.arcs
    }

    pub fn position(&self, a: &TaggedArc) -> Option<usize> {
        self.arcs.iter().position(|b| b == a)
    }

    pub fn contains(&self, a: &TaggedArc) -> bool {
        self.arcs.contains(a)
    }

    /// Order-independent identity.
    pub fn key(&self) -> Vec<TaggedArc> {
        let mut k = self.arcs.clone();
        k.sort();
        k
    }

    pub fn sorted(&self) -> Self {
        TaggedTriangulation { surface: self.surface, arcs: self.key() }
    }

    pub fn shape(&self) -> Shape {
        let plain = self.arcs.iter().filter(|a| matches!(a, TaggedArc::RadiusPlain(_))).count();
        let notched: Vec<usize> = self
            .arcs
            .iter()
            .filter_map(|a| match a {
                TaggedArc::RadiusNotched(i) => Some(*i),
                _ => None,
            })
            .collect();
        match (plain, notched.len()) {
            (_, 0) => Shape::AllPlain,
            (0, _) => Shape::AllNotched,
            _ => Shape::Parallel(notched[0]),
        }
    }

    /// Every tag at the puncture switched; positions are kept.
    pub fn notched(&self) -> Self {
        TaggedTriangulation { surface: self.surface, arcs: self.arcs.iter().map(notch_at_puncture).collect() }
    }

    pub fn ideal(&self) -> Result<IdealTriangulation> {
        if self.shape() == Shape::AllNotched {
            return Err(Error::NoIdealForm);
        }
        Ok(IdealTriangulation { surface: self.surface, arcs: self.arcs.iter().map(iota_inverse).collect() })
    }

    /// The other triangulation containing every arc but the one at `k`; the
    /// new arc takes position `k`.
    pub fn flip(&self, k: usize) -> TaggedTriangulation {
        let rest: Vec<&TaggedArc> = self.arcs.iter().enumerate().filter(|(i, _)| *i != k).map(|x| x.1).collect();
        let candidates: Vec<TaggedArc> = self
            .surface
            .tagged_arcs()
            .into_iter()
            .filter(|c| *c != self.arcs[k] && !rest.contains(&c))
            .filter(|c| rest.iter().all(|r| are_compatible(&self.surface, c, r)))
            .collect();
        assert_eq!(candidates.len(), 1, "flip of {} in {self} is not unique: {candidates:?}", self.arcs[k]);
        let mut arcs = self.arcs.clone();
        arcs[k] = candidates[0];
        TaggedTriangulation { surface: self.surface, arcs }
    }
}

impl fmt::Display for TaggedTriangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arcs.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Every tagged triangulation, found by flips from the wheel, sorted by key.
/// Each result lists its arcs in sorted order.
pub fn enumerate_tagged_triangulations(surface: Surface, bound: usize) -> Result<Vec<TaggedTriangulation>> {
    if surface.n() > bound {
        return Err(Error::BoundExceeded { n: surface.n(), bound });
    }
    let start = TaggedTriangulation::wheel(surface).sorted();
    let mut seen: BTreeSet<Vec<TaggedArc>> = BTreeSet::new();
    seen.insert(start.key());
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for k in 0..t.n() {
            let u = t.flip(k).sorted();
            if seen.insert(u.key()) {
                queue.push_back(u);
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|arcs| TaggedTriangulation { surface, arcs })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealTriangulation {
    surface: Surface,
    arcs: Vec<OrdinaryArc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealTriangle {
    /// Vertices of one lift, clockwise.
    pub corners: [V; 3],
    /// Sides in clockwise order.
    pub sides: [Side; 3],
    pub self_folded: bool,
}

impl IdealTriangulation {
    pub fn new(surface: Surface, arcs: Vec<OrdinaryArc>) -> Result<Self> {
        let n = surface.n();
        for a in &arcs {
            surface.check_ordinary(a)?;
        }
        if arcs.len() != n {
            return Err(Error::InvalidTriangulation(format!("expected {n} arcs, got {}", arcs.len())));
        }
        for (i, a) in arcs.iter().enumerate() {
            for b in &arcs[i + 1..] {
                if a == b || !ordinary_compatible(&surface, a, b) {
                    return Err(Error::InvalidTriangulation(format!("{a} and {b} are not compatible")));
                }
            }
        }
        Ok(IdealTriangulation { surface, arcs })
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn n(&self) -> usize {
        self.surface.n()
    }

    pub fn arcs(&self) -> &[OrdinaryArc] {
        &self.arcs
    }

    pub fn position(&self, a: &OrdinaryArc) -> Option<usize> {
        self.arcs.iter().position(|b| b == a)
    }

    pub fn contains(&self, a: &OrdinaryArc) -> bool {
        self.arcs.contains(a)
    }

    pub fn tagged(&self) -> TaggedTriangulation {
        TaggedTriangulation { surface: self.surface, arcs: self.arcs.iter().map(iota).collect() }
    }

    /// The self-folded pair `(radius position, loop position)`, if any.
    pub fn self_folded(&self) -> Option<(usize, usize)> {
        self.arcs.iter().enumerate().find_map(|(li, a)| match a {
            OrdinaryArc::Loop(i) => self.position(&OrdinaryArc::Radius(*i)).map(|ri| (ri, li)),
            _ => None,
        })
    }

    fn has_edge(&self, e: &Edge) -> bool {
        match edge_side(&self.surface, e) {
            Some(Side::Boundary(_)) => true,
            Some(Side::Arc(a)) => self.contains(&a),
            None => false,
        }
    }

    /// All lifts of arcs of the triangulation with a boundary endpoint in `lo..=hi`.
    fn lifted_edges(&self, lo: i64, hi: i64) -> Vec<Edge> {
        let n = self.n() as i64;
        let mut out = Vec::new();
        for a in &self.arcs {
            let base = self.surface.lift(a);
            for m in (lo.div_euclid(n) - 2)..=(hi.div_euclid(n) + 1) {
                let l = base.shift(m * n);
                let e = edge_of(l);
                let in_range = |v: V| matches!(v, V::At(x) if lo <= x && x <= hi);
                if in_range(e.0) || in_range(e.1) {
                    out.push(e);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn triangles(&self) -> Vec<IdealTriangle> {
        let n = self.n() as i64;
        let mut out = Vec::new();
        for p in 0..n {
            for q in p + 2..=p + n {
                if !self.has_edge(&Edge::new(V::At(p), V::At(q))) {
                    continue;
                }
                let apex = (p + 1..q)
                    .find(|&m| self.has_edge(&Edge::new(V::At(p), V::At(m))) && self.has_edge(&Edge::new(V::At(m), V::At(q))))
                    .expect("every chord bounds a triangle on its disk side");
                out.push(self.triangle([V::At(p), V::At(apex), V::At(q)]));
            }
        }
        let rays: Vec<i64> = (0..n)
            .filter(|&c| self.contains(&OrdinaryArc::Radius(c as usize)))
            .collect();
        for (k, &c) in rays.iter().enumerate() {
            let next = rays.get(k + 1).copied().unwrap_or(rays[0] + n);
            out.push(self.triangle([V::At(c), V::At(next), V::Puncture]));
        }
        out
    }

    fn triangle(&self, corners: [V; 3]) -> IdealTriangle {
        let side = |a: V, b: V| edge_side(&self.surface, &Edge::new(a, b)).expect("triangle side");
        let sides = [side(corners[0], corners[1]), side(corners[1], corners[2]), side(corners[2], corners[0])];
        let self_folded = matches!(sides[0], Side::Arc(OrdinaryArc::Loop(_))) && corners[2] == V::Puncture;
        IdealTriangle { corners, sides, self_folded }
    }

    /// Arcs crossed by `gamma` in order, with the triangles between them.
    /// `reversed` walks `gamma` from its second endpoint to its first.
    pub fn crossing_sequence(&self, gamma: &OrdinaryArc, reversed: bool) -> Result<CrossingSequence> {
        self.surface.check_ordinary(gamma)?;
        if self.contains(gamma) {
            return Err(Error::ArcInTriangulation(gamma.to_string()));
        }
        let lift = self.surface.lift(gamma);
        let (mut s, mut t) = match lift {
            Lift::Chord(p, q) => (V::At(p), V::At(q)),
            Lift::Ray(c) => (V::At(c), V::Puncture),
        };
        let n = self.n() as i64;
        let (lo, hi) = match lift {
            Lift::Chord(p, q) => (p - n, q + n),
            Lift::Ray(c) => (c - n, c + n),
        };
        let mut crossed: Vec<(Ratio<i64>, Edge)> = self
            .lifted_edges(lo, hi)
            .into_iter()
            .filter(|e| e.lift().crosses(&lift))
            .map(|e| (position_along(&lift, &e.lift()), e))
            .collect();
        crossed.sort();
        if reversed {
            crossed.reverse();
            std::mem::swap(&mut s, &mut t);
        }
        let crossed: Vec<Edge> = crossed.into_iter().map(|x| x.1).collect();
        let d = crossed.len();
        if d == 0 {
            return Err(Error::ArcInTriangulation(gamma.to_string()));
        }
        let mut triangles = Vec::with_capacity(d + 1);
        let tri = |vs: [V; 4]| -> [V; 3] {
            let set: BTreeSet<V> = vs.into_iter().collect();
            let v: Vec<V> = set.into_iter().collect();
            assert_eq!(v.len(), 3, "consecutive crossed arcs must share a triangle");
            [v[0], v[1], v[2]]
        };
        triangles.push(tri([s, crossed[0].0, crossed[0].1, s]));
        for k in 0..d - 1 {
            triangles.push(tri([crossed[k].0, crossed[k].1, crossed[k + 1].0, crossed[k + 1].1]));
        }
        triangles.push(tri([crossed[d - 1].0, crossed[d - 1].1, t, t]));
        for (k, tr) in triangles.iter().enumerate() {
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                let e = Edge::new(tr[a], tr[b]);
                assert!(self.has_edge(&e), "triangle {k} side {e:?} missing");
            }
        }
        let arcs: Vec<OrdinaryArc> = crossed
            .iter()
            .map(|e| edge_side(&self.surface, e).and_then(|x| x.arc()).expect("crossed edge is an arc"))
            .collect();
        Ok(CrossingSequence { surface: self.surface, gamma: *gamma, s, t, crossed, arcs, triangles })
    }
}

/// Position of the crossing of `other` along `gamma`, increasing from the
/// first endpoint of the lift to the second.
fn position_along(gamma: &Lift, other: &Lift) -> Ratio<i64> {
    match (*gamma, *other) {
        (Lift::Chord(p, q), Lift::Chord(r, s)) => Ratio::new(p * q - r * s, (p + q) - (r + s)),
        (Lift::Chord(..), Lift::Ray(c)) => Ratio::from_integer(c),
        (Lift::Ray(c), Lift::Chord(r, s)) => Ratio::from_integer((c - r) * (s - c)),
        (Lift::Ray(_), Lift::Ray(_)) => unreachable!("rays do not cross"),
    }
}

impl fmt::Display for IdealTriangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arcs.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The arcs `gamma` crosses, in order from `s` to `t`, realized on one lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingSequence {
    pub surface: Surface,
    pub gamma: OrdinaryArc,
    pub s: V,
    pub t: V,
    /// Lifted crossed edges.
    pub crossed: Vec<Edge>,
    /// Base arcs of the crossed edges.
    pub arcs: Vec<OrdinaryArc>,
    /// Triangles `0..=d`, each with corners in clockwise order.
    pub triangles: Vec<[V; 3]>,
}

impl CrossingSequence {
    pub fn d(&self) -> usize {
        self.crossed.len()
    }

    /// Sides of triangle `k` in clockwise order.
    pub fn sides_of(&self, k: usize) -> [Edge; 3] {
        let c = self.triangles[k];
        [Edge::new(c[0], c[1]), Edge::new(c[1], c[2]), Edge::new(c[0], c[2])]
    }

    /// Third side of an interior triangle `k` (`1 <= k < d`).
    pub fn third(&self, k: usize) -> Edge {
        let (a, b) = (self.crossed[k - 1], self.crossed[k]);
        self.sides_of(k).into_iter().find(|e| *e != a && *e != b).unwrap()
    }

    /// The two non-crossed sides of the first triangle, `(third_0, third_-1)`,
    /// arranged with the first crossed arc clockwise around it.
    pub fn start_thirds(&self) -> (Edge, Edge) {
        self.end_pair(0, self.crossed[0])
    }

    /// The two non-crossed sides of the last triangle, `(third_d, third_d+1)`.
    pub fn end_thirds(&self) -> (Edge, Edge) {
        let d = self.d();
        self.end_pair(d, self.crossed[d - 1])
    }

    fn end_pair(&self, k: usize, diag: Edge) -> (Edge, Edge) {
        let sides = self.sides_of(k);
        let i = sides.iter().position(|e| *e == diag).unwrap();
        (sides[(i + 1) % 3], sides[(i + 2) % 3])
    }

    pub fn side(&self, e: &Edge) -> Side {
        edge_side(&self.surface, e).expect("edge of the lifted polygon")
    }

    /// Count of each crossed base arc.
    pub fn multiset(&self) -> BTreeMap<OrdinaryArc, usize> {
        let mut m = BTreeMap::new();
        for a in &self.arcs {
            *m.entry(*a).or_insert(0) += 1;
        }
        m
    }
}

/// The triangulated `(d + 3)`-gon unfolded along `gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedPolygon {
    pub seq: CrossingSequence,
    /// Polygon vertices in clockwise order.
    pub vertices: Vec<V>,
    /// Boundary edges of the polygon.
    pub boundary: Vec<Edge>,
    /// Display label of every polygon edge; distinct lifts of one radius get
    /// primes so that each triangle has three distinct labels.
    pub labels: BTreeMap<Edge, String>,
}

pub fn lifted_polygon(seq: &CrossingSequence) -> LiftedPolygon {
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    for k in 0..=seq.d() {
        edges.extend(seq.sides_of(k));
    }
    let diagonals: BTreeSet<Edge> = seq.crossed.iter().copied().collect();
    let boundary: Vec<Edge> = edges.iter().filter(|e| !diagonals.contains(e)).copied().collect();
    let vertices: Vec<V> = edges.iter().flat_map(|e| [e.0, e.1]).collect::<BTreeSet<_>>().into_iter().collect();
    let mut by_side: BTreeMap<Side, Vec<Edge>> = BTreeMap::new();
    for e in &edges {
        by_side.entry(seq.side(e)).or_default().push(*e);
    }
    let mut labels = BTreeMap::new();
    for (side, mut lifts) in by_side {
        // the crossed lift (if any) keeps the plain name
        lifts.sort_by_key(|e| (!diagonals.contains(e), *e));
        let radius = matches!(side, Side::Arc(OrdinaryArc::Radius(_)));
        for (i, e) in lifts.iter().enumerate() {
            let name = if radius && i > 0 { format!("{side}{}", "'".repeat(i)) } else { side.to_string() };
            labels.insert(*e, name);
        }
    }
    LiftedPolygon { seq: seq.clone(), vertices, boundary, labels }
}

/// The ideal triangulations: every tagged one except the all-notched.
pub fn enumerate_ideal_triangulations(surface: Surface, bound: usize) -> Result<Vec<IdealTriangulation>> {
    Ok(enumerate_tagged_triangulations(surface, bound)?.iter().filter_map(|t| t.ideal().ok()).collect())
}

/// Crossing counts of `gamma` with every arc of `t` by lift interleaving.
pub fn crossing_counts(t: &IdealTriangulation, gamma: &OrdinaryArc) -> Vec<usize> {
    t.arcs().iter().map(|a| crossing_number(&t.surface(), gamma, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize) -> Surface {
        Surface::new(n).unwrap()
    }

    #[test]
    fn census_and_regular_flip_graph() {
        for (n, count) in [(4, 50), (5, 182)] {
            let all = enumerate_tagged_triangulations(s(n), 8).unwrap();
            assert_eq!(all.len(), count);
            for t in &all {
                let mut neighbours = BTreeSet::new();
                for k in 0..n {
                    let u = t.flip(k);
                    assert_eq!(u.flip(k), *t);
                    neighbours.insert(u.key());
                }
                assert_eq!(neighbours.len(), n);
            }
        }
        assert!(enumerate_tagged_triangulations(s(9), 8).is_err());
    }

    #[test]
    fn flip_examples() {
        let w = TaggedTriangulation::wheel(s(4));
        assert_eq!(w.flip(1).arcs()[1], TaggedArc::Peripheral(0, 2));
        let t = TaggedTriangulation::new(
            s(4),
            vec![TaggedArc::RadiusPlain(0), TaggedArc::RadiusPlain(2), TaggedArc::Peripheral(0, 2), TaggedArc::Peripheral(2, 0)],
        )
        .unwrap();
        assert_eq!(t.flip(0).arcs()[0], TaggedArc::RadiusNotched(2));
    }

    #[test]
    fn ideal_round_trip() {
        for t in enumerate_tagged_triangulations(s(4), 8).unwrap() {
            match t.ideal() {
                Ok(i) => {
                    assert_eq!(i.tagged(), t);
                    IdealTriangulation::new(s(4), i.arcs().to_vec()).unwrap();
                    assert_eq!(i.self_folded().is_some(), matches!(t.shape(), Shape::Parallel(_)));
                }
                Err(e) => {
                    assert_eq!(e, Error::NoIdealForm);
                    assert_eq!(t.shape(), Shape::AllNotched);
                }
            }
        }
    }

    #[test]
    fn triangles_of_wheel_and_self_folded() {
        let w = TaggedTriangulation::wheel(s(4)).ideal().unwrap();
        let tr = w.triangles();
        assert_eq!(tr.len(), 4);
        for k in 0..4 {
            assert!(tr.iter().any(|t| t.sides.contains(&Side::Boundary(k))
                && t.sides.contains(&Side::Arc(OrdinaryArc::Radius(k)))
                && t.sides.contains(&Side::Arc(OrdinaryArc::Radius((k + 1) % 4)))));
        }
        let t = IdealTriangulation::new(
            s(4),
            vec![OrdinaryArc::Radius(0), OrdinaryArc::Loop(0), OrdinaryArc::Peripheral(0, 2), OrdinaryArc::Peripheral(2, 0)],
        )
        .unwrap();
        let tr = t.triangles();
        assert_eq!(tr.len(), 4);
        assert_eq!(tr.iter().filter(|x| x.self_folded).count(), 1);
    }

    #[test]
    fn every_arc_borders_two_triangles() {
        for n in [4, 5, 6] {
            for t in enumerate_tagged_triangulations(s(n), 8).unwrap() {
                let Ok(i) = t.ideal() else { continue };
                let tr = i.triangles();
                assert_eq!(tr.len(), n);
                let mut count: BTreeMap<Side, usize> = BTreeMap::new();
                for x in &tr {
                    for side in x.sides {
                        *count.entry(side).or_default() += 1;
                    }
                }
                for (side, c) in count {
                    match side {
                        Side::Boundary(_) => assert_eq!(c, 1),
                        Side::Arc(_) => assert_eq!(c, 2),
                    }
                }
            }
        }
    }

    #[test]
    fn crossing_sequences_match_crossing_numbers() {
        for n in [4, 5, 6] {
            let surf = s(n);
            let ordinary: Vec<OrdinaryArc> = surf
                .tagged_arcs()
                .iter()
                .map(iota_inverse)
                .chain((0..n).map(OrdinaryArc::Radius))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for t in enumerate_tagged_triangulations(surf, 8).unwrap() {
                let Ok(i) = t.ideal() else { continue };
                for g in &ordinary {
                    if i.contains(g) {
                        continue;
                    }
                    let counts = crossing_counts(&i, g);
                    for rev in [false, true] {
                        let seq = i.crossing_sequence(g, rev).unwrap();
                        let m = seq.multiset();
                        for (a, c) in i.arcs().iter().zip(&counts) {
                            assert_eq!(m.get(a).copied().unwrap_or(0), *c, "{i} {g} {a}");
                        }
                        for k in 1..seq.d() {
                            assert_ne!(seq.arcs[k - 1], seq.arcs[k]);
                        }
                        let poly = lifted_polygon(&seq);
                        assert_eq!(poly.vertices.len(), seq.d() + 3);
                        assert_eq!(poly.boundary.len(), seq.d() + 3);
                        for k in 0..=seq.d() {
                            let names: BTreeSet<&String> = seq.sides_of(k).iter().map(|e| &poly.labels[e]).collect();
                            assert_eq!(names.len(), 3);
                        }
                    }
                }
            }
        }
    }
}
