//! Snake graphs unfolded from the lifted polygon, their perfect matchings,
//! and the bijection from matchings to T-paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::laurent::{Exps, LaurentPoly};
use crate::surface::{OrdinaryArc, Surface, TaggedArc};
use crate::tpath::{crossing_exps, expand_tagged_with, loop_to_tagged, ordinary_arcs, path_numerator, tpaths_of, LiftedPath, SweepTally};
use crate::triangulation::{
    enumerate_ideal_triangulations, lifted_polygon, CrossingSequence, Edge, IdealTriangulation, TaggedTriangulation, V,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Glue {
    Right,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeEdge {
    pub ends: (usize, usize),
    /// The polygon edge this graph edge is a copy of.
    pub lifted: Edge,
    /// Index `k` of the triangle of the polygon the edge comes from.
    pub group: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub diagonal: Edge,
    /// Indices into `SnakeGraph::edges`.
    pub edges: Vec<usize>,
    /// Graph vertices of the tile.
    pub vertices: Vec<usize>,
    /// Direction in which the next tile is attached.
    pub glue: Option<Glue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeGraph {
    pub seq: CrossingSequence,
    pub vertex_count: usize,
    pub edges: Vec<SnakeEdge>,
    pub tiles: Vec<Tile>,
}

/// A perfect matching as sorted edge indices.
pub type Matching = Vec<usize>;

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn build_snake(seq: &CrossingSequence) -> SnakeGraph {
    let d = seq.d();
    // tile k (0-based) is the quadrilateral of triangles k and k + 1
    let tile_vertices: Vec<Vec<V>> = (0..d)
        .map(|k| {
            let mut v: Vec<V> = seq.triangles[k].iter().chain(seq.triangles[k + 1].iter()).copied().collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let slot = |k: usize, v: V| 4 * k + tile_vertices[k].iter().position(|x| *x == v).unwrap();
    let mut parent: Vec<usize> = (0..4 * d).collect();
    for k in 0..d.saturating_sub(1) {
        let glue = seq.third(k + 1);
        for v in [glue.0, glue.1] {
            let (a, b) = (find(&mut parent, slot(k, v)), find(&mut parent, slot(k + 1, v)));
            parent[b] = a;
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut id_of = |parent: &mut Vec<usize>, s: usize| {
        let r = find(parent, s);
        let next = ids.len();
        *ids.entry(r).or_insert(next)
    };
    let mut edges: Vec<SnakeEdge> = Vec::new();
    let mut tiles = Vec::with_capacity(d);
    for k in 0..d {
        let diag = seq.crossed[k];
        let vertices: Vec<usize> = tile_vertices[k].iter().map(|v| id_of(&mut parent, slot(k, *v))).collect();
        let mut tile_edges = Vec::new();
        for (group, tri) in [(k, k), (k + 1, k + 1)] {
            for e in seq.sides_of(tri) {
                if e == diag {
                    continue;
                }
                let ends = {
                    let a = id_of(&mut parent, slot(k, e.0));
                    let b = id_of(&mut parent, slot(k, e.1));
                    (a.min(b), a.max(b))
                };
                let idx = match edges.iter().position(|x| x.ends == ends && x.lifted == e) {
                    Some(i) => i,
                    None => {
                        edges.push(SnakeEdge { ends, lifted: e, group });
                        edges.len() - 1
                    }
                };
                tile_edges.push(idx);
            }
        }
        tiles.push(Tile { diagonal: diag, edges: tile_edges, vertices, glue: None });
    }
    // consecutive diagonals around one common vertex turn the snake; a
    // change of pivot keeps its direction
    let mut dir = Glue::Right;
    for k in 0..d.saturating_sub(1) {
        if k > 0 {
            let pivot = |a: Edge, b: Edge| if b.has(a.0) { a.0 } else { a.1 };
            if pivot(seq.crossed[k - 1], seq.crossed[k]) == pivot(seq.crossed[k], seq.crossed[k + 1]) {
                dir = if dir == Glue::Right { Glue::Up } else { Glue::Right };
            }
        }
        tiles[k].glue = Some(dir);
    }
    SnakeGraph { seq: seq.clone(), vertex_count: ids.len(), edges, tiles }
}

impl SnakeGraph {
    pub fn d(&self) -> usize {
        self.tiles.len()
    }

    /// Edges incident to each vertex, in edge order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.ends.0].push(i);
            inc[e.ends.1].push(i);
        }
        inc
    }

    /// Display labels of the tile edges, diagonal last.
    pub fn tile_labels(&self, k: usize) -> Vec<String> {
        let poly = lifted_polygon(&self.seq);
        let mut v: Vec<String> = self.tiles[k].edges.iter().map(|&i| poly.labels[&self.edges[i].lifted].clone()).collect();
        v.push(poly.labels[&self.tiles[k].diagonal].clone());
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let poly = lifted_polygon(&self.seq);
        let tiles: Vec<serde_json::Value> = self
            .tiles
            .iter()
            .map(|t| {
                serde_json::json!({
                    "diagonal": poly.labels[&t.diagonal],
                    "edges": t.edges,
                    "labels": t.edges.iter().map(|&i| poly.labels[&self.edges[i].lifted].clone()).collect::<Vec<_>>(),
                    "glue": t.glue.map(|g| match g { Glue::Right => "right", Glue::Up => "up" }),
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| serde_json::json!({"ends": [e.ends.0, e.ends.1], "label": poly.labels[&e.lifted], "group": e.group}))
            .collect();
        serde_json::json!({"vertices": self.vertex_count, "edges": edges, "tiles": tiles})
    }
}

/// All perfect matchings; the lowest unmatched vertex is covered first, by
/// its incident edges in index order.
pub fn enumerate_matchings(g: &SnakeGraph) -> Vec<Matching> {
    let inc = g.incidence();
    let mut used = vec![false; g.vertex_count];
    let mut current = Vec::new();
    let mut out = Vec::new();
    fn go(g: &SnakeGraph, inc: &[Vec<usize>], used: &mut [bool], current: &mut Vec<usize>, out: &mut Vec<Matching>) {
        let Some(v) = used.iter().position(|u| !u) else {
            let mut m = current.clone();
            m.sort();
            out.push(m);
            return;
        };
        for &e in &inc[v] {
            let (a, b) = g.edges[e].ends;
            let w = if a == v { b } else { a };
            if used[w] {
                continue;
            }
            used[v] = true;
            used[w] = true;
            current.push(e);
            go(g, inc, used, current, out);
            current.pop();
            used[v] = false;
            used[w] = false;
        }
    }
    go(g, &inc, &mut used, &mut current, &mut out);
    out
}

/// Number of complete paths as a product of 2x2 transfer matrices over the
/// orientations of consecutive diagonals: the end of one diagonal may not
/// be the start of the next.
pub fn transfer_count(seq: &CrossingSequence) -> u128 {
    let orient = |e: Edge| [(e.0, e.1), (e.1, e.0)];
    let mut counts = [1u128, 1u128];
    for k in 1..seq.d() {
        let prev = orient(seq.crossed[k - 1]);
        let next = orient(seq.crossed[k]);
        let mut c = [0u128; 2];
        for (j, n) in next.iter().enumerate() {
            for (i, p) in prev.iter().enumerate() {
                if p.1 != n.0 {
                    c[j] += counts[i];
                }
            }
        }
        counts = c;
    }
    counts[0] + counts[1]
}

/// Numerator exponents over T° of the matched edges' labels.
pub fn matching_weight(t: &IdealTriangulation, g: &SnakeGraph, m: &Matching) -> Exps {
    let mut e = vec![0; t.n()];
    for &i in m {
        if let Some(a) = g.seq.side(&g.edges[i].lifted).arc() {
            e[t.position(&a).unwrap()] += 1;
        }
    }
    e
}

pub fn crossing_monomial(t: &IdealTriangulation, seq: &CrossingSequence) -> Exps {
    crossing_exps(t, seq)
}

/// The walk whose odd steps are the matched edges, taken by triangle.
/// `None` if they do not link up into a path from `s` to `t`.
pub fn matching_to_path(g: &SnakeGraph, m: &Matching) -> Option<LiftedPath> {
    let seq = &g.seq;
    let d = seq.d();
    let mut by_group: Vec<Option<Edge>> = vec![None; d + 1];
    for &i in m {
        let e = &g.edges[i];
        if by_group[e.group].replace(e.lifted).is_some() {
            return None;
        }
    }
    let mut v = seq.s;
    let mut walk = vec![v];
    for k in 0..=d {
        let odd = by_group[k]?;
        if !odd.has(v) {
            return None;
        }
        v = odd.other(v);
        walk.push(v);
        if k < d {
            let diag = seq.crossed[k];
            if !diag.has(v) {
                return None;
            }
            v = diag.other(v);
            walk.push(v);
        }
    }
    (v == seq.t).then_some(LiftedPath { vertices: walk })
}

/// Whether the matching covers the tile's four vertices with tile edges.
pub fn restricts_to_tile(g: &SnakeGraph, m: &Matching, k: usize) -> bool {
    let tile = &g.tiles[k];
    let covered: Vec<usize> = m
        .iter()
        .filter(|i| tile.edges.contains(i))
        .flat_map(|&i| [g.edges[i].ends.0, g.edges[i].ends.1])
        .collect();
    tile.vertices.iter().all(|v| covered.contains(v))
}

/// `x_γ` in the cluster ι(T°) from the matchings of the snake graph.
pub fn expand_via_matchings(t: &IdealTriangulation, gamma: &OrdinaryArc) -> Result<LaurentPoly> {
    if let Some(k) = t.position(gamma) {
        let mut e = vec![0; t.n()];
        e[k] = 1;
        return Ok(LaurentPoly::monomial(t.n(), loop_to_tagged(t, &e), BigInt::one()));
    }
    let seq = t.crossing_sequence(gamma, false)?;
    let g = build_snake(&seq);
    let cross = crossing_monomial(t, &seq);
    let mut p = LaurentPoly::zero(t.n());
    for m in enumerate_matchings(&g) {
        let w = matching_weight(t, &g, &m);
        let e: Exps = w.iter().zip(&cross).map(|(a, b)| a - b).collect();
        p.add_term(loop_to_tagged(t, &e), BigInt::one());
    }
    Ok(p)
}

/// `x_γ` in the cluster of `t` from matchings.
pub fn expand_tagged_via_matchings(t: &TaggedTriangulation, gamma: &TaggedArc) -> Result<LaurentPoly> {
    expand_tagged_with(t, gamma, &expand_via_matchings)
}

/// Checks one crossing sequence: T-paths, matchings and the transfer count
/// agree, and sending a matching to its walk is a weight-preserving
/// bijection onto the lifted T-paths.
pub fn check_bijection(t: &IdealTriangulation, seq: &CrossingSequence) -> std::result::Result<usize, String> {
    let paths = tpaths_of(seq);
    let g = build_snake(seq);
    let ms = enumerate_matchings(&g);
    let tc = transfer_count(seq);
    if paths.len() != ms.len() || tc != ms.len() as u128 {
        return Err(format!("{} paths, {} matchings, transfer {tc}", paths.len(), ms.len()));
    }
    if g.vertex_count != 2 * seq.d() + 2 || g.edges.len() != 3 * seq.d() + 1 {
        return Err(format!("snake graph has {} vertices and {} edges", g.vertex_count, g.edges.len()));
    }
    let mut hit = vec![false; paths.len()];
    for m in &ms {
        let walk = matching_to_path(&g, m).ok_or_else(|| format!("matching {m:?} is not a walk"))?;
        let i = paths.iter().position(|p| p.lifted == walk).ok_or_else(|| format!("matching {m:?} misses the T-paths"))?;
        if std::mem::replace(&mut hit[i], true) {
            return Err(format!("two matchings reach path {i}"));
        }
        if matching_weight(t, &g, m) != path_numerator(t, &paths[i]) {
            return Err(format!("weight of {m:?} differs from its path"));
        }
    }
    Ok(ms.len())
}

/// [`check_bijection`] for every ideal triangulation and arc not in it.
pub fn bijection_sweep(surface: Surface, bound: usize) -> Result<SweepTally> {
    use rayon::prelude::*;
    let ts = enumerate_ideal_triangulations(surface, bound)?;
    let arcs = ordinary_arcs(&surface);
    let per: Vec<SweepTally> = ts
        .par_iter()
        .map(|t| {
            let mut tally = SweepTally::default();
            for g in arcs.iter().filter(|g| !t.contains(g)) {
                tally.pairs += 1;
                let seq = t.crossing_sequence(g, false).expect("arc not in T");
                if let Err(e) = check_bijection(t, &seq) {
                    tally.failures.push(format!("{t} {g}: {e}"));
                }
            }
            tally
        })
        .collect();
    Ok(per.into_iter().fold(SweepTally::default(), |mut a, b| {
        a.pairs += b.pairs;
        a.failures.extend(b.failures);
        a
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn two_radii_snake() {
        let f = fixture("two-radii").unwrap();
        let seq = f.crossing_sequence().unwrap();
        let g = build_snake(&seq);
        assert_eq!((g.d(), g.vertex_count, g.edges.len()), (3, 8, 10));
        assert_eq!(g.tiles.last().unwrap().glue, None);
        assert!(g.tiles[..2].iter().all(|t| t.glue.is_some()));
        let ms = enumerate_matchings(&g);
        assert_eq!(ms.len(), 5);
        assert_eq!(transfer_count(&seq), 5);
        assert_eq!(check_bijection(&f.ideal, &seq), Ok(5));
    }

    #[test]
    fn matchings_are_perfect() {
        let f = fixture("around-folded").unwrap();
        let g = build_snake(&f.crossing_sequence().unwrap());
        for m in enumerate_matchings(&g) {
            let mut hit = vec![0; g.vertex_count];
            for &e in &m {
                hit[g.edges[e].ends.0] += 1;
                hit[g.edges[e].ends.1] += 1;
            }
            assert!(hit.iter().all(|&h| h == 1), "{m:?}");
        }
    }

    #[test]
    fn every_tile_has_four_edges_and_a_diagonal() {
        let f = fixture("loop-on-wheel").unwrap();
        let g = build_snake(&f.crossing_sequence().unwrap());
        for (k, t) in g.tiles.iter().enumerate() {
            assert_eq!(t.edges.len(), 4);
            assert_eq!(t.vertices.len(), 4);
            assert_eq!(g.tile_labels(k).len(), 5);
        }
    }

    #[test]
    fn weights_match_the_expansion() {
        let f = fixture("around-folded").unwrap();
        let t = f.tagged();
        let gamma = crate::surface::iota(&f.gamma.unwrap());
        assert_eq!(expand_tagged_via_matchings(&t, &gamma).unwrap(), crate::tpath::expand_tagged(&t, &gamma).unwrap());
    }
}
