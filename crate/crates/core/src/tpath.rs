//! Complete T-paths, enumerated in the lifted polygon and projected back to
//! the punctured disk, and the expansion formula they give.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::laurent::{Exps, LaurentPoly};
use crate::surface::{iota_inverse, notch_at_puncture, OrdinaryArc, Side, Surface, TaggedArc};
use crate::triangulation::{
    crossing_counts, enumerate_ideal_triangulations, enumerate_tagged_triangulations, CrossingSequence, Edge,
    IdealTriangulation, LiftedPolygon, Shape, TaggedTriangulation, V,
};

/// A walk in the lifted polygon: `2d + 2` vertices from `s` to `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiftedPath {
    pub vertices: Vec<V>,
}

impl LiftedPath {
    pub fn steps(&self) -> Vec<Edge> {
        self.vertices.windows(2).map(|w| Edge::new(w[0], w[1])).collect()
    }
}

/// Every complete path in the polygon. Even steps run along the crossed
/// diagonals; each odd step joins the end of one diagonal to the start of
/// the next and so is a side of the triangle between them. Paths are listed
/// in lexicographic order of diagonal orientations (increasing first).
pub fn enumerate_lifted_paths(poly: &LiftedPolygon) -> Vec<LiftedPath> {
    let seq = &poly.seq;
    let d = seq.d();
    let mut out = Vec::new();
    let mut walk = vec![seq.s];
    extend_paths(seq, 0, d, &mut walk, &mut out);
    out
}

fn extend_paths(seq: &CrossingSequence, k: usize, d: usize, walk: &mut Vec<V>, out: &mut Vec<LiftedPath>) {
    if k == d {
        walk.push(seq.t);
        out.push(LiftedPath { vertices: walk.clone() });
        walk.pop();
        return;
    }
    let e = seq.crossed[k];
    let last = *walk.last().unwrap();
    for (a, b) in [(e.0, e.1), (e.1, e.0)] {
        if a == last {
            continue;
        }
        walk.push(a);
        walk.push(b);
        extend_paths(seq, k + 1, d, walk, out);
        walk.pop();
        walk.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleClass {
    Backtrack,
    NonBacktrackCcw,
    NonBacktrackCw,
    QuasiBacktrack,
    NotACycle,
}

impl CycleClass {
    pub fn is_non_backtrack(self) -> bool {
        matches!(self, CycleClass::NonBacktrackCcw | CycleClass::NonBacktrackCw)
    }
}

/// A projected path: labels of T° (arcs and boundary edges) plus a mark for
/// every consecutive pair of steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TPath {
    pub steps: Vec<Side>,
    /// `marks[j]` classifies steps `j` and `j + 1` (0-based).
    pub marks: Vec<CycleClass>,
    pub lifted: LiftedPath,
}

impl TPath {
    pub fn has_non_backtrack(&self) -> bool {
        self.marks.iter().any(|m| m.is_non_backtrack())
    }

    pub fn has_quasi_backtrack(&self) -> bool {
        self.marks.contains(&CycleClass::QuasiBacktrack)
    }
}

/// Classifies steps `j`, `j + 1` of a lifted path.
pub fn classify_pair(seq: &CrossingSequence, path: &LiftedPath, j: usize) -> CycleClass {
    let (a, b, c) = (path.vertices[j], path.vertices[j + 1], path.vertices[j + 2]);
    let (e1, e2) = (Edge::new(a, b), Edge::new(b, c));
    if seq.side(&e1) != seq.side(&e2) {
        return CycleClass::NotACycle;
    }
    if e1 == e2 {
        return match (b, e1.1) {
            (V::Puncture, _) => CycleClass::Backtrack,
            (_, V::Puncture) => CycleClass::QuasiBacktrack,
            _ => CycleClass::Backtrack,
        };
    }
    // two lifts of one radius meeting at the puncture: the walk goes once
    // around it
    match (a, b, c) {
        (V::At(p), V::Puncture, V::At(q)) if q < p => CycleClass::NonBacktrackCcw,
        (V::At(_), V::Puncture, V::At(_)) => CycleClass::NonBacktrackCw,
        _ => unreachable!("distinct lifts of one label meet only at the puncture"),
    }
}

pub fn project_path(seq: &CrossingSequence, path: &LiftedPath) -> TPath {
    let steps: Vec<Side> = path.steps().iter().map(|e| seq.side(e)).collect();
    let marks = (0..steps.len() - 1).map(|j| classify_pair(seq, path, j)).collect();
    TPath { steps, marks, lifted: path.clone() }
}

pub fn enumerate_tpaths(t: &IdealTriangulation, gamma: &OrdinaryArc) -> Result<Vec<TPath>> {
    let seq = t.crossing_sequence(gamma, false)?;
    Ok(tpaths_of(&seq))
}

pub fn tpaths_of(seq: &CrossingSequence) -> Vec<TPath> {
    let poly = crate::triangulation::lifted_polygon(seq);
    enumerate_lifted_paths(&poly).iter().map(|p| project_path(seq, p)).collect()
}

/// Display names for the arcs (by position) and boundary edges of T°.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub arcs: Vec<String>,
    pub boundary: Vec<String>,
}

impl Labels {
    /// Arcs `1..=n` by position, boundary edges `b1..=bn`.
    pub fn default_for(n: usize) -> Self {
        Labels { arcs: (1..=n).map(|i| i.to_string()).collect(), boundary: (1..=n).map(|i| format!("b{i}")).collect() }
    }

    pub fn name(&self, t: &IdealTriangulation, side: &Side) -> String {
        match side {
            Side::Boundary(i) => self.boundary[*i].clone(),
            Side::Arc(a) => t.position(a).map(|p| self.arcs[p].clone()).unwrap_or_else(|| a.to_string()),
        }
    }
}

/// Text form, e.g. `(b4,1,b2,2,2,l,l,r*,r*,l,b3)`; `*` marks both steps of
/// a non-backtrack.
pub fn path_text(t: &IdealTriangulation, p: &TPath, labels: &Labels) -> String {
    let parts: Vec<String> = p
        .steps
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let star = (j > 0 && p.marks[j - 1].is_non_backtrack()) || (j < p.marks.len() && p.marks[j].is_non_backtrack());
            format!("{}{}", labels.name(t, s), if star { "*" } else { "" })
        })
        .collect();
    format!("({})", parts.join(","))
}

pub fn path_json(t: &IdealTriangulation, p: &TPath, labels: &Labels) -> serde_json::Value {
    let marks: Vec<String> = p
        .marks
        .iter()
        .map(|m| match m {
            CycleClass::Backtrack => "_",
            CycleClass::QuasiBacktrack => "~",
            CycleClass::NonBacktrackCcw => "*ccw",
            CycleClass::NonBacktrackCw => "*cw",
            CycleClass::NotACycle => "",
        }.to_string())
        .collect();
    serde_json::json!({
        "steps": p.steps.iter().map(|s| labels.name(t, s)).collect::<Vec<_>>(),
        "marks": marks,
        "text": path_text(t, p, labels),
    })
}

/// Exponents of `x(ω)` over the arcs of T° by position: odd steps in the
/// numerator, even steps in the denominator, boundary edges weight 1.
pub fn path_monomial(t: &IdealTriangulation, p: &TPath) -> Exps {
    let mut e = vec![0; t.n()];
    for (j, s) in p.steps.iter().enumerate() {
        if let Some(a) = s.arc() {
            let k = t.position(&a).expect("path steps lie on T°");
            e[k] += if j % 2 == 0 { 1 } else { -1 };
        }
    }
    e
}

/// Numerator of `x(ω)` over the crossing monomial.
pub fn path_numerator(t: &IdealTriangulation, p: &TPath) -> Exps {
    let mut e = vec![0; t.n()];
    for s in p.steps.iter().step_by(2) {
        if let Some(a) = s.arc() {
            e[t.position(&a).unwrap()] += 1;
        }
    }
    e
}

/// The sum over paths kept as numerators over the crossing monomial, in
/// the variables of T° (loop variable not yet replaced).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnreducedExpansion {
    pub numerators: Vec<Exps>,
    pub crossing: Exps,
}

impl UnreducedExpansion {
    /// Laurent polynomial in the variables of ι(T°), by position, with
    /// `x_loop = x_r * x_r⋈`.
    pub fn to_poly(&self, t: &IdealTriangulation) -> LaurentPoly {
        let n = t.n();
        let mut p = LaurentPoly::zero(n);
        for num in &self.numerators {
            let e: Exps = num.iter().zip(&self.crossing).map(|(a, b)| a - b).collect();
            p.add_term(loop_to_tagged(t, &e), BigInt::one());
        }
        p
    }
}

/// Rewrites exponents over T° in the tagged variables of ι(T°).
pub fn loop_to_tagged(t: &IdealTriangulation, e: &[i32]) -> Exps {
    let mut out = e.to_vec();
    if let Some((ri, li)) = t.self_folded() {
        out[ri] += e[li];
    }
    out
}

pub fn crossing_exps(t: &IdealTriangulation, seq: &CrossingSequence) -> Exps {
    let mut e = vec![0; t.n()];
    for a in &seq.arcs {
        e[t.position(a).unwrap()] += 1;
    }
    e
}

pub fn unreduced_ordinary(t: &IdealTriangulation, gamma: &OrdinaryArc) -> Result<UnreducedExpansion> {
    let seq = t.crossing_sequence(gamma, false)?;
    let numerators = tpaths_of(&seq).iter().map(|p| path_numerator(t, p)).collect();
    Ok(UnreducedExpansion { numerators, crossing: crossing_exps(t, &seq) })
}

/// `x_γ` in the cluster ι(T°), variables by position.
pub fn expand_ordinary(t: &IdealTriangulation, gamma: &OrdinaryArc) -> Result<LaurentPoly> {
    if let Some(k) = t.position(gamma) {
        let mut e = vec![0; t.n()];
        e[k] = 1;
        return Ok(LaurentPoly::monomial(t.n(), loop_to_tagged(t, &e), BigInt::one()));
    }
    Ok(unreduced_ordinary(t, gamma)?.to_poly(t))
}

/// `x_γ` in the cluster of `t`, variables by position in `t`.
pub fn expand_tagged(t: &TaggedTriangulation, gamma: &TaggedArc) -> Result<LaurentPoly> {
    expand_tagged_with(t, gamma, &expand_ordinary)
}

/// Tagged expansion built on an expansion of ordinary arcs in ι(T°).
/// A notched radius is `x_loop / x_r`; an all-notched `t` is handled
/// through `t⋈` with positions kept.
pub fn expand_tagged_with(
    t: &TaggedTriangulation,
    gamma: &TaggedArc,
    ordinary: &dyn Fn(&IdealTriangulation, &OrdinaryArc) -> Result<LaurentPoly>,
) -> Result<LaurentPoly> {
    t.surface().check_tagged(gamma)?;
    if let Some(k) = t.position(gamma) {
        return Ok(LaurentPoly::var(t.n(), k));
    }
    if t.shape() == Shape::AllNotched {
        return expand_tagged_with(&t.notched(), &notch_at_puncture(gamma), ordinary);
    }
    let ideal = t.ideal()?;
    match gamma {
        TaggedArc::RadiusNotched(j) => {
            let ell = ordinary(&ideal, &OrdinaryArc::Loop(*j))?;
            let r = expand_tagged_with(t, &TaggedArc::RadiusPlain(*j), ordinary)?;
            ell.div_exact(&r)
        }
        _ => ordinary(&ideal, &iota_inverse(gamma)),
    }
}

/// Every ordinary arc of the surface: peripherals, loops, radii.
pub fn ordinary_arcs(s: &Surface) -> Vec<OrdinaryArc> {
    s.tagged_arcs().iter().map(iota_inverse).chain((0..s.n()).map(OrdinaryArc::Radius)).collect()
}

/// Pairs checked and the ones that failed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTally {
    pub pairs: usize,
    pub failures: Vec<String>,
}

impl SweepTally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The denominator of the unreduced sum over T-paths is the product of the
/// arcs of T° with the crossing numbers of `γ` as exponents.
pub fn denominator_sweep(surface: Surface, bound: usize) -> Result<SweepTally> {
    let mut tally = SweepTally::default();
    for t in enumerate_ideal_triangulations(surface, bound)? {
        for g in ordinary_arcs(&surface).iter().filter(|g| !t.contains(g)) {
            let u = unreduced_ordinary(&t, g)?;
            let want: Exps = crossing_counts(&t, g).iter().map(|&c| c as i32).collect();
            tally.pairs += 1;
            if u.crossing != want {
                tally.failures.push(format!("{t} {g}: {:?} != {want:?}", u.crossing));
            }
        }
    }
    Ok(tally)
}

/// Switching every tag at the puncture in both T and `γ` renames each
/// variable `x_τ` to `x_τ⋈` and changes nothing else.
pub fn notching_sweep(surface: Surface, bound: usize) -> Result<SweepTally> {
    let mut tally = SweepTally::default();
    for t in enumerate_tagged_triangulations(surface, bound)? {
        let flipped = t.notched().sorted();
        let perm: Vec<usize> = t.arcs().iter().map(|a| flipped.position(&notch_at_puncture(a)).unwrap()).collect();
        for g in surface.tagged_arcs() {
            let a = expand_tagged(&t, &g)?.permute(&perm);
            let b = expand_tagged(&flipped, &notch_at_puncture(&g))?;
            tally.pairs += 1;
            if a != b {
                tally.failures.push(format!("{t} {g}"));
            }
        }
    }
    Ok(tally)
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CycleClass::Backtrack => "backtrack",
            CycleClass::NonBacktrackCcw => "non-backtrack (counterclockwise)",
            CycleClass::NonBacktrackCw => "non-backtrack (clockwise)",
            CycleClass::QuasiBacktrack => "quasi-backtrack",
            CycleClass::NotACycle => "not a cycle",
        };
        f.write_str(s)
    }
}
