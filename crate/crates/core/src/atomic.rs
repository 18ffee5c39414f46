//! Gradings by crossed arcs, the degree lemmas behind the proper-Laurent
//! property, and decomposition of positive elements into cluster monomials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{is_compatible_multiset, Multiset};
use crate::error::{Error, Result};
use crate::laurent::{degree_wrt, is_proper_laurent_monomial, Exps, LaurentPoly};
use crate::surface::{
    crossing_number, iota_inverse, lies_in_disk, notch_at_puncture, ordinary_compatible, underlying_curve,
    OrdinaryArc, Side, Surface, TaggedArc,
};
use crate::tpath::{enumerate_tpaths, expand_tagged, loop_to_tagged, ordinary_arcs, path_monomial, TPath};
use crate::triangulation::{enumerate_tagged_triangulations, IdealTriangulation, Shape, TaggedTriangulation};

/// Positions of arcs of a reference triangulation, sorted.
pub type Grading = Vec<usize>;

/// Positions of arcs of T° crossing `curve` at least once, or exactly twice.
pub fn ordinary_cross(t: &IdealTriangulation, curve: &OrdinaryArc, twice: bool) -> Grading {
    let s = t.surface();
    (0..t.n())
        .filter(|&i| {
            let c = crossing_number(&s, &t.arcs()[i], curve);
            if twice {
                c == 2
            } else {
                c >= 1
            }
        })
        .collect()
}

/// (T°, λ)-cross for a tagged λ, measured on the curve of λ.
pub fn t0_cross(t: &IdealTriangulation, lam: &TaggedArc) -> Grading {
    ordinary_cross(t, &underlying_curve(lam), false)
}

pub fn t0_doublecross(t: &IdealTriangulation, lam: &TaggedArc) -> Grading {
    ordinary_cross(t, &underlying_curve(lam), true)
}

fn tagged_grading(t: &TaggedTriangulation, lam: &TaggedArc, twice: bool) -> Grading {
    if t.shape() == Shape::AllNotched {
        return tagged_grading(&t.notched(), &notch_at_puncture(lam), twice);
    }
    let ideal = t.ideal().expect("not all notched");
    let base = ordinary_cross(&ideal, &underlying_curve(lam), twice);
    match ideal.self_folded() {
        // the loop position holds r⋈ in T; r itself is dropped
        Some((ri, li)) if crossing_number(&t.surface(), &ideal.arcs()[li], &underlying_curve(lam)) > 0 => {
            let mut g: Grading = base.into_iter().filter(|&i| i != ri).collect();
            if !g.contains(&li) {
                g.push(li);
                g.sort();
            }
            if twice && !ordinary_cross(&ideal, &underlying_curve(lam), true).contains(&li) {
                g.retain(|&i| i != li);
            }
            g
        }
        _ => base,
    }
}

/// (T, λ)-cross: arcs of T° crossing λ, with the loop of a self-folded
/// triangle read as r⋈ and r left out. An all-notched T is read through T⋈.
pub fn t_cross(t: &TaggedTriangulation, lam: &TaggedArc) -> Grading {
    tagged_grading(t, lam, false)
}

/// (T, λ)-doublecross: as [`t_cross`] for arcs crossed twice.
pub fn t_doublecross(t: &TaggedTriangulation, lam: &TaggedArc) -> Grading {
    tagged_grading(t, lam, true)
}

/// Positions of the plain radii of T.
pub fn radii_of(t: &TaggedTriangulation) -> Grading {
    (0..t.n()).filter(|&i| matches!(t.arcs()[i], TaggedArc::RadiusPlain(_))).collect()
}

/// Members of `lams` that no other member's puncture-free disk contains.
pub fn central_arcs(s: &Surface, lams: &[TaggedArc]) -> Result<Vec<TaggedArc>> {
    if lams.iter().any(|a| !a.is_peripheral()) {
        return Err(Error::NotPeripheral);
    }
    let mut set: Vec<TaggedArc> = lams.to_vec();
    set.sort();
    set.dedup();
    Ok(set.iter().filter(|l| !set.iter().any(|b| b != *l && lies_in_disk(s, l, b))).copied().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaRule {
    /// σ a plain radius, N = (T,σ)-cross.
    PlainRadius,
    /// σ⋈ notched and T has parallel radii r, r⋈: N = r and the peripheral
    /// arcs of T crossing σ.
    NotchedFolded,
    /// σ⋈ notched, σ ∉ T, no parallel radii: N = all radii of T.
    NotchedAllRadii,
    /// σ⋈ notched, σ ∈ T: N = the radii of T other than σ.
    NotchedRadiiMinusSigma,
    /// σ peripheral and central: N = (T,σ)-cross, plus the doublecross
    /// when it is nonempty.
    Peripheral,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaChoice {
    pub sigma: TaggedArc,
    pub rule: SigmaRule,
    /// Every term of `x_σ` is negative on one of these.
    pub gradings: Vec<Grading>,
}

fn notched_grading(t: &TaggedTriangulation, j: usize) -> (SigmaRule, Grading) {
    let sigma = TaggedArc::RadiusPlain(j);
    match t.shape() {
        Shape::Parallel(i) => {
            let ideal = t.ideal().expect("not all notched");
            let s = t.surface();
            let mut g: Grading = (0..t.n())
                .filter(|&k| {
                    t.arcs()[k].is_peripheral() && crossing_number(&s, &ideal.arcs()[k], &OrdinaryArc::Radius(j)) > 0
                })
                .collect();
            g.push(t.position(&TaggedArc::RadiusPlain(i)).expect("parallel pair"));
            g.sort();
            (SigmaRule::NotchedFolded, g)
        }
        _ => match t.position(&sigma) {
            None => (SigmaRule::NotchedAllRadii, radii_of(t)),
            Some(p) => (SigmaRule::NotchedRadiiMinusSigma, radii_of(t).into_iter().filter(|&k| k != p).collect()),
        },
    }
}

/// The arc σ and grading(s) used to show that `x_Σ` is proper Laurent in T.
pub fn select_sigma(sigma_set: &Multiset, t: &TaggedTriangulation) -> Result<SigmaChoice> {
    let outside: Vec<TaggedArc> = sigma_set.keys().filter(|a| !t.contains(a)).copied().collect();
    if outside.is_empty() {
        return Err(Error::NothingToProve);
    }
    if t.shape() == Shape::AllNotched {
        let flipped: Multiset = sigma_set.iter().map(|(a, m)| (notch_at_puncture(a), *m)).collect();
        let mut c = select_sigma(&flipped, &t.notched())?;
        c.sigma = notch_at_puncture(&c.sigma);
        return Ok(c);
    }
    if let Some(s) = outside.iter().find(|a| matches!(a, TaggedArc::RadiusPlain(_))) {
        return Ok(SigmaChoice { sigma: *s, rule: SigmaRule::PlainRadius, gradings: vec![t_cross(t, s)] });
    }
    let notched: Vec<usize> =
        outside.iter().filter(|&a| matches!(a, TaggedArc::RadiusNotched(_))).map(|a| a.radius_vertex().unwrap()).collect();
    if !notched.is_empty() {
        // a notched radius whose plain version crosses T takes precedence
        let j = notched.iter().find(|&&j| !t.contains(&TaggedArc::RadiusPlain(j))).copied().unwrap_or(notched[0]);
        let (rule, g) = notched_grading(t, j);
        return Ok(SigmaChoice { sigma: TaggedArc::RadiusNotched(j), rule, gradings: vec![g] });
    }
    let ideal = t.ideal()?;
    let central = central_arcs(&t.surface(), &outside)?;
    let sigma = if central.len() == 1 {
        central[0]
    } else {
        *central.iter().find(|c| t0_doublecross(&ideal, c).is_empty()).unwrap_or(&central[0])
    };
    let mut gradings = vec![t_cross(t, &sigma)];
    let dc = t_doublecross(t, &sigma);
    if !dc.is_empty() {
        gradings.push(dc);
    }
    Ok(SigmaChoice { sigma, rule: SigmaRule::Peripheral, gradings })
}

/// Outcome of checking one incompatible cluster monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperReport {
    /// Every term has a negative exponent.
    pub ok: bool,
    /// Every term is negative on a grading of the selected σ.
    pub grading_ok: bool,
    pub choice: SigmaChoice,
    /// First term that fails either check.
    pub witness: Option<Exps>,
    pub terms: usize,
}

/// Expansions of every tagged arc in every triangulation of a surface,
/// indexed like [`Surface::tagged_arcs`].
pub struct ExpansionTable {
    pub surface: Surface,
    pub triangulations: Vec<TaggedTriangulation>,
    pub arcs: Vec<TaggedArc>,
    table: Vec<Vec<LaurentPoly>>,
}

impl ExpansionTable {
    pub fn new(surface: Surface, bound: usize) -> Result<Self> {
        let triangulations = enumerate_tagged_triangulations(surface, bound)?;
        let arcs = surface.tagged_arcs();
        let table = triangulations
            .par_iter()
            .map(|t| arcs.iter().map(|a| expand_tagged(t, a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ExpansionTable { surface, triangulations, arcs, table })
    }

    pub fn get(&self, ti: usize, a: &TaggedArc) -> &LaurentPoly {
        let ai = self.arcs.iter().position(|x| x == a).expect("arc of the surface");
        &self.table[ti][ai]
    }

    pub fn monomial(&self, ti: usize, sigma: &Multiset) -> LaurentPoly {
        let mut p = LaurentPoly::one(self.surface.n());
        for (a, &m) in sigma {
            p = &p * &self.get(ti, a).pow(m);
        }
        p
    }
}

fn check_terms(p: &LaurentPoly, choice: &SigmaChoice) -> ProperReport {
    let mut report = ProperReport { ok: true, grading_ok: true, choice: choice.clone(), witness: None, terms: p.len() };
    for (e, _) in p.terms() {
        let proper = is_proper_laurent_monomial(e);
        let graded = choice.gradings.iter().any(|g| degree_wrt(e, g) < 0);
        if !proper || !graded {
            report.ok &= proper;
            report.grading_ok &= graded;
            report.witness.get_or_insert_with(|| e.clone());
        }
    }
    report
}

/// Expands `x_Σ` in T and checks that every term is a proper Laurent
/// monomial, negative on the grading chosen by [`select_sigma`].
pub fn check_proper_laurent(sigma_set: &Multiset, t: &TaggedTriangulation) -> Result<ProperReport> {
    if !is_compatible_multiset(t, sigma_set) {
        return Err(Error::Incompatible);
    }
    let choice = select_sigma(sigma_set, t)?;
    let mut p = LaurentPoly::one(t.n());
    for (a, &m) in sigma_set {
        p = &p * &expand_tagged(t, a)?.pow(m);
    }
    Ok(check_terms(&p, &choice))
}

/// Sets of pairwise compatible tagged arcs, nonempty, sorted.
pub fn compatible_sets(triangulations: &[TaggedTriangulation]) -> Vec<Vec<TaggedArc>> {
    let mut out: BTreeSet<Vec<TaggedArc>> = BTreeSet::new();
    for t in triangulations {
        let key = t.key();
        for mask in 1u32..(1 << key.len()) {
            out.insert(key.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|x| *x.1).collect());
        }
    }
    out.into_iter().collect()
}

/// Every multiset on a compatible set with each multiplicity in `1..=max_mult`.
pub fn cluster_monomials(triangulations: &[TaggedTriangulation], max_mult: u32) -> Vec<Multiset> {
    let mut out = Vec::new();
    for set in compatible_sets(triangulations) {
        let mut mults = vec![1u32; set.len()];
        loop {
            out.push(set.iter().copied().zip(mults.iter().copied()).collect());
            let Some(i) = mults.iter().position(|&m| m < max_mult) else { break };
            for m in &mut mults[..i] {
                *m = 1;
            }
            mults[i] += 1;
        }
    }
    out
}

pub fn multiset_text(sigma: &Multiset) -> String {
    if sigma.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> =
        sigma.iter().map(|(a, &m)| if m == 1 { a.to_string() } else { format!("{a}^{m}") }).collect();
    parts.join("*")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperFailure {
    pub triangulation: String,
    pub sigma: String,
    pub chosen: String,
    pub rule: SigmaRule,
    pub proper: bool,
    pub graded: bool,
    pub term: Exps,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub instances: usize,
    pub terms: usize,
    /// Instances per selection rule.
    pub by_rule: BTreeMap<String, usize>,
    pub failures: Vec<ProperFailure>,
}

/// Every pair (T, Σ) with Σ ⊄ T a cluster monomial of multiplicities at
/// most `max_mult`.
pub fn sweep_proper_laurent(table: &ExpansionTable, max_mult: u32) -> SweepReport {
    let monomials = cluster_monomials(&table.triangulations, max_mult);
    let per_t: Vec<SweepReport> = (0..table.triangulations.len())
        .into_par_iter()
        .map(|ti| {
            let t = &table.triangulations[ti];
            let mut r = SweepReport::default();
            for sigma in monomials.iter().filter(|m| m.keys().any(|a| !t.contains(a))) {
                let choice = select_sigma(sigma, t).expect("not contained in T");
                let rep = check_terms(&table.monomial(ti, sigma), &choice);
                r.instances += 1;
                r.terms += rep.terms;
                *r.by_rule.entry(format!("{:?}", choice.rule)).or_default() += 1;
                if let Some(term) = rep.witness {
                    r.failures.push(ProperFailure {
                        triangulation: t.to_string(),
                        sigma: multiset_text(sigma),
                        chosen: choice.sigma.to_string(),
                        rule: choice.rule,
                        proper: rep.ok,
                        graded: rep.grading_ok,
                        term,
                    });
                }
            }
            r
        })
        .collect();
    let mut total = SweepReport::default();
    for r in per_t {
        total.instances += r.instances;
        total.terms += r.terms;
        for (k, v) in r.by_rule {
            *total.by_rule.entry(k).or_default() += v;
        }
        total.failures.extend(r.failures);
    }
    total
}

/// Identifiers and statements of the degree lemmas.
pub const LEMMAS: [(&str, &str); 22] = [
    ("loop-replacement", "negative / non-positive degree on (T°,σ)-cross or doublecross carries over to (T,σ)"),
    ("adjacent-steps-radii", "β peripheral: an odd step on a radius has a neighbouring step on a radius"),
    ("adjacent-steps-radii-minus", "β peripheral, σ a radius of T°: the same for the radii other than σ"),
    ("adjacent-steps-cross", "σ ∉ T°: an odd step in (T°,σ)-cross has a neighbouring step in it"),
    ("adjacent-steps-doublecross", "β = σ or inside D(σ): the same for a nonempty (T°,σ)-doublecross"),
    ("path-degree-count", "at least as many even as odd steps in N gives degree ≤ 0, more gives < 0"),
    ("path-degree-own-cross", "x(ω) has degree ≤ 0 on (T°,β)-cross"),
    ("path-degree-own-cross-strict", "first and last steps outside (T°,β)-cross give degree < 0"),
    ("peripheral-own-cross", "σ peripheral ∉ T: x_σ has degree ≤ 0 on (T,σ)-cross"),
    ("peripheral-own-cross-strict", "σ peripheral ∉ T, empty (T°,σ)-doublecross: degree < 0 on (T,σ)-cross"),
    ("central-cross", "σ central in Σ∖T: every x_β, β ∈ Σ, has degree ≤ 0 on (T,σ)-cross"),
    ("central-doublecross", "σ the only central arc, nonempty doublecross: x_β has degree ≤ 0 on it"),
    ("cross-or-doublecross", "σ peripheral ∉ T, nonempty doublecross: x_σ negative on cross or doublecross"),
    ("plain-radius-own-cross", "σ a plain radius ∉ T: x_σ has degree < 0 on (T,σ)-cross"),
    ("plain-radius-compatible", "β compatible with a plain radius σ ∉ T: degree ≤ 0 on (T,σ)-cross"),
    ("notched-vs-radii", "no parallel radii, ρ ∈ T: x_ρ⋈ has degree < 0 on all radii of T"),
    ("notched-own-folded", "parallel r, r⋈ and σ⋈ ∉ T: x_σ⋈ has degree < 0 on r and the peripherals crossing σ"),
    ("notched-own-all-radii", "no parallel radii, σ ∉ T: x_σ⋈ has degree < 0 on all radii of T"),
    ("notched-own-radii-minus", "no parallel radii, σ ∈ T: x_σ⋈ has degree < 0 on the radii other than σ"),
    ("notched-compatible-folded", "β ∈ Σ in the folded case: degree ≤ 0 on the same grading"),
    ("notched-compatible-all-radii", "β ∈ Σ in the all-radii case: degree ≤ 0 on all radii"),
    ("notched-compatible-radii-minus", "β ∈ Σ in the radii-minus-σ case: degree ≤ 0 on that grading"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaWitness {
    pub lemma: String,
    pub triangulation: String,
    pub sigma: Option<String>,
    pub beta: Option<String>,
    /// Offending path or term.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaTally {
    pub id: String,
    pub statement: String,
    pub instances: usize,
    pub failures: Vec<LemmaWitness>,
}

struct Suite<'a> {
    filter: Option<&'a str>,
    tallies: BTreeMap<&'static str, LemmaTally>,
}

impl Suite<'_> {
    fn wants(&self, id: &str) -> bool {
        self.filter.is_none_or(|f| f == id)
    }

    fn record(&mut self, id: &'static str, failure: Option<LemmaWitness>) {
        let entry = self.tallies.get_mut(id).expect("known lemma id");
        entry.instances += 1;
        entry.failures.extend(failure);
    }
}

fn witness(id: &str, t: &TaggedTriangulation, sigma: Option<String>, beta: Option<String>, detail: String) -> LemmaWitness {
    LemmaWitness { lemma: id.to_string(), triangulation: t.to_string(), sigma, beta, detail }
}

fn first_bad(p: &LaurentPoly, g: &[usize], strict: bool) -> Option<Exps> {
    p.terms().map(|x| x.0).find(|e| if strict { degree_wrt(e, g) >= 0 } else { degree_wrt(e, g) > 0 }).cloned()
}

fn path_string(p: &TPath) -> String {
    let steps: Vec<String> = p.steps.iter().map(|s| s.to_string()).collect();
    format!("({})", steps.join(","))
}

/// Odd steps (1st, 3rd, ...) in `n` have a neighbouring even step in `n`.
fn adjacent_rule_holds(t: &IdealTriangulation, p: &TPath, n: &[usize]) -> bool {
    let inn = |s: &Side| s.arc().and_then(|a| t.position(&a)).is_some_and(|i| n.contains(&i));
    (0..p.steps.len()).step_by(2).all(|j| {
        !inn(&p.steps[j]) || (j > 0 && inn(&p.steps[j - 1])) || (j + 1 < p.steps.len() && inn(&p.steps[j + 1]))
    })
}

fn peripheral_tagged(a: &OrdinaryArc) -> Option<TaggedArc> {
    match *a {
        OrdinaryArc::Peripheral(i, j) => Some(TaggedArc::Peripheral(i, j)),
        _ => None,
    }
}

/// Checks every applicable instance of every degree lemma (or only
/// `filter`) over the triangulations of `table` with all plain radii or
/// one parallel pair.
pub fn verify_degree_lemmas(table: &ExpansionTable, filter: Option<&str>) -> Result<Vec<LemmaTally>> {
    if let Some(f) = filter {
        if !LEMMAS.iter().any(|l| l.0 == f) {
            return Err(Error::Parse { pos: 0, msg: format!("unknown lemma `{f}`") });
        }
    }
    let mut suite = Suite {
        filter,
        tallies: LEMMAS
            .iter()
            .map(|(id, st)| (*id, LemmaTally { id: id.to_string(), statement: st.to_string(), instances: 0, failures: vec![] }))
            .collect(),
    };
    let s = table.surface;
    let n = s.n();
    let ords = ordinary_arcs(&s);
    let sets = compatible_sets(&table.triangulations);
    for (ti, t) in table.triangulations.iter().enumerate() {
        if t.shape() == Shape::AllNotched {
            continue;
        }
        let ideal = t.ideal()?;
        let folded = ideal.self_folded();
        let radii0: Grading = (0..n).filter(|&i| matches!(ideal.arcs()[i], OrdinaryArc::Radius(_))).collect();
        let paths: BTreeMap<OrdinaryArc, Vec<TPath>> = ords
            .iter()
            .filter(|b| !ideal.contains(b))
            .map(|b| enumerate_tpaths(&ideal, b).map(|p| (*b, p)))
            .collect::<Result<_>>()?;

        for (beta, ps) in &paths {
            let bs = Some(beta.to_string());
            let own = ordinary_cross(&ideal, beta, false);
            if suite.wants("path-degree-count") {
                let mut bad = None;
                for p in ps {
                    let e = path_monomial(&ideal, p);
                    for mask in 0u32..(1 << n) {
                        let g: Grading = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                        let count = |parity: usize| {
                            p.steps
                                .iter()
                                .enumerate()
                                .filter(|(j, s)| j % 2 == parity && s.arc().is_some_and(|a| g.contains(&ideal.position(&a).unwrap())))
                                .count()
                        };
                        let (odd, even) = (count(0), count(1));
                        let d = degree_wrt(&e, &g);
                        if (even >= odd && d > 0) || (even > odd && d >= 0) {
                            bad.get_or_insert_with(|| format!("{} on {g:?}", path_string(p)));
                        }
                    }
                }
                suite.record("path-degree-count", bad.map(|d| witness("path-degree-count", t, None, bs.clone(), d)));
            }
            if suite.wants("path-degree-own-cross") {
                let bad = ps.iter().find(|p| degree_wrt(&path_monomial(&ideal, p), &own) > 0);
                suite.record(
                    "path-degree-own-cross",
                    bad.map(|p| witness("path-degree-own-cross", t, None, bs.clone(), path_string(p))),
                );
            }
            if suite.wants("path-degree-own-cross-strict") {
                let outside = |s: &Side| s.arc().and_then(|a| ideal.position(&a)).is_none_or(|i| !own.contains(&i));
                let eligible: Vec<&TPath> =
                    ps.iter().filter(|p| outside(&p.steps[0]) && outside(p.steps.last().unwrap())).collect();
                if !eligible.is_empty() {
                    let bad = eligible.iter().find(|p| degree_wrt(&path_monomial(&ideal, p), &own) >= 0);
                    suite.record(
                        "path-degree-own-cross-strict",
                        bad.map(|p| witness("path-degree-own-cross-strict", t, None, bs.clone(), path_string(p))),
                    );
                }
            }
            let beta_peripheral = matches!(beta, OrdinaryArc::Peripheral(..));
            let adjacent = |suite: &mut Suite, id: &'static str, sigma: Option<String>, g: &Grading| {
                if suite.wants(id) {
                    let bad = ps.iter().find(|p| !adjacent_rule_holds(&ideal, p, g));
                    suite.record(id, bad.map(|p| witness(id, t, sigma, bs.clone(), path_string(p))));
                }
            };
            if beta_peripheral {
                adjacent(&mut suite, "adjacent-steps-radii", None, &radii0);
            }
            for sigma in ords.iter().filter(|x| ordinary_compatible(&s, x, beta)) {
                let ss = Some(sigma.to_string());
                if !ideal.contains(sigma) {
                    adjacent(&mut suite, "adjacent-steps-cross", ss.clone(), &ordinary_cross(&ideal, sigma, false));
                    let dc = ordinary_cross(&ideal, sigma, true);
                    let inside = match (peripheral_tagged(beta), peripheral_tagged(sigma)) {
                        (Some(b), Some(sg)) => b == sg || lies_in_disk(&s, &b, &sg),
                        _ => false,
                    };
                    if !dc.is_empty() && inside {
                        adjacent(&mut suite, "adjacent-steps-doublecross", ss.clone(), &dc);
                    }
                } else if beta_peripheral && matches!(sigma, OrdinaryArc::Radius(_)) {
                    let p = ideal.position(sigma).unwrap();
                    let g: Grading = radii0.iter().copied().filter(|&i| i != p).collect();
                    adjacent(&mut suite, "adjacent-steps-radii-minus", ss, &g);
                }
            }
        }

        if folded.is_some() && suite.wants("loop-replacement") {
            for beta in table.arcs.iter().filter(|b| !t.contains(b) && !matches!(b, TaggedArc::RadiusNotched(_))) {
                let ps = &paths[&iota_inverse(beta)];
                for sigma in table.arcs.iter().filter(|x| !t.contains(x) && crate::surface::are_compatible(&s, x, beta)) {
                    if !(matches!(sigma, TaggedArc::RadiusPlain(_)) || beta.is_peripheral()) {
                        continue;
                    }
                    let pairs = [(t0_cross(&ideal, sigma), t_cross(t, sigma)), (t0_doublecross(&ideal, sigma), t_doublecross(t, sigma))];
                    let mut bad = None;
                    for (k, (g0, g1)) in pairs.iter().enumerate() {
                        if k == 1 && g0.is_empty() {
                            continue;
                        }
                        for p in ps {
                            let e0 = path_monomial(&ideal, p);
                            let (d0, d1) = (degree_wrt(&e0, g0), degree_wrt(&loop_to_tagged(&ideal, &e0), g1));
                            if (d0 < 0 && d1 >= 0) || (d0 <= 0 && d1 > 0) {
                                bad.get_or_insert_with(|| path_string(p));
                            }
                        }
                    }
                    suite.record(
                        "loop-replacement",
                        bad.map(|d| witness("loop-replacement", t, Some(sigma.to_string()), Some(beta.to_string()), d)),
                    );
                }
            }
        }

        for sigma in table.arcs.iter().filter(|a| !t.contains(a)) {
            let x = table.get(ti, sigma);
            let ss = Some(sigma.to_string());
            let cross = t_cross(t, sigma);
            let check = |suite: &mut Suite, id: &'static str, beta: Option<&TaggedArc>, p: &LaurentPoly, g: &Grading, strict: bool| {
                if suite.wants(id) {
                    let bad = first_bad(p, g, strict);
                    suite.record(id, bad.map(|e| witness(id, t, ss.clone(), beta.map(|b| b.to_string()), format!("{e:?}"))));
                }
            };
            match sigma {
                TaggedArc::Peripheral(..) => {
                    check(&mut suite, "peripheral-own-cross", None, x, &cross, false);
                    if t0_doublecross(&ideal, sigma).is_empty() {
                        check(&mut suite, "peripheral-own-cross-strict", None, x, &cross, true);
                    }
                    let dc = t_doublecross(t, sigma);
                    if !dc.is_empty() && suite.wants("cross-or-doublecross") {
                        let bad = x.terms().map(|e| e.0).find(|e| degree_wrt(e, &cross) >= 0 && degree_wrt(e, &dc) >= 0);
                        suite.record(
                            "cross-or-doublecross",
                            bad.map(|e| witness("cross-or-doublecross", t, ss.clone(), None, format!("{e:?}"))),
                        );
                    }
                }
                TaggedArc::RadiusPlain(_) => {
                    check(&mut suite, "plain-radius-own-cross", None, x, &cross, true);
                    for beta in table.arcs.iter().filter(|b| crate::surface::are_compatible(&s, b, sigma)) {
                        check(&mut suite, "plain-radius-compatible", Some(beta), table.get(ti, beta), &cross, false);
                    }
                }
                TaggedArc::RadiusNotched(j) => {
                    let (rule, g) = notched_grading(t, *j);
                    let id = match rule {
                        SigmaRule::NotchedFolded => "notched-own-folded",
                        SigmaRule::NotchedAllRadii => "notched-own-all-radii",
                        _ => "notched-own-radii-minus",
                    };
                    check(&mut suite, id, None, x, &g, true);
                    if rule == SigmaRule::NotchedRadiiMinusSigma {
                        check(&mut suite, "notched-vs-radii", None, x, &radii_of(t), true);
                    }
                }
            }
        }

        for set in &sets {
            let outside: Vec<TaggedArc> = set.iter().filter(|a| !t.contains(a)).copied().collect();
            if outside.is_empty() {
                continue;
            }
            let peripherals: Vec<TaggedArc> = outside.iter().filter(|a| a.is_peripheral()).copied().collect();
            let central = central_arcs(&s, &peripherals)?;
            let bound = |suite: &mut Suite, id: &'static str, sigma: &TaggedArc, betas: &mut dyn Iterator<Item = &TaggedArc>, g: &Grading| {
                if !suite.wants(id) {
                    return;
                }
                for beta in betas {
                    let bad = first_bad(table.get(ti, beta), g, false);
                    let detail = |e: Exps| format!("Σ = {set:?}, term {e:?}");
                    suite.record(id, bad.map(|e| witness(id, t, Some(sigma.to_string()), Some(beta.to_string()), detail(e))));
                }
            };
            for sigma in &central {
                let g = t_cross(t, sigma);
                bound(&mut suite, "central-cross", sigma, &mut set.iter().filter(|b| t.contains(b) || b.is_peripheral()), &g);
            }
            if central.len() == 1 && peripherals.len() == outside.len() {
                let dc = t_doublecross(t, &central[0]);
                if !dc.is_empty() {
                    bound(&mut suite, "central-doublecross", &central[0], &mut set.iter(), &dc);
                }
            }
            if outside.iter().any(|a| matches!(a, TaggedArc::RadiusPlain(_))) {
                continue;
            }
            let crossing_notched = outside.iter().any(|a| matches!(a, TaggedArc::RadiusNotched(j) if !t.contains(&TaggedArc::RadiusPlain(*j))));
            for sigma in outside.iter().filter(|a| matches!(a, TaggedArc::RadiusNotched(_))) {
                let (rule, g) = notched_grading(t, sigma.radius_vertex().unwrap());
                let id = match rule {
                    SigmaRule::NotchedFolded => "notched-compatible-folded",
                    SigmaRule::NotchedAllRadii => "notched-compatible-all-radii",
                    _ if !crossing_notched => "notched-compatible-radii-minus",
                    _ => continue,
                };
                bound(&mut suite, id, sigma, &mut set.iter(), &g);
            }
        }
    }
    Ok(suite
        .tallies
        .into_values()
        .filter(|x| filter.is_none_or(|f| f == x.id))
        .collect())
}

/// `m_Γ` for each candidate Γ, read off the expansion of `y` in a
/// triangulation containing Γ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub terms: Vec<(Multiset, BigInt)>,
    /// `y − Σ m_Γ x_Γ` in the initial cluster.
    pub residual: LaurentPoly,
}

impl Decomposition {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    /// No negative coefficient; together with exactness, `y` is positive.
    pub fn is_positive(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_negative())
    }
}

/// Cluster monomials of total degree at most `degree_bound`, the empty
/// monomial included, each with the first triangulation holding it.
pub fn candidate_monomials(triangulations: &[TaggedTriangulation], degree_bound: u32) -> Vec<(Multiset, usize)> {
    let mut seen: BTreeMap<Multiset, usize> = BTreeMap::new();
    for (ti, t) in triangulations.iter().enumerate() {
        let key = t.key();
        let mut stack: Vec<(Multiset, usize)> = vec![(Multiset::new(), 0)];
        while let Some((m, from)) = stack.pop() {
            let total: u32 = m.values().sum();
            seen.entry(m.clone()).or_insert(ti);
            if total == degree_bound {
                continue;
            }
            for (k, a) in key.iter().enumerate().skip(from) {
                let mut next = m.clone();
                *next.entry(*a).or_default() += 1;
                stack.push((next, k));
            }
        }
    }
    seen.into_iter().collect()
}

/// Expansions of the initial cluster's variables in other triangulations.
pub struct Decomposer<'a> {
    pub initial: TaggedTriangulation,
    pub triangulations: &'a [TaggedTriangulation],
    pub candidates: Vec<(Multiset, usize)>,
    images: Vec<Vec<LaurentPoly>>,
}

impl<'a> Decomposer<'a> {
    pub fn new(initial: &TaggedTriangulation, triangulations: &'a [TaggedTriangulation], degree_bound: u32) -> Result<Self> {
        let candidates = candidate_monomials(triangulations, degree_bound);
        let images = triangulations
            .iter()
            .map(|t| initial.arcs().iter().map(|a| expand_tagged(t, a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Decomposer { initial: initial.clone(), triangulations, candidates, images })
    }

    /// `x_Γ` in the initial cluster.
    pub fn monomial(&self, gamma: &Multiset) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::one(self.initial.n());
        for (a, &m) in gamma {
            p = &p * &expand_tagged(&self.initial, a)?.pow(m);
        }
        Ok(p)
    }

    pub fn decompose(&self, y: &LaurentPoly) -> Result<Decomposition> {
        let mut in_t: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
        let mut terms = Vec::new();
        for (gamma, ti) in &self.candidates {
            if !in_t.contains_key(ti) {
                in_t.insert(*ti, y.substitute_exact(&self.images[*ti])?);
            }
            let t = &self.triangulations[*ti];
            let mut e = vec![0; t.n()];
            for (a, &m) in gamma {
                e[t.position(a).expect("support in T")] = m as i32;
            }
            let c = in_t[ti].coeff(&e);
            if !c.is_zero() {
                terms.push((gamma.clone(), c));
            }
        }
        let mut residual = y.clone();
        for (gamma, c) in &terms {
            residual = &residual - &self.monomial(gamma)?.scalar_mul(c);
        }
        Ok(Decomposition { terms, residual })
    }
}

/// `y` written in the cluster of `initial` as a combination of cluster
/// monomials of degree at most `degree_bound`.
pub fn decompose_positive(y: &LaurentPoly, initial: &TaggedTriangulation, degree_bound: u32, bound: usize) -> Result<Decomposition> {
    let ts = enumerate_tagged_triangulations(initial.surface(), bound)?;
    Decomposer::new(initial, &ts, degree_bound)?.decompose(y)
}

/// A random nonnegative combination: up to `max_terms` distinct candidates
/// with coefficients in `1..=max_coeff`, sorted.
pub fn random_combination(rng: &mut ChaCha8Rng, candidates: &[(Multiset, usize)], max_terms: usize, max_coeff: u32) -> Vec<(Multiset, BigInt)> {
    let k = rng.gen_range(1..=max_terms);
    let mut picked: Vec<(Multiset, BigInt)> = candidates
        .choose_multiple(rng, k)
        .map(|(m, _)| (m.clone(), BigInt::from(rng.gen_range(1..=max_coeff))))
        .collect();
    picked.sort();
    picked
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub trials: usize,
    pub recovered: usize,
    pub failures: Vec<String>,
}

/// Builds `trials` random combinations in the wheel cluster and checks that
/// decomposition returns exactly the chosen terms.
pub fn decomposition_round_trip(n: usize, trials: usize, seed: u64) -> Result<RoundTripReport> {
    let s = Surface::new(n)?;
    let ts = enumerate_tagged_triangulations(s, n)?;
    let initial = TaggedTriangulation::wheel(s);
    let dec = Decomposer::new(&initial, &ts, 2)?;
    let mut rng = seeded_rng(seed);
    let mut report = RoundTripReport { trials, ..Default::default() };
    for _ in 0..trials {
        let combo = random_combination(&mut rng, &dec.candidates, 3, 5);
        let mut y = LaurentPoly::zero(n);
        for (g, c) in &combo {
            y = &y + &dec.monomial(g)?.scalar_mul(c);
        }
        let got = dec.decompose(&y)?;
        let mut terms = got.terms.clone();
        terms.sort();
        if got.is_exact() && got.is_positive() && terms == combo {
            report.recovered += 1;
        } else {
            let text: Vec<String> = combo.iter().map(|(g, c)| format!("{c}*{}", multiset_text(g))).collect();
            report.failures.push(text.join(" + "));
        }
    }
    Ok(report)
}

/// Scalar `1` in a given number of variables; handy for the empty monomial.
pub fn unit(n: usize) -> LaurentPoly {
    LaurentPoly::constant(n, BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize) -> Surface {
        Surface::new(n).unwrap()
    }

    fn tri(n: usize, arcs: &[TaggedArc]) -> TaggedTriangulation {
        TaggedTriangulation::new(s(n), arcs.to_vec()).unwrap()
    }

    use TaggedArc::{Peripheral as P, RadiusNotched as RN, RadiusPlain as R};

    #[test]
    fn doublecross_of_a_long_peripheral() {
        let t = tri(5, &[P(0, 3), P(0, 2), R(0), R(3), R(4)]);
        let i = t.position(&P(0, 3)).unwrap();
        assert_eq!(t_doublecross(&t, &P(2, 1)), vec![i]);
        assert!(t_cross(&t, &P(2, 1)).contains(&i));
    }

    #[test]
    fn compatible_arcs_have_empty_gradings() {
        let t = TaggedTriangulation::wheel(s(4));
        for a in t.arcs() {
            assert!(t_cross(&t, a).is_empty());
            assert!(t_doublecross(&t, a).is_empty());
        }
    }

    #[test]
    fn loop_is_read_as_notched_radius() {
        let t = tri(4, &[R(0), RN(0), P(1, 3), P(0, 3)]);
        // R(2) crosses the loop at 0, P(1,3) and P(0,3) but not R(0)
        assert_eq!(t_cross(&t, &R(2)), vec![1, 2, 3]);
        // P(2,1) passes between 0 and the puncture, so it meets the loop twice
        let dc = t_doublecross(&t, &P(2, 1));
        assert!(dc.contains(&1) && !dc.contains(&0));
        assert!(dc.iter().all(|i| t_cross(&t, &P(2, 1)).contains(i)));
    }

    #[test]
    fn central_arcs_pick_the_outermost() {
        let s4 = s(4);
        assert_eq!(central_arcs(&s4, &[P(0, 2)]).unwrap(), vec![P(0, 2)]);
        // P(0,2) lies in the disk of P(0,3)
        assert_eq!(central_arcs(&s4, &[P(0, 2), P(0, 3)]).unwrap(), vec![P(0, 3)]);
        assert_eq!(central_arcs(&s4, &[R(0)]), Err(Error::NotPeripheral));
    }

    #[test]
    fn select_sigma_cases() {
        let wheel = TaggedTriangulation::wheel(s(4));
        let one = |a: TaggedArc| Multiset::from([(a, 1)]);
        assert_eq!(select_sigma(&one(R(0)), &wheel), Err(Error::NothingToProve));
        let c = select_sigma(&one(RN(1)), &wheel).unwrap();
        assert_eq!(c.rule, SigmaRule::NotchedRadiiMinusSigma);
        assert_eq!(c.gradings, vec![vec![0, 2, 3]]);
        let t = tri(4, &[P(0, 2), R(0), R(2), R(3)]);
        let c = select_sigma(&one(R(1)), &t).unwrap();
        assert_eq!(c.rule, SigmaRule::PlainRadius);
        assert_eq!(c.gradings, vec![t_cross(&t, &R(1))]);
        assert_eq!(c.gradings[0], vec![0]);
        let c = select_sigma(&Multiset::from([(P(1, 3), 1), (P(1, 0), 2)]), &wheel).unwrap();
        assert_eq!(c.sigma, P(1, 0));
    }

    #[test]
    fn proper_laurent_single_arcs() {
        let t = tri(5, &[P(0, 3), P(0, 2), R(0), R(3), R(4)]);
        for a in s(5).tagged_arcs().into_iter().filter(|a| !t.contains(a)) {
            let r = check_proper_laurent(&Multiset::from([(a, 1)]), &t).unwrap();
            assert!(r.ok && r.grading_ok, "{a}");
        }
        assert_eq!(check_proper_laurent(&Multiset::from([(P(0, 2), 1)]), &t).map(|r| r.ok), Err(Error::NothingToProve));
    }

    #[test]
    fn candidates_are_deduplicated() {
        let ts = enumerate_tagged_triangulations(s(4), 4).unwrap();
        let c = candidate_monomials(&ts, 1);
        assert_eq!(c.len(), 17);
        let c2 = candidate_monomials(&ts, 2);
        let keys: BTreeSet<&Multiset> = c2.iter().map(|x| &x.0).collect();
        assert_eq!(keys.len(), c2.len());
    }

    #[test]
    fn decompose_single_monomial() {
        let s4 = s(4);
        let wheel = TaggedTriangulation::wheel(s4);
        let ts = enumerate_tagged_triangulations(s4, 4).unwrap();
        let dec = Decomposer::new(&wheel, &ts, 2).unwrap();
        let gamma = Multiset::from([(P(1, 3), 1), (RN(1), 1)]);
        let y = dec.monomial(&gamma).unwrap();
        let d = dec.decompose(&y).unwrap();
        assert_eq!(d.terms, vec![(gamma, BigInt::one())]);
        assert!(d.is_exact() && d.is_positive());
        let d = dec.decompose(&unit(4)).unwrap();
        assert_eq!(d.terms, vec![(Multiset::new(), BigInt::one())]);
    }
}
