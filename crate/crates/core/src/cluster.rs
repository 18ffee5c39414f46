//! Exchange matrices, seed mutation and the mutation-based expansion oracle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::surface::{are_compatible, Side, TaggedArc};
use crate::snake::expand_tagged_via_matchings;
use crate::surface::Surface;
use crate::tpath::{expand_tagged, SweepTally};
use crate::triangulation::{enumerate_tagged_triangulations, Shape, TaggedTriangulation};

pub type ExchangeMatrix = Vec<Vec<i32>>;

/// Arcs with multiplicities; a cluster monomial when pairwise compatible.
pub type Multiset = BTreeMap<TaggedArc, u32>;

/// Signed adjacency of arcs in the triangles of T°: `+1` when the column
/// arc follows the row arc clockwise. The radius of a self-folded triangle
/// takes the row and column of its loop.
pub fn b_matrix(t: &TaggedTriangulation) -> ExchangeMatrix {
    if t.shape() == Shape::AllNotched {
        return b_matrix(&t.notched());
    }
    let ideal = t.ideal().expect("not all notched");
    let n = t.n();
    let folded = ideal.self_folded();
    let mut b = vec![vec![0; n]; n];
    let pos = |s: &Side| s.arc().map(|a| ideal.position(&a).unwrap());
    for tri in ideal.triangles().iter().filter(|x| !x.self_folded) {
        for i in 0..3 {
            if let (Some(p), Some(q)) = (pos(&tri.sides[i]), pos(&tri.sides[(i + 1) % 3])) {
                b[p][q] += 1;
                b[q][p] -= 1;
            }
        }
    }
    if let Some((ri, li)) = folded {
        for j in 0..n {
            b[ri][j] = b[li][j];
            b[j][ri] = b[j][li];
        }
        b[ri][li] = 0;
        b[li][ri] = 0;
    }
    b
}

pub fn mutate_matrix(b: &ExchangeMatrix, k: usize) -> ExchangeMatrix {
    let n = b.len();
    let mut out = b.clone();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    /// Arc naming each variable, kept in step with flips.
    pub cluster: TaggedTriangulation,
    pub b: ExchangeMatrix,
    /// Each variable expanded in the initial cluster.
    pub x: Vec<LaurentPoly>,
}

impl Seed {
    pub fn initial(t: &TaggedTriangulation) -> Seed {
        let n = t.n();
        Seed { cluster: t.clone(), b: b_matrix(t), x: (0..n).map(|i| LaurentPoly::var(n, i)).collect() }
    }

    /// Identity of the unlabeled seed: its set of variables.
    pub fn fingerprint(&self) -> Vec<LaurentPoly> {
        let mut v = self.x.clone();
        v.sort();
        v
    }

    /// Exchange relation at `k`. Fails if the division is not exact.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let nv = self.x[0].nvars();
        let mut plus = LaurentPoly::one(nv);
        let mut minus = LaurentPoly::one(nv);
        for (i, row) in self.b.iter().enumerate() {
            let e = row[k];
            if e > 0 {
                plus = &plus * &self.x[i].pow(e as u32);
            } else if e < 0 {
                minus = &minus * &self.x[i].pow((-e) as u32);
            }
        }
        let new = (&plus + &minus).div_exact(&self.x[k])?;
        let mut x = self.x.clone();
        x[k] = new;
        Ok(Seed { cluster: self.cluster.flip(k), b: mutate_matrix(&self.b, k), x })
    }
}

/// Every seed reachable by mutation, breadth first, identified by its set of
/// variables.
pub fn enumerate_seeds(initial: &Seed, bound: usize) -> Result<Vec<Seed>> {
    let n = initial.cluster.n();
    if n > bound {
        return Err(Error::BoundExceeded { n, bound });
    }
    let mut seen: BTreeSet<Vec<LaurentPoly>> = BTreeSet::new();
    seen.insert(initial.fingerprint());
    let mut out = vec![initial.clone()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for k in 0..n {
            let s = out[i].mutate(k)?;
            if seen.insert(s.fingerprint()) {
                out.push(s);
                queue.push_back(out.len() - 1);
            }
        }
    }
    Ok(out)
}

/// Expansions of all cluster variables in the cluster of `t`, collected by
/// mutation; each arc's expansion must agree across the seeds holding it.
#[derive(Clone, Debug)]
pub struct MutationOracle {
    pub initial: TaggedTriangulation,
    pub variables: BTreeMap<TaggedArc, LaurentPoly>,
}

impl MutationOracle {
    pub fn new(t: &TaggedTriangulation, bound: usize) -> Result<Self> {
        let mut variables: BTreeMap<TaggedArc, LaurentPoly> = BTreeMap::new();
        for seed in enumerate_seeds(&Seed::initial(t), bound)? {
            for (a, x) in seed.cluster.arcs().iter().zip(&seed.x) {
                if let Some(old) = variables.insert(*a, x.clone()) {
                    assert_eq!(old, *x, "{a} has two expansions");
                }
            }
        }
        Ok(MutationOracle { initial: t.clone(), variables })
    }

    pub fn expansion(&self, gamma: &TaggedArc) -> Option<&LaurentPoly> {
        self.variables.get(gamma)
    }
}

/// `x_γ` in the cluster of `t`, found by mutating until `γ` enters a seed.
pub fn expand_by_mutation(t: &TaggedTriangulation, gamma: &TaggedArc) -> Result<LaurentPoly> {
    t.surface().check_tagged(gamma)?;
    let initial = Seed::initial(t);
    let mut seen: BTreeSet<Vec<LaurentPoly>> = BTreeSet::new();
    seen.insert(initial.fingerprint());
    let mut queue = VecDeque::from([initial]);
    while let Some(s) = queue.pop_front() {
        if let Some(k) = s.cluster.position(gamma) {
            return Ok(s.x[k].clone());
        }
        for k in 0..t.n() {
            let u = s.mutate(k)?;
            if seen.insert(u.fingerprint()) {
                queue.push_back(u);
            }
        }
    }
    unreachable!("every tagged arc lies in some triangulation")
}

pub fn is_compatible_multiset(t: &TaggedTriangulation, sigma: &Multiset) -> bool {
    let arcs: Vec<&TaggedArc> = sigma.keys().collect();
    arcs.iter().enumerate().all(|(i, a)| arcs[i + 1..].iter().all(|b| are_compatible(&t.surface(), a, b)))
}

/// Product of the expansions, with multiplicity.
pub fn cluster_monomial_expand(t: &TaggedTriangulation, sigma: &Multiset) -> Result<LaurentPoly> {
    if !is_compatible_multiset(t, sigma) {
        return Err(Error::Incompatible);
    }
    let mut p = LaurentPoly::constant(t.n(), BigInt::one());
    for (a, &m) in sigma {
        p = &p * &expand_tagged(t, a)?.pow(m);
    }
    Ok(p)
}

/// T-paths, matchings and mutation agree on every (T, γ).
pub fn oracle_sweep(surface: Surface, bound: usize) -> Result<SweepTally> {
    use rayon::prelude::*;
    let ts = enumerate_tagged_triangulations(surface, bound)?;
    let per = ts
        .par_iter()
        .map(|t| {
            let oracle = MutationOracle::new(t, bound)?;
            let mut tally = SweepTally::default();
            for g in surface.tagged_arcs() {
                let a = expand_tagged(t, &g)?;
                let b = expand_tagged_via_matchings(t, &g)?;
                tally.pairs += 1;
                if Some(&a) != oracle.expansion(&g) || a != b {
                    tally.failures.push(format!("{t} {g}"));
                }
            }
            Ok(tally)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per.into_iter().fold(SweepTally::default(), |mut a, b| {
        a.pairs += b.pairs;
        a.failures.extend(b.failures);
        a
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_commute_with_mutation() {
        for n in [4, 5] {
            for t in enumerate_tagged_triangulations(Surface::new(n).unwrap(), 8).unwrap() {
                let b = b_matrix(&t);
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(b[i][j], -b[j][i]);
                        assert!(b[i][j].abs() <= 2);
                    }
                }
                for k in 0..n {
                    assert_eq!(b_matrix(&t.flip(k)), mutate_matrix(&b, k), "{t} at {k}");
                }
            }
        }
    }

    #[test]
    fn parallel_radii_share_rows() {
        let s = Surface::new(4).unwrap();
        let t = TaggedTriangulation::new(
            s,
            vec![TaggedArc::RadiusPlain(0), TaggedArc::RadiusNotched(0), TaggedArc::Peripheral(1, 3), TaggedArc::Peripheral(0, 3)],
        )
        .unwrap();
        let b = b_matrix(&t);
        assert_eq!(b[0], b[1]);
        assert_ne!(b[0], vec![0; 4]);
    }

    #[test]
    fn mutation_is_an_involution() {
        let s = Surface::new(5).unwrap();
        let seed = Seed::initial(&TaggedTriangulation::wheel(s));
        for k in 0..5 {
            assert_eq!(seed.mutate(k).unwrap().mutate(k).unwrap(), seed);
        }
    }

    #[test]
    fn seed_census_matches_flip_census() {
        for (n, count) in [(4, 50), (5, 182)] {
            let s = Surface::new(n).unwrap();
            let seeds = enumerate_seeds(&Seed::initial(&TaggedTriangulation::wheel(s)), 8).unwrap();
            assert_eq!(seeds.len(), count);
            let names: BTreeSet<Vec<TaggedArc>> = seeds.iter().map(|x| x.cluster.key()).collect();
            let flips: BTreeSet<Vec<TaggedArc>> =
                enumerate_tagged_triangulations(s, 8).unwrap().iter().map(|t| t.key()).collect();
            assert_eq!(names, flips);
            let vars: BTreeSet<&LaurentPoly> = seeds.iter().flat_map(|x| x.x.iter()).collect();
            assert_eq!(vars.len(), n * n);
        }
    }
}
