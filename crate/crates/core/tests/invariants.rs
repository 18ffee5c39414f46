//! Randomized invariants over arithmetic, geometry and the expansion
//! engines.

use std::sync::OnceLock;

use num_bigint::BigInt;
use proptest::prelude::*;

use clusterd::atomic::check_proper_laurent;
use clusterd::cluster::{b_matrix, mutate_matrix, Multiset, Seed};
use clusterd::laurent::{default_names, LaurentPoly};
use clusterd::snake::{build_snake, enumerate_matchings, expand_tagged_via_matchings, transfer_count};
use clusterd::surface::{
    are_compatible, crossing_number, parse_arc_term, tagged_crossing_number, Surface, TaggedArc,
};
use clusterd::tpath::{expand_tagged, ordinary_arcs, tpaths_of};
use clusterd::triangulation::{enumerate_tagged_triangulations, TaggedTriangulation};

fn triangulations(n: usize) -> &'static [TaggedTriangulation] {
    static CACHE: [OnceLock<Vec<TaggedTriangulation>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[n - 4].get_or_init(|| enumerate_tagged_triangulations(Surface::new(n).unwrap(), 8).unwrap())
}

fn poly(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-3i32..4, nvars), -20i64..21), 0..6)
        .prop_map(move |terms| LaurentPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// (n, triangulation index, arc index)
fn pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (4usize..=5).prop_flat_map(|n| (Just(n), 0..triangulations(n).len(), 0..n * n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(p in poly(4)) {
        let names = default_names(4);
        prop_assert_eq!(LaurentPoly::parse(&p.to_text(&names), &names).unwrap(), p);
    }

    #[test]
    fn ring_laws(a in poly(3), b in poly(3), c in poly(3)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&(&a - &b) + &b) == a);
    }

    #[test]
    fn exact_division_undoes_multiplication(a in poly(3), b in poly(3)) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn arc_text_round_trip((n, _, g) in pair()) {
        let a = Surface::new(n).unwrap().tagged_arcs()[g];
        let back = parse_arc_term(&a.to_string(), n).unwrap().tagged(&Surface::new(n).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn crossing_is_symmetric(n in 4usize..=6, i in 0usize..64, j in 0usize..64) {
        let s = Surface::new(n).unwrap();
        let arcs = ordinary_arcs(&s);
        let (a, b) = (arcs[i % arcs.len()], arcs[j % arcs.len()]);
        prop_assert_eq!(crossing_number(&s, &a, &b), crossing_number(&s, &b, &a));
        prop_assert_eq!(crossing_number(&s, &a, &a), 0);
        let tags = s.tagged_arcs();
        let (x, y) = (tags[i % tags.len()], tags[j % tags.len()]);
        prop_assert_eq!(tagged_crossing_number(&s, &x, &y), tagged_crossing_number(&s, &y, &x));
        prop_assert_eq!(are_compatible(&s, &x, &y), are_compatible(&s, &y, &x));
    }

    #[test]
    fn flips_are_involutions((n, ti, k) in pair()) {
        let t = &triangulations(n)[ti];
        let k = k % n;
        let u = t.flip(k);
        prop_assert_ne!(u.arcs()[k], t.arcs()[k]);
        prop_assert_eq!(&u.flip(k), t);
        prop_assert_eq!(b_matrix(&u), mutate_matrix(&b_matrix(t), k));
    }

    #[test]
    fn seeds_mutate_back((n, ti, k) in pair()) {
        let seed = Seed::initial(&triangulations(n)[ti]);
        let k = k % n;
        prop_assert_eq!(seed.mutate(k).unwrap().mutate(k).unwrap(), seed);
    }

    #[test]
    fn engines_agree_and_are_positive((n, ti, g) in pair()) {
        let t = &triangulations(n)[ti];
        let gamma = t.surface().tagged_arcs()[g];
        let x = expand_tagged(t, &gamma).unwrap();
        prop_assert_eq!(&x, &expand_tagged_via_matchings(t, &gamma).unwrap());
        prop_assert!(x.all_coefficients_positive());
        if t.contains(&gamma) {
            prop_assert_eq!(x, LaurentPoly::var(n, t.position(&gamma).unwrap()));
        }
    }

    #[test]
    fn path_and_matching_counts_agree(n in 4usize..=6, ti in 0usize..10_000, g in 0usize..64) {
        let s = Surface::new(n).unwrap();
        let ts = triangulations(n);
        let Ok(ideal) = ts[ti % ts.len()].ideal() else { return Ok(()) };
        let arcs = ordinary_arcs(&s);
        let gamma = arcs[g % arcs.len()];
        prop_assume!(!ideal.contains(&gamma));
        let seq = ideal.crossing_sequence(&gamma, false).unwrap();
        let paths = tpaths_of(&seq).len();
        let g = build_snake(&seq);
        prop_assert_eq!(paths, enumerate_matchings(&g).len());
        prop_assert_eq!(paths as u128, transfer_count(&seq));
        prop_assert_eq!(g.vertex_count, 2 * seq.d() + 2);
        prop_assert_eq!(g.edges.len(), 3 * seq.d() + 1);
        // orientation does not matter
        let back = ideal.crossing_sequence(&gamma, true).unwrap();
        prop_assert_eq!(tpaths_of(&back).len(), paths);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Multiplicity three, sampled; the exhaustive sweep stops at two.
    #[test]
    fn cluster_monomials_of_multiplicity_three_are_proper(
        ti in 0usize..50,
        owner in 0usize..50,
        picks in prop::collection::vec((0usize..4, 1u32..=3), 1..4),
    ) {
        let ts = triangulations(4);
        let (t, source) = (&ts[ti], &ts[owner]);
        let sigma: Multiset = picks.iter().map(|&(k, m)| (source.arcs()[k], m)).collect();
        prop_assume!(sigma.keys().any(|a| !t.contains(a)));
        let report = check_proper_laurent(&sigma, t).unwrap();
        prop_assert!(report.ok, "{:?}", report.witness);
        prop_assert!(report.grading_ok);
    }
}

#[test]
fn incompatible_multisets_are_rejected() {
    let s = Surface::new(4).unwrap();
    let t = TaggedTriangulation::wheel(s);
    let sigma: Multiset = [(TaggedArc::Peripheral(0, 2), 1), (TaggedArc::Peripheral(1, 3), 1)].into_iter().collect();
    assert!(check_proper_laurent(&sigma, &t).is_err());
}
