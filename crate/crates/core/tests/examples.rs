//! Worked configurations: path lists, matchings and expansions checked
//! against hand-derived values.

use std::collections::{BTreeMap, BTreeSet};

use clusterd::fixtures::{fixture, Fixture};
use clusterd::laurent::{default_names, LaurentPoly};
use clusterd::snake::{build_snake, enumerate_matchings, expand_tagged_via_matchings, matching_to_path, restricts_to_tile};
use clusterd::surface::iota;
use clusterd::tpath::{expand_tagged, path_monomial, path_numerator, tpaths_of, CycleClass, TPath};

fn labels_of(f: &Fixture, p: &TPath) -> String {
    p.steps.iter().map(|s| f.labels.name(&f.ideal, s)).collect::<Vec<_>>().join(",")
}

fn path_set(f: &Fixture) -> BTreeSet<String> {
    tpaths_of(&f.crossing_sequence().unwrap()).iter().map(|p| labels_of(f, p)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn expansion(f: &Fixture) -> LaurentPoly {
    expand_tagged(&f.tagged(), &iota(&f.gamma.unwrap())).unwrap()
}

#[test]
fn two_radii_paths_and_expansion() {
    let f = fixture("two-radii").unwrap();
    assert_eq!(
        path_set(&f),
        set(&["b1,1,2,2,4,3,b3", "b1,1,2,2,2,3,4", "b4,1,b2,2,2,3,4", "b4,1,b2,2,4,3,b3", "b4,1,1,2,3,3,b3"])
    );
    let x = expansion(&f);
    assert_eq!(x.to_text(&default_names(4)), "(x2^2*x4 + 2*x2*x4 + x4 + x1*x3)/(x1*x2*x3)");
    assert_eq!(x, expand_tagged_via_matchings(&f.tagged(), &iota(&f.gamma.unwrap())).unwrap());
}

#[test]
fn around_folded_nine_paths() {
    let f = fixture("around-folded").unwrap();
    let expected = set(&[
        "b4,1,b2,2,b3,l,r,r,l,l,b3",
        "b4,1,1,2,l,l,r,r,l,l,b3",
        "b1,1,2,2,2,l,l,r,r,l,2",
        "b1,1,2,2,b3,l,r,r,l,l,b3",
        "b4,1,b2,2,2,l,l,r,r,l,2",
        "b4,1,b2,2,2,l,l,r,r,l,b3",
        "b4,1,b2,2,2,l,r,r,l,l,b3",
        "b1,1,2,2,2,l,l,r,r,l,b3",
        "b1,1,2,2,2,l,r,r,l,l,b3",
    ]);
    assert_eq!(path_set(&f), expected);
    let paths = tpaths_of(&f.crossing_sequence().unwrap());
    let with_nb: BTreeSet<String> = paths.iter().filter(|p| p.has_non_backtrack()).map(|p| labels_of(&f, p)).collect();
    assert_eq!(
        with_nb,
        set(&["b4,1,b2,2,2,l,l,r,r,l,b3", "b4,1,b2,2,2,l,r,r,l,l,b3", "b1,1,2,2,2,l,l,r,r,l,b3", "b1,1,2,2,2,l,r,r,l,l,b3"])
    );
    // every non-backtrack runs counterclockwise
    for p in &paths {
        assert!(!p.marks.contains(&CycleClass::NonBacktrackCw));
    }
}

#[test]
fn around_folded_expansion() {
    let f = fixture("around-folded").unwrap();
    // positions: 1, 2, r, r⋈
    let x = |i| LaurentPoly::var(4, i);
    let one = LaurentPoly::one(4);
    let numerator = &(&x(1) + &one).pow(3) + &(&(&x(0) * &x(2)) * &x(3));
    let expected = numerator.mul_monomial(&[-1, -1, -1, -1], &1.into());
    assert_eq!(expansion(&f), expected);
    assert_eq!(expansion(&f).to_text(&default_names(4)), "(x1*x3*x4 + x2^3 + 3*x2^2 + 3*x2 + 1)/(x1*x2*x3*x4)");
}

#[test]
fn around_folded_second_path_monomial() {
    let f = fixture("around-folded").unwrap();
    let seq = f.crossing_sequence().unwrap();
    let p = tpaths_of(&seq).into_iter().find(|p| labels_of(&f, p) == "b4,1,1,2,l,l,r,r,l,l,b3").unwrap();
    // odd steps b4, 1, l, r, l, b3 over the crossings 1, 2, l, r, l
    assert_eq!(path_numerator(&f.ideal, &p), vec![1, 0, 1, 2]);
    assert_eq!(path_monomial(&f.ideal, &p), vec![0, -1, 0, 0]);
}

#[test]
fn around_folded_matchings() {
    let f = fixture("around-folded").unwrap();
    let seq = f.crossing_sequence().unwrap();
    let g = build_snake(&seq);
    assert_eq!(g.d(), 5);
    let ms = enumerate_matchings(&g);
    assert_eq!(ms.len(), 9);
    let paths = tpaths_of(&seq);
    // the tile of r is the only one through the self-folded triangle; the
    // matchings perfect on it are those giving non-backtracks
    let r_tile = seq.arcs.iter().position(|a| f.ideal.position(a) == Some(2)).unwrap();
    let mut perfect = 0;
    for m in &ms {
        let w = matching_to_path(&g, m).unwrap();
        let p = paths.iter().find(|p| p.lifted == w).unwrap();
        if restricts_to_tile(&g, m, r_tile) {
            perfect += 1;
            assert!(p.has_non_backtrack(), "{}", labels_of(&f, p));
        } else {
            assert!(!p.has_non_backtrack(), "{}", labels_of(&f, p));
        }
    }
    assert_eq!(perfect, 4);
}

#[test]
fn loop_on_wheel_quasi_backtracks() {
    let f = fixture("loop-on-wheel").unwrap();
    assert_eq!(path_set(&f), set(&["b1,1,2,2,3,3,t", "t,1,b2,2,3,3,t", "t,1,1,2,b3,3,t", "t,1,1,2,2,3,b4"]));
    for p in tpaths_of(&f.crossing_sequence().unwrap()) {
        assert!(p.has_quasi_backtrack(), "{}", labels_of(&f, &p));
    }
}

#[test]
fn radii_and_peripheral_paths_and_marks() {
    let f = fixture("radii-and-peripheral").unwrap();
    assert_eq!(
        path_set(&f),
        set(&["b1,1,2,2,2,3,b4", "0,1,b2,2,2,3,b4", "0,1,1,2,3,3,b3", "0,1,b2,2,0,3,b3", "b1,1,2,2,0,3,b3"])
    );
    use CycleClass::{Backtrack as B, NotACycle as N, QuasiBacktrack as Q};
    let marks: BTreeMap<String, Vec<CycleClass>> =
        tpaths_of(&f.crossing_sequence().unwrap()).iter().map(|p| (labels_of(&f, p), p.marks.clone())).collect();
    let expected: BTreeMap<String, Vec<CycleClass>> = [
        ("b1,1,2,2,0,3,b3", vec![N, N, Q, N, N, N]),
        ("b1,1,2,2,2,3,b4", vec![N, N, Q, B, N, N]),
        ("0,1,b2,2,0,3,b3", vec![N; 6]),
        // the second 2 ends at the puncture side of the radius, so this is a
        // plain backtrack rather than a detour around the puncture
        ("0,1,b2,2,2,3,b4", vec![N, N, N, B, N, N]),
        ("0,1,1,2,3,3,b3", vec![N, Q, N, N, B, N]),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b))
    .collect();
    assert_eq!(marks, expected);
}

#[test]
fn denominators_count_crossings() {
    let f = fixture("around-folded").unwrap();
    let seq = f.crossing_sequence().unwrap();
    let crossed: Vec<usize> = seq.arcs.iter().map(|a| f.ideal.position(a).unwrap()).collect();
    assert_eq!(crossed, vec![0, 1, 3, 2, 3]);
}
