//! The once-punctured n-gon: arcs, tags, compatibility and crossing numbers.
//!
//! Boundary vertices are `0..n` in clockwise order. Crossings are counted in
//! the universal cover of the punctured disk, modelled as a half-plane whose
//! boundary line carries the integers (vertex `a` lies over `a mod n`) and
//! whose point at infinity is the puncture. Moving right along the line is
//! moving clockwise along the boundary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surface {
    n: usize,
}

impl Surface {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::SurfaceTooSmall(n));
        }
        Ok(Surface { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Clockwise distance from `i` to `j`.
    pub fn cw(&self, i: usize, j: usize) -> usize {
        (j + self.n - i % self.n) % self.n
    }

    pub fn check_ordinary(&self, arc: &OrdinaryArc) -> Result<()> {
        let n = self.n;
        let ok = match *arc {
            OrdinaryArc::Peripheral(i, j) => i < n && j < n && self.cw(i, j) >= 2,
            OrdinaryArc::Loop(i) | OrdinaryArc::Radius(i) => i < n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArc(arc.to_string(), n))
        }
    }

    pub fn check_tagged(&self, arc: &TaggedArc) -> Result<()> {
        self.check_ordinary(&iota_inverse(arc))
            .map_err(|_| Error::InvalidArc(arc.to_string(), self.n))
    }

    /// All tagged arcs: peripherals by `(i, j)`, then plain radii, then notched.
    pub fn tagged_arcs(&self) -> Vec<TaggedArc> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let mut js: Vec<usize> = (2..n).map(|d| (i + d) % n).collect();
            js.sort_unstable();
            out.extend(js.into_iter().map(|j| TaggedArc::Peripheral(i, j)));
        }
        out.extend((0..n).map(TaggedArc::RadiusPlain));
        out.extend((0..n).map(TaggedArc::RadiusNotched));
        out
    }

    /// The lift of `arc` whose left endpoint lies in `0..n`.
    pub fn lift(&self, arc: &OrdinaryArc) -> Lift {
        let n = self.n as i64;
        match *arc {
            OrdinaryArc::Peripheral(i, j) => {
                let a = i as i64;
                Lift::Chord(a, a + self.cw(i, j) as i64)
            }
            OrdinaryArc::Loop(i) => Lift::Chord(i as i64, i as i64 + n),
            OrdinaryArc::Radius(i) => Lift::Ray(i as i64),
        }
    }

    /// Names the base curve under a chord `[p, q]` of the cover, if any.
    pub fn chord_side(&self, p: i64, q: i64) -> Option<Side> {
        let n = self.n as i64;
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        let i = p.rem_euclid(n) as usize;
        match q - p {
            1 => Some(Side::Boundary(i)),
            d if d == n => Some(Side::Arc(OrdinaryArc::Loop(i))),
            d if d >= 2 && d < n => Some(Side::Arc(OrdinaryArc::Peripheral(
                i,
                q.rem_euclid(n) as usize,
            ))),
            _ => None,
        }
    }

    pub fn ray_side(&self, c: i64) -> Side {
        Side::Arc(OrdinaryArc::Radius(c.rem_euclid(self.n as i64) as usize))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrdinaryArc {
    Peripheral(usize, usize),
    Loop(usize),
    Radius(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaggedArc {
    Peripheral(usize, usize),
    RadiusPlain(usize),
    RadiusNotched(usize),
}

impl TaggedArc {
    pub fn is_peripheral(&self) -> bool {
        matches!(self, TaggedArc::Peripheral(..))
    }

    pub fn is_radius(&self) -> bool {
        !self.is_peripheral()
    }

    /// Base vertex of a radius.
    pub fn radius_vertex(&self) -> Option<usize> {
        match *self {
            TaggedArc::RadiusPlain(i) | TaggedArc::RadiusNotched(i) => Some(i),
            TaggedArc::Peripheral(..) => None,
        }
    }
}

/// Edge of an ideal triangle: an arc or the boundary edge from `i` to `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Arc(OrdinaryArc),
    Boundary(usize),
}

impl Side {
    pub fn arc(&self) -> Option<OrdinaryArc> {
        match *self {
            Side::Arc(a) => Some(a),
            Side::Boundary(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lift {
    Chord(i64, i64),
    Ray(i64),
}

impl Lift {
    pub fn shift(self, by: i64) -> Lift {
        match self {
            Lift::Chord(p, q) => Lift::Chord(p + by, q + by),
            Lift::Ray(c) => Lift::Ray(c + by),
        }
    }

    /// Strict interleaving of lifts; shared endpoints do not count.
    pub fn crosses(&self, other: &Lift) -> bool {
        match (*self, *other) {
            (Lift::Chord(p, q), Lift::Chord(r, s)) => (p < r && r < q && q < s) || (r < p && p < s && s < q),
            (Lift::Chord(p, q), Lift::Ray(c)) | (Lift::Ray(c), Lift::Chord(p, q)) => p < c && c < q,
            (Lift::Ray(_), Lift::Ray(_)) => false,
        }
    }
}

pub fn iota(arc: &OrdinaryArc) -> TaggedArc {
    match *arc {
        OrdinaryArc::Peripheral(i, j) => TaggedArc::Peripheral(i, j),
        OrdinaryArc::Loop(i) => TaggedArc::RadiusNotched(i),
        OrdinaryArc::Radius(i) => TaggedArc::RadiusPlain(i),
    }
}

pub fn iota_inverse(arc: &TaggedArc) -> OrdinaryArc {
    match *arc {
        TaggedArc::Peripheral(i, j) => OrdinaryArc::Peripheral(i, j),
        TaggedArc::RadiusPlain(i) => OrdinaryArc::Radius(i),
        TaggedArc::RadiusNotched(i) => OrdinaryArc::Loop(i),
    }
}

/// The curve a tagged arc runs along, ignoring its tag at the puncture.
pub fn underlying_curve(arc: &TaggedArc) -> OrdinaryArc {
    match *arc {
        TaggedArc::Peripheral(i, j) => OrdinaryArc::Peripheral(i, j),
        TaggedArc::RadiusPlain(i) | TaggedArc::RadiusNotched(i) => OrdinaryArc::Radius(i),
    }
}

pub fn notch_at_puncture(arc: &TaggedArc) -> TaggedArc {
    match *arc {
        TaggedArc::Peripheral(i, j) => TaggedArc::Peripheral(i, j),
        TaggedArc::RadiusPlain(i) => TaggedArc::RadiusNotched(i),
        TaggedArc::RadiusNotched(i) => TaggedArc::RadiusPlain(i),
    }
}

/// Number of lifts of `b` crossing one fixed lift of `a`.
pub fn crossing_number(s: &Surface, a: &OrdinaryArc, b: &OrdinaryArc) -> usize {
    let n = s.n() as i64;
    let la = s.lift(a);
    let lb = s.lift(b);
    (-2..=2).filter(|m| la.crosses(&lb.shift(m * n))).count()
}

/// Crossing number of tagged arcs. Two radii cross once when they differ in
/// both tag and endpoint and never otherwise; every other pair is measured
/// on the ordinary arcs obtained by `iota_inverse`.
pub fn tagged_crossing_number(s: &Surface, a: &TaggedArc, b: &TaggedArc) -> usize {
    match (a.radius_vertex(), b.radius_vertex()) {
        (Some(u), Some(v)) => {
            let same_tag = std::mem::discriminant(a) == std::mem::discriminant(b);
            usize::from(!same_tag && u != v)
        }
        _ => crossing_number(s, &iota_inverse(a), &iota_inverse(b)),
    }
}

pub fn are_compatible(s: &Surface, a: &TaggedArc, b: &TaggedArc) -> bool {
    a == b || tagged_crossing_number(s, a, b) == 0
}

pub fn ordinary_compatible(s: &Surface, a: &OrdinaryArc, b: &OrdinaryArc) -> bool {
    a == b || crossing_number(s, a, b) == 0
}

/// True iff every member of `sigma` belongs to `t`.
pub fn is_compatible_with(sigma: &[TaggedArc], t: &[TaggedArc]) -> bool {
    sigma.iter().all(|a| t.contains(a))
}

/// Peripheral arcs in order of distance from the puncture: `D(a)` is the
/// puncture-free side, so `b` lies in `D(a)` when both endpoints of `b` are
/// vertices of `D(a)` and `b != a`.
pub fn lies_in_disk(s: &Surface, b: &TaggedArc, a: &TaggedArc) -> bool {
    match (*a, *b) {
        (TaggedArc::Peripheral(i, j), TaggedArc::Peripheral(k, l)) => {
            if (i, j) == (k, l) {
                return false;
            }
            let d = s.cw(i, j);
            s.cw(i, k) <= d && s.cw(i, l) <= d && s.cw(i, k) < s.cw(i, l)
        }
        _ => false,
    }
}

impl fmt::Display for OrdinaryArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrdinaryArc::Peripheral(i, j) => write!(f, "P({i},{j})"),
            OrdinaryArc::Loop(i) => write!(f, "L({i})"),
            OrdinaryArc::Radius(i) => write!(f, "R({i})"),
        }
    }
}

impl fmt::Display for TaggedArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TaggedArc::Peripheral(i, j) => write!(f, "P({i},{j})"),
            TaggedArc::RadiusPlain(i) => write!(f, "R({i})"),
            TaggedArc::RadiusNotched(i) => write!(f, "RN({i})"),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Arc(a) => write!(f, "{a}"),
            Side::Boundary(i) => write!(f, "B({i})"),
        }
    }
}

/// A parsed arc term before it is checked against a surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcTerm {
    P(usize, usize),
    R(usize),
    RN(usize),
    L(usize),
    B(usize),
}

impl ArcTerm {
    pub fn tagged(self, s: &Surface) -> Result<TaggedArc> {
        let arc = match self {
            ArcTerm::P(i, j) => TaggedArc::Peripheral(i, j),
            ArcTerm::R(i) => TaggedArc::RadiusPlain(i),
            ArcTerm::RN(i) | ArcTerm::L(i) => TaggedArc::RadiusNotched(i),
            ArcTerm::B(i) => return Err(Error::InvalidArc(format!("B({i})"), s.n())),
        };
        s.check_tagged(&arc)?;
        Ok(arc)
    }

    pub fn ordinary(self, s: &Surface) -> Result<OrdinaryArc> {
        let arc = match self {
            ArcTerm::P(i, j) => OrdinaryArc::Peripheral(i, j),
            ArcTerm::R(i) => OrdinaryArc::Radius(i),
            ArcTerm::L(i) | ArcTerm::RN(i) => OrdinaryArc::Loop(i),
            ArcTerm::B(i) => return Err(Error::InvalidArc(format!("B({i})"), s.n())),
        };
        s.check_ordinary(&arc)?;
        Ok(arc)
    }
}

/// Parses one arc term; vertices are reduced mod `n`.
pub fn parse_arc_term(text: &str, n: usize) -> Result<ArcTerm> {
    let terms = parse_arc_list(text, n)?;
    match terms.as_slice() {
        [t] => Ok(*t),
        _ => Err(Error::Parse {
            pos: 0,
            msg: format!("expected exactly one arc in `{text}`"),
        }),
    }
}

/// Parses a comma separated list of arc terms, e.g. `R(0), RN(0), P(1,3)`.
pub fn parse_arc_list(text: &str, n: usize) -> Result<Vec<ArcTerm>> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut pos = 0;
    let mut out = Vec::new();
    let err = |at: usize, msg: &str| Error::Parse {
        pos: chars.get(at).map(|c| c.0).unwrap_or(text.len()),
        msg: msg.to_string(),
    };
    while pos < chars.len() {
        let start = pos;
        let mut head = String::new();
        while pos < chars.len() && chars[pos].1.is_ascii_alphabetic() {
            head.push(chars[pos].1.to_ascii_uppercase());
            pos += 1;
        }
        if pos >= chars.len() || chars[pos].1 != '(' {
            return Err(err(pos, "expected `(`"));
        }
        pos += 1;
        let mut nums = Vec::new();
        loop {
            let num_start = pos;
            while pos < chars.len() && chars[pos].1.is_ascii_digit() {
                pos += 1;
            }
            if num_start == pos {
                return Err(err(pos, "expected a vertex number"));
            }
            let digits: String = chars[num_start..pos].iter().map(|c| c.1).collect();
            let v: usize = digits.parse().map_err(|_| err(num_start, "vertex number too large"))?;
            nums.push(v % n);
            match chars.get(pos).map(|c| c.1) {
                Some(',') => pos += 1,
                Some(')') => {
                    pos += 1;
                    break;
                }
                _ => return Err(err(pos, "expected `,` or `)`")),
            }
        }
        let term = match (head.as_str(), nums.as_slice()) {
            ("P", [i, j]) => ArcTerm::P(*i, *j),
            ("R", [i]) => ArcTerm::R(*i),
            ("RN", [i]) => ArcTerm::RN(*i),
            ("L", [i]) => ArcTerm::L(*i),
            ("B", [i]) => ArcTerm::B(*i),
            _ => return Err(err(start, "unknown arc kind or wrong number of vertices")),
        };
        out.push(term);
        match chars.get(pos).map(|c| c.1) {
            None => {}
            Some(',') => {
                pos += 1;
                if pos >= chars.len() {
                    return Err(err(pos, "trailing `,`"));
                }
            }
            Some(_) => return Err(err(pos, "expected `,` between arcs")),
        }
    }
    if out.is_empty() {
        return Err(err(0, "no arcs given"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize) -> Surface {
        Surface::new(n).unwrap()
    }

    #[test]
    fn small_surfaces_rejected() {
        assert!(Surface::new(3).is_err());
        assert!(Surface::new(4).is_ok());
    }

    #[test]
    fn tagged_arc_census() {
        for n in 4..=8 {
            let arcs = s(n).tagged_arcs();
            assert_eq!(arcs.len(), n * n);
            let mut dedup = arcs.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), n * n);
        }
        let a4 = s(4).tagged_arcs();
        assert!(a4.contains(&TaggedArc::RadiusNotched(0)));
        assert!(a4.contains(&TaggedArc::Peripheral(0, 2)));
    }

    #[test]
    fn iota_round_trip() {
        assert_eq!(iota(&OrdinaryArc::Loop(2)), TaggedArc::RadiusNotched(2));
        assert_eq!(iota(&OrdinaryArc::Radius(0)), TaggedArc::RadiusPlain(0));
        assert_eq!(iota_inverse(&TaggedArc::RadiusNotched(2)), OrdinaryArc::Loop(2));
        assert_eq!(iota_inverse(&TaggedArc::RadiusPlain(1)), OrdinaryArc::Radius(1));
        assert_eq!(iota_inverse(&TaggedArc::Peripheral(0, 2)), OrdinaryArc::Peripheral(0, 2));
        for a in s(6).tagged_arcs() {
            assert_eq!(iota(&iota_inverse(&a)), a);
            assert_eq!(notch_at_puncture(&notch_at_puncture(&a)), a);
            assert_eq!(notch_at_puncture(&a) == a, a.is_peripheral());
        }
    }

    #[test]
    fn crossing_examples() {
        let s5 = s(5);
        let a = OrdinaryArc::Peripheral(0, 3);
        let b = OrdinaryArc::Peripheral(2, 1);
        assert_eq!(crossing_number(&s5, &a, &b), 2);
        let s4 = s(4);
        assert_eq!(crossing_number(&s4, &OrdinaryArc::Loop(0), &OrdinaryArc::Radius(2)), 1);
        assert_eq!(
            crossing_number(&s4, &OrdinaryArc::Peripheral(1, 3), &OrdinaryArc::Peripheral(3, 1)),
            0
        );
    }

    #[test]
    fn compatibility_examples() {
        let s4 = s(4);
        assert!(are_compatible(&s4, &TaggedArc::RadiusPlain(0), &TaggedArc::RadiusNotched(0)));
        assert!(!are_compatible(&s4, &TaggedArc::RadiusPlain(0), &TaggedArc::RadiusNotched(2)));
        assert!(are_compatible(&s4, &TaggedArc::Peripheral(0, 2), &TaggedArc::Peripheral(0, 2)));
        assert!(are_compatible(&s4, &TaggedArc::RadiusNotched(1), &TaggedArc::RadiusNotched(3)));
    }

    #[test]
    fn membership_compatibility() {
        let t = [TaggedArc::RadiusPlain(0), TaggedArc::Peripheral(1, 3)];
        assert!(is_compatible_with(&[TaggedArc::RadiusPlain(0)], &t));
        assert!(!is_compatible_with(&[TaggedArc::RadiusPlain(1)], &t));
        assert!(is_compatible_with(&[], &t));
    }

    #[test]
    fn parse_grammar() {
        let terms = parse_arc_list(" p( 1 , 3 ),R(0), rn(2) ,L(5),B(1)", 4).unwrap();
        assert_eq!(
            terms,
            vec![ArcTerm::P(1, 3), ArcTerm::R(0), ArcTerm::RN(2), ArcTerm::L(1), ArcTerm::B(1)]
        );
        match parse_arc_list("P(1,3", 4) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_arc_list("Q(1)", 4).is_err());
        assert!(parse_arc_term("P(0,1)", 4).unwrap().tagged(&s(4)).is_err());
    }

    #[test]
    fn disk_containment() {
        let s6 = s(6);
        let outer = TaggedArc::Peripheral(0, 4);
        assert!(lies_in_disk(&s6, &TaggedArc::Peripheral(1, 3), &outer));
        assert!(lies_in_disk(&s6, &TaggedArc::Peripheral(0, 2), &outer));
        assert!(!lies_in_disk(&s6, &outer, &TaggedArc::Peripheral(1, 3)));
        assert!(!lies_in_disk(&s6, &TaggedArc::Peripheral(4, 0), &outer));
    }
}
