//! Exact Laurent polynomials with integer coefficients.
//!
//! Variables are positions `0..nvars` (the arcs of a reference triangulation
//! in their listed order). Exponent vectors are dense; the term map never
//! stores a zero coefficient, so structural equality is polynomial equality.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Exps = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub coeff: BigInt,
    pub exps: Exps,
}

impl Monomial {
    pub fn is_proper_laurent(&self) -> bool {
        is_proper_laurent_monomial(&self.exps)
    }
}

/// Some exponent is negative.
pub fn is_proper_laurent_monomial(exps: &[i32]) -> bool {
    exps.iter().any(|&e| e < 0)
}

/// Sum of the exponents of the variables in `subset`.
pub fn degree_wrt(exps: &[i32], subset: &[usize]) -> i64 {
    subset.iter().map(|&i| i64::from(exps[i])).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exps, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(nvars, vec![0; nvars], BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c.into())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, BigInt::one())
    }

    pub fn monomial(nvars: usize, exps: Exps, coeff: BigInt) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        LaurentPoly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigInt)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(e, c)| Monomial { coeff: c.clone(), exps: e.clone() })
    }

    pub fn coeff(&self, exps: &[i32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() == 1 {
            self.monomials().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exps: Exps, c: BigInt) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &[i32], c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Smallest exponent of each variable over all terms.
    pub fn min_exponents(&self) -> Exps {
        let mut m = vec![i32::MAX; self.nvars];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        if self.terms.is_empty() {
            m.iter_mut().for_each(|a| *a = 0);
        }
        m
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Exact quotient, failing when `other` does not divide `self`.
    pub fn div_exact(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        assert_eq!(self.nvars, other.nvars);
        if other.is_zero() {
            return Err(Error::InexactDivision);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if let Some(m) = other.as_monomial() {
            let neg: Exps = m.exps.iter().map(|e| -e).collect();
            let mut out = Self::zero(self.nvars);
            for (e, c) in &self.terms {
                if !(c % &m.coeff).is_zero() {
                    return Err(Error::InexactDivision);
                }
                out.add_term(e.iter().zip(&neg).map(|(a, b)| a + b).collect(), c / &m.coeff);
            }
            return Ok(out);
        }
        let alpha = self.min_exponents();
        let beta = other.min_exponents();
        let a = self.mul_monomial(&alpha.iter().map(|e| -e).collect::<Vec<_>>(), &BigInt::one());
        let b = other.mul_monomial(&beta.iter().map(|e| -e).collect::<Vec<_>>(), &BigInt::one());
        let (lead_e, lead_c) = b.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = a;
        let mut quot = Self::zero(self.nvars);
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(x, y)| x < y) || !(&c % &lead_c).is_zero() {
                return Err(Error::InexactDivision);
            }
            let te: Exps = e.iter().zip(&lead_e).map(|(x, y)| x - y).collect();
            let tc = &c / &lead_c;
            rem = &rem - &b.mul_monomial(&te, &tc);
            quot.add_term(te, tc);
        }
        let shift: Exps = alpha.iter().zip(&beta).map(|(x, y)| x - y).collect();
        Ok(quot.mul_monomial(&shift, &BigInt::one()))
    }

    /// Ring homomorphism sending variable `i` to `images[i]`. A variable that
    /// occurs with a negative exponent must map to a monomial.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<LaurentPoly> {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = LaurentPoly::zero(target);
        let mut cache: BTreeMap<(usize, i32), LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = match cache.get(&(i, k)) {
                    Some(f) => f.clone(),
                    None => {
                        let f = if k > 0 {
                            images[i].pow(k as u32)
                        } else {
                            let m = images[i].as_monomial().ok_or(Error::NonMonomialSubstitution)?;
                            if !m.coeff.abs().is_one() {
                                return Err(Error::NonMonomialSubstitution);
                            }
                            let inv_e: Exps = m.exps.iter().map(|x| -x).collect();
                            LaurentPoly::monomial(target, inv_e, m.coeff.clone()).pow((-k) as u32)
                        };
                        cache.insert((i, k), f.clone());
                        f
                    }
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitution that also allows negative exponents on non-monomial
    /// images, dividing exactly at the end.
    pub fn substitute_exact(&self, images: &[LaurentPoly]) -> Result<LaurentPoly> {
        let mins = self.min_exponents();
        let shift: Exps = mins.iter().map(|&m| if m < 0 { -m } else { 0 }).collect();
        let numer = self.mul_monomial(&shift, &BigInt::one()).substitute(images)?;
        let target = numer.nvars;
        let mut denom = LaurentPoly::one(target);
        for (i, &k) in shift.iter().enumerate() {
            if k > 0 {
                denom = &denom * &images[i].pow(k as u32);
            }
        }
        numer.div_exact(&denom)
    }

    /// Renames variables: variable `i` becomes variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.nvars];
            for (i, &k) in e.iter().enumerate() {
                ne[perm[i]] = k;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Splits into a polynomial numerator and the monomial denominator of
    /// the reduced fraction.
    pub fn numerator_denominator(&self) -> (LaurentPoly, Exps) {
        let den: Exps = self.min_exponents().iter().map(|&m| if m < 0 { -m } else { 0 }).collect();
        (self.mul_monomial(&den, &BigInt::one()), den)
    }

    /// Canonical text, e.g. `(x2^2*x4 + x1*x3)/(x1*x2*x3)`. Numerator terms
    /// are ordered by exponent vectors read from the last variable to the
    /// first, largest first.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (num, den) = self.numerator_denominator();
        let mut terms: Vec<(&Exps, &BigInt)> = num.terms.iter().collect();
        terms.sort_by(|a, b| b.0.iter().rev().cmp(a.0.iter().rev()));
        let mut s = String::new();
        for (k, (e, c)) in terms.iter().enumerate() {
            let mono = monomial_text(e, names);
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let abs = c.abs();
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(s, "{abs}").unwrap(),
                (false, true) => s.push_str(&mono),
                (false, false) => write!(s, "{abs}*{mono}").unwrap(),
            }
        }
        if den.iter().all(|&d| d == 0) {
            s
        } else {
            format!("({s})/({})", monomial_text(&den, names))
        }
    }

    /// Parses the canonical text form produced by [`LaurentPoly::to_text`].
    pub fn parse(text: &str, names: &[String]) -> Result<LaurentPoly> {
        let nvars = names.len();
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (num, den) = match t.find(")/(") {
            Some(i) if t.starts_with('(') && t.ends_with(')') => (&t[1..i], &t[i + 3..t.len() - 1]),
            _ => (t.as_str(), ""),
        };
        let mut p = parse_sum(num, names)?;
        if !den.is_empty() {
            let d = parse_sum(den, names)?;
            let m = d.as_monomial().ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "denominator must be a monomial".into(),
            })?;
            p = p.div_exact(&LaurentPoly::monomial(nvars, m.exps, m.coeff))?;
        }
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|(e, c)| JsonTerm { coeff: c.to_string(), exps: e.clone() })
            .collect();
        serde_json::json!({ "nvars": self.nvars, "terms": terms })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    exps: Exps,
}

fn monomial_text(e: &[i32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

fn parse_sum(s: &str, names: &[String]) -> Result<LaurentPoly> {
    let nvars = names.len();
    let perr = |msg: String| Error::Parse { pos: 0, msg };
    let mut out = LaurentPoly::zero(nvars);
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    if bytes.is_empty() {
        return Err(perr("empty expression".into()));
    }
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == '+' || bytes[i] == '-' {
            if bytes[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != '+' && !(bytes[i] == '-' && i > start && bytes[i - 1] != '^') {
            i += 1;
        }
        let term: String = bytes[start..i].iter().collect();
        let mut coeff = sign;
        let mut exps = vec![0; nvars];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(perr(format!("empty factor in `{term}`")));
            }
            if factor.chars().all(|c| c.is_ascii_digit()) {
                coeff *= factor.parse::<BigInt>().map_err(|e| perr(e.to_string()))?;
                continue;
            }
            let (name, pow) = match factor.rsplit_once('^') {
                Some((n, p)) => (n, p.parse::<i32>().map_err(|e| perr(e.to_string()))?),
                None => (factor, 1),
            };
            let idx = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| perr(format!("unknown variable `{name}`")))?;
            exps[idx] += pow;
        }
        out.add_term(exps, coeff);
    }
    Ok(out)
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scalar_mul(&-BigInt::one())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }
}

/// Default variable names `x1, x2, ...`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}
