//! Sparse polynomials over a flattened variable space.
//!
//! This is the single arithmetic kernel behind scalars and truncated series:
//! a series is a polynomial over ring generators plus series variables,
//! truncated by total weight.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ring::CoeffDomain;

/// Exponent vector with its cached total weight. Ordering is graded
/// lexicographic: weight first, then exponents by variable index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    weight: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { weight: 0, exps: vec![0; nvars] }
    }

    pub fn new(exps: Vec<u16>, weights: &[u32]) -> Self {
        debug_assert_eq!(exps.len(), weights.len());
        let weight = exps.iter().zip(weights).map(|(&e, &w)| e as u32 * w).sum();
        Monomial { weight, exps }
    }

    pub fn var(i: usize, nvars: usize, weights: &[u32]) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { weight: weights[i], exps }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.weight == 0 && self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            weight: self.weight + other.weight,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            weight: other.weight - self.weight,
            exps: other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect(),
        }
    }

    /// Weight restricted to a range of variables.
    pub fn partial_weight(&self, range: std::ops::Range<usize>, weights: &[u32]) -> u32 {
        range.map(|i| self.exps[i] as u32 * weights[i]).sum()
    }
}

/// A finite sparse polynomial with exact rational coefficients. The
/// coefficient domain is supplied by the caller on every mutating operation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(BigRational::one(), nvars)
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>, dom: &CoeffDomain) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c, dom);
        }
        p
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, BigRational)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&BigRational> {
        self.terms.get(m)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn lowest(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next()
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.weight)
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.weight)
    }

    /// Coefficient of the unit monomial.
    pub fn constant_term(&self) -> BigRational {
        match self.terms.iter().next() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => BigRational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_homogeneous(&self) -> bool {
        match (self.min_weight(), self.max_weight()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational, dom: &CoeffDomain) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                let c = dom.normalize(c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = dom.normalize(o.get() + c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly, dom: &CoeffDomain) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone(), dom);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Poly, dom: &CoeffDomain) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone(), dom);
        }
    }

    pub fn neg(&self, dom: &CoeffDomain) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), dom.normalize(-c))).collect() }
    }

    pub fn sub(&self, other: &Poly, dom: &CoeffDomain) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c, dom);
        }
        out
    }

    pub fn scale(&self, k: &BigRational, dom: &CoeffDomain) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k, dom);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, k: &BigRational, dom: &CoeffDomain) -> Poly {
        let mut out = Poly::zero();
        for (mm, c) in &self.terms {
            out.add_term(mm.mul(m), c * k, dom);
        }
        out
    }

    /// Product, discarding every term of weight above `trunc`.
    pub fn mul(&self, other: &Poly, dom: &CoeffDomain, trunc: Option<u32>) -> Poly {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        let lmin = large.min_weight().unwrap_or(0);
        for (ma, ca) in &small.terms {
            if let Some(t) = trunc {
                if ma.weight + lmin > t {
                    break;
                }
            }
            for (mb, cb) in &large.terms {
                if let Some(t) = trunc {
                    if ma.weight + mb.weight > t {
                        break;
                    }
                }
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let is_mod = matches!(dom, CoeffDomain::ModP(_));
        Poly {
            terms: acc
                .into_iter()
                .filter_map(|(m, c)| {
                    let c = if is_mod { dom.normalize(c) } else { c };
                    (!c.is_zero()).then_some((m, c))
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32, nvars: usize, dom: &CoeffDomain, trunc: Option<u32>) -> Poly {
        let mut out = Poly::one(nvars);
        for _ in 0..e {
            out = out.mul(self, dom, trunc);
        }
        out
    }

    pub fn truncate(&self, trunc: u32) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.weight <= trunc).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn truncate_in_place(&mut self, trunc: u32) {
        self.terms.retain(|m, _| m.weight <= trunc);
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Part of weight exactly `w`.
    pub fn homogeneous_part(&self, w: u32) -> Poly {
        self.filter(|m| m.weight == w)
    }

    /// Re-express every monomial through `f` (which must produce monomials of
    /// a common space); coefficients are combined in `dom`.
    pub fn map_monomials(&self, dom: &CoeffDomain, mut f: impl FnMut(&Monomial) -> Option<Monomial>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(m2) = f(m) {
                out.add_term(m2, c.clone(), dom);
            }
        }
        out
    }

    pub fn map_coeffs(&self, dom: &CoeffDomain, mut f: impl FnMut(&BigRational) -> BigRational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c), dom);
        }
        out
    }

    /// True iff every coefficient lies in `dom`.
    pub fn coeffs_in(&self, dom: &CoeffDomain) -> bool {
        self.terms.values().all(|c| dom.contains(c))
    }
}
