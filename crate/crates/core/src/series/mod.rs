//! Truncated multivariate power series with weighted grading.
//!
//! A series lives in the polynomial space spanned by the ring generators
//! followed by the series variables. Truncation is by total weight across
//! both, so a coefficient `b2` contributes weight 2 to every term it sits in.
//! Terms of weight above `trunc` are unknown, not zero.

mod laurent;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use laurent::LaurentSeries;

use crate::error::{Error, Result};
use crate::scalars::{fmt_poly, Monomial, Poly, Ring, Scalar};

/// Ordered series variables with positive weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
    weights: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarJson {
    pub name: String,
    pub weight: u32,
}

impl VarTable {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, u32)>) -> Result<VarTable> {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for (n, w) in vars {
            let n = n.into();
            if w == 0 {
                return Err(Error::Precondition(format!("variable {n} has weight 0")));
            }
            if names.contains(&n) {
                return Err(Error::Precondition(format!("duplicate variable {n}")));
            }
            names.push(n);
            weights.push(w);
        }
        Ok(VarTable { names, weights })
    }

    /// Variables of weight one.
    pub fn unit(names: &[&str]) -> VarTable {
        VarTable::new(names.iter().map(|n| (*n, 1))).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn to_json(&self) -> Vec<VarJson> {
        self.names.iter().zip(&self.weights).map(|(n, &w)| VarJson { name: n.clone(), weight: w }).collect()
    }
}

/// A truncated power series over a [`Ring`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    ring: Ring,
    vars: VarTable,
    trunc: u32,
    poly: Poly,
}

impl TruncSeries {
    pub fn zero(ring: &Ring, vars: &VarTable, trunc: u32) -> TruncSeries {
        TruncSeries { ring: ring.clone(), vars: vars.clone(), trunc, poly: Poly::zero() }
    }

    pub fn one(ring: &Ring, vars: &VarTable, trunc: u32) -> TruncSeries {
        TruncSeries::constant(&Scalar::one(ring), vars, trunc)
    }

    pub fn constant(c: &Scalar, vars: &VarTable, trunc: u32) -> TruncSeries {
        let ring = c.ring().clone();
        let mut s = TruncSeries::zero(&ring, vars, trunc);
        s.poly = s.lift_scalar(c.poly()).truncate(trunc);
        s
    }

    pub fn var(ring: &Ring, vars: &VarTable, trunc: u32, name: &str) -> Result<TruncSeries> {
        let i = vars.index(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut s = TruncSeries::zero(ring, vars, trunc);
        let w = s.weights();
        let m = Monomial::var(ring.ngens() + i, w.len(), &w);
        if m.weight() <= trunc {
            s.poly = Poly::monomial(m, BigRational::one());
        }
        Ok(s)
    }

    /// Build from `(variable exponents, coefficient)` pairs.
    pub fn from_terms(ring: &Ring, vars: &VarTable, trunc: u32, terms: impl IntoIterator<Item = (Vec<u16>, Scalar)>) -> Result<TruncSeries> {
        let mut s = TruncSeries::zero(ring, vars, trunc);
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::DimensionMismatch { expected: vars.len(), got: e.len() });
            }
            ring.check_same(c.ring())?;
            s.add_coeff(&e, c.poly());
        }
        s.poly.truncate_in_place(trunc);
        Ok(s)
    }

    /// Wrap a polynomial already in the combined generator+variable space.
    pub(crate) fn from_raw(ring: &Ring, vars: &VarTable, trunc: u32, poly: Poly) -> TruncSeries {
        TruncSeries { ring: ring.clone(), vars: vars.clone(), trunc, poly: poly.truncate(trunc) }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn raw(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn nterms(&self) -> usize {
        self.poly.len()
    }

    /// Weights of the combined space: ring generators, then variables.
    pub fn weights(&self) -> Vec<u32> {
        let mut w = self.ring.weights();
        w.extend_from_slice(&self.vars.weights);
        w
    }

    fn ngens(&self) -> usize {
        self.ring.ngens()
    }

    /// Embed a ring-only polynomial into the combined space.
    fn lift_scalar(&self, p: &Poly) -> Poly {
        let g = self.ngens();
        let w = self.weights();
        let n = w.len();
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let mut e = m.exps().to_vec();
            e.resize(n, 0);
            debug_assert_eq!(m.nvars(), g);
            out.add_term(Monomial::new(e, &w), c.clone(), self.ring.domain());
        }
        out
    }

    fn add_coeff(&mut self, var_exps: &[u16], c: &Poly) {
        let w = self.weights();
        let dom = self.ring.domain().clone();
        for (m, a) in c.terms() {
            let mut e = m.exps().to_vec();
            e.extend_from_slice(var_exps);
            self.poly.add_term(Monomial::new(e, &w), a.clone(), &dom);
        }
    }

    /// Group terms by their variable exponents; coefficients are ring
    /// polynomials.
    pub fn coefficients(&self) -> BTreeMap<Vec<u16>, Scalar> {
        let g = self.ngens();
        let rw = self.ring.weights();
        let mut out: BTreeMap<Vec<u16>, Poly> = BTreeMap::new();
        for (m, c) in self.poly.terms() {
            let (r, v) = m.exps().split_at(g);
            out.entry(v.to_vec())
                .or_default()
                .add_term(Monomial::new(r.to_vec(), &rw), c.clone(), self.ring.domain());
        }
        out.into_iter().map(|(k, p)| (k, Scalar::from_poly(&self.ring, p))).collect()
    }

    /// Coefficient of a variable monomial, as a ring element.
    pub fn coeff(&self, var_exps: &[u16]) -> Scalar {
        let g = self.ngens();
        let rw = self.ring.weights();
        let mut p = Poly::zero();
        for (m, c) in self.poly.terms() {
            if &m.exps()[g..] == var_exps {
                p.add_term(Monomial::new(m.exps()[..g].to_vec(), &rw), c.clone(), self.ring.domain());
            }
        }
        Scalar::from_poly(&self.ring, p)
    }

    /// Weight of the variable part of a monomial.
    fn var_weight(&self, m: &Monomial) -> u32 {
        let g = self.ngens();
        m.exps()[g..].iter().zip(&self.vars.weights).map(|(&e, &w)| e as u32 * w).sum()
    }

    /// The part whose variable exponents are all zero (a ring element).
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Weight-zero coefficient: the rational part that decides invertibility.
    pub fn augmentation(&self) -> BigRational {
        self.poly.constant_term()
    }

    /// Lowest total weight present (or `trunc + 1` for the zero series).
    pub fn min_weight(&self) -> u32 {
        self.poly.min_weight().unwrap_or(self.trunc + 1)
    }

    pub fn check_compatible(&self, other: &TruncSeries) -> Result<()> {
        self.ring.check_same(&other.ring)?;
        if self.vars != other.vars {
            return Err(Error::VarMismatch);
        }
        Ok(())
    }

    pub fn truncate(&self, trunc: u32) -> TruncSeries {
        let t = trunc.min(self.trunc);
        TruncSeries { ring: self.ring.clone(), vars: self.vars.clone(), trunc: t, poly: self.poly.truncate(t) }
    }

    /// Declare more precision than computed. Only valid when the caller
    /// knows the series is exact (for instance a polynomial).
    pub fn with_exact_trunc(&self, trunc: u32) -> TruncSeries {
        TruncSeries { ring: self.ring.clone(), vars: self.vars.clone(), trunc, poly: self.poly.truncate(trunc) }
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_compatible(other)?;
        let t = self.trunc.min(other.trunc);
        let mut p = self.poly.truncate(t);
        p.add_assign(&other.poly.truncate(t), self.ring.domain());
        Ok(TruncSeries { ring: self.ring.clone(), vars: self.vars.clone(), trunc: t, poly: p })
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries { poly: self.poly.neg(self.ring.domain()), ..self.clone() }
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_compatible(other)?;
        let t = self.trunc.min(other.trunc);
        let p = self.poly.mul(&other.poly, self.ring.domain(), Some(t));
        Ok(TruncSeries { ring: self.ring.clone(), vars: self.vars.clone(), trunc: t, poly: p })
    }

    pub fn scale(&self, c: &Scalar) -> Result<TruncSeries> {
        self.ring.check_same(c.ring())?;
        let lifted = self.lift_scalar(c.poly());
        let p = self.poly.mul(&lifted, self.ring.domain(), Some(self.trunc));
        Ok(TruncSeries { poly: p, ..self.clone() })
    }

    pub fn scale_int(&self, k: i64) -> TruncSeries {
        let k = BigRational::from_integer(k.into());
        TruncSeries { poly: self.poly.scale(&k, self.ring.domain()), ..self.clone() }
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        let mut out = TruncSeries::one(&self.ring, &self.vars, self.trunc);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base).unwrap();
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).unwrap();
            }
        }
        out
    }

    /// Multiplicative inverse; the weight-zero coefficient must be a unit.
    pub fn inverse(&self) -> Result<TruncSeries> {
        let c = self.augmentation();
        let dom = self.ring.domain();
        let cinv = dom
            .inverse(&c)
            .ok_or_else(|| Error::NotInvertible(format!("weight-zero coefficient {c} is not a unit")))?;
        let n = self.weights().len();
        // s = c(1 + h) with h of positive weight; 1/s = c^-1 * sum (-h)^k.
        let mut h = self.poly.scale(&cinv, dom);
        h.add_term(Monomial::one(n), -BigRational::one(), dom);
        let minus_h = h.neg(dom);
        let one = Poly::one(n);
        let mut v = one.clone();
        for _ in 0..=self.trunc {
            let next = one.add(&minus_h.mul(&v, dom, Some(self.trunc)), dom);
            if next == v {
                break;
            }
            v = next;
        }
        Ok(TruncSeries { poly: v.scale(&cinv, dom), ..self.clone() })
    }

    /// Exact division by another series with invertible augmentation.
    pub fn div(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.mul(&other.inverse()?)
    }

    pub fn derivative(&self, name: &str) -> Result<TruncSeries> {
        let i = self.vars.index(name).ok_or_else(|| Error::UnknownVariable(name.into()))? + self.ngens();
        let w = self.weights();
        let mut out = Poly::zero();
        for (m, c) in self.poly.terms() {
            let e = m.exps()[i];
            if e > 0 {
                let mut ex = m.exps().to_vec();
                ex[i] -= 1;
                out.add_term(Monomial::new(ex, &w), c * BigRational::from_integer(e.into()), self.ring.domain());
            }
        }
        let trunc = self.trunc.saturating_sub(w[i]);
        Ok(TruncSeries { poly: out, trunc, ..self.clone() })
    }

    /// Formal antiderivative with zero constant term; fails with
    /// `InexactDivision` outside rings where the exponents are invertible.
    pub fn integral(&self, name: &str) -> Result<TruncSeries> {
        let i = self.vars.index(name).ok_or_else(|| Error::UnknownVariable(name.into()))? + self.ngens();
        let w = self.weights();
        let dom = self.ring.domain();
        let mut out = Poly::zero();
        for (m, c) in self.poly.terms() {
            let mut ex = m.exps().to_vec();
            ex[i] += 1;
            let q = dom.divide(c, &BigRational::from_integer(ex[i].into()))?;
            out.add_term(Monomial::new(ex, &w), q, dom);
        }
        let trunc = self.trunc + w[i];
        Ok(TruncSeries { poly: out, trunc, ..self.clone() })
    }

    /// Substitute series for variables. Variables without a binding are sent
    /// to the same-named variable of `target`. All bound series share `target`
    /// and the ring.
    ///
    /// The reliable truncation of the result accounts for substitutions that
    /// lower weight: a series `g` of minimal weight `m` replacing a variable of
    /// weight `w > m` shrinks the known range of `f` by the factor `m / w`.
    pub fn substitute(&self, target: &VarTable, bindings: &BTreeMap<String, TruncSeries>) -> Result<TruncSeries> {
        for name in bindings.keys() {
            if self.vars.index(name).is_none() {
                return Err(Error::UnknownVariable(name.clone()));
            }
        }
        let g = self.ngens();
        let mut images: Vec<TruncSeries> = Vec::with_capacity(self.vars.len());
        for (k, name) in self.vars.names.iter().enumerate() {
            let img = match bindings.get(name) {
                Some(s) => {
                    self.ring.check_same(&s.ring)?;
                    if &s.vars != target {
                        return Err(Error::VarMismatch);
                    }
                    if !s.augmentation().is_zero() {
                        return Err(Error::NonNilpotentSubstitution(name.clone()));
                    }
                    s.clone()
                }
                None => {
                    if target.index(name).is_none() {
                        return Err(Error::UnknownVariable(name.clone()));
                    }
                    let t = self.trunc.max(target.weights[target.index(name).unwrap()]) + self.vars.weights[k];
                    TruncSeries::var(&self.ring, target, t, name)?
                }
            };
            images.push(img);
        }
        // Reliable range inherited from f.
        let mut rho_num = 1u64;
        let mut rho_den = 1u64;
        for (img, &w) in images.iter().zip(&self.vars.weights) {
            let m = img.min_weight() as u64;
            if m * rho_den < rho_num * w as u64 {
                rho_num = m;
                rho_den = w as u64;
            }
        }
        let from_f = ((rho_num * (self.trunc as u64 + 1)).div_ceil(rho_den) - 1) as u32;
        let trunc = images.iter().map(|s| s.trunc).chain(std::iter::once(from_f)).min().unwrap();

        let out_vars = target.clone();
        let mut acc = TruncSeries::zero(&self.ring, &out_vars, trunc);
        let dom = self.ring.domain().clone();
        let images: Vec<Poly> = images.into_iter().map(|s| s.poly.truncate(trunc)).collect();
        let nout = g + out_vars.len();
        let wout = {
            let mut w = self.ring.weights();
            w.extend_from_slice(&out_vars.weights);
            w
        };
        let mut cache: HashMap<Vec<u16>, Poly> = HashMap::new();
        cache.insert(vec![0; self.vars.len()], Poly::one(nout));
        for (ve, coeff) in self.coefficients() {
            let cw = coeff.poly().min_weight().unwrap_or(0);
            if cw > trunc {
                continue;
            }
            let prod = power_product(&ve, &images, &mut cache, &dom, trunc - cw);
            if prod.is_zero() {
                continue;
            }
            let lifted = lift_into(coeff.poly(), nout, &wout, &dom);
            acc.poly.add_assign(&lifted.mul(&prod, &dom, Some(trunc)), &dom);
        }
        Ok(acc)
    }

    /// Substitute into a series of one variable.
    pub fn compose(&self, g: &TruncSeries) -> Result<TruncSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Precondition("compose expects a series in one variable".into()));
        }
        let mut b = BTreeMap::new();
        b.insert(self.vars.names[0].clone(), g.clone());
        self.substitute(&g.vars, &b)
    }

    /// Compositional inverse of a series `c x + ...` in one variable whose
    /// linear coefficient has a unit weight-zero part.
    pub fn reversion(&self) -> Result<TruncSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Precondition("reversion expects a series in one variable".into()));
        }
        if !self.constant_term().is_zero() {
            return Err(Error::NonNilpotentSubstitution(self.vars.names[0].clone()));
        }
        let lin = self.coeff(&[1]);
        let c0 = lin.constant_term();
        let dom = self.ring.domain();
        let cinv = dom.inverse(&c0).ok_or_else(|| Error::NonInvertibleLeadingCoefficient(lin.to_string()))?;
        let cinv_s = Scalar::from_rational(&self.ring, &cinv)?;
        let c0_s = Scalar::from_rational(&self.ring, &c0)?;
        let x = TruncSeries::var(&self.ring, &self.vars, self.trunc, &self.vars.names[0])?;
        // delta <- c0^-1 (x - (gamma(delta) - c0 delta))
        let mut delta = x.scale(&cinv_s)?;
        for _ in 0..=self.trunc + 1 {
            let rest = self.compose(&delta)?.sub(&delta.scale(&c0_s)?)?;
            let next = x.sub(&rest)?.scale(&cinv_s)?.truncate(self.trunc);
            if next.poly == delta.poly {
                break;
            }
            delta = next;
        }
        Ok(delta)
    }

    /// Reinterpret over another variable table, matching variables by name.
    /// Variables missing from `target` must not occur.
    pub fn reindex(&self, target: &VarTable) -> Result<TruncSeries> {
        let g = self.ngens();
        let mut map = Vec::with_capacity(self.vars.len());
        for n in &self.vars.names {
            map.push(target.index(n));
        }
        let mut w = self.ring.weights();
        w.extend_from_slice(&target.weights);
        let mut out = Poly::zero();
        for (m, c) in self.poly.terms() {
            let mut e = m.exps()[..g].to_vec();
            e.resize(g + target.len(), 0);
            for (k, &x) in m.exps()[g..].iter().enumerate() {
                if x > 0 {
                    let j = map[k].ok_or_else(|| Error::UnknownVariable(self.vars.names[k].clone()))?;
                    if target.weights[j] != self.vars.weights[k] {
                        return Err(Error::VarMismatch);
                    }
                    e[g + j] += x;
                }
            }
            out.add_term(Monomial::new(e, &w), c.clone(), self.ring.domain());
        }
        Ok(TruncSeries { ring: self.ring.clone(), vars: target.clone(), trunc: self.trunc, poly: out })
    }

    /// Apply `f` to every coefficient, producing a series over `target`.
    /// Each image is truncated to the remaining weight budget.
    pub fn map_coefficients(&self, target: &Ring, mut f: impl FnMut(&Scalar, u32) -> Result<Scalar>) -> Result<TruncSeries> {
        let mut out = TruncSeries::zero(target, &self.vars, self.trunc);
        for (ve, c) in self.coefficients() {
            let vw: u32 = ve.iter().zip(&self.vars.weights).map(|(&e, &w)| e as u32 * w).sum();
            if vw > self.trunc {
                continue;
            }
            let img = f(&c, self.trunc - vw)?;
            target.check_same(img.ring())?;
            out.add_coeff(&ve, img.poly());
        }
        out.poly.truncate_in_place(self.trunc);
        Ok(out)
    }

    /// Same series over a ring with the same generator names (for example a
    /// localization, or a ring with more generators).
    pub fn change_ring(&self, target: &Ring) -> Result<TruncSeries> {
        self.map_coefficients(target, |c, _| c.coerce_into(target))
    }

    /// Keep only the terms whose variable part satisfies `keep`.
    pub fn filter_vars(&self, mut keep: impl FnMut(&[u16]) -> bool) -> TruncSeries {
        let g = self.ngens();
        TruncSeries { poly: self.poly.filter(|m| keep(&m.exps()[g..])), ..self.clone() }
    }

    /// Variable-part weight of the heaviest term (0 for the zero series).
    pub fn max_var_weight(&self) -> u32 {
        self.poly.terms().map(|(m, _)| self.var_weight(m)).max().unwrap_or(0)
    }

    /// First coefficient (in graded-lex order of the full monomial) that
    /// differs between two compatible series.
    pub fn first_difference(&self, other: &TruncSeries) -> Result<Option<(Vec<u16>, Scalar)>> {
        let d = self.sub(other)?;
        Ok(d.poly.lowest().map(|(m, _)| {
            let ve = m.exps()[self.ngens()..].to_vec();
            let c = d.coeff(&ve);
            (ve, c)
        }))
    }

    pub fn display_names(&self) -> Vec<&str> {
        self.ring
            .generators()
            .iter()
            .map(|g| g.name.as_str())
            .chain(self.vars.names.iter().map(|s| s.as_str()))
            .collect()
    }
}

fn lift_into(p: &Poly, n: usize, w: &[u32], dom: &crate::scalars::CoeffDomain) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut e = m.exps().to_vec();
        e.resize(n, 0);
        out.add_term(Monomial::new(e, w), c.clone(), dom);
    }
    out
}

/// `prod_i images[i]^e[i]`, memoized over exponent vectors.
fn power_product(
    e: &[u16],
    images: &[Poly],
    cache: &mut HashMap<Vec<u16>, Poly>,
    dom: &crate::scalars::CoeffDomain,
    trunc: u32,
) -> Poly {
    if let Some(p) = cache.get(e) {
        return p.truncate(trunc);
    }
    let i = e.iter().rposition(|&x| x > 0).unwrap();
    let mut prev = e.to_vec();
    prev[i] -= 1;
    let base = power_product(&prev, images, cache, dom, trunc);
    let p = base.mul(&images[i], dom, Some(trunc));
    cache.insert(e.to_vec(), p.clone());
    p
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", fmt_poly(&self.display_names(), &self.poly), self.trunc + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Generator, RingDescriptor};
    use proptest::prelude::*;

    fn z() -> Ring {
        Ring::integers()
    }

    fn ser(ring: &Ring, vars: &VarTable, trunc: u32, terms: &[(&[u16], i64)]) -> TruncSeries {
        TruncSeries::from_terms(ring, vars, trunc, terms.iter().map(|(e, c)| (e.to_vec(), Scalar::from_int(ring, *c)))).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let v = VarTable::unit(&["x", "y"]);
        let r = z();
        let a = ser(&r, &v, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let b = ser(&r, &v, 2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(a.mul(&b).unwrap(), ser(&r, &v, 2, &[(&[2, 0], 1), (&[0, 2], -1)]));

        let x = VarTable::unit(&["x"]);
        let s = ser(&r, &x, 1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(s.mul(&s).unwrap(), ser(&r, &x, 1, &[(&[0], 1), (&[1], 2)]));

        let xy = ser(&r, &v, 1, &[(&[1, 0], 1)]).mul(&ser(&r, &v, 1, &[(&[0, 1], 1)])).unwrap();
        assert!(xy.is_zero());
    }

    #[test]
    fn mismatches() {
        let x = TruncSeries::one(&z(), &VarTable::unit(&["x"]), 3);
        let y = TruncSeries::one(&z(), &VarTable::unit(&["y"]), 3);
        assert_eq!(x.add(&y).unwrap_err(), Error::VarMismatch);
        let q = TruncSeries::one(&Ring::rationals(), &VarTable::unit(&["x"]), 3);
        assert!(matches!(x.add(&q).unwrap_err(), Error::RingMismatch(..)));
    }

    #[test]
    fn substitution_examples() {
        let r = z();
        let vx = VarTable::unit(&["x"]);
        let vxy = VarTable::unit(&["x", "y"]);
        let f = ser(&r, &vx, 2, &[(&[2], 1)]);
        let g = ser(&r, &vxy, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let out = f.substitute(&vxy, &[("x".to_string(), g)].into_iter().collect()).unwrap();
        assert_eq!(out, ser(&r, &vxy, 2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));

        let zero = TruncSeries::zero(&r, &vx, 4);
        let id = ser(&r, &vx, 4, &[(&[1], 1)]);
        assert!(id.compose(&zero).unwrap().is_zero());

        let vt = VarTable::unit(&["t"]);
        let f = ser(&r, &vx, 3, &[(&[0], 1), (&[1], 1), (&[2], 1)]);
        let g = ser(&r, &vt, 3, &[(&[1], 1), (&[2], 1)]);
        let out = f.substitute(&vt, &[("x".to_string(), g)].into_iter().collect()).unwrap();
        // Direct expansion: 1 + (t + t^2) + (t + t^2)^2 = 1 + t + 2t^2 + 2t^3 + t^4.
        assert_eq!(out, ser(&r, &vt, 3, &[(&[0], 1), (&[1], 1), (&[2], 2), (&[3], 2)]));

        let bad = ser(&r, &vt, 3, &[(&[0], 1), (&[1], 1)]);
        let err = f.substitute(&vt, &[("x".to_string(), bad)].into_iter().collect()).unwrap_err();
        assert!(matches!(err, Error::NonNilpotentSubstitution(_)));
    }

    #[test]
    fn substitution_loses_precision_when_weight_drops() {
        let r = z();
        let vx = VarTable::new([("x", 2)]).unwrap();
        let vt = VarTable::unit(&["t"]);
        let f = ser(&r, &vx, 6, &[(&[1], 1), (&[2], 1)]);
        let g = ser(&r, &vt, 10, &[(&[1], 1)]);
        let out = f.substitute(&vt, &[("x".to_string(), g)].into_iter().collect()).unwrap();
        // Unknown terms of f start at x^4 (weight 8), i.e. t^4 after substitution.
        assert_eq!(out.trunc(), 3);
    }

    #[test]
    fn reversion_examples() {
        let r = z();
        let vx = VarTable::unit(&["x"]);
        let g = ser(&r, &vx, 4, &[(&[1], 1), (&[2], 1)]);
        let d = g.reversion().unwrap();
        assert_eq!(d, ser(&r, &vx, 4, &[(&[1], 1), (&[2], -1), (&[3], 2), (&[4], -5)]));
        let id = ser(&r, &vx, 4, &[(&[1], 1)]);
        assert_eq!(g.compose(&d).unwrap(), id);
        assert_eq!(d.compose(&g).unwrap(), id);
        assert_eq!(id.reversion().unwrap(), id);

        let q = Ring::rationals();
        let two = ser(&q, &vx, 4, &[(&[1], 2)]);
        let half = TruncSeries::from_terms(&q, &vx, 4, [(vec![1], Scalar::from_rational(&q, &BigRational::new(1.into(), 2.into())).unwrap())]).unwrap();
        assert_eq!(two.reversion().unwrap(), half);
        let two_z = ser(&r, &vx, 4, &[(&[1], 2)]);
        assert!(matches!(two_z.reversion().unwrap_err(), Error::NonInvertibleLeadingCoefficient(_)));
    }

    #[test]
    fn weighted_coefficients_count_toward_truncation() {
        let r = Ring::polynomial(RingDescriptor::Integers, vec![Generator::new("b1", 1)]).unwrap();
        let vx = VarTable::unit(&["x"]);
        let b1 = Scalar::generator(&r, "b1").unwrap();
        let g = TruncSeries::from_terms(&r, &vx, 5, [(vec![1], Scalar::one(&r)), (vec![2], b1)]).unwrap();
        let d = g.reversion().unwrap();
        assert_eq!(g.compose(&d).unwrap(), TruncSeries::var(&r, &vx, 5, "x").unwrap());
        // b1 x^2 has weight 3; b1^2 x^3 has weight 5.
        assert_eq!(d.coeff(&[3]).to_string(), "2*b1^2");
        assert!(d.coeff(&[4]).is_zero());
    }

    #[test]
    fn inverse_of_unit_series() {
        let r = z();
        let vx = VarTable::unit(&["x"]);
        let s = ser(&r, &vx, 5, &[(&[0], 1), (&[1], -1)]);
        let inv = s.inverse().unwrap();
        assert_eq!(inv, ser(&r, &vx, 5, &[(&[0], 1), (&[1], 1), (&[2], 1), (&[3], 1), (&[4], 1), (&[5], 1)]));
        assert!(ser(&r, &vx, 5, &[(&[0], 2)]).inverse().is_err());
    }

    fn arb_series(vars: VarTable, trunc: u32, const_term: bool) -> impl Strategy<Value = TruncSeries> {
        let n = vars.len();
        prop::collection::vec((prop::collection::vec(0u16..3, n), -3i64..4), 0..6).prop_map(move |terms| {
            let r = Ring::integers();
            let terms = terms
                .into_iter()
                .filter(|(e, _)| const_term || e.iter().any(|&x| x > 0))
                .map(|(e, c)| (e, Scalar::from_int(&r, c)));
            TruncSeries::from_terms(&r, &vars, trunc, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn substitution_is_associative(
            f in arb_series(VarTable::unit(&["x"]), 5, true),
            g in arb_series(VarTable::unit(&["y"]), 5, false),
            h in arb_series(VarTable::unit(&["z"]), 5, false),
        ) {
            let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
            let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
            let t = lhs.trunc().min(rhs.trunc());
            prop_assert_eq!(lhs.truncate(t), rhs.truncate(t));
        }

        #[test]
        fn reversion_is_involutive(g in arb_series(VarTable::unit(&["x"]), 6, false)) {
            let lin = g.coeff(&[1]).constant_term();
            let unit = if lin.is_zero() { BigRational::one() } else { BigRational::zero() };
            let r = g.ring().clone();
            let x = TruncSeries::var(&r, g.vars(), 6, "x").unwrap();
            let g = g.add(&x.scale(&Scalar::from_rational(&r, &unit).unwrap()).unwrap()).unwrap();
            prop_assume!(Ring::integers().domain().is_unit(&g.coeff(&[1]).constant_term()));
            let d = g.reversion().unwrap();
            prop_assert_eq!(d.reversion().unwrap(), g.clone());
            prop_assert_eq!(g.compose(&d).unwrap(), x);
        }

        #[test]
        fn truncation_is_monotone(
            f in arb_series(VarTable::unit(&["x", "y"]), 6, true),
            g in arb_series(VarTable::unit(&["x", "y"]), 6, true),
        ) {
            let hi = f.mul(&g).unwrap().truncate(3);
            let lo = f.truncate(3).mul(&g.truncate(3)).unwrap();
            prop_assert_eq!(hi, lo);
        }
    }
}
