//! Landweber-Novikov operations.
//!
//! The operation variables are named `s1, s2, ...` (weight `k` for `s_k`)
//! so they do not collide with the `b_k` of the Lazard ring. The total
//! operation is multiplicative with `gamma = x + s1 x^2 + s2 x^3 + ...`;
//! on coefficients it sends `b_k` to the coefficient of `x^(k+1)` in
//! `beta_s(beta_b(x))`, which is what the shifted universal law dictates
//! because the universal law is the additive law twisted by `beta_b`.

use std::collections::BTreeMap;

use super::apply_multiplicative;
use crate::cobordism::{symmetric_to_chern, CobElement, ProjProductRing};
use crate::error::{Error, Result};
use crate::fgl::{FglMorphism, FormalGroupLaw, RingMap};
use crate::lazard::{beta_series, LazardCtx};
use crate::scalars::{Generator, Monomial, Poly, Ring, Scalar};
use crate::series::{TruncSeries, VarTable};

/// The total operation `Omega* -> Omega*[s1..sM]`.
#[derive(Clone, Debug)]
pub struct LnOperation {
    source: FormalGroupLaw,
    ring: Ring,
    nb: usize,
    s_count: u32,
    morphism: FglMorphism,
}

impl LnOperation {
    pub fn new(ctx: &LazardCtx, s_count: u32) -> Result<LnOperation> {
        let n = ctx.trunc();
        let ring = ctx
            .b_ring()
            .extended((1..=s_count).map(|k| Generator::new(format!("s{k}"), k)).collect())?;
        let t = ctx.universal().trunc();
        let beta_s = beta_series(&ring, "s", s_count, t)?;
        let beta_b = beta_series(&ring, "b", n, t)?;
        let comp = beta_s.compose(&beta_b)?;
        let images: BTreeMap<String, Scalar> =
            (1..=n).map(|k| (format!("b{k}"), comp.coeff(&[k as u16 + 1]))).collect();
        let target = ctx.universal().change_ring(&ring)?;
        let morphism = FglMorphism::new(ctx.universal().clone(), target, RingMap::Generators(images), beta_s)?;
        Ok(LnOperation { source: ctx.universal().clone(), ring, nb: ctx.b_ring().ngens(), s_count, morphism })
    }

    /// `Z[b1..bN, s1..sM]`.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn morphism(&self) -> &FglMorphism {
        &self.morphism
    }

    /// Image of a Lazard ring element.
    pub fn on_coefficient(&self, alpha: &Scalar) -> Result<Scalar> {
        let budget = alpha.poly().max_weight().unwrap_or(0);
        self.morphism.phi.apply(alpha, &self.ring, budget)
    }

    pub fn total(&self, e: &CobElement) -> Result<CobElement> {
        let target = ProjProductRing::new(&self.morphism.target, e.space().bounds(), e.trunc())?;
        apply_multiplicative(&self.morphism.phi, &self.morphism.gamma, e, &target)
    }

    /// Coefficient of `s^rbar` in a scalar of [`LnOperation::ring`], as an
    /// element of the Lazard ring's ambient `Z[b]`.
    pub fn s_coefficient(&self, c: &Scalar, rbar: &[u16], b_ring: &Ring) -> Result<Scalar> {
        let want = self.padded(rbar)?;
        let weights = b_ring.weights();
        let mut p = Poly::zero();
        for (m, q) in c.poly().terms() {
            let (b, s) = m.exps().split_at(self.nb);
            if s == want.as_slice() {
                p.add_term(Monomial::new(b.to_vec(), &weights), q.clone(), b_ring.domain());
            }
        }
        Ok(Scalar::from_poly(b_ring, p))
    }

    /// All `s`-monomials occurring in `c`, with their Lazard-ring coefficients.
    pub fn split_s(&self, c: &Scalar, b_ring: &Ring) -> BTreeMap<Vec<u16>, Scalar> {
        let weights = b_ring.weights();
        let mut out: BTreeMap<Vec<u16>, Poly> = BTreeMap::new();
        for (m, q) in c.poly().terms() {
            let (b, s) = m.exps().split_at(self.nb);
            out.entry(s.to_vec())
                .or_default()
                .add_term(Monomial::new(b.to_vec(), &weights), q.clone(), b_ring.domain());
        }
        out.into_iter().map(|(k, p)| (k, Scalar::from_poly(b_ring, p))).collect()
    }

    fn padded(&self, rbar: &[u16]) -> Result<Vec<u16>> {
        let mut v = rbar.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        if v.len() > self.s_count as usize {
            return Err(Error::IndexOutOfRange(format!("s{} with only {} operation variables", v.len(), self.s_count)));
        }
        v.resize(self.s_count as usize, 0);
        Ok(v)
    }

    /// `S^rbar(e)`.
    pub fn component(&self, rbar: &[u16], e: &CobElement) -> Result<CobElement> {
        let total = self.total(e)?;
        let space = ProjProductRing::new(&self.source, e.space().bounds(), e.trunc())?;
        let b_ring = self.source.ring();
        let mut terms = Vec::new();
        for (exps, c) in total.coefficients() {
            let v = self.s_coefficient(&c, rbar, b_ring)?;
            if !v.is_zero() {
                terms.push((exps, v));
            }
        }
        let s = TruncSeries::from_terms(b_ring, space.vars(), e.trunc(), terms)?;
        CobElement::new(&space, s)
    }
}

/// The total Landweber-Novikov operation, with operation variables up to
/// the truncation of `e`.
pub fn ln_total(ctx: &LazardCtx, e: &CobElement) -> Result<CobElement> {
    LnOperation::new(ctx, e.trunc())?.total(e)
}

/// `S^rbar(e)`, the coefficient of `s1^r1 s2^r2 ...` in the total operation.
pub fn ln_component(ctx: &LazardCtx, rbar: &[u16], e: &CobElement) -> Result<CobElement> {
    let len = rbar.iter().rposition(|&r| r > 0).map_or(0, |k| k + 1);
    LnOperation::new(ctx, len as u32)?.component(rbar, e)
}

/// Coefficient of `s^rbar` in `prod_j (1 + l_j s1 + l_j^2 s2 + ...)` over
/// `nroots` roots, rewritten in the Chern classes `c1..c_nroots`.
pub fn ln_geometric(nroots: usize, rbar: &[u16]) -> Result<TruncSeries> {
    let ring = Ring::integers();
    let k = rbar.len();
    let deg: u32 = rbar.iter().enumerate().map(|(i, &r)| (i as u32 + 1) * r as u32).sum();
    let trunc = 2 * deg;
    let mut vars: Vec<(String, u32)> = (1..=nroots).map(|j| (format!("l{j}"), 1)).collect();
    vars.extend((1..=k).map(|i| (format!("s{i}"), i as u32)));
    let table = VarTable::new(vars)?;
    let mut prod = TruncSeries::one(&ring, &table, trunc);
    for j in 0..nroots {
        let mut factor = vec![(vec![0u16; nroots + k], Scalar::one(&ring))];
        for i in 0..k {
            let mut e = vec![0u16; nroots + k];
            e[j] = i as u16 + 1;
            e[nroots + i] = 1;
            factor.push((e, Scalar::one(&ring)));
        }
        prod = prod.mul(&TruncSeries::from_terms(&ring, &table, trunc, factor)?)?;
    }
    let picked = prod.filter_vars(|e| &e[nroots..] == rbar);
    let root_names: Vec<String> = (1..=nroots).map(|j| format!("l{j}")).collect();
    let roots_only = VarTable::new(root_names.iter().map(|n| (n.clone(), 1)))?;
    let mut terms = Vec::new();
    for (e, c) in picked.coefficients() {
        terms.push((e[..nroots].to_vec(), c));
    }
    let s = TruncSeries::from_terms(&ring, &roots_only, trunc, terms)?;
    let names: Vec<&str> = root_names.iter().map(|s| s.as_str()).collect();
    symmetric_to_chern(&s, &names)
}
