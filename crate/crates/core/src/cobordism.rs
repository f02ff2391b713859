//! Cohomology of products of projective spaces for the theory attached to a
//! formal group law, with pull-backs, push-forwards and the residue formulas.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fgl::{x_only, FormalGroupLaw};
use crate::scalars::{Ring, Scalar};
use crate::series::{LaurentSeries, TruncSeries, VarTable};

/// `A*(P^{n_1} x ... x P^{n_r})`: the theory, the bounds `n_i`, and the
/// truncation of every element. A `P^infinity` factor is a bound equal to
/// the truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjProductRing {
    theory: FormalGroupLaw,
    bounds: Vec<u32>,
    vars: VarTable,
    trunc: u32,
}

/// `z_1 .. z_r`.
pub fn z_vars(r: usize) -> VarTable {
    VarTable::new((1..=r).map(|i| (format!("z{i}"), 1))).unwrap()
}

impl ProjProductRing {
    pub fn new(theory: &FormalGroupLaw, bounds: &[u32], trunc: u32) -> Result<Arc<ProjProductRing>> {
        if theory.trunc() < trunc {
            return Err(Error::InsufficientPrecision(format!(
                "law known to weight {}, ring needs {}",
                theory.trunc(),
                trunc
            )));
        }
        Ok(Arc::new(ProjProductRing {
            theory: theory.truncate(trunc),
            bounds: bounds.to_vec(),
            vars: z_vars(bounds.len()),
            trunc,
        }))
    }

    /// `(P^infinity)^r` modeled as `(P^trunc)^r`.
    pub fn infinite(theory: &FormalGroupLaw, r: usize, trunc: u32) -> Result<Arc<ProjProductRing>> {
        ProjProductRing::new(theory, &vec![trunc; r], trunc)
    }

    pub fn theory(&self) -> &FormalGroupLaw {
        &self.theory
    }

    pub fn ring(&self) -> &Ring {
        self.theory.ring()
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn rank(&self) -> usize {
        self.bounds.len()
    }

    fn with_bounds(&self, bounds: Vec<u32>) -> Arc<ProjProductRing> {
        Arc::new(ProjProductRing { theory: self.theory.clone(), vars: z_vars(bounds.len()), bounds, trunc: self.trunc })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.rank() {
            return Err(Error::IndexOutOfRange(format!("factor {} of {}", i + 1, self.rank())));
        }
        Ok(())
    }
}

/// An element of a [`ProjProductRing`]; exponents never exceed the bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CobElement {
    space: Arc<ProjProductRing>,
    series: TruncSeries,
}

impl CobElement {
    /// Reduce a series in `z_1..z_r` modulo `z_i^(n_i + 1)`.
    pub fn new(space: &Arc<ProjProductRing>, series: TruncSeries) -> Result<CobElement> {
        if series.vars() != space.vars() {
            return Err(Error::VarMismatch);
        }
        space.ring().check_same(series.ring())?;
        let bounds = space.bounds.clone();
        let series = series
            .truncate(space.trunc)
            .filter_vars(|e| e.iter().zip(&bounds).all(|(&x, &n)| x as u32 <= n));
        let series = series.with_exact_trunc(space.trunc.min(series.trunc()));
        Ok(CobElement { space: space.clone(), series })
    }

    pub fn zero(space: &Arc<ProjProductRing>) -> CobElement {
        CobElement { space: space.clone(), series: TruncSeries::zero(space.ring(), space.vars(), space.trunc) }
    }

    pub fn one(space: &Arc<ProjProductRing>) -> CobElement {
        CobElement { space: space.clone(), series: TruncSeries::one(space.ring(), space.vars(), space.trunc) }
    }

    /// `alpha * z^exps`.
    pub fn monomial(space: &Arc<ProjProductRing>, alpha: &Scalar, exps: &[u16]) -> Result<CobElement> {
        if exps.len() != space.rank() {
            return Err(Error::DimensionMismatch { expected: space.rank(), got: exps.len() });
        }
        let s = TruncSeries::from_terms(space.ring(), space.vars(), space.trunc, vec![(exps.to_vec(), alpha.clone())])?;
        CobElement::new(space, s)
    }

    /// The class `z_i`.
    pub fn z(space: &Arc<ProjProductRing>, i: usize) -> Result<CobElement> {
        space.check_index(i)?;
        let mut e = vec![0u16; space.rank()];
        e[i] = 1;
        CobElement::monomial(space, &Scalar::one(space.ring()), &e)
    }

    pub fn space(&self) -> &Arc<ProjProductRing> {
        &self.space
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn trunc(&self) -> u32 {
        self.series.trunc()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    /// Coefficients by z-exponent.
    pub fn coefficients(&self) -> BTreeMap<Vec<u16>, Scalar> {
        self.series.coefficients()
    }

    pub fn coeff(&self, exps: &[u16]) -> Scalar {
        self.series.coeff(exps)
    }

    fn same_space(&self, other: &CobElement) -> Result<()> {
        if self.space != other.space {
            return Err(Error::RingMismatch(format!("{:?}", self.space.bounds), format!("{:?}", other.space.bounds)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CobElement) -> Result<CobElement> {
        self.same_space(other)?;
        CobElement::new(&self.space, self.series.add(&other.series)?)
    }

    pub fn sub(&self, other: &CobElement) -> Result<CobElement> {
        self.same_space(other)?;
        CobElement::new(&self.space, self.series.sub(&other.series)?)
    }

    pub fn mul(&self, other: &CobElement) -> Result<CobElement> {
        self.same_space(other)?;
        CobElement::new(&self.space, self.series.mul(&other.series)?)
    }

    pub fn scale(&self, c: &Scalar) -> Result<CobElement> {
        CobElement::new(&self.space, self.series.scale(c)?)
    }

    /// Truncate to a lower weight.
    pub fn truncate(&self, trunc: u32) -> CobElement {
        CobElement { space: self.space.clone(), series: self.series.truncate(trunc) }
    }
}

fn rebind(e: &CobElement, space: &Arc<ProjProductRing>, images: Vec<TruncSeries>) -> Result<CobElement> {
    let names = e.space.vars().names().to_vec();
    let bindings: BTreeMap<String, TruncSeries> = names.into_iter().zip(images).collect();
    let s = e.series.substitute(space.vars(), &bindings)?;
    CobElement::new(space, s)
}

fn zvar(space: &Arc<ProjProductRing>, i: usize) -> TruncSeries {
    TruncSeries::var(space.ring(), space.vars(), space.trunc, &format!("z{}", i + 1)).unwrap()
}

/// Pull back along the Segre map `P^a x P^b -> P^{n_k}` on factor `k`
/// (0-based): the factor splits in two and `z_k -> F(z_k, z_{k+1})`.
/// Needs `a + b <= n_k` so that the relation `z_k^(n_k + 1) = 0` pulls back,
/// unless factor `k` is infinite (bound at least the truncation), where the
/// relation lies beyond the truncation anyway.
pub fn pullback_segre(e: &CobElement, k: usize, new_bounds: (u32, u32)) -> Result<CobElement> {
    let sp = &e.space;
    sp.check_index(k)?;
    if sp.bounds[k] < sp.trunc && new_bounds.0 + new_bounds.1 > sp.bounds[k] {
        return Err(Error::BoundExceeded(format!(
            "P^{} x P^{} does not map to P^{}",
            new_bounds.0, new_bounds.1, sp.bounds[k]
        )));
    }
    let mut bounds = sp.bounds[..k].to_vec();
    bounds.extend([new_bounds.0, new_bounds.1]);
    bounds.extend_from_slice(&sp.bounds[k + 1..]);
    let target = sp.with_bounds(bounds);
    let mut images = Vec::new();
    for i in 0..sp.rank() {
        if i < k {
            images.push(zvar(&target, i));
        } else if i == k {
            images.push(sp.theory.formal_sum(&zvar(&target, k), &zvar(&target, k + 1))?);
        } else {
            images.push(zvar(&target, i + 1));
        }
    }
    rebind(e, &target, images)
}

/// Pull back along the partial diagonal merging factors `i < j` (0-based).
pub fn pullback_diagonal(e: &CobElement, i: usize, j: usize) -> Result<CobElement> {
    let sp = &e.space;
    sp.check_index(i)?;
    sp.check_index(j)?;
    if i == j {
        return Err(Error::IndexOutOfRange("diagonal needs two distinct factors".into()));
    }
    let (i, j) = (i.min(j), i.max(j));
    let mut bounds = sp.bounds.clone();
    bounds[i] = bounds[i].min(bounds[j]);
    bounds.remove(j);
    let target = sp.with_bounds(bounds);
    let images = (0..sp.rank())
        .map(|k| match k {
            _ if k == j => zvar(&target, i),
            _ if k < j => zvar(&target, k),
            _ => zvar(&target, k - 1),
        })
        .collect();
    rebind(e, &target, images)
}

/// Pull back along the projection forgetting a new factor `P^bound`
/// inserted at position `pos`.
pub fn pullback_projection(e: &CobElement, pos: usize, bound: u32) -> Result<CobElement> {
    let sp = &e.space;
    if pos > sp.rank() {
        return Err(Error::IndexOutOfRange(format!("position {} of {}", pos + 1, sp.rank() + 1)));
    }
    let mut bounds = sp.bounds.clone();
    bounds.insert(pos, bound);
    let target = sp.with_bounds(bounds);
    let images = (0..sp.rank()).map(|k| zvar(&target, if k < pos { k } else { k + 1 })).collect();
    rebind(e, &target, images)
}

/// Pull back along a point section of factor `i`: `z_i -> 0`.
pub fn pullback_point(e: &CobElement, i: usize) -> Result<CobElement> {
    let sp = &e.space;
    sp.check_index(i)?;
    let mut bounds = sp.bounds.clone();
    bounds.remove(i);
    let target = sp.with_bounds(bounds);
    let images = (0..sp.rank())
        .map(|k| match k.cmp(&i) {
            std::cmp::Ordering::Less => zvar(&target, k),
            std::cmp::Ordering::Equal => TruncSeries::zero(target.ring(), target.vars(), target.trunc),
            std::cmp::Ordering::Greater => zvar(&target, k - 1),
        })
        .collect();
    rebind(e, &target, images)
}

/// Permute factors: factor `k` of the result is factor `perm[k]` of `e`.
pub fn pullback_permutation(e: &CobElement, perm: &[usize]) -> Result<CobElement> {
    let sp = &e.space;
    let mut seen = vec![false; sp.rank()];
    if perm.len() != sp.rank() {
        return Err(Error::DimensionMismatch { expected: sp.rank(), got: perm.len() });
    }
    for &p in perm {
        sp.check_index(p)?;
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Precondition("not a permutation".into()));
        }
    }
    let bounds: Vec<u32> = perm.iter().map(|&p| sp.bounds[p]).collect();
    let target = sp.with_bounds(bounds);
    let mut images = vec![None; sp.rank()];
    for (k, &p) in perm.iter().enumerate() {
        images[p] = Some(zvar(&target, k));
    }
    rebind(e, &target, images.into_iter().map(Option::unwrap).collect())
}

/// Push forward from a codimension-`k` linear subspace of factor `i`:
/// multiplication by `z_i^k`.
pub fn pushforward_hyperplane(e: &CobElement, i: usize, k: u32) -> Result<CobElement> {
    let sp = &e.space;
    sp.check_index(i)?;
    if k > sp.bounds[i] {
        return Err(Error::BoundExceeded(format!("codimension {k} in P^{}", sp.bounds[i])));
    }
    let mut exps = vec![0u16; sp.rank()];
    exps[i] = k as u16;
    e.mul(&CobElement::monomial(sp, &Scalar::one(sp.ring()), &exps)?)
}

/// Body variables: everything in `vars` except `t`.
fn body_of(vars: &VarTable, t: &str) -> Result<VarTable> {
    if vars.index(t).is_none() {
        return Err(Error::UnknownVariable(t.into()));
    }
    VarTable::new(vars.names().iter().zip(vars.weights()).filter(|(n, _)| n.as_str() != t).map(|(n, w)| (n.clone(), *w)))
}

fn in_vars(law: &FormalGroupLaw, s: &TruncSeries, vars: &VarTable, trunc: u32) -> Result<TruncSeries> {
    law.ring().check_same(s.ring())?;
    Ok(s.reindex(vars)?.truncate(trunc))
}

/// Laurent expansion of a series in `t` and body variables. Coefficients of
/// `t^k` are complete to body weight `body_trunc` only while
/// `k * w_t + body_trunc <= trunc`.
fn laurent(f: &TruncSeries, t: &str, body: &VarTable, body_trunc: u32) -> Result<LaurentSeries> {
    let wt = f.vars().weights()[f.vars().index(t).unwrap()] as i64;
    let max_exp = (f.trunc() as i64 - body_trunc as i64).div_euclid(wt);
    LaurentSeries::from_series(f, t, body, body_trunc, max_exp)
}

/// `Res_{t=0} f(t) w(t) / prod_i (t +_F lambda_i)`, the push-forward of
/// `f(xi)` along the projective bundle with Chern roots `lambda_i`.
///
/// `f` is a series in `t` and the base variables; the roots are series in
/// the base variables (any subset of `f`'s other variables). The answer is
/// returned to weight `body_trunc`.
pub fn pushforward_projbundle(law: &FormalGroupLaw, f: &TruncSeries, t: &str, roots: &[TruncSeries], body_trunc: u32) -> Result<TruncSeries> {
    let (num, den) = residue_parts(law, f, t, roots, body_trunc)?;
    residue_of(&num, &den)
}

fn residue_parts(law: &FormalGroupLaw, f: &TruncSeries, t: &str, roots: &[TruncSeries], body_trunc: u32) -> Result<(LaurentSeries, LaurentSeries)> {
    if roots.is_empty() {
        return Err(Error::Precondition("a projective bundle needs at least one root".into()));
    }
    let vars = f.vars().clone();
    let trunc = f.trunc().min(law.trunc());
    let body = body_of(&vars, t)?;
    let ts = TruncSeries::var(f.ring(), &vars, trunc, t)?;
    let w = law.invariant_form()?;
    let w_t = rename(&w, &vars, t, trunc)?;
    let mut den = TruncSeries::one(f.ring(), &vars, trunc);
    for r in roots {
        if !num_traits::Zero::is_zero(&r.augmentation()) {
            return Err(Error::NonNilpotentSubstitution("root".into()));
        }
        let r = in_vars(law, r, &vars, trunc)?;
        den = den.mul(&law.truncate(trunc).formal_sum(&ts, &r)?)?;
    }
    let num = f.truncate(trunc).mul(&w_t)?;
    Ok((laurent(&num, t, &body, body_trunc)?, laurent(&den, t, &body, body_trunc)?))
}

fn residue_of(num: &LaurentSeries, den: &LaurentSeries) -> Result<TruncSeries> {
    let inv = den.invert(num.max_exp())?;
    num.mul(&inv)?.residue()
}

/// A series in `x` rewritten in the variable `t` of `vars`.
fn rename(s: &TruncSeries, vars: &VarTable, t: &str, trunc: u32) -> Result<TruncSeries> {
    let ti = vars.index(t).ok_or_else(|| Error::UnknownVariable(t.into()))?;
    let terms = s.coefficients().into_iter().map(|(e, c)| {
        let mut v = vec![0u16; vars.len()];
        v[ti] = e[0];
        (v, c)
    });
    Ok(TruncSeries::from_terms(s.ring(), vars, s.trunc(), terms)?.truncate(trunc))
}

/// Class of the blow-up along a centre with normal Chern roots `lambda`:
/// `1 + (prod lambda_i) Res_{t=0} (t / chi(t)) w(t) / (t prod (t +_F lambda_i))`.
/// The projectivized normal bundle carries an extra trivial summand, which
/// is the factor `t` in the denominator.
pub fn blowup_class(law: &FormalGroupLaw, roots: &[TruncSeries], body_trunc: u32) -> Result<TruncSeries> {
    let Some(first) = roots.first() else {
        return Err(Error::Precondition("the centre needs at least one normal root".into()));
    };
    let base = first.vars().clone();
    if base.index("t").is_some() {
        return Err(Error::Precondition("root variables must not be named t".into()));
    }
    let mut all = vec![("t".to_string(), 1u32)];
    all.extend(base.names().iter().cloned().zip(base.weights().iter().copied()));
    let vars = VarTable::new(all)?;
    let trunc = first.trunc().min(law.trunc());
    // t / chi(t) = (chi(t) / t)^-1
    let chi = law.formal_inverse()?;
    let terms = chi.coefficients().into_iter().filter(|(e, _)| e[0] > 0).map(|(e, c)| (vec![e[0] - 1], c));
    let chi_over_t = TruncSeries::from_terms(law.ring(), &x_only(), chi.trunc() - 1, terms)?;
    let ratio = chi_over_t.inverse()?;
    let f = rename(&ratio, &vars, "t", trunc)?;
    let mut all_roots: Vec<TruncSeries> = roots.to_vec();
    all_roots.push(TruncSeries::zero(law.ring(), &base, trunc));
    let res = pushforward_projbundle(law, &f, "t", &all_roots, body_trunc)?;
    let mut top = TruncSeries::one(law.ring(), &base, body_trunc);
    for r in roots {
        top = top.mul(&r.truncate(body_trunc))?;
    }
    TruncSeries::one(law.ring(), &base, body_trunc).add(&top.mul(&res)?)
}

/// Rewrite a symmetric series in the root variables `roots` (a subset of
/// its variables, all of weight one) as a series in elementary symmetric
/// functions `c1..cd`, keeping any other variables. Fails with
/// `NonSymmetricResult` when the input is not symmetric in the roots.
pub fn symmetric_to_chern(s: &TruncSeries, roots: &[&str]) -> Result<TruncSeries> {
    let d = roots.len();
    let vars = s.vars();
    let idx: Vec<usize> = roots
        .iter()
        .map(|r| vars.index(r).ok_or_else(|| Error::UnknownVariable(r.to_string())))
        .collect::<Result<_>>()?;
    let others: Vec<usize> = (0..vars.len()).filter(|k| !idx.contains(k)).collect();
    let mut out_vars: Vec<(String, u32)> = (1..=d).map(|k| (format!("c{k}"), k as u32)).collect();
    out_vars.extend(others.iter().map(|&k| (vars.names()[k].clone(), vars.weights()[k])));
    let out_table = VarTable::new(out_vars)?;
    let trunc = s.trunc();
    let ring = s.ring();

    // Elementary symmetric functions of the roots, as series in `vars`.
    let mut elem = vec![TruncSeries::one(ring, vars, trunc)];
    {
        let mut e = vec![TruncSeries::zero(ring, vars, trunc); d + 1];
        e[0] = TruncSeries::one(ring, vars, trunc);
        for name in roots {
            let x = TruncSeries::var(ring, vars, trunc, name)?;
            for k in (1..=d).rev() {
                e[k] = e[k].add(&e[k - 1].mul(&x)?)?;
            }
        }
        elem.extend(e.into_iter().skip(1));
    }

    let mut rest = s.clone();
    let mut out: Vec<(Vec<u16>, Scalar)> = Vec::new();
    loop {
        // Leading term: lexicographically largest root exponent vector.
        let coeffs = rest.coefficients();
        let lead = coeffs
            .iter()
            .max_by(|(a, _), (b, _)| {
                let ka: Vec<u16> = idx.iter().map(|&k| a[k]).collect();
                let kb: Vec<u16> = idx.iter().map(|&k| b[k]).collect();
                ka.cmp(&kb).then_with(|| b.cmp(a))
            })
            .map(|(e, c)| (e.clone(), c.clone()));
        let Some((e, c)) = lead else { break };
        let a: Vec<u16> = idx.iter().map(|&k| e[k]).collect();
        if a.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NonSymmetricResult(format!("leading root exponents {a:?}")));
        }
        // c * prod e_k^(a_k - a_{k+1}) * (other variables)
        let mut cexp = vec![0u16; d];
        let mut term = TruncSeries::constant(&c, vars, trunc);
        for k in 0..d {
            let next = if k + 1 < d { a[k + 1] } else { 0 };
            cexp[k] = a[k] - next;
            for _ in 0..cexp[k] {
                term = term.mul(&elem[k + 1])?;
            }
        }
        let mut mono = vec![0u16; vars.len()];
        for &k in &others {
            mono[k] = e[k];
        }
        let other_part = TruncSeries::from_terms(ring, vars, trunc, vec![(mono, Scalar::one(ring))])?;
        term = term.mul(&other_part)?;
        let mut oe = cexp;
        oe.extend(others.iter().map(|&k| e[k]));
        out.push((oe, c));
        let next = rest.sub(&term)?;
        if next.coefficients().get(&e).is_some() {
            return Err(Error::NonSymmetricResult("reduction did not terminate".into()));
        }
        rest = next;
    }
    TruncSeries::from_terms(ring, &out_table, trunc, out)
}

#[cfg(test)]
mod tests;
