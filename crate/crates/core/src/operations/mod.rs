//! Cohomology operations on `(P^infinity)^r`-level data.
//!
//! Multiplicative operations come from morphisms of formal group laws
//! `(phi, gamma)`: coefficients go through `phi` and every `z_i` becomes
//! `gamma(z_i)`. Landweber-Novikov, Adams and the Steenrod family are all of
//! this kind. Additive operations are handled through their functionals on
//! Landweber-Novikov coefficients and through `G_l` families.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cobordism::{CobElement, ProjProductRing};
use crate::error::{Error, Result};
use crate::fgl::{morphism_check, FglMorphism, FormalGroupLaw, RingMap};
use crate::scalars::{Poly, Ring, Scalar};
use crate::series::TruncSeries;

mod chp;
mod classify;
mod gl;
mod ln;
mod steenrod;

pub use chp::{adams_exponent, chp_mult_ring_check, chp_steenrod_basis, ChpCheck};
pub use classify::{decompose_additive, integrality_classify, Certificate, ClassifyVerdict, PsiFunctional};
pub use gl::{gl_reconstruct, gl_validate, lazard_level_basis, point_level_basis, GlAxiom, GlFamily, GlViolation};
pub use ln::{ln_component, ln_geometric, ln_total, LnOperation};
pub use steenrod::{
    default_reps, steenrod_st, symmetric_phi, tom_dieck_sq, LaurentOpValue, SqResult, SteenrodOp,
};

/// `gamma(z_i)` for every factor of `space`.
fn gamma_images(gamma: &TruncSeries, space: &Arc<ProjProductRing>) -> Result<BTreeMap<String, TruncSeries>> {
    let g = gamma.truncate(space.trunc());
    let mut out = BTreeMap::new();
    for name in space.vars().names() {
        let z = TruncSeries::var(space.ring(), space.vars(), space.trunc(), name)?;
        let mut b = BTreeMap::new();
        b.insert(g.vars().names()[0].clone(), z);
        out.insert(name.clone(), g.substitute(space.vars(), &b)?);
    }
    Ok(out)
}

/// `f(z) -> phi(f)(gamma(z_1), ..., gamma(z_r))` into `target`, without
/// checking the morphism.
pub(crate) fn apply_multiplicative(
    phi: &RingMap,
    gamma: &TruncSeries,
    e: &CobElement,
    target: &Arc<ProjProductRing>,
) -> Result<CobElement> {
    if target.rank() != e.space().rank() {
        return Err(Error::DimensionMismatch { expected: e.space().rank(), got: target.rank() });
    }
    let mapped = phi.apply_series(&e.series().truncate(target.trunc()), target.ring())?;
    let images = gamma_images(gamma, target)?;
    let s = mapped.substitute(target.vars(), &images)?;
    CobElement::new(target, s)
}

/// The space with the same bounds as `e` over the target law of `m`.
pub fn target_space(m: &FglMorphism, e: &CobElement) -> Result<Arc<ProjProductRing>> {
    ProjProductRing::new(&m.target, e.space().bounds(), e.trunc().min(m.target.trunc()))
}

/// The multiplicative operation attached to a morphism, applied to `e`.
pub fn mult_op_from_morphism(m: &FglMorphism, e: &CobElement) -> Result<CobElement> {
    let check = morphism_check(m)?;
    if let Some((at, c)) = check.failure {
        return Err(Error::MorphismInvalid(format!("{at:?}: {c}")));
    }
    let target = target_space(m, e)?;
    apply_multiplicative(&m.phi, &m.gamma, e, &target)
}

/// The Adams morphism `(id, [k] x)` of `law`.
pub fn adams_morphism(law: &FormalGroupLaw, k: i64) -> Result<FglMorphism> {
    FglMorphism::endo(law, law.n_series(k)?)
}

/// `Psi_k(e)`: every `z_i` becomes `[k] z_i`, coefficients stay.
pub fn adams(law: &FormalGroupLaw, k: i64, e: &CobElement) -> Result<CobElement> {
    law.ring().check_same(e.space().ring())?;
    let gamma = law.n_series(k)?;
    apply_multiplicative(&RingMap::Identity, &gamma, e, e.space())
}

/// A multiplicative operation is stable iff `b0 = 1`.
pub fn is_stable(m: &FglMorphism) -> bool {
    m.b0().is_one()
}

/// Homogeneous components of a scalar by weight.
pub(crate) fn weight_parts(s: &Scalar) -> BTreeMap<u32, Scalar> {
    let mut parts: BTreeMap<u32, Poly> = BTreeMap::new();
    for (m, c) in s.poly().terms() {
        parts.entry(m.weight()).or_default().add_term(m.clone(), c.clone(), s.ring().domain());
    }
    parts.into_iter().map(|(w, p)| (w, Scalar::from_poly(s.ring(), p))).collect()
}

/// Split `e` into parts of fixed cohomological degree `|I| - wt(alpha)`.
pub(crate) fn degree_parts(e: &CobElement) -> Result<BTreeMap<i64, CobElement>> {
    let mut terms: BTreeMap<i64, Vec<(Vec<u16>, Scalar)>> = BTreeMap::new();
    for (exps, c) in e.coefficients() {
        let zdeg: i64 = exps.iter().map(|&x| x as i64).sum();
        for (w, part) in weight_parts(&c) {
            terms.entry(zdeg - w as i64).or_default().push((exps.clone(), part));
        }
    }
    let space = e.space();
    terms
        .into_iter()
        .map(|(n, ts)| {
            let s = TruncSeries::from_terms(space.ring(), space.vars(), e.trunc(), ts)?;
            Ok((n, CobElement::new(space, s)?))
        })
        .collect()
}

/// Specialize a ring element by sending every generator to zero, into `target`.
pub(crate) fn augment(c: &Scalar, target: &Ring) -> Result<Scalar> {
    let q = c.constant_term();
    Scalar::from_rational(target, &target.domain().coerce(&q)?)
}

#[cfg(test)]
mod tests;
