use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{xy, FormalGroupLaw};
use crate::error::{Error, Result};
use crate::lazard::{AMonomial, LazardCtx};
use crate::scalars::{Poly, Ring, Scalar};
use crate::series::TruncSeries;

/// A ring homomorphism on coefficients, described by images of generators.
///
/// Every application takes a weight budget: images are truncated to it, which
/// is what a coefficient standing in front of a variable monomial of weight
/// `w` needs when the series is truncated at `N` (budget `N - w`).
#[derive(Clone)]
pub enum RingMap {
    /// Coefficients carried over by generator name.
    Identity,
    /// Images of the polynomial generators of the source ring.
    Generators(BTreeMap<String, Scalar>),
    /// Source is the Lazard ring inside `Z[b]`; images are given on the
    /// universal coefficients `a_{i,j}` (`i <= j`).
    Lazard {
        ctx: Arc<LazardCtx>,
        images: BTreeMap<(u16, u16), Scalar>,
        cache: Arc<Mutex<HashMap<(AMonomial, u32), Poly>>>,
    },
    /// `second` after `first`, passing through `mid`.
    Compose(Box<RingMap>, Ring, Box<RingMap>),
}

impl fmt::Debug for RingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingMap::Identity => write!(f, "Identity"),
            RingMap::Generators(m) => f.debug_tuple("Generators").field(m).finish(),
            RingMap::Lazard { ctx, images, .. } => {
                write!(f, "Lazard(trunc {}, {} images)", ctx.trunc(), images.len())
            }
            RingMap::Compose(a, _, b) => f.debug_tuple("Compose").field(a).field(b).finish(),
        }
    }
}

impl PartialEq for RingMap {
    fn eq(&self, other: &RingMap) -> bool {
        match (self, other) {
            (RingMap::Identity, RingMap::Identity) => true,
            (RingMap::Generators(a), RingMap::Generators(b)) => a == b,
            (RingMap::Lazard { ctx: c1, images: i1, .. }, RingMap::Lazard { ctx: c2, images: i2, .. }) => {
                c1.trunc() == c2.trunc() && i1 == i2
            }
            (RingMap::Compose(a1, m1, b1), RingMap::Compose(a2, m2, b2)) => a1 == a2 && m1 == m2 && b1 == b2,
            _ => false,
        }
    }
}

fn truncated(ring: &Ring, p: Poly, budget: u32) -> Scalar {
    Scalar::from_poly(ring, p.truncate(budget))
}

impl RingMap {
    pub fn lazard(ctx: Arc<LazardCtx>, images: BTreeMap<(u16, u16), Scalar>) -> RingMap {
        RingMap::Lazard { ctx, images, cache: Arc::new(Mutex::new(HashMap::new())) }
    }

    /// `phi(a_{i,j}) = ` coefficient of `x^i y^j` in `law`.
    pub fn lazard_from_law(ctx: Arc<LazardCtx>, law: &FormalGroupLaw) -> RingMap {
        let images = ctx.a_table().keys().map(|&(i, j)| ((i, j), law.coeff(i, j))).collect();
        RingMap::lazard(ctx, images)
    }

    pub fn compose(first: RingMap, mid: &Ring, second: RingMap) -> RingMap {
        match (&first, &second) {
            (RingMap::Identity, _) => second,
            (_, RingMap::Identity) => first,
            _ => RingMap::Compose(Box::new(first), mid.clone(), Box::new(second)),
        }
    }

    /// Image of `c` in `target`, truncated at total weight `budget`.
    pub fn apply(&self, c: &Scalar, target: &Ring, budget: u32) -> Result<Scalar> {
        match self {
            RingMap::Identity => {
                let v = c.coerce_into(target)?;
                Ok(truncated(target, v.into_poly(), budget))
            }
            RingMap::Generators(images) => {
                let src = c.ring();
                let mut imgs = Vec::with_capacity(src.ngens());
                for g in src.generators() {
                    let img = images.get(&g.name).ok_or_else(|| Error::UnknownVariable(g.name.clone()))?;
                    target.check_same(img.ring())?;
                    imgs.push(img.poly().truncate(budget));
                }
                let dom = target.domain();
                let mut out = Poly::zero();
                for (m, q) in c.poly().terms() {
                    let mut prod = Poly::constant(dom.coerce(q)?, target.ngens());
                    for (k, &e) in m.exps().iter().enumerate() {
                        for _ in 0..e {
                            prod = prod.mul(&imgs[k], dom, Some(budget));
                        }
                    }
                    out.add_assign(&prod, dom);
                }
                Ok(Scalar::from_poly(target, out))
            }
            RingMap::Lazard { ctx, images, cache } => {
                let dom = target.domain();
                let mut out = Poly::zero();
                for (am, q) in ctx.express_any(c)? {
                    let key = (am.clone(), budget);
                    let cached = cache.lock().unwrap().get(&key).cloned();
                    let value = match cached {
                        Some(v) => v,
                        None => {
                            let mut prod = Poly::one(target.ngens());
                            for ((i, j), e) in &am.0 {
                                let img = images
                                    .get(&(*i, *j))
                                    .ok_or(Error::DegreeOutOfRange { requested: (*i + *j - 1) as u32, available: ctx.trunc() })?;
                                target.check_same(img.ring())?;
                                for _ in 0..*e {
                                    prod = prod.mul(img.poly(), dom, Some(budget));
                                }
                            }
                            cache.lock().unwrap().insert(key, prod.clone());
                            prod
                        }
                    };
                    let q = dom.coerce(&q)?;
                    out.add_assign(&value.scale(&q, dom), dom);
                }
                Ok(Scalar::from_poly(target, out))
            }
            RingMap::Compose(first, mid, second) => {
                let m = first.apply(c, mid, budget)?;
                second.apply(&m, target, budget)
            }
        }
    }

    /// Apply to every coefficient of a series, landing over `target`.
    pub fn apply_series(&self, s: &TruncSeries, target: &Ring) -> Result<TruncSeries> {
        s.map_coefficients(target, |c, budget| self.apply(c, target, budget))
    }
}

/// `(phi, gamma)` from `source` to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct FglMorphism {
    pub source: FormalGroupLaw,
    pub target: FormalGroupLaw,
    pub phi: RingMap,
    pub gamma: TruncSeries,
}

/// Result of [`morphism_check`]: the lowest monomial where the defining
/// identity fails, with the coefficient of the difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismCheck {
    pub failure: Option<(Vec<u16>, Scalar)>,
}

impl MorphismCheck {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

impl FglMorphism {
    pub fn new(source: FormalGroupLaw, target: FormalGroupLaw, phi: RingMap, gamma: TruncSeries) -> Result<FglMorphism> {
        target.ring().check_same(gamma.ring())?;
        if gamma.vars().len() != 1 {
            return Err(Error::VarMismatch);
        }
        if !gamma.constant_term().is_zero() {
            return Err(Error::NonNilpotentSubstitution(gamma.vars().names()[0].clone()));
        }
        Ok(FglMorphism { source, target, phi, gamma })
    }

    pub fn identity(law: &FormalGroupLaw) -> FglMorphism {
        let x = TruncSeries::var(law.ring(), &super::x_only(), law.trunc(), "x").unwrap();
        FglMorphism { source: law.clone(), target: law.clone(), phi: RingMap::Identity, gamma: x }
    }

    /// An endomorphism `(id, gamma)`.
    pub fn endo(law: &FormalGroupLaw, gamma: TruncSeries) -> Result<FglMorphism> {
        FglMorphism::new(law.clone(), law.clone(), RingMap::Identity, gamma)
    }

    /// Leading coefficient `b0` of `gamma`.
    pub fn b0(&self) -> Scalar {
        self.gamma.coeff(&[1])
    }

    pub fn trunc(&self) -> u32 {
        self.source.trunc().min(self.target.trunc()).min(self.gamma.trunc())
    }

    /// `phi(F_source)` over the target ring, at the morphism's truncation.
    /// The source is mapped at its own truncation first since `phi` need not
    /// preserve weights.
    pub fn mapped_source(&self) -> Result<TruncSeries> {
        Ok(self.phi.apply_series(self.source.series(), self.target.ring())?.truncate(self.trunc()))
    }
}

fn in_xy(s: &TruncSeries, name: &str) -> Result<TruncSeries> {
    let idx = usize::from(name == "y");
    let terms = s.coefficients().into_iter().map(|(e, c)| {
        let mut v = vec![0u16; 2];
        v[idx] = e[0];
        (v, c)
    });
    TruncSeries::from_terms(s.ring(), &xy(), s.trunc(), terms)
}

fn formal_sum_series(f: &TruncSeries, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
    let mut bind = BTreeMap::new();
    bind.insert("x".to_string(), a.clone());
    bind.insert("y".to_string(), b.clone());
    f.substitute(a.vars(), &bind)
}

/// Verify `phi(F_A)(gamma(x), gamma(y)) = gamma(F_B(x, y))` to truncation.
pub fn morphism_check(m: &FglMorphism) -> Result<MorphismCheck> {
    let t = m.trunc();
    let mapped = m.mapped_source()?;
    let g = m.gamma.truncate(t);
    let lhs = formal_sum_series(&mapped, &in_xy(&g, "x")?, &in_xy(&g, "y")?)?;
    let rhs = g.compose(&m.target.truncate(t).series().clone())?;
    let common = lhs.trunc().min(rhs.trunc());
    let failure = lhs.truncate(common).first_difference(&rhs.truncate(common))?;
    Ok(MorphismCheck { failure })
}

fn same_law(a: &FormalGroupLaw, b: &FormalGroupLaw) -> bool {
    let t = a.trunc().min(b.trunc());
    a.ring() == b.ring() && a.truncate(t) == b.truncate(t)
}

/// `h o g`: `(phi_h o phi_g, phi_h(gamma_g)(gamma_h(x)))`.
pub fn compose_morphisms(h: &FglMorphism, g: &FglMorphism) -> Result<FglMorphism> {
    if !same_law(&g.target, &h.source) {
        return Err(Error::IncompatibleMorphisms("target of the first is not the source of the second".into()));
    }
    let ring_c = h.target.ring();
    let mapped = h.phi.apply_series(&g.gamma, ring_c)?;
    let gamma = mapped.compose(&h.gamma)?;
    let phi = RingMap::compose(g.phi.clone(), g.target.ring(), h.phi.clone());
    Ok(FglMorphism { source: g.source.clone(), target: h.target.clone(), phi, gamma })
}

/// `g + h` for morphisms with the same `phi`: `delta = phi(F_A)(gamma_g, gamma_h)`.
pub fn add_morphisms(g: &FglMorphism, h: &FglMorphism) -> Result<FglMorphism> {
    if !same_law(&g.source, &h.source) || !same_law(&g.target, &h.target) {
        return Err(Error::IncompatibleMorphisms("different source or target".into()));
    }
    if g.phi != h.phi {
        return Err(Error::IncompatibleMorphisms("coefficient maps differ".into()));
    }
    let mapped = g.mapped_source()?;
    let gamma = formal_sum_series(&mapped, &g.gamma, &h.gamma)?;
    Ok(FglMorphism { source: g.source.clone(), target: g.target.clone(), phi: g.phi.clone(), gamma })
}
