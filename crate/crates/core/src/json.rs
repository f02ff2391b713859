//! JSON forms of the library's values.
//!
//! Numbers are exact strings (`"7"`, `"-3/4"`). A polynomial is a sorted
//! array of `[exponents, coefficient]` pairs in graded-lex order; for a
//! series the exponent vector runs over the ring generators followed by the
//! series variables. Every writer here has a reader that accepts its output.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cobordism::{CobElement, ProjProductRing};
use crate::error::{Error, Result};
use crate::fgl::{FglMorphism, FormalGroupLaw, RingMap};
use crate::lazard::{AMonomial, DegreeData, LazardCtx};
use crate::operations::{Certificate, ClassifyVerdict, GlFamily, LaurentOpValue, PsiFunctional};
use crate::scalars::{format_rational, parse_rational, IntegerLattice, Monomial, Poly, Ring, RingDescriptor, Scalar};
use crate::series::{TruncSeries, VarJson, VarTable};

/// `[exponents, "coefficient"]`.
pub type TermJson = (Vec<u16>, String);

fn poly_terms(p: &Poly) -> Vec<TermJson> {
    p.terms().map(|(m, c)| (m.exps().to_vec(), format_rational(c))).collect()
}

fn poly_from_terms(terms: &[TermJson], weights: &[u32], ring: &Ring) -> Result<Poly> {
    let mut p = Poly::zero();
    for (e, c) in terms {
        if e.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), got: e.len() });
        }
        let q = ring.domain().coerce(&parse_rational(c)?)?;
        p.add_term(Monomial::new(e.clone(), weights), q, ring.domain());
    }
    Ok(p)
}

pub fn scalar_terms(s: &Scalar) -> Vec<TermJson> {
    poly_terms(s.poly())
}

pub fn scalar_from_terms(ring: &Ring, terms: &[TermJson]) -> Result<Scalar> {
    Ok(Scalar::from_poly(ring, poly_from_terms(terms, &ring.weights(), ring)?))
}

/// A scalar together with its ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub ring: RingDescriptor,
    pub terms: Vec<TermJson>,
}

impl ScalarJson {
    pub fn from_scalar(s: &Scalar) -> ScalarJson {
        ScalarJson { ring: s.ring().descriptor().clone(), terms: scalar_terms(s) }
    }

    pub fn to_scalar(&self) -> Result<Scalar> {
        scalar_from_terms(&Ring::new(self.ring.clone())?, &self.terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub ring: RingDescriptor,
    pub vars: Vec<VarJson>,
    pub trunc: u32,
    pub terms: Vec<TermJson>,
}

impl SeriesJson {
    pub fn from_series(s: &TruncSeries) -> SeriesJson {
        SeriesJson {
            ring: s.ring().descriptor().clone(),
            vars: s.vars().to_json(),
            trunc: s.trunc(),
            terms: poly_terms(s.raw()),
        }
    }

    pub fn to_series(&self) -> Result<TruncSeries> {
        let ring = Ring::new(self.ring.clone())?;
        let vars = VarTable::new(self.vars.iter().map(|v| (v.name.clone(), v.weight)))?;
        let mut weights = ring.weights();
        weights.extend_from_slice(vars.weights());
        let p = poly_from_terms(&self.terms, &weights, &ring)?;
        Ok(TruncSeries::from_raw(&ring, &vars, self.trunc, p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FglJson {
    pub law: SeriesJson,
}

impl FglJson {
    pub fn from_law(f: &FormalGroupLaw) -> FglJson {
        FglJson { law: SeriesJson::from_series(f.series()) }
    }

    pub fn to_law(&self) -> Result<FormalGroupLaw> {
        FormalGroupLaw::from_series(self.law.to_series()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RingMapJson {
    Identity,
    /// Images of generators, as polynomials over the target ring.
    Generators { images: BTreeMap<String, Vec<TermJson>> },
    /// Images of the universal coefficients `a_(i,j)`; needs a context.
    Lazard { trunc: u32, images: Vec<((u16, u16), Vec<TermJson>)> },
    Compose { first: Box<RingMapJson>, mid: RingDescriptor, second: Box<RingMapJson> },
}

impl RingMapJson {
    pub fn from_map(m: &RingMap) -> RingMapJson {
        match m {
            RingMap::Identity => RingMapJson::Identity,
            RingMap::Generators(images) => RingMapJson::Generators {
                images: images.iter().map(|(k, v)| (k.clone(), scalar_terms(v))).collect(),
            },
            RingMap::Lazard { ctx, images, .. } => RingMapJson::Lazard {
                trunc: ctx.trunc(),
                images: images.iter().map(|(k, v)| (*k, scalar_terms(v))).collect(),
            },
            RingMap::Compose(a, mid, b) => RingMapJson::Compose {
                first: Box::new(RingMapJson::from_map(a)),
                mid: mid.descriptor().clone(),
                second: Box::new(RingMapJson::from_map(b)),
            },
        }
    }

    /// `target` is the ring the images live in.
    pub fn to_map(&self, target: &Ring, ctx: Option<&Arc<LazardCtx>>) -> Result<RingMap> {
        Ok(match self {
            RingMapJson::Identity => RingMap::Identity,
            RingMapJson::Generators { images } => RingMap::Generators(
                images
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), scalar_from_terms(target, v)?)))
                    .collect::<Result<_>>()?,
            ),
            RingMapJson::Lazard { trunc, images } => {
                let ctx = ctx.ok_or_else(|| Error::Precondition("a Lazard ring map needs --ctx".into()))?;
                if ctx.trunc() != *trunc {
                    return Err(Error::Precondition(format!(
                        "map written against a context of degree {trunc}, got {}",
                        ctx.trunc()
                    )));
                }
                let images =
                    images.iter().map(|(k, v)| Ok((*k, scalar_from_terms(target, v)?))).collect::<Result<_>>()?;
                RingMap::lazard(ctx.clone(), images)
            }
            RingMapJson::Compose { first, mid, second } => {
                let mid = Ring::new(mid.clone())?;
                RingMap::compose(first.to_map(&mid, ctx)?, &mid, second.to_map(target, ctx)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: FglJson,
    pub target: FglJson,
    pub phi: RingMapJson,
    pub gamma: SeriesJson,
}

impl MorphismJson {
    pub fn from_morphism(m: &FglMorphism) -> MorphismJson {
        MorphismJson {
            source: FglJson::from_law(&m.source),
            target: FglJson::from_law(&m.target),
            phi: RingMapJson::from_map(&m.phi),
            gamma: SeriesJson::from_series(&m.gamma),
        }
    }

    pub fn to_morphism(&self, ctx: Option<&Arc<LazardCtx>>) -> Result<FglMorphism> {
        let target = self.target.to_law()?;
        let phi = self.phi.to_map(target.ring(), ctx)?;
        FglMorphism::new(self.source.to_law()?, target, phi, self.gamma.to_series()?)
    }
}

fn bigints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn parse_bigints(v: &[String]) -> Result<Vec<BigInt>> {
    v.iter().map(|s| s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeJson {
    pub degree: u32,
    pub b_basis: Vec<Vec<u16>>,
    /// Each a-monomial as `[i, j, exponent]` triples.
    pub a_monomials: Vec<Vec<(u16, u16, u16)>>,
    pub chosen: Vec<usize>,
    pub lattice: IntegerLattice,
    pub transform: Vec<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

/// A Lazard context: the universal law and the lattice data of every degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtxJson {
    pub trunc: u32,
    pub law: SeriesJson,
    pub a_table: Vec<((u16, u16), Vec<TermJson>)>,
    pub degrees: Vec<DegreeJson>,
}

impl CtxJson {
    pub fn from_ctx(ctx: &LazardCtx) -> CtxJson {
        let degrees = ctx
            .degrees()
            .iter()
            .map(|d| DegreeJson {
                degree: d.degree,
                b_basis: d.b_basis.iter().map(|m| m.exps().to_vec()).collect(),
                a_monomials: d
                    .a_monomials
                    .iter()
                    .map(|a| a.0.iter().map(|&((i, j), e)| (i, j, e)).collect())
                    .collect(),
                chosen: d.chosen.clone(),
                lattice: d.lattice.clone(),
                transform: d.transform.iter().map(|r| bigints(r)).collect(),
                rows: d.rows.iter().map(|r| bigints(r)).collect(),
            })
            .collect();
        CtxJson {
            trunc: ctx.trunc(),
            law: SeriesJson::from_series(ctx.universal().series()),
            a_table: ctx.a_table().iter().map(|(k, v)| (*k, scalar_terms(v))).collect(),
            degrees,
        }
    }

    /// Rebuild the context; the a-table is checked against the law.
    pub fn to_ctx(&self) -> Result<LazardCtx> {
        let law = FormalGroupLaw::from_series(self.law.to_series()?)?;
        let weights = law.ring().weights();
        let mut degrees = Vec::with_capacity(self.degrees.len());
        for d in &self.degrees {
            degrees.push(DegreeData {
                degree: d.degree,
                b_basis: d.b_basis.iter().map(|e| Monomial::new(e.clone(), &weights)).collect(),
                a_monomials: d
                    .a_monomials
                    .iter()
                    .map(|a| AMonomial(a.iter().map(|&(i, j, e)| ((i, j), e)).collect()))
                    .collect(),
                chosen: d.chosen.clone(),
                lattice: d.lattice.clone(),
                transform: d.transform.iter().map(|r| parse_bigints(r)).collect::<Result<_>>()?,
                rows: d.rows.iter().map(|r| parse_bigints(r)).collect::<Result<_>>()?,
            });
        }
        if degrees.len() != self.trunc as usize + 1 {
            return Err(Error::DimensionMismatch { expected: self.trunc as usize + 1, got: degrees.len() });
        }
        let ctx = LazardCtx::from_parts(self.trunc, law, degrees)?;
        for (k, v) in &self.a_table {
            let stored = scalar_from_terms(ctx.b_ring(), v)?;
            if ctx.a(k.0, k.1)? != &stored {
                return Err(Error::Parse(format!("a-table entry a{}_{} disagrees with the law", k.0, k.1)));
            }
        }
        Ok(ctx)
    }
}

/// An element of `A^*((P^n)^r)`: the law, the bounds `n_i` and the series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CobJson {
    pub law: FglJson,
    pub bounds: Vec<u32>,
    pub trunc: u32,
    pub series: SeriesJson,
}

impl CobJson {
    pub fn from_element(e: &CobElement) -> CobJson {
        CobJson {
            law: FglJson::from_law(e.space().theory()),
            bounds: e.space().bounds().to_vec(),
            trunc: e.space().trunc(),
            series: SeriesJson::from_series(e.series()),
        }
    }

    pub fn to_element(&self) -> Result<CobElement> {
        let law = self.law.to_law()?;
        let space = ProjProductRing::new(&law, &self.bounds, self.trunc)?;
        CobElement::new(&space, self.series.to_series()?)
    }
}

/// One value of a functional: on `s^rbar`, given either in the `b`-image
/// (`b`) or as a rational combination of a-monomials (`a`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValueJson {
    pub rbar: Vec<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<(Vec<(u16, u16, u16)>, String)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiJson {
    /// Degree of the Lazard context the `b`-images are written in.
    pub trunc: u32,
    pub degree_shift: i64,
    pub deg_max: u32,
    pub values: Vec<PsiValueJson>,
}

impl PsiJson {
    pub fn from_psi(psi: &PsiFunctional) -> PsiJson {
        PsiJson {
            trunc: psi.ring().ngens() as u32,
            degree_shift: psi.degree_shift(),
            deg_max: psi.deg_max(),
            values: psi
                .values()
                .iter()
                .map(|(k, v)| PsiValueJson { rbar: k.clone(), b: Some(scalar_terms(v)), a: None })
                .collect(),
        }
    }

    /// Values are normalized to the `b`-image over `Q[b1..bN]`.
    pub fn to_psi(&self, ctx: &LazardCtx) -> Result<PsiFunctional> {
        if self.trunc > ctx.trunc() {
            return Err(Error::DegreeOutOfRange { requested: self.trunc, available: ctx.trunc() });
        }
        let q = ctx.b_ring().with_domain(&crate::scalars::CoeffDomain::Rationals)?;
        let mut values = BTreeMap::new();
        for v in &self.values {
            let value = match (&v.b, &v.a) {
                (Some(b), None) => {
                    let small = Ring::new(RingDescriptor::Poly {
                        base: Box::new(RingDescriptor::Rationals),
                        generators: (1..=self.trunc).map(|k| crate::scalars::Generator::new(format!("b{k}"), k)).collect(),
                    })?;
                    scalar_from_terms(&small, b)?.coerce_into(&q)?
                }
                (None, Some(a)) => {
                    let mut acc = Scalar::zero(&q);
                    for (mono, c) in a {
                        let m = AMonomial(mono.iter().map(|&(i, j, e)| ((i, j), e)).collect());
                        if m.degree() > ctx.trunc() {
                            return Err(Error::DegreeOutOfRange { requested: m.degree(), available: ctx.trunc() });
                        }
                        let term = ctx.a_monomial_value(&m).coerce_into(&q)?.scale(&parse_rational(c)?)?;
                        acc = acc.add(&term)?;
                    }
                    acc
                }
                _ => return Err(Error::Parse(format!("value on s^{:?} needs exactly one of `b`, `a`", v.rbar))),
            };
            if values.insert(v.rbar.clone(), value).is_some() {
                return Err(Error::Parse(format!("duplicate value on s^{:?}", v.rbar)));
            }
        }
        PsiFunctional::new(&q, self.degree_shift, self.deg_max, values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub r: usize,
    pub exps: Vec<u16>,
    pub alpha_degree: u32,
    pub alpha_index: usize,
    pub alpha: Vec<TermJson>,
    pub z_monomial: Vec<u16>,
    pub value: Vec<TermJson>,
    pub coordinates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum VerdictJson {
    Pass { r_max: usize, deg_max: u32, elements: usize },
    Certificate(CertificateJson),
}

impl VerdictJson {
    pub fn from_verdict(v: &ClassifyVerdict) -> VerdictJson {
        match v {
            ClassifyVerdict::Pass { r_max, deg_max, elements } => {
                VerdictJson::Pass { r_max: *r_max, deg_max: *deg_max, elements: *elements }
            }
            ClassifyVerdict::Fail(c) => VerdictJson::Certificate(CertificateJson::from_certificate(c)),
        }
    }
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> CertificateJson {
        CertificateJson {
            r: c.r,
            exps: c.exps.clone(),
            alpha_degree: c.alpha_degree,
            alpha_index: c.alpha_index,
            alpha: scalar_terms(&c.alpha),
            z_monomial: c.z_monomial.clone(),
            value: scalar_terms(&c.value),
            coordinates: c.coordinates.iter().map(format_rational).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlFamilyJson {
    pub source: FglJson,
    pub target: FglJson,
    pub n: i64,
    pub trunc: u32,
    /// Per level, the basis of `A^(n-l)` over the source ring.
    pub basis: Vec<Vec<Vec<TermJson>>>,
    /// Per level, `g_l` of each basis element.
    pub values: Vec<Vec<SeriesJson>>,
}

impl GlFamilyJson {
    pub fn from_family(f: &GlFamily) -> GlFamilyJson {
        GlFamilyJson {
            source: FglJson::from_law(f.source()),
            target: FglJson::from_law(f.target()),
            n: f.n(),
            trunc: f.trunc(),
            basis: f.basis().iter().map(|b| b.iter().map(scalar_terms).collect()).collect(),
            values: f.values().iter().map(|v| v.iter().map(SeriesJson::from_series).collect()).collect(),
        }
    }

    pub fn to_family(&self) -> Result<GlFamily> {
        let source = self.source.to_law()?;
        let target = self.target.to_law()?;
        let basis = self
            .basis
            .iter()
            .map(|b| b.iter().map(|t| scalar_from_terms(source.ring(), t)).collect())
            .collect::<Result<_>>()?;
        let values = self
            .values
            .iter()
            .map(|v| v.iter().map(|s| s.to_series()).collect())
            .collect::<Result<_>>()?;
        GlFamily::new(&source, &target, self.n, self.trunc, basis, values)
    }
}

/// A `t`-expanded value: `[z exponents, t exponent, coefficient]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentOpJson {
    pub ring: RingDescriptor,
    pub vars: Vec<VarJson>,
    pub trunc: u32,
    pub p: u64,
    pub terms: Vec<(Vec<u16>, i64, Vec<TermJson>)>,
}

impl LaurentOpJson {
    pub fn from_value(v: &LaurentOpValue) -> LaurentOpJson {
        LaurentOpJson {
            ring: v.ring().descriptor().clone(),
            vars: v.vars().to_json(),
            trunc: v.trunc(),
            p: v.p(),
            terms: v.terms().iter().map(|((z, t), c)| (z.clone(), *t, scalar_terms(c))).collect(),
        }
    }

    pub fn to_value(&self) -> Result<LaurentOpValue> {
        let ring = Ring::new(self.ring.clone())?;
        let vars = VarTable::new(self.vars.iter().map(|v| (v.name.clone(), v.weight)))?;
        let terms = self
            .terms
            .iter()
            .map(|(z, t, c)| Ok(((z.clone(), *t), scalar_from_terms(&ring, c)?)))
            .collect::<Result<Vec<_>>>()?;
        LaurentOpValue::from_terms(&ring, &vars, self.trunc, self.p, terms)
    }
}

/// Pretty, deterministic JSON text with a trailing newline.
pub fn to_string<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobordism::z_vars;
    use crate::operations::{adams, point_level_basis, LnOperation};

    #[test]
    fn scalars_and_series_round_trip() {
        let ctx = LazardCtx::build(3).unwrap();
        let law = ctx.universal();
        let j = to_string(&FglJson::from_law(law)).unwrap();
        assert_eq!(&from_str::<FglJson>(&j).unwrap().to_law().unwrap(), law);
        let half = Scalar::from_rational(&Ring::rationals(), &crate::fgl::rational(-1, 2)).unwrap();
        let sj = ScalarJson::from_scalar(&half);
        assert_eq!(sj.terms, vec![(vec![], "-1/2".to_string())]);
        assert_eq!(sj.to_scalar().unwrap(), half);
        let text = to_string(&SeriesJson::from_series(&law.truncate(2).series().clone())).unwrap();
        assert!(text.contains("\"kind\": \"Poly\""));
    }

    #[test]
    fn ctx_round_trip() {
        let ctx = LazardCtx::build(3).unwrap();
        let j = to_string(&CtxJson::from_ctx(&ctx)).unwrap();
        let back = from_str::<CtxJson>(&j).unwrap().to_ctx().unwrap();
        assert_eq!(to_string(&CtxJson::from_ctx(&back)).unwrap(), j);
        assert_eq!(back.basis_elements(3).unwrap(), ctx.basis_elements(3).unwrap());
    }

    #[test]
    fn morphisms_round_trip() {
        let ctx = Arc::new(LazardCtx::build(3).unwrap());
        let ln = LnOperation::new(&ctx, 3).unwrap();
        let j = MorphismJson::from_morphism(ln.morphism());
        assert_eq!(&j.to_morphism(None).unwrap(), ln.morphism());
        let m = FglMorphism::new(
            ctx.universal().clone(),
            ctx.universal().clone(),
            RingMap::lazard_from_law(ctx.clone(), ctx.universal()),
            TruncSeries::var(ctx.b_ring(), &crate::fgl::x_only(), 7, "x").unwrap(),
        )
        .unwrap();
        let j = MorphismJson::from_morphism(&m);
        assert!(j.to_morphism(None).is_err());
        assert_eq!(j.to_morphism(Some(&ctx)).unwrap(), m);
    }

    #[test]
    fn psi_forms_agree() {
        let ctx = LazardCtx::build(3).unwrap();
        let a: PsiJson = from_str(
            r#"{"trunc": 3, "degree_shift": 0, "deg_max": 2,
                "values": [{"rbar": [], "b": [[[0,0,0], "1"]]},
                           {"rbar": [1], "a": [[[[1,1,1]], "-1"]]}]}"#,
        )
        .unwrap();
        let b: PsiJson = from_str(
            r#"{"trunc": 1, "degree_shift": 0, "deg_max": 2,
                "values": [{"rbar": [], "b": [[[0], "1"]]},
                           {"rbar": [1], "b": [[[1], "-2"]]}]}"#,
        )
        .unwrap();
        let pa = a.to_psi(&ctx).unwrap();
        assert_eq!(pa, b.to_psi(&ctx).unwrap());
        assert_eq!(from_str::<PsiJson>(&to_string(&PsiJson::from_psi(&pa)).unwrap()).unwrap().to_psi(&ctx).unwrap(), pa);
    }

    #[test]
    fn families_and_elements_round_trip() {
        let law = FormalGroupLaw::multiplicative(&Ring::integers(), 4);
        let f = GlFamily::from_operation(&law, &law, 0, 4, point_level_basis(&Ring::integers(), 3), |e| adams(&law, 2, e))
            .unwrap();
        let j = to_string(&GlFamilyJson::from_family(&f)).unwrap();
        assert_eq!(from_str::<GlFamilyJson>(&j).unwrap().to_family().unwrap(), f);

        let space = ProjProductRing::new(&law, &[2, 3], 4).unwrap();
        let s = TruncSeries::from_terms(
            &Ring::integers(),
            &z_vars(2),
            4,
            vec![(vec![1, 2], Scalar::from_int(&Ring::integers(), -7))],
        )
        .unwrap();
        let e = CobElement::new(&space, s).unwrap();
        let j = to_string(&CobJson::from_element(&e)).unwrap();
        assert_eq!(from_str::<CobJson>(&j).unwrap().to_element().unwrap(), e);
    }
}
