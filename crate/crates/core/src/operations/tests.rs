use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::cobordism::{pullback_segre, z_vars};
use crate::fgl::{compose_morphisms, rational};
use crate::lazard::LazardCtx;
use crate::scalars::CoeffDomain;

fn ctx3() -> Arc<LazardCtx> {
    static C: OnceLock<Arc<LazardCtx>> = OnceLock::new();
    C.get_or_init(|| Arc::new(LazardCtx::build(3).unwrap())).clone()
}

fn ctx5() -> Arc<LazardCtx> {
    static C: OnceLock<Arc<LazardCtx>> = OnceLock::new();
    C.get_or_init(|| Arc::new(LazardCtx::build(5).unwrap())).clone()
}

fn zz() -> Ring {
    Ring::integers()
}

fn int_series(ring: &Ring, r: usize, trunc: u32, terms: &[(&[u16], i64)]) -> TruncSeries {
    TruncSeries::from_terms(ring, &z_vars(r), trunc, terms.iter().map(|(e, c)| (e.to_vec(), Scalar::from_int(ring, *c))))
        .unwrap()
}

fn b(ctx: &LazardCtx, k: u32) -> Scalar {
    Scalar::generator(ctx.b_ring(), &format!("b{k}")).unwrap()
}

// Landweber-Novikov

#[test]
fn ln_total_on_z_is_beta() {
    let ctx = ctx3();
    let space = ProjProductRing::infinite(ctx.universal(), 1, 5).unwrap();
    let z = CobElement::z(&space, 0).unwrap();
    let ln = LnOperation::new(&ctx, 5).unwrap();
    let out = ln.total(&z).unwrap();
    let ring = ln.ring().clone();
    // s_k z^(k+1) has weight 2k + 1.
    for k in 0..3u16 {
        let want = if k == 0 { Scalar::one(&ring) } else { Scalar::generator(&ring, &format!("s{k}")).unwrap() };
        assert_eq!(out.coeff(&[k + 1]), want);
    }
    assert_eq!(ln.total(&CobElement::one(&space)).unwrap().coefficients().len(), 1);
}

#[test]
fn ln_augmentation_and_zero_component() {
    let ctx = ctx3();
    let space = ProjProductRing::infinite(ctx.universal(), 2, 5).unwrap();
    let e = CobElement::new(
        &space,
        TruncSeries::from_terms(
            ctx.b_ring(),
            &z_vars(2),
            5,
            vec![
                (vec![1, 0], b(&ctx, 1)),
                (vec![1, 1], Scalar::from_int(ctx.b_ring(), 3)),
                (vec![0, 2], b(&ctx, 2)),
            ],
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(ln_component(&ctx, &[], &e).unwrap(), e);
    assert_eq!(ln_component(&ctx, &[0, 0], &e).unwrap(), e);
}

#[test]
fn ln_point_classes() {
    let ctx = ctx5();
    // rbar = exponents of s1, s2; X = product of P^(i+1), r_i times.
    for rbar in [vec![1u16], vec![2], vec![1, 1], vec![2, 1]] {
        let mut bounds = Vec::new();
        for (i, &r) in rbar.iter().enumerate() {
            bounds.extend(std::iter::repeat(i as u32 + 2).take(r as usize));
        }
        let deg: u32 = rbar.iter().enumerate().map(|(i, &r)| (i as u32 + 1) * r as u32).sum();
        let top: u32 = bounds.iter().sum();
        let space = ProjProductRing::new(ctx.universal(), &bounds, top + deg).unwrap();
        let x = CobElement::monomial(&space, &Scalar::one(ctx.b_ring()), &vec![1; bounds.len()]).unwrap();
        let pt: Vec<u16> = bounds.iter().map(|&n| n as u16).collect();
        let ln = LnOperation::new(&ctx, deg).unwrap();
        for other in crate::operations::classify::s_monomials(deg) {
            let got = ln.component(&other, &x).unwrap();
            if other == rbar {
                assert_eq!(got.coefficients().into_iter().collect::<Vec<_>>(), vec![(pt.clone(), Scalar::one(ctx.b_ring()))]);
            } else {
                assert!(got.is_zero(), "{rbar:?} vs {other:?}");
            }
        }
    }
}

#[test]
fn ln_morphism_is_valid_and_stable() {
    let ctx = ctx3();
    let ln = LnOperation::new(&ctx, 3).unwrap();
    assert!(crate::fgl::morphism_check(ln.morphism()).unwrap().ok());
    assert!(is_stable(ln.morphism()));
    let space = ProjProductRing::infinite(ctx.universal(), 1, 5).unwrap();
    let e = CobElement::monomial(&space, &b(&ctx, 1), &[2]).unwrap();
    let via = mult_op_from_morphism(ln.morphism(), &e).unwrap();
    assert_eq!(via.series(), ln.total(&e).unwrap().series());
}

#[test]
fn ln_commutes_with_segre() {
    let ctx = ctx3();
    let space = ProjProductRing::infinite(ctx.universal(), 1, 5).unwrap();
    let e = CobElement::new(
        &space,
        TruncSeries::from_terms(
            ctx.b_ring(),
            &z_vars(1),
            5,
            vec![(vec![1], Scalar::one(ctx.b_ring())), (vec![2], b(&ctx, 1))],
        )
        .unwrap(),
    )
    .unwrap();
    let ln = LnOperation::new(&ctx, 5).unwrap();
    let a = ln.total(&pullback_segre(&e, 0, (5, 5)).unwrap()).unwrap();
    let b = pullback_segre(&ln.total(&e).unwrap(), 0, (5, 5)).unwrap();
    assert_eq!(a.series(), b.series());
}

#[test]
fn ln_geometric_values() {
    let c = |s: &TruncSeries, e: &[u16]| s.coeff(e).constant_term();
    assert_eq!(ln_geometric(1, &[]).unwrap(), TruncSeries::one(&zz(), &crate::series::VarTable::unit(&["c1"]), 0));
    let one_root = ln_geometric(1, &[1]).unwrap();
    assert_eq!(c(&one_root, &[1]), BigRational::one());
    // s1^2 picks l1 l2; s2 picks l1^2 + l2^2.
    let s11 = ln_geometric(2, &[2]).unwrap();
    assert_eq!(c(&s11, &[0, 1]), BigRational::one());
    assert_eq!(s11.coefficients().len(), 1);
    let s2 = ln_geometric(2, &[0, 1]).unwrap();
    assert_eq!(c(&s2, &[2, 0]), BigRational::one());
    assert_eq!(c(&s2, &[0, 1]), BigRational::from_integer((-2).into()));
    assert_eq!(s2.coefficients().len(), 2);
}

// Adams

#[test]
fn adams_on_the_multiplicative_law() {
    let law = FormalGroupLaw::multiplicative(&zz(), 6);
    let space = ProjProductRing::infinite(&law, 1, 6).unwrap();
    let z = CobElement::z(&space, 0).unwrap();
    for k in 1..=4i64 {
        // 1 - (1 - z)^k
        let mut want = Vec::new();
        let mut binom = 1i64;
        for j in 1..=k {
            binom = binom * (k - j + 1) / j;
            want.push((vec![j as u16], if j % 2 == 1 { binom } else { -binom }));
        }
        let want: Vec<(&[u16], i64)> = want.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        assert_eq!(adams(&law, k, &z).unwrap().series(), &int_series(&zz(), 1, 6, &want));
    }
}

#[test]
fn adams_composes_and_is_multiplicative() {
    let law = FormalGroupLaw::multiplicative(&zz(), 5);
    let space = ProjProductRing::infinite(&law, 2, 5).unwrap();
    let e1 = CobElement::new(&space, int_series(&zz(), 2, 5, &[(&[1, 0], 1), (&[1, 1], -2), (&[0, 3], 5)])).unwrap();
    let e2 = CobElement::new(&space, int_series(&zz(), 2, 5, &[(&[0, 0], 3), (&[0, 1], 1), (&[2, 1], 4)])).unwrap();
    let six = adams(&law, 6, &e1).unwrap();
    let two_three = adams(&law, 2, &adams(&law, 3, &e1).unwrap()).unwrap();
    assert_eq!(six, two_three);
    let m = compose_morphisms(&adams_morphism(&law, 2).unwrap(), &adams_morphism(&law, 3).unwrap()).unwrap();
    assert_eq!(mult_op_from_morphism(&m, &e1).unwrap().series(), six.series());
    let lhs = adams(&law, 3, &e1.mul(&e2).unwrap()).unwrap();
    let rhs = adams(&law, 3, &e1).unwrap().mul(&adams(&law, 3, &e2).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    assert_eq!(adams(&law, 1, &e1).unwrap(), e1);
}

#[test]
fn stability() {
    let law = FormalGroupLaw::multiplicative(&zz(), 5);
    assert!(!is_stable(&adams_morphism(&law, 2).unwrap()));
    assert!(is_stable(&crate::fgl::FglMorphism::identity(&law)));
    let space = ProjProductRing::infinite(&law, 1, 5).unwrap();
    let e = CobElement::new(&space, int_series(&zz(), 1, 5, &[(&[1], 2), (&[3], 1)])).unwrap();
    assert_eq!(mult_op_from_morphism(&crate::fgl::FglMorphism::identity(&law), &e).unwrap(), e);
}

// Steenrod family

fn reduced(v: &LaurentOpValue, p: u64) -> BTreeMap<(Vec<u16>, i64), BigRational> {
    v.augmented(&Ring::mod_p(p).unwrap())
        .unwrap()
        .terms()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k.clone(), c.constant_term()))
        .collect()
}

/// `(z^p - t^(p-1) z)^k` mod `p` as `(z exponent, t exponent) -> coefficient`.
fn classical(p: u64, k: u32) -> BTreeMap<(Vec<u16>, i64), BigRational> {
    let mut out = BTreeMap::new();
    let mut binom = BigInt::one();
    for j in 0..=k {
        // j factors of -t^(p-1) z, k - j of z^p
        if j > 0 {
            binom = binom * BigInt::from(k - j + 1) / BigInt::from(j);
        }
        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let c = CoeffDomain::ModP(p).normalize(BigRational::from_integer(&binom * sign));
        if !c.is_zero() {
            out.insert((vec![(p as u32 * (k - j) + j) as u16], (p as i64 - 1) * j as i64), c);
        }
    }
    out
}

#[test]
fn steenrod_of_one() {
    let ctx = ctx3();
    for p in [2u64, 3] {
        let space = ProjProductRing::infinite(ctx.universal(), 1, 3).unwrap();
        let v = steenrod_st(&ctx, p, &default_reps(p, None).unwrap(), &CobElement::one(&space)).unwrap();
        assert_eq!(v.terms().len(), 1);
        assert!(v.coeff(&[0], 0).is_one());
        assert!(symmetric_phi(&ctx, p, &default_reps(p, None).unwrap(), &CobElement::one(&space)).unwrap().is_zero());
    }
}

#[test]
fn steenrod_reduces_to_the_classical_substitution() {
    for (p, ctx) in [(2u64, ctx3()), (3, ctx3()), (5, ctx5())] {
        let trunc = ctx.trunc();
        let op = SteenrodOp::new(&ctx, p, &default_reps(p, None).unwrap(), trunc).unwrap();
        let space = ProjProductRing::infinite(ctx.universal(), 1, trunc).unwrap();
        for k in 1..=(trunc / p as u32) {
            let e = CobElement::monomial(&space, &Scalar::one(ctx.b_ring()), &[k as u16]).unwrap();
            assert_eq!(reduced(&op.st(&e).unwrap(), p), classical(p, k), "p = {p}, k = {k}");
        }
    }
}

#[test]
fn steenrod_rejects_bad_representatives() {
    let ctx = ctx3();
    assert!(matches!(SteenrodOp::new(&ctx, 3, &[1, 4], 3), Err(Error::BadRepresentatives(_))));
    assert!(matches!(SteenrodOp::new(&ctx, 3, &[1, 3], 3), Err(Error::BadRepresentatives(_))));
    assert!(matches!(SteenrodOp::new(&ctx, 4, &[1, 2, 3], 3), Err(Error::BadRepresentatives(_))));
    assert_eq!(default_reps(5, None).unwrap(), vec![1, 2, 4, 8]);
}

/// `D v` computed term by term from the published `d_k`, for a value of
/// degree `n` (terms past the known weight are dropped).
fn times_d(op: &SteenrodOp, v: &LaurentOpValue, n: i64) -> BTreeMap<(Vec<u16>, i64), Scalar> {
    let mut out: BTreeMap<(Vec<u16>, i64), Scalar> = BTreeMap::new();
    for ((e, j), c) in v.terms() {
        let zdeg: i64 = e.iter().map(|&x| x as i64).sum();
        let top = v.trunc() as i64 - 2 * zdeg + op.p() as i64 * n;
        for (k, d) in op.d_series().iter().enumerate() {
            if j + k as i64 > top {
                break;
            }
            let key = (e.clone(), j + k as i64);
            let add = d.mul(c).unwrap();
            let cur = out.remove(&key).unwrap_or_else(|| Scalar::zero(op.ring()));
            out.insert(key, cur.add(&add).unwrap());
        }
    }
    out
}

/// Homogeneous samples with their degrees.
fn samples(ctx: &LazardCtx, trunc: u32) -> Vec<(i64, CobElement)> {
    let space = ProjProductRing::infinite(ctx.universal(), 2, trunc).unwrap();
    let mut out = Vec::new();
    for (exps, alpha) in [
        (vec![1u16, 0], Scalar::one(ctx.b_ring())),
        (vec![1, 1], Scalar::one(ctx.b_ring())),
        (vec![0, 0], ctx.pn(1).unwrap().clone()),
        (vec![1, 0], ctx.pn(1).unwrap().clone()),
        (vec![0, 0], ctx.pn(2).unwrap().clone()),
        (vec![2, 1], Scalar::one(ctx.b_ring())),
    ] {
        let n = exps.iter().map(|&x| x as i64).sum::<i64>() - alpha.homogeneous_degree().unwrap().unwrap() as i64;
        out.push((n, CobElement::monomial(&space, &alpha, &exps).unwrap()));
    }
    out
}

#[test]
fn phi_satisfies_its_defining_identity() {
    let ctx = ctx3();
    for p in [2u64, 3] {
        let op = SteenrodOp::new(&ctx, p, &default_reps(p, None).unwrap(), 3).unwrap();
        for (n, e) in samples(&ctx, 3) {
            let st = op.st(&e).unwrap();
            let phi = op.phi(&e).unwrap();
            assert!(phi.terms().keys().all(|(_, j)| *j < 0));
            let dphi = times_d(&op, &phi, n);
            for ((z, j), c) in st.terms() {
                if *j < 0 {
                    let got = dphi.get(&(z.clone(), *j)).cloned().unwrap_or_else(|| Scalar::zero(op.ring()));
                    assert_eq!(&got, c, "p = {p}, z^{z:?} t^{j}");
                }
            }
            for ((z, j), c) in &dphi {
                if *j < 0 && !c.is_zero() {
                    assert!(st.terms().contains_key(&(z.clone(), *j)));
                }
            }
            // Perturbing a coefficient of Phi by 1 moves D Phi by d_0 = p there.
            assert_eq!(op.d_series()[0], Scalar::from_int(op.ring(), p as i64));
        }
    }
}

#[test]
fn p2_point_example_phi() {
    let ctx = ctx3();
    let space = ProjProductRing::infinite(ctx.universal(), 0, 3).unwrap();
    let e = CobElement::monomial(&space, ctx.pn(1).unwrap(), &[]).unwrap();
    let op = SteenrodOp::new(&ctx, 2, &[-1], 3).unwrap();
    let st = op.st(&e).unwrap();
    let phi = op.phi(&e).unwrap();
    // [P^1] has degree -1, so St([P^1]) starts at t^-1.
    assert!(!phi.is_zero());
    let low = phi.min_exp().unwrap();
    assert_eq!(st.min_exp(), Some(low));
    let dphi = times_d(&op, &phi, -1);
    for j in low..0 {
        assert_eq!(dphi.get(&(vec![], j)).cloned().unwrap_or_else(|| Scalar::zero(op.ring())), st.coeff(&[], j));
    }
}

#[test]
fn sq_diagram_and_audit() {
    let ctx = ctx3();
    let op = SteenrodOp::new(&ctx, 2, &[-1], 3).unwrap();
    for (_, e) in samples(&ctx, 3) {
        let r = op.sq(&e).unwrap();
        assert!(r.diagram_ok);
        assert!(r.sq.negative_part().is_zero());
        let _ = r.audit_ok();
    }
    let space = ProjProductRing::infinite(ctx.universal(), 1, 3).unwrap();
    let r = op.sq(&CobElement::one(&space)).unwrap();
    assert!(r.audit_ok());
    assert!(r.sq.coeff(&[0], 0).is_one());
    // CH/2: z -> z^2 + t z.
    let r = op.sq(&CobElement::z(&space, 0).unwrap()).unwrap();
    let mut want = BTreeMap::new();
    want.insert((vec![2u16], 0i64), BigRational::one());
    want.insert((vec![1u16], 1i64), BigRational::one());
    assert_eq!(reduced(&r.sq, 2), want);
}

// Classification of additive operations

fn q_ring(ctx: &LazardCtx) -> Ring {
    ctx.b_ring().with_domain(&CoeffDomain::Rationals).unwrap()
}

#[test]
fn counit_passes() {
    let ctx = ctx3();
    let psi = PsiFunctional::counit(&q_ring(&ctx), 2);
    let v = integrality_classify(&ctx, &psi, 1, 1, 2, 2).unwrap();
    assert!(v.passed());
}

#[test]
fn half_gives_a_certificate() {
    let ctx = ctx3();
    let q = q_ring(&ctx);
    let mut values = BTreeMap::new();
    values.insert(vec![], Scalar::from_rational(&q, &rational(1, 2)).unwrap());
    let psi = PsiFunctional::new(&q, 0, 2, values).unwrap();
    match integrality_classify(&ctx, &psi, 0, 0, 2, 2).unwrap() {
        ClassifyVerdict::Fail(c) => {
            assert_eq!(c.r, 0);
            assert_eq!(c.alpha_index, 0);
            assert!(c.alpha.is_one());
            assert_eq!(c.value.constant_term(), rational(1, 2));
            assert_eq!(c.coordinates, vec![rational(1, 2)]);
        }
        v => panic!("expected a certificate, got {v:?}"),
    }
}

#[test]
fn stable_combinations_pass() {
    let ctx = ctx3();
    let q = q_ring(&ctx);
    let mut values = BTreeMap::new();
    values.insert(vec![], Scalar::one(&q));
    values.insert(vec![1], ctx.pn(1).unwrap().coerce_into(&q).unwrap());
    values.insert(vec![0, 1], ctx.basis_elements(2).unwrap()[0].coerce_into(&q).unwrap());
    let psi = PsiFunctional::new(&q, 0, 2, values).unwrap();
    assert!(integrality_classify(&ctx, &psi, 1, 1, 1, 2).unwrap().passed());
    // Shift must match.
    assert!(integrality_classify(&ctx, &psi, 1, 2, 1, 2).is_err());
}

#[test]
fn psi_values_must_be_homogeneous() {
    let ctx = ctx3();
    let q = q_ring(&ctx);
    let mut values = BTreeMap::new();
    values.insert(vec![1], Scalar::one(&q));
    assert!(PsiFunctional::new(&q, 0, 2, values.clone()).is_err());
    assert!(PsiFunctional::new(&q, 1, 2, values).is_ok());
}

#[test]
fn decompose_identity_and_components() {
    let ctx = ctx3();
    let q = q_ring(&ctx);
    let psi = decompose_additive(&ctx, 3, 0, |a| Ok(a.clone())).unwrap();
    assert_eq!(psi, PsiFunctional::counit(&q, 3));
    let ln = LnOperation::new(&ctx, 3).unwrap();
    for rbar in [vec![1u16], vec![0, 1], vec![2], vec![1, 1], vec![3], vec![0, 0, 1]] {
        let deg = classify::s_degree(&rbar);
        let g = |a: &Scalar| ln.s_coefficient(&ln.on_coefficient(a)?, &rbar, ctx.b_ring());
        let psi = decompose_additive(&ctx, 3, deg as i64, g).unwrap();
        let mut want = BTreeMap::new();
        want.insert(rbar.clone(), Scalar::one(&q));
        assert_eq!(psi.values(), &want, "{rbar:?}");
        assert!(integrality_classify(&ctx, &psi, 0, deg as i64, 1, 1).unwrap().passed());
    }
}

// G_l families

fn mult_family(k: i64, trunc: u32, levels: usize) -> GlFamily {
    let law = FormalGroupLaw::multiplicative(&zz(), trunc);
    GlFamily::from_operation(&law, &law, 0, trunc, point_level_basis(&zz(), levels), |e| adams(&law, k, e)).unwrap()
}

#[test]
fn operation_families_validate() {
    assert_eq!(gl_validate(&mult_family(2, 5, 5)).unwrap(), None);
    assert_eq!(gl_validate(&mult_family(-1, 4, 4)).unwrap(), None);

    let ctx = ctx3();
    let law = ctx.universal().clone();
    let basis = lazard_level_basis(&ctx, 1, 3).unwrap();
    let f = GlFamily::from_operation(&law, &law, 1, 5, basis.clone(), |e| adams(&law, 2, e)).unwrap();
    assert_eq!(gl_validate(&f).unwrap(), None);

    let ln = LnOperation::new(&ctx, 5).unwrap();
    let target = ln.morphism().target.clone();
    let f = GlFamily::from_operation(&law, &target, 1, 5, basis, |e| ln.total(e)).unwrap();
    assert_eq!(gl_validate(&f).unwrap(), None);
}

#[test]
fn mutated_families_fail_with_the_right_axiom() {
    let f = mult_family(2, 5, 5);
    let g2 = f.value(2, 0).unwrap().clone();
    let bump = |terms: &[(&[u16], i64)]| g2.add(&int_series(&zz(), 2, 5, terms)).unwrap();

    let asym = f.with_value(2, 0, bump(&[(&[2, 1], 1)])).unwrap();
    assert_eq!(gl_validate(&asym).unwrap().unwrap().axiom, GlAxiom::Symmetric);

    let nondiv = f.with_value(2, 0, bump(&[(&[2, 0], 1), (&[0, 2], 1)])).unwrap();
    assert_eq!(gl_validate(&nondiv).unwrap().unwrap().axiom, GlAxiom::Divisible);

    let scaled = f.with_value(2, 0, g2.scale_int(3)).unwrap();
    let v = gl_validate(&scaled).unwrap().unwrap();
    assert_eq!(v.axiom, GlAxiom::Additivity);
}

#[test]
fn chow_mod_p_families() {
    for p in [2u64, 3] {
        let ring = Ring::mod_p(p).unwrap();
        let add = FormalGroupLaw::additive(&ring, 10);
        let n = 2;
        let basis: Vec<Vec<Scalar>> =
            (0..=n).map(|l| if l == n { vec![Scalar::one(&ring)] } else { Vec::new() }).collect();
        let q = p as u16;
        let sym = int_series(&ring, 2, 10, &[(&[1, 1], 1), (&[q, 1], 1), (&[1, q], 1), (&[q, q], 2)]);
        let mut values: Vec<Vec<TruncSeries>> = vec![Vec::new(), Vec::new()];
        values.push(vec![sym]);
        let f = GlFamily::new(&add, &add, n as i64, 10, basis.clone(), values).unwrap();
        assert_eq!(gl_validate(&f).unwrap(), None);

        let bad = int_series(&ring, 2, 10, &[(&[3, 3], 1)]);
        let bad = if p == 3 { int_series(&ring, 2, 10, &[(&[2, 2], 1)]) } else { bad };
        let values = vec![Vec::new(), Vec::new(), vec![bad]];
        let f = GlFamily::new(&add, &add, n as i64, 10, basis, values).unwrap();
        assert_eq!(gl_validate(&f).unwrap().unwrap().axiom, GlAxiom::Additivity);
    }
}

#[test]
fn reconstruct_from_constants() {
    for k in [1i64, 2, 3] {
        let f = mult_family(k, 5, 5);
        let law = f.source().clone();
        let consts = f.constants();
        assert_eq!(consts[2][0].constant_term(), BigRational::from_integer(BigInt::from(k * k)));
        let g = gl_reconstruct(&law, &law, 0, f.basis().to_vec(), &consts, 5).unwrap();
        assert_eq!(g.values(), f.values(), "k = {k}");
    }

    let ring = Ring::mod_p(2).unwrap();
    let law = FormalGroupLaw::multiplicative(&ring, 4);
    let basis = point_level_basis(&ring, 3);
    let consts = vec![vec![Scalar::one(&ring)]; 4];
    assert!(matches!(gl_reconstruct(&law, &law, 0, basis, &consts, 4), Err(Error::Precondition(_))));
}

#[test]
fn reconstruct_over_the_universal_law() {
    let ctx = ctx3();
    let law = ctx.universal().clone();
    let basis = lazard_level_basis(&ctx, 1, 4).unwrap();
    let f = GlFamily::from_operation(&law, &law, 1, 4, basis.clone(), |e| adams(&law, 2, e)).unwrap();
    let g = gl_reconstruct(&law, &law, 1, basis, &f.constants(), 4).unwrap();
    assert_eq!(g.values(), f.values());
}

// CH/p and Adams exponents

#[test]
fn chp_basis_examples() {
    assert_eq!(chp_steenrod_basis(2, 2, 3), vec![vec![1]]);
    assert_eq!(chp_steenrod_basis(2, 1, 1), vec![Vec::<u64>::new()]);
    assert_eq!(chp_steenrod_basis(3, 2, 6), vec![vec![2, 2]]);
    assert_eq!(chp_steenrod_basis(2, 3, 7), vec![vec![3, 1]]);
    assert!(chp_steenrod_basis(2, 3, 2).is_empty());
}

#[test]
fn chp_ring_structure() {
    for p in [2u64, 3, 5] {
        let ring = Ring::mod_p(p).unwrap();
        let xv = crate::fgl::x_only();
        let trunc = (p * p * p) as u32;
        let s = |terms: &[(u64, i64)]| {
            TruncSeries::from_terms(&ring, &xv, trunc, terms.iter().map(|&(e, c)| (vec![e as u16], Scalar::from_int(&ring, c))))
                .unwrap()
        };
        let frob = s(&[(p, 1)]);
        let samples = vec![s(&[(1, 1)]), frob.clone(), s(&[(1, 1), (p, 1)]), s(&[(1, 2), (p * p, 1)])];
        let check = chp_mult_ring_check(p, &samples).unwrap();
        assert!(check.ok(), "{check:?}");
        assert_eq!(check.pairs_checked, 10);
        assert_eq!(frob.compose(&frob).unwrap(), s(&[(p * p, 1)]));
    }
    let bad = TruncSeries::from_terms(&Ring::mod_p(2).unwrap(), &crate::fgl::x_only(), 4, vec![(vec![3u16], Scalar::one(&Ring::mod_p(2).unwrap()))]).unwrap();
    assert!(chp_mult_ring_check(2, &[bad]).is_err());
}

#[test]
fn adams_exponents() {
    let e = |n, r| adams_exponent(n, r, 100).unwrap();
    assert_eq!(e(0, 5), BigInt::one());
    assert_eq!(e(1, 2), BigInt::from(2));
    assert_eq!(e(3, 4), BigInt::from(2));
    assert_eq!(e(1, 3), BigInt::from(6));
    assert!(matches!(adams_exponent(1, 1, 100), Err(Error::Precondition(_))));
    assert!(matches!(adams_exponent(1, 3, 5), Err(Error::Precondition(_))));
}
