use super::*;
use crate::fgl::rational;
use crate::fgl::RingMap;
use crate::lazard::{universal_law, LazardCtx};
use num_rational::BigRational;
use num_traits::{One, Zero};

fn z() -> Ring {
    Ring::integers()
}

fn t_of(e: &CobElement) -> TruncSeries {
    e.series().clone()
}

fn series(ring: &Ring, vars: &VarTable, trunc: u32, terms: &[(&[u16], i64)]) -> TruncSeries {
    TruncSeries::from_terms(ring, vars, trunc, terms.iter().map(|(e, c)| (e.to_vec(), Scalar::from_int(ring, *c)))).unwrap()
}

#[test]
fn segre_pullbacks() {
    let add = FormalGroupLaw::additive(&z(), 6);
    let sp = ProjProductRing::infinite(&add, 1, 6).unwrap();
    let t = CobElement::z(&sp, 0).unwrap();
    let pulled = pullback_segre(&t, 0, (6, 6)).unwrap();
    assert_eq!(t_of(&pulled), series(&z(), &z_vars(2), 6, &[(&[1, 0], 1), (&[0, 1], 1)]));

    let mult = FormalGroupLaw::multiplicative(&z(), 6);
    let sp = ProjProductRing::infinite(&mult, 1, 6).unwrap();
    let pulled = pullback_segre(&CobElement::z(&sp, 0).unwrap(), 0, (6, 6)).unwrap();
    assert_eq!(t_of(&pulled), series(&z(), &z_vars(2), 6, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], -1)]));

    // t^2 for the universal law: (x + y + 2 b1 xy + ...)^2.
    let fu = universal_law(2).unwrap();
    let sp = ProjProductRing::infinite(&fu, 1, 5).unwrap();
    let t = CobElement::z(&sp, 0).unwrap();
    let sq = pullback_segre(&t.mul(&t).unwrap(), 0, (5, 5)).unwrap();
    let xy = fu.series().clone();
    let expect = xy.mul(&xy).unwrap().reindex(&z_vars(2)).unwrap_or_else(|_| {
        let terms = xy.mul(&xy).unwrap().coefficients();
        TruncSeries::from_terms(fu.ring(), &z_vars(2), 5, terms).unwrap()
    });
    assert_eq!(sq.coefficients(), expect.truncate(5).coefficients());
    let b1 = Scalar::generator(fu.ring(), "b1").unwrap();
    assert_eq!(sq.coeff(&[2, 1]), b1.scale(&rational(4, 1)).unwrap());

    // P^2 x P^2 does not map to P^3.
    let sp = ProjProductRing::new(&add, &[3], 6).unwrap();
    assert!(matches!(pullback_segre(&CobElement::one(&sp), 0, (2, 2)), Err(Error::BoundExceeded(_))));
}

#[test]
fn segre_is_associative() {
    let fu = universal_law(2).unwrap();
    let sp = ProjProductRing::infinite(&fu, 1, 5).unwrap();
    let t = CobElement::z(&sp, 0).unwrap();
    let e = t.mul(&t).unwrap().add(&t).unwrap();
    let left = pullback_segre(&pullback_segre(&e, 0, (5, 5)).unwrap(), 0, (5, 5)).unwrap();
    let right = pullback_segre(&pullback_segre(&e, 0, (5, 5)).unwrap(), 1, (5, 5)).unwrap();
    assert_eq!(left, right);
}

#[test]
fn other_pullbacks() {
    let add = FormalGroupLaw::additive(&z(), 4);
    let sp = ProjProductRing::infinite(&add, 2, 4).unwrap();
    let z1z2 = CobElement::z(&sp, 0).unwrap().mul(&CobElement::z(&sp, 1).unwrap()).unwrap();
    assert!(pullback_point(&z1z2, 0).unwrap().is_zero());
    let diag = pullback_diagonal(&z1z2, 0, 1).unwrap();
    assert_eq!(t_of(&diag), series(&z(), &z_vars(1), 4, &[(&[2], 1)]));
    assert!(matches!(pullback_diagonal(&z1z2, 0, 0), Err(Error::IndexOutOfRange(_))));
    assert!(matches!(pullback_point(&z1z2, 2), Err(Error::IndexOutOfRange(_))));

    // projection then point section of the new factor is the identity;
    // point then projection equals projection then point.
    let e = z1z2.add(&CobElement::z(&sp, 1).unwrap()).unwrap();
    let back = pullback_point(&pullback_projection(&e, 1, 4).unwrap(), 1).unwrap();
    assert_eq!(back, e);
    let a = pullback_point(&pullback_projection(&e, 2, 4).unwrap(), 0).unwrap();
    let b = pullback_projection(&pullback_point(&e, 0).unwrap(), 1, 4).unwrap();
    assert_eq!(a, b);

    let swapped = pullback_permutation(&e, &[1, 0]).unwrap();
    assert_eq!(swapped.coeff(&[1, 0]), Scalar::one(&z()));
    assert!(swapped.coeff(&[0, 1]).is_zero());
}

#[test]
fn hyperplane_pushforwards() {
    let add = FormalGroupLaw::additive(&z(), 6);
    let p2 = ProjProductRing::new(&add, &[2], 6).unwrap();
    let pt = pushforward_hyperplane(&CobElement::one(&p2), 0, 2).unwrap();
    assert_eq!(t_of(&pt), series(&z(), &z_vars(1), 6, &[(&[2], 1)]));
    assert!(pushforward_hyperplane(&pt, 0, 1).unwrap().is_zero());
    assert!(matches!(pushforward_hyperplane(&pt, 0, 3), Err(Error::BoundExceeded(_))));

    let p1p1 = ProjProductRing::new(&add, &[1, 1], 6).unwrap();
    let one = CobElement::one(&p1p1);
    let both = pushforward_hyperplane(&pushforward_hyperplane(&one, 0, 1).unwrap(), 1, 1).unwrap();
    assert_eq!(t_of(&both), series(&z(), &z_vars(2), 6, &[(&[1, 1], 1)]));

    let fu = universal_law(2).unwrap();
    let p3 = ProjProductRing::new(&fu, &[3], 5).unwrap();
    let alpha = Scalar::generator(fu.ring(), "b1").unwrap().scale(&rational(2, 1)).unwrap();
    let e = CobElement::monomial(&p3, &alpha, &[1]).unwrap();
    assert_eq!(pushforward_hyperplane(&e, 0, 1).unwrap(), CobElement::monomial(&p3, &alpha, &[2]).unwrap());
}

#[test]
fn projection_formula() {
    let fu = universal_law(2).unwrap();
    let sp = ProjProductRing::new(&fu, &[3, 2], 5).unwrap();
    let b1 = Scalar::generator(fu.ring(), "b1").unwrap();
    let z1 = CobElement::z(&sp, 0).unwrap();
    let z2 = CobElement::z(&sp, 1).unwrap();
    let e = z1.scale(&b1).unwrap().add(&z2).unwrap();
    let x = z2.mul(&z2).unwrap().add(&CobElement::one(&sp)).unwrap();
    let lhs = pushforward_hyperplane(&e.mul(&x).unwrap(), 0, 1).unwrap();
    let rhs = pushforward_hyperplane(&e, 0, 1).unwrap().mul(&x).unwrap();
    assert_eq!(lhs, rhs);
}

fn point_vars() -> VarTable {
    VarTable::unit(&["t"])
}

fn zero_roots(law: &FormalGroupLaw, n: usize) -> Vec<TruncSeries> {
    let empty = VarTable::new(Vec::<(String, u32)>::new()).unwrap();
    vec![TruncSeries::zero(law.ring(), &empty, law.trunc()); n]
}

#[test]
fn quillen_over_a_point() {
    for n in 0..=4u16 {
        let add = FormalGroupLaw::additive(&z(), 3 * n as u32 + 1);
        let f = series(&z(), &point_vars(), add.trunc(), &[(&[n], 1)]);
        let r = pushforward_projbundle(&add, &f, "t", &zero_roots(&add, n as usize + 1), 0).unwrap();
        assert!(r.constant_term().is_one(), "n = {n}");
    }
    let ctx = LazardCtx::build(4).unwrap();
    let fu = universal_law(6).unwrap();
    for n in 0..=4u32 {
        let f = TruncSeries::one(fu.ring(), &point_vars(), 3 * n + 1);
        let r = pushforward_projbundle(&fu, &f, "t", &zero_roots(&fu, n as usize + 1), n).unwrap();
        let got = r.constant_term();
        assert_eq!(got, ctx.pn(n).unwrap().coerce_into(fu.ring()).unwrap(), "[P^{n}]");
    }
}

/// `pi_*(xi^k)` for `P(L + O)` over `P^1` in Chow groups by brute force:
/// reduce `xi^k` modulo `xi^2 + z xi` (with `z^2 = 0`) and read off the
/// coefficient of `xi`. Entries are `(a, b)` meaning `a + b z`.
fn brute_force_rank2(k: usize) -> (i64, i64) {
    let mut v: Vec<(i64, i64)> = vec![(0, 0); k + 1];
    v[k] = (1, 0);
    for d in (2..=k).rev() {
        let (a, b) = v[d];
        v[d] = (0, 0);
        // xi^d = xi^(d-2) xi^2 = -z xi^(d-1)
        let (c, e) = v[d - 1];
        v[d - 1] = (c, e - a);
        let _ = b;
    }
    if k >= 1 {
        v[1]
    } else {
        (0, 0)
    }
}

#[test]
fn quillen_rank_two_over_p1() {
    let vars = VarTable::unit(&["t", "z"]);
    let base = VarTable::unit(&["z"]);
    let add = FormalGroupLaw::additive(&z(), 12);
    let zr = series(&z(), &base, 12, &[(&[1], 1)]);
    let zero = TruncSeries::zero(&z(), &base, 12);
    for k in 0..=5u16 {
        let f = series(&z(), &vars, 12, &[(&[k, 0], 1)]);
        let r = pushforward_projbundle(&add, &f, "t", &[zr.clone(), zero.clone()], 1).unwrap();
        let (a, b) = brute_force_rank2(k as usize);
        assert_eq!(r, series(&z(), &base, 1, &[(&[0], a), (&[1], b)]), "xi^{k}");
    }
}

#[test]
fn base_change_to_the_multiplicative_law() {
    // b_k -> (-1)^k / (k+1)! sends the universal law to x + y - xy over Q.
    let n = 4u32;
    let fu = universal_law(n).unwrap();
    let q = Ring::rationals();
    let mut images = BTreeMap::new();
    let mut fact = BigRational::one();
    for k in 1..=n {
        fact *= BigRational::from_integer((k + 1).into());
        let sign = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        images.insert(format!("b{k}"), Scalar::from_rational(&q, &(sign / fact.clone())).unwrap());
    }
    let phi = RingMap::Generators(images);
    let mapped = phi.apply_series(fu.series(), &q).unwrap().truncate(n + 1);
    assert_eq!(mapped, FormalGroupLaw::multiplicative(&q, n + 1).series().clone());

    let fu6 = universal_law(6).unwrap();
    let mult = FormalGroupLaw::multiplicative(&q, 13);
    let mut images6 = BTreeMap::new();
    let mut fact = BigRational::one();
    for k in 1..=6u32 {
        fact *= BigRational::from_integer((k + 1).into());
        let sign = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        images6.insert(format!("b{k}"), Scalar::from_rational(&q, &(sign / fact.clone())).unwrap());
    }
    let phi6 = RingMap::Generators(images6);
    for n in 0..=3u32 {
        let f = TruncSeries::one(fu6.ring(), &point_vars(), 3 * n + 1);
        let r = pushforward_projbundle(&fu6, &f, "t", &zero_roots(&fu6, n as usize + 1), n).unwrap();
        let special = phi6.apply(&r.constant_term(), &q, 100).unwrap();
        let fq = TruncSeries::one(&q, &point_vars(), 3 * n + 1);
        let direct = pushforward_projbundle(&mult, &fq, "t", &zero_roots(&mult, n as usize + 1), 0).unwrap();
        assert_eq!(special, direct.constant_term());
        assert!(special.is_one());
    }
}

#[test]
fn blowups() {
    let base = VarTable::unit(&["l", "m"]);
    // Each power of the nilpotent part costs precision in t, hence trunc 16.
    let add = FormalGroupLaw::additive(&z(), 16);
    let l = series(&z(), &base, 16, &[(&[1, 0], 1)]);
    let m = series(&z(), &base, 16, &[(&[0, 1], 1)]);
    let one = TruncSeries::one(&z(), &base, 3);
    assert_eq!(blowup_class(&add, &[l.clone()], 3).unwrap(), one);
    assert_eq!(blowup_class(&add, &[l.clone(), m.clone()], 3).unwrap(), one);

    // Multiplicative law, one root with l^2 = 0: the integrand is
    // -1 / (t (t(1 - l) + l)) = -(1 + l) t^-2 + l t^-3, with zero residue.
    let single = VarTable::unit(&["l"]);
    let mult = FormalGroupLaw::multiplicative(&z(), 10);
    let l1 = series(&z(), &single, 10, &[(&[1], 1)]);
    assert_eq!(blowup_class(&mult, &[l1], 1).unwrap(), TruncSeries::one(&z(), &single, 1));

    let fu = universal_law(5).unwrap();
    let zero = TruncSeries::zero(fu.ring(), &single, 11);
    let r = blowup_class(&fu, &[zero], 2).unwrap();
    assert_eq!(r, TruncSeries::one(fu.ring(), &single, 2));
}

#[test]
fn chern_classes() {
    let v = VarTable::unit(&["l", "m"]);
    let s = series(&z(), &v, 4, &[(&[2, 0], 1), (&[0, 2], 1)]);
    let c = symmetric_to_chern(&s, &["l", "m"]).unwrap();
    assert_eq!(c.coeff(&[2, 0]), Scalar::from_int(&z(), 1));
    assert_eq!(c.coeff(&[0, 1]), Scalar::from_int(&z(), -2));
    assert_eq!(c.nterms(), 2);
    let asym = series(&z(), &v, 4, &[(&[1, 0], 1)]);
    assert!(matches!(symmetric_to_chern(&asym, &["l", "m"]), Err(Error::NonSymmetricResult(_))));
    let zero = TruncSeries::zero(&z(), &v, 4);
    assert!(symmetric_to_chern(&zero, &["l", "m"]).unwrap().is_zero());
    let _ = BigRational::zero();
}
