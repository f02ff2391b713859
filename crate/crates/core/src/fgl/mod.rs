//! Formal group laws over an arbitrary coefficient ring, their derived
//! series, and morphisms between them.

mod morphism;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use morphism::{add_morphisms, compose_morphisms, morphism_check, FglMorphism, MorphismCheck, RingMap};

use crate::error::{Error, Result};
use crate::scalars::{CoeffDomain, Ring, Scalar};
use crate::series::{TruncSeries, VarTable};

/// Which axiom a failed check violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    Unit,
    Associativity,
    Commutativity,
}

/// Outcome of [`check_fgl`]; on failure carries the lowest offending
/// monomial (variable exponents) and the coefficient of the difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FglCheck {
    pub failure: Option<(Axiom, Vec<String>, Vec<u16>, Scalar)>,
}

impl FglCheck {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// `F(x, y)` together with its ring and truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroupLaw {
    f: TruncSeries,
}

pub fn xy() -> VarTable {
    VarTable::unit(&["x", "y"])
}

pub fn x_only() -> VarTable {
    VarTable::unit(&["x"])
}

impl FormalGroupLaw {
    /// Wrap a series in the variables `x, y` (in that order).
    pub fn from_series(f: TruncSeries) -> Result<FormalGroupLaw> {
        if f.vars() != &xy() {
            return Err(Error::VarMismatch);
        }
        Ok(FormalGroupLaw { f })
    }

    pub fn additive(ring: &Ring, trunc: u32) -> FormalGroupLaw {
        let x = TruncSeries::var(ring, &xy(), trunc, "x").unwrap();
        let y = TruncSeries::var(ring, &xy(), trunc, "y").unwrap();
        FormalGroupLaw { f: x.add(&y).unwrap() }
    }

    /// `x + y - xy`.
    pub fn multiplicative(ring: &Ring, trunc: u32) -> FormalGroupLaw {
        let x = TruncSeries::var(ring, &xy(), trunc, "x").unwrap();
        let y = TruncSeries::var(ring, &xy(), trunc, "y").unwrap();
        let f = x.add(&y).unwrap().sub(&x.mul(&y).unwrap()).unwrap();
        FormalGroupLaw { f }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.f
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    pub fn trunc(&self) -> u32 {
        self.f.trunc()
    }

    /// Coefficient `a_{i,j}`.
    pub fn coeff(&self, i: u16, j: u16) -> Scalar {
        self.f.coeff(&[i, j])
    }

    pub fn truncate(&self, trunc: u32) -> FormalGroupLaw {
        FormalGroupLaw { f: self.f.truncate(trunc) }
    }

    pub fn change_ring(&self, target: &Ring) -> Result<FormalGroupLaw> {
        Ok(FormalGroupLaw { f: self.f.change_ring(target)? })
    }

    /// `F(a, b)` for series `a`, `b` in a common variable table.
    pub fn formal_sum(&self, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
        if a.vars() != b.vars() {
            return Err(Error::VarMismatch);
        }
        let mut bind = BTreeMap::new();
        bind.insert("x".to_string(), a.clone());
        bind.insert("y".to_string(), b.clone());
        self.f.substitute(a.vars(), &bind)
    }

    /// The formal inverse `chi(x)` with `F(x, chi(x)) = 0`.
    pub fn formal_inverse(&self) -> Result<TruncSeries> {
        let x = TruncSeries::var(self.ring(), &x_only(), self.trunc(), "x")?;
        let mut chi = x.neg();
        for _ in 0..=self.trunc() + 1 {
            let next = chi.sub(&self.formal_sum(&x, &chi)?)?;
            if next == chi {
                break;
            }
            chi = next;
        }
        Ok(chi)
    }

    /// `[n](x)`: `[0] = 0`, `[n+1] = F(x, [n])`, `[-n] = chi([n])`.
    pub fn n_series(&self, n: i64) -> Result<TruncSeries> {
        let x = TruncSeries::var(self.ring(), &x_only(), self.trunc(), "x")?;
        let mut acc = TruncSeries::zero(self.ring(), &x_only(), self.trunc());
        for _ in 0..n.unsigned_abs() {
            acc = self.formal_sum(&x, &acc)?;
        }
        if n < 0 {
            acc = self.formal_inverse()?.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `w(x)` with invariant differential `w(x) dx`, i.e. `1 / F_y(x, 0)`.
    pub fn invariant_form(&self) -> Result<TruncSeries> {
        let fy = self.f.derivative("y")?.filter_vars(|e| e[1] == 0);
        let fy = project_x(&fy)?;
        fy.inverse()
    }

    /// `log_F`, the integral of the invariant form. Fails with
    /// `InexactDivision` when an exponent is not invertible in the ring.
    pub fn logarithm(&self) -> Result<TruncSeries> {
        self.invariant_form()?.integral("x").map(|s| s.truncate(self.trunc()))
    }

    pub fn exponential(&self) -> Result<TruncSeries> {
        self.logarithm()?.reversion()
    }

    /// `F^gamma(x, y) = gamma(F(delta(x), delta(y)))` with `delta` the
    /// compositional inverse of `gamma`.
    pub fn reparametrize(&self, gamma: &TruncSeries) -> Result<FormalGroupLaw> {
        self.ring().check_same(gamma.ring())?;
        let delta = gamma.reversion()?;
        let t = self.trunc().min(gamma.trunc());
        let dx = delta.reindex(&xy())?.truncate(t);
        let dy = rename_x(&delta, "y")?.truncate(t);
        let inner = self.truncate(t).formal_sum(&dx, &dy)?;
        let gx = gamma.truncate(t);
        let out = gx.compose(&inner)?;
        FormalGroupLaw::from_series(out)
    }

    /// Whether `F^gamma` has coefficients in the ring itself although it is
    /// computed after inverting the integer part of the leading coefficient
    /// of `gamma`. Returns the first offending coefficient otherwise.
    pub fn shifted_fgl_integral(&self, gamma: &TruncSeries) -> Result<(bool, Option<((u16, u16), Scalar)>)> {
        let b0 = gamma.coeff(&[1]);
        let c = b0.constant_term();
        if c.is_zero() {
            return Err(Error::Precondition("leading coefficient has zero integer part".into()));
        }
        let ring = self.ring();
        let local = match ring.domain() {
            CoeffDomain::Rationals | CoeffDomain::ModP(_) => ring.clone(),
            _ => {
                let n = c.numer() * c.denom();
                if n.magnitude().is_one() {
                    ring.clone()
                } else {
                    ring.localized(&[n])?
                }
            }
        };
        let shifted = self.change_ring(&local)?.reparametrize(&gamma.change_ring(&local)?)?;
        for (e, coeff) in shifted.series().coefficients() {
            if !coeff.poly().coeffs_in(ring.domain()) {
                return Ok((false, Some(((e[0], e[1]), coeff))));
            }
        }
        Ok((true, None))
    }

    pub fn check(&self) -> Result<FglCheck> {
        check_fgl(self)
    }
}

/// Drop the second variable of an (x, y) series known not to involve it.
fn project_x(s: &TruncSeries) -> Result<TruncSeries> {
    let terms = s.coefficients().into_iter().map(|(e, c)| (vec![e[0]], c));
    TruncSeries::from_terms(s.ring(), &x_only(), s.trunc(), terms)
}

/// A one-variable series in `x`, renamed to `name` and placed in (x, y).
fn rename_x(s: &TruncSeries, name: &str) -> Result<TruncSeries> {
    let idx = if name == "x" { 0 } else { 1 };
    let terms = s.coefficients().into_iter().map(|(e, c)| {
        let mut v = vec![0u16; 2];
        v[idx] = e[0];
        (v, c)
    });
    TruncSeries::from_terms(s.ring(), &xy(), s.trunc(), terms)
}

/// Unit, associativity, then commutativity, each to the law's truncation.
pub fn check_fgl(law: &FormalGroupLaw) -> Result<FglCheck> {
    let f = law.series();
    let ring = law.ring();
    let t = law.trunc();
    let names = |v: &VarTable| v.names().to_vec();

    let x = TruncSeries::var(ring, &xy(), t, "x")?;
    let y = TruncSeries::var(ring, &xy(), t, "y")?;
    let fx0 = f.filter_vars(|e| e[1] == 0);
    let f0y = f.filter_vars(|e| e[0] == 0);
    let unit_diff = fx0.sub(&x)?.add(&f0y.sub(&y)?)?;
    if let Some((e, c)) = unit_diff.first_difference(&TruncSeries::zero(ring, &xy(), t))? {
        return Ok(FglCheck { failure: Some((Axiom::Unit, names(&xy()), e, c)) });
    }

    let v3 = VarTable::unit(&["x", "y", "z"]);
    let x3 = TruncSeries::var(ring, &v3, t, "x")?;
    let y3 = TruncSeries::var(ring, &v3, t, "y")?;
    let z3 = TruncSeries::var(ring, &v3, t, "z")?;
    let fxy = law.formal_sum(&x3, &y3)?;
    let fyz = law.formal_sum(&y3, &z3)?;
    let lhs = law.formal_sum(&fxy, &z3)?;
    let rhs = law.formal_sum(&x3, &fyz)?;
    if let Some((e, c)) = lhs.first_difference(&rhs)? {
        return Ok(FglCheck { failure: Some((Axiom::Associativity, names(&v3), e, c)) });
    }

    let swapped = law.formal_sum(&y, &x)?;
    if let Some((e, c)) = f.first_difference(&swapped)? {
        return Ok(FglCheck { failure: Some((Axiom::Commutativity, names(&xy()), e, c)) });
    }
    Ok(FglCheck { failure: None })
}

/// Largest `k` with `gamma(x) = delta(x^(p^k))` over a ring of characteristic
/// `p`, and `delta`. The answer is only as good as the truncation of `gamma`.
pub fn frobenius_height(gamma: &TruncSeries) -> Result<(u32, TruncSeries)> {
    let p = gamma.ring().domain().characteristic();
    if p == 0 {
        return Err(Error::Precondition("ring does not have prime characteristic".into()));
    }
    if gamma.vars().len() != 1 {
        return Err(Error::Precondition("expected a series in one variable".into()));
    }
    let coeffs = gamma.coefficients();
    if coeffs.is_empty() {
        return Err(Error::ZeroSeries);
    }
    let mut g = 0u64;
    for e in coeffs.keys() {
        g = g.gcd(&(e[0] as u64));
    }
    let mut k = 0u32;
    let mut q = 1u64;
    while g != 0 && g % (q * p) == 0 {
        q *= p;
        k += 1;
    }
    let trunc = (gamma.trunc() as u64 / q) as u32;
    let terms = coeffs.into_iter().map(|(e, c)| (vec![(e[0] as u64 / q) as u16], c));
    Ok((k, TruncSeries::from_terms(gamma.ring(), gamma.vars(), trunc, terms)?))
}

/// `gcd(binom(r, i), 0 < i < r)`.
pub fn dr_gcd(r: u64) -> Result<BigInt> {
    if r < 2 {
        return Err(Error::Precondition("r must be at least 2".into()));
    }
    let mut g = BigInt::zero();
    let mut binom = BigInt::one();
    for i in 1..r {
        binom = binom * BigInt::from(r - i + 1) / BigInt::from(i);
        g = g.gcd(&binom);
    }
    Ok(g)
}

/// `prod_i (gamma(x)/x)(lambda_i)` for nilpotent roots sharing a variable
/// table.
pub fn todd_series(gamma: &TruncSeries, roots: &[TruncSeries]) -> Result<TruncSeries> {
    let lin = gamma.coeff(&[1]);
    if !gamma.ring().domain().is_unit(&lin.constant_term()) {
        return Err(Error::NonInvertibleLeadingCoefficient(lin.to_string()));
    }
    let w = gamma.vars().weights()[0];
    let terms = gamma
        .coefficients()
        .into_iter()
        .filter(|(e, _)| e[0] > 0)
        .map(|(e, c)| (vec![e[0] - 1], c));
    let quot = TruncSeries::from_terms(gamma.ring(), gamma.vars(), gamma.trunc().saturating_sub(w), terms)?;
    let Some(first) = roots.first() else {
        return Err(Error::Precondition("todd_series needs at least one root to fix the variables".into()));
    };
    let mut acc = TruncSeries::one(first.ring(), first.vars(), first.trunc());
    for r in roots {
        acc = acc.mul(&quot.compose(r)?)?;
    }
    Ok(acc)
}

/// Rational helper used by tests and the CLI.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
