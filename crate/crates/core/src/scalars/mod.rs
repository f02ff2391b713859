//! Exact coefficient rings and integer-lattice linear algebra.

mod hnf;
mod poly;
mod ring;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use hnf::{hnf, lattice_member, IntegerLattice};
pub(crate) use hnf::hnf_with_transform;
pub use poly::{Monomial, Poly};
pub use ring::{
    format_rational, is_prime, parse_rational, prime_factors, CoeffDomain, Generator, Ring, RingDescriptor,
};

use crate::error::{Error, Result};

/// An immutable ring element: a finite polynomial over the ring's generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    ring: Ring,
    value: Poly,
}

impl Scalar {
    pub fn from_poly(ring: &Ring, value: Poly) -> Scalar {
        Scalar { ring: ring.clone(), value }
    }

    pub fn zero(ring: &Ring) -> Scalar {
        Scalar { ring: ring.clone(), value: Poly::zero() }
    }

    pub fn one(ring: &Ring) -> Scalar {
        Scalar::from_int(ring, 1)
    }

    pub fn from_int(ring: &Ring, n: i64) -> Scalar {
        let c = ring.domain().normalize(BigRational::from_integer(n.into()));
        Scalar { ring: ring.clone(), value: Poly::constant(c, ring.ngens()) }
    }

    pub fn from_bigint(ring: &Ring, n: &BigInt) -> Scalar {
        let c = ring.domain().normalize(BigRational::from_integer(n.clone()));
        Scalar { ring: ring.clone(), value: Poly::constant(c, ring.ngens()) }
    }

    /// A rational constant; fails if it has no image in the ring.
    pub fn from_rational(ring: &Ring, q: &BigRational) -> Result<Scalar> {
        let c = ring.domain().coerce(q)?;
        Ok(Scalar { ring: ring.clone(), value: Poly::constant(c, ring.ngens()) })
    }

    pub fn generator(ring: &Ring, name: &str) -> Result<Scalar> {
        let i = ring.generator_index(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let m = Monomial::var(i, ring.ngens(), &ring.weights());
        Ok(Scalar { ring: ring.clone(), value: Poly::monomial(m, BigRational::one()) })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn poly(&self) -> &Poly {
        &self.value
    }

    pub fn into_poly(self) -> Poly {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.len() == 1 && self.value.is_constant() && self.value.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.value.is_constant()
    }

    pub fn constant_term(&self) -> BigRational {
        self.value.constant_term()
    }

    /// Weighted degree if homogeneous (zero counts as homogeneous of any
    /// degree and returns `None`).
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        if self.value.is_zero() {
            return Ok(None);
        }
        if self.value.is_homogeneous() {
            Ok(self.value.min_weight())
        } else {
            Err(Error::NonHomogeneous)
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.ring.check_same(&other.ring)?;
        Ok(Scalar { ring: self.ring.clone(), value: self.value.add(&other.value, self.ring.domain()) })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.ring.check_same(&other.ring)?;
        Ok(Scalar { ring: self.ring.clone(), value: self.value.sub(&other.value, self.ring.domain()) })
    }

    pub fn neg(&self) -> Scalar {
        Scalar { ring: self.ring.clone(), value: self.value.neg(self.ring.domain()) }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.ring.check_same(&other.ring)?;
        Ok(Scalar { ring: self.ring.clone(), value: self.value.mul(&other.value, self.ring.domain(), None) })
    }

    pub fn scale(&self, k: &BigRational) -> Result<Scalar> {
        let k = self.ring.domain().coerce(k)?;
        Ok(Scalar { ring: self.ring.clone(), value: self.value.scale(&k, self.ring.domain()) })
    }

    /// Exact quotient; fails with `InexactDivision` when the quotient is not
    /// an element of the ring.
    pub fn exact_div(&self, other: &Scalar) -> Result<Scalar> {
        self.ring.check_same(&other.ring)?;
        let dom = self.ring.domain();
        if other.is_zero() {
            return Err(Error::InexactDivision("division by zero".into()));
        }
        if other.value.is_constant() {
            let c = other.value.constant_term();
            let mut out = Poly::zero();
            for (m, a) in self.value.terms() {
                out.add_term(m.clone(), dom.divide(a, &c)?, dom);
            }
            return Ok(Scalar { ring: self.ring.clone(), value: out });
        }
        let (lm, lc) = other.value.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.value.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return Err(Error::InexactDivision(format!("{} does not divide {}", other, self)));
            }
            let qm = lm.quotient_of(&m);
            let qc = dom.divide(&c, &lc)?;
            rem = rem.sub(&other.value.mul_monomial(&qm, &qc, dom), dom);
            quot.add_term(qm, qc, dom);
        }
        Ok(Scalar { ring: self.ring.clone(), value: quot })
    }

    /// Reinterpret in another ring with the same generator names (possibly a
    /// different ground domain, or extra generators).
    pub fn coerce_into(&self, target: &Ring) -> Result<Scalar> {
        let map = generator_map(&self.ring, target)?;
        let n = target.ngens();
        let w = target.weights();
        let mut out = Poly::zero();
        for (m, c) in self.value.terms() {
            let mut exps = vec![0u16; n];
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    exps[map[i]] += e;
                }
            }
            out.add_term(Monomial::new(exps, &w), target.domain().coerce(c)?, target.domain());
        }
        Ok(Scalar { ring: target.clone(), value: out })
    }
}

/// Index of each source generator inside the target ring, matched by name.
pub(crate) fn generator_map(source: &Ring, target: &Ring) -> Result<Vec<usize>> {
    source
        .generators()
        .iter()
        .map(|g| {
            let j = target.generator_index(&g.name).ok_or_else(|| Error::UnknownVariable(g.name.clone()))?;
            if target.generators()[j].weight != g.weight {
                return Err(Error::RingMismatch(source.to_string(), target.to_string()));
            }
            Ok(j)
        })
        .collect()
}

pub(crate) fn fmt_monomial(names: &[&str], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

pub(crate) fn fmt_poly(names: &[&str], p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let mono = fmt_monomial(names, m);
        let neg = c < &BigRational::zero();
        let abs = if neg { -c } else { c.clone() };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&format_rational(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{}", format_rational(&abs), mono));
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.ring.generators().iter().map(|g| g.name.as_str()).collect();
        write!(f, "{}", fmt_poly(&names, &self.value))
    }
}
