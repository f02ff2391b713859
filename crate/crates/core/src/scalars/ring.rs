use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named polynomial generator together with its grading weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub weight: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, weight: u32) -> Self {
        Generator { name: name.into(), weight }
    }
}

/// Recursive description of a coefficient ring, as it appears in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RingDescriptor {
    Integers,
    Rationals,
    ModP {
        p: u64,
    },
    Poly {
        base: Box<RingDescriptor>,
        generators: Vec<Generator>,
    },
    Localized {
        base: Box<RingDescriptor>,
        #[serde(with = "bigint_strings")]
        inverted: Vec<BigInt>,
    },
}

mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// The ground ring the polynomial coefficients live in after flattening.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    Integers,
    Rationals,
    ModP(u64),
    /// Z with the listed primes inverted (sorted, distinct).
    Localized(Vec<BigInt>),
}

impl CoeffDomain {
    pub fn is_field(&self) -> bool {
        matches!(self, CoeffDomain::Rationals | CoeffDomain::ModP(_))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoeffDomain::ModP(p) => *p,
            _ => 0,
        }
    }

    /// True when the domain contains Q (every nonzero integer is a unit).
    pub fn is_q_algebra(&self) -> bool {
        matches!(self, CoeffDomain::Rationals)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        match self {
            CoeffDomain::Rationals => true,
            CoeffDomain::Integers => q.is_integer(),
            CoeffDomain::ModP(p) => {
                q.is_integer() && !q.is_negative() && q.numer() < &BigInt::from(*p)
            }
            CoeffDomain::Localized(primes) => strip_primes(q.denom().clone(), primes).is_one(),
        }
    }

    /// Bring a rational into canonical form, failing if it has no image.
    pub fn coerce(&self, q: &BigRational) -> Result<BigRational> {
        match self {
            CoeffDomain::ModP(p) => {
                let p = BigInt::from(*p);
                let d = q.denom().mod_floor(&p);
                if d.is_zero() {
                    return Err(Error::InexactDivision(format!("{q} has no image mod {p}")));
                }
                let inv = mod_inverse(&d, &p).expect("p prime");
                Ok(BigRational::from_integer((q.numer() * inv).mod_floor(&p)))
            }
            _ => {
                if self.contains(q) {
                    Ok(q.clone())
                } else {
                    Err(Error::InexactDivision(format!("{q} is not in {self}")))
                }
            }
        }
    }

    /// Canonical form of a value already known to lie in the domain (or an
    /// integer combination of such values).
    pub fn normalize(&self, q: BigRational) -> BigRational {
        match self {
            CoeffDomain::ModP(p) => {
                debug_assert!(q.is_integer());
                BigRational::from_integer(q.numer().mod_floor(&BigInt::from(*p)))
            }
            _ => q,
        }
    }

    pub fn inverse(&self, q: &BigRational) -> Option<BigRational> {
        if q.is_zero() {
            return None;
        }
        match self {
            CoeffDomain::ModP(p) => {
                let p = BigInt::from(*p);
                mod_inverse(&q.numer().mod_floor(&p), &p).map(BigRational::from_integer)
            }
            _ => {
                let inv = q.recip();
                self.contains(&inv).then_some(inv)
            }
        }
    }

    pub fn is_unit(&self, q: &BigRational) -> bool {
        self.inverse(q).is_some()
    }

    /// Exact quotient `a / c` inside the domain.
    pub fn divide(&self, a: &BigRational, c: &BigRational) -> Result<BigRational> {
        if c.is_zero() {
            return Err(Error::InexactDivision("division by zero".into()));
        }
        match self {
            CoeffDomain::ModP(_) => {
                let inv = self
                    .inverse(c)
                    .ok_or_else(|| Error::InexactDivision(format!("{c} is not a unit")))?;
                Ok(self.normalize(a * inv))
            }
            _ => {
                let q = a / c;
                if self.contains(&q) {
                    Ok(q)
                } else {
                    Err(Error::InexactDivision(format!("{a} / {c} is not in {self}")))
                }
            }
        }
    }
}

impl fmt::Display for CoeffDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffDomain::Integers => write!(f, "Z"),
            CoeffDomain::Rationals => write!(f, "Q"),
            CoeffDomain::ModP(p) => write!(f, "Z/{p}"),
            CoeffDomain::Localized(ps) => {
                let names: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{}]", names.join(","))
            }
        }
    }
}

fn strip_primes(mut d: BigInt, primes: &[BigInt]) -> BigInt {
    for p in primes {
        while (&d % p).is_zero() {
            d /= p;
        }
    }
    d
}

pub(crate) fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(p);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(p))
    } else {
        None
    }
}

/// Prime factors of a nonzero integer by trial division (inputs are small).
pub fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug)]
pub struct RingInner {
    descriptor: RingDescriptor,
    domain: CoeffDomain,
    generators: Vec<Generator>,
}

/// A validated, flattened coefficient ring: a ground domain plus an ordered
/// list of weighted polynomial generators. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.domain == other.0.domain && self.0.generators == other.0.generators)
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new(descriptor: RingDescriptor) -> Result<Ring> {
        let (domain, generators) = flatten(&descriptor)?;
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if g.weight == 0 {
                return Err(Error::InvalidRing(format!("generator {} has weight 0", g.name)));
            }
            if !seen.insert(g.name.clone()) {
                return Err(Error::InvalidRing(format!("duplicate generator {}", g.name)));
            }
        }
        Ok(Ring(Arc::new(RingInner { descriptor, domain, generators })))
    }

    pub fn integers() -> Ring {
        Ring::new(RingDescriptor::Integers).unwrap()
    }

    pub fn rationals() -> Ring {
        Ring::new(RingDescriptor::Rationals).unwrap()
    }

    pub fn mod_p(p: u64) -> Result<Ring> {
        Ring::new(RingDescriptor::ModP { p })
    }

    /// Polynomial ring over a ground domain descriptor.
    pub fn polynomial(base: RingDescriptor, generators: Vec<Generator>) -> Result<Ring> {
        Ring::new(RingDescriptor::Poly { base: Box::new(base), generators })
    }

    /// Same generators, integers in `inverted` made invertible.
    pub fn localized(&self, inverted: &[BigInt]) -> Result<Ring> {
        Ring::new(RingDescriptor::Localized {
            base: Box::new(self.0.descriptor.clone()),
            inverted: inverted.to_vec(),
        })
    }

    /// Adjoin further generators.
    pub fn extended(&self, extra: Vec<Generator>) -> Result<Ring> {
        if extra.is_empty() {
            return Ok(self.clone());
        }
        Ring::new(RingDescriptor::Poly { base: Box::new(self.0.descriptor.clone()), generators: extra })
    }

    /// Same generators over a different ground domain.
    pub fn with_domain(&self, domain: &CoeffDomain) -> Result<Ring> {
        let base = match domain {
            CoeffDomain::Integers => RingDescriptor::Integers,
            CoeffDomain::Rationals => RingDescriptor::Rationals,
            CoeffDomain::ModP(p) => RingDescriptor::ModP { p: *p },
            CoeffDomain::Localized(ps) => RingDescriptor::Localized {
                base: Box::new(RingDescriptor::Integers),
                inverted: ps.clone(),
            },
        };
        if self.0.generators.is_empty() {
            Ring::new(base)
        } else {
            Ring::new(RingDescriptor::Poly { base: Box::new(base), generators: self.0.generators.clone() })
        }
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.0.descriptor
    }

    pub fn domain(&self) -> &CoeffDomain {
        &self.0.domain
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.generators
    }

    pub fn ngens(&self) -> usize {
        self.0.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.0.generators.iter().position(|g| g.name == name)
    }

    pub fn weights(&self) -> Vec<u32> {
        self.0.generators.iter().map(|g| g.weight).collect()
    }

    pub fn check_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.to_string(), other.to_string()))
        }
    }

    /// Whether the ring has no additive torsion.
    pub fn is_torsion_free(&self) -> bool {
        !matches!(self.0.domain, CoeffDomain::ModP(_))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.domain)?;
        if !self.0.generators.is_empty() {
            let names: Vec<&str> = self.0.generators.iter().map(|g| g.name.as_str()).collect();
            write!(f, "[{}]", names.join(","))?;
        }
        Ok(())
    }
}

fn flatten(d: &RingDescriptor) -> Result<(CoeffDomain, Vec<Generator>)> {
    match d {
        RingDescriptor::Integers => Ok((CoeffDomain::Integers, vec![])),
        RingDescriptor::Rationals => Ok((CoeffDomain::Rationals, vec![])),
        RingDescriptor::ModP { p } => {
            if !is_prime(*p) {
                return Err(Error::InvalidRing(format!("{p} is not prime")));
            }
            Ok((CoeffDomain::ModP(*p), vec![]))
        }
        RingDescriptor::Poly { base, generators } => {
            let (dom, mut gens) = flatten(base)?;
            gens.extend(generators.iter().cloned());
            Ok((dom, gens))
        }
        RingDescriptor::Localized { base, inverted } => {
            let (dom, gens) = flatten(base)?;
            let mut primes: Vec<BigInt> = Vec::new();
            for s in inverted {
                if s.is_zero() {
                    return Err(Error::InvalidRing("cannot invert 0".into()));
                }
                primes.extend(prime_factors(s));
            }
            let dom = match dom {
                CoeffDomain::Rationals => CoeffDomain::Rationals,
                CoeffDomain::ModP(p) => {
                    if primes.iter().any(|q| q == &BigInt::from(p)) {
                        return Err(Error::InvalidRing(format!("inverting a multiple of {p} in Z/{p}")));
                    }
                    CoeffDomain::ModP(p)
                }
                CoeffDomain::Integers => {
                    primes.sort();
                    primes.dedup();
                    if primes.is_empty() {
                        CoeffDomain::Integers
                    } else {
                        CoeffDomain::Localized(primes)
                    }
                }
                CoeffDomain::Localized(mut old) => {
                    old.extend(primes);
                    old.sort();
                    old.dedup();
                    CoeffDomain::Localized(old)
                }
            };
            Ok((dom, gens))
        }
    }
}

/// Parse "p/q" or a decimal integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))?;
        Ok(BigRational::from_integer(n))
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
