//! Chow groups mod `p`: the Steenrod basis of additive operations, the ring
//! of additive power series under composition, and the Adams exponent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::scalars::{CoeffDomain, Scalar};
use crate::series::TruncSeries;

/// Partitions `(k_1 >= k_2 >= ...)` with parts `p^r - 1` (`r >= 1`),
/// `sum = m - n` and at most `n` parts, in decreasing lexicographic order.
pub fn chp_steenrod_basis(p: u64, n: u32, m: u32) -> Vec<Vec<u64>> {
    if m < n {
        return Vec::new();
    }
    let total = (m - n) as u64;
    let mut parts = Vec::new();
    let mut q = p;
    while q - 1 <= total {
        parts.push(q - 1);
        q *= p;
    }
    parts.reverse();
    let mut out = Vec::new();
    fn rec(parts: &[u64], left: u64, slots: u32, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for (i, &k) in parts.iter().enumerate() {
            if k <= left {
                cur.push(k);
                rec(&parts[i..], left - k, slots - 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(&parts, total, n, &mut Vec::new(), &mut out);
    out
}

/// Result of [`chp_mult_ring_check`]: the first failing pair and why.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChpCheck {
    pub pairs_checked: usize,
    pub failure: Option<(usize, usize, String)>,
}

impl ChpCheck {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Coefficients `c_r` of `sum_r c_r x^(p^r)`; fails if other powers occur.
fn frobenius_coeffs(s: &TruncSeries, p: u64) -> Result<Vec<Scalar>> {
    let mut out: Vec<Scalar> = Vec::new();
    for (e, c) in s.coefficients() {
        let mut k = e[0] as u64;
        let mut r = 0usize;
        while k > 1 && k % p == 0 {
            k /= p;
            r += 1;
        }
        if k != 1 {
            return Err(Error::Precondition(format!("x^{} is not a power x^(p^r)", e[0])));
        }
        if out.len() <= r {
            out.resize(r + 1, Scalar::zero(s.ring()));
        }
        out[r] = c;
    }
    Ok(out)
}

/// Composition of additive series over `Z/p` is commutative, and matches
/// the product of coefficient sequences (`sum c_r F^r`, `F` the Frobenius);
/// addition matches their sum.
pub fn chp_mult_ring_check(p: u64, samples: &[TruncSeries]) -> Result<ChpCheck> {
    let mut coeffs = Vec::with_capacity(samples.len());
    for s in samples {
        if s.ring().domain() != &CoeffDomain::ModP(p) || s.vars().len() != 1 {
            return Err(Error::Precondition(format!("samples must be series in one variable over Z/{p}")));
        }
        coeffs.push(frobenius_coeffs(s, p)?);
    }
    let mut checked = 0;
    for i in 0..samples.len() {
        for j in 0..samples.len() {
            if j < i {
                continue;
            }
            checked += 1;
            let (a, b) = (&samples[i], &samples[j]);
            let t = a.trunc().min(b.trunc());
            let ab = a.compose(b)?.truncate(t);
            let ba = b.compose(a)?.truncate(t);
            if ab != ba {
                return Ok(ChpCheck { pairs_checked: checked, failure: Some((i, j, "composition does not commute".into())) });
            }
            // Product of Frobenius polynomials.
            let ring = a.ring();
            let mut prod = vec![Scalar::zero(ring); coeffs[i].len() + coeffs[j].len()];
            for (r, x) in coeffs[i].iter().enumerate() {
                for (s, y) in coeffs[j].iter().enumerate() {
                    prod[r + s] = prod[r + s].add(&x.mul(y)?)?;
                }
            }
            let expected = from_frobenius(a, &prod, p, t)?;
            if expected != ab {
                return Ok(ChpCheck { pairs_checked: checked, failure: Some((i, j, "composition is not the product".into())) });
            }
            let n = coeffs[i].len().max(coeffs[j].len());
            let zero = Scalar::zero(ring);
            let sum: Vec<Scalar> = (0..n)
                .map(|k| coeffs[i].get(k).unwrap_or(&zero).add(coeffs[j].get(k).unwrap_or(&zero)))
                .collect::<Result<_>>()?;
            if from_frobenius(a, &sum, p, t)? != a.add(b)?.truncate(t) {
                return Ok(ChpCheck { pairs_checked: checked, failure: Some((i, j, "addition is not the sum".into())) });
            }
        }
    }
    Ok(ChpCheck { pairs_checked: checked, failure: None })
}

fn from_frobenius(like: &TruncSeries, c: &[Scalar], p: u64, trunc: u32) -> Result<TruncSeries> {
    let mut terms = Vec::new();
    let mut q = 1u64;
    for x in c {
        if q > trunc as u64 {
            break;
        }
        terms.push((vec![q as u16], x.clone()));
        q *= p;
    }
    TruncSeries::from_terms(like.ring(), like.vars(), trunc, terms)
}

/// `e(n, r) = gcd_k k^n (k^(r-1) - 1)` over `|k| <= k_bound` (`0^0 = 1`),
/// accepted only when the gcd no longer changes over `|k| > k_bound / 2`.
pub fn adams_exponent(n: u32, r: u32, k_bound: u64) -> Result<BigInt> {
    if r < 2 {
        return Err(Error::Precondition("r must be at least 2".into()));
    }
    if k_bound < 10 {
        return Err(Error::Precondition("k_bound must be at least 10".into()));
    }
    let term = |k: i64| -> BigInt {
        let k = BigInt::from(k);
        let kn: BigInt = if n == 0 { BigInt::one() } else { Pow::pow(&k, n) };
        kn * (Pow::pow(&k, r - 1) - BigInt::one())
    };
    let half = (k_bound / 2) as i64;
    let mut g = BigInt::zero();
    for k in -half..=half {
        g = g.gcd(&term(k));
    }
    let settled = g.clone();
    for k in half + 1..=k_bound as i64 {
        g = g.gcd(&term(k)).gcd(&term(-k));
    }
    if g != settled {
        return Err(Error::Unstabilized(k_bound));
    }
    Ok(g)
}
