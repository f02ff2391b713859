//! Additive operations out of cobordism through their functionals on
//! Landweber-Novikov coefficients.
//!
//! An additive operation `G: Omega^n -> Omega^m (x) Q` is `psi o S_LN` for a
//! unique `Lambda`-linear `psi: Lambda[s] -> Lambda (x) Q`; it is integral
//! exactly when it maps `Omega^n((P^inf)^r)` into `Omega^m((P^inf)^r)` for
//! every `r`. Verdicts here are up to `r_max` and a bound on `s`-degrees.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::ln::LnOperation;
use crate::cobordism::{CobElement, ProjProductRing};
use crate::error::{Error, Result};
use crate::lazard::LazardCtx;
use crate::scalars::{CoeffDomain, Ring, Scalar};

/// Weighted degree `sum k r_k` of `s1^r1 s2^r2 ...`.
pub(crate) fn s_degree(rbar: &[u16]) -> u32 {
    rbar.iter().enumerate().map(|(i, &r)| (i as u32 + 1) * r as u32).sum()
}

fn trimmed(rbar: &[u16]) -> Vec<u16> {
    let mut v = rbar.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Exponent vectors of weighted degree exactly `d`, in lexicographic order.
pub(crate) fn s_monomials(d: u32) -> Vec<Vec<u16>> {
    fn rec(k: u32, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if k == 0 {
            if left == 0 {
                out.push(trimmed(cur));
            }
            return;
        }
        let mut r = 0;
        while r * k <= left {
            cur[k as usize - 1] = r as u16;
            rec(k - 1, left - r * k, cur, out);
            r += 1;
        }
        cur[k as usize - 1] = 0;
    }
    let mut out = Vec::new();
    if d == 0 {
        return vec![Vec::new()];
    }
    rec(d, d, &mut vec![0; d as usize], &mut out);
    out.sort();
    out
}

/// A `Lambda`-linear functional `Lambda[s] -> Lambda (x) Q`, given on the
/// `s`-monomials of degree at most `deg_max` (absent ones are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct PsiFunctional {
    ring: Ring,
    degree_shift: i64,
    deg_max: u32,
    values: BTreeMap<Vec<u16>, Scalar>,
}

impl PsiFunctional {
    /// `ring` is `Q[b1..bN]`; the value on `s^rbar` must be homogeneous of
    /// weight `|rbar| - degree_shift`.
    pub fn new(ring: &Ring, degree_shift: i64, deg_max: u32, values: BTreeMap<Vec<u16>, Scalar>) -> Result<PsiFunctional> {
        let mut clean = BTreeMap::new();
        for (k, v) in values {
            let k = trimmed(&k);
            let v = v.coerce_into(ring)?;
            if v.is_zero() {
                continue;
            }
            if s_degree(&k) > deg_max {
                return Err(Error::BoundExceeded(format!("value on s^{k:?} beyond degree {deg_max}")));
            }
            let want = s_degree(&k) as i64 - degree_shift;
            match v.homogeneous_degree()? {
                Some(w) if w as i64 == want => {}
                _ => {
                    return Err(Error::Precondition(format!("value on s^{k:?} must be homogeneous of weight {want}")));
                }
            }
            clean.insert(k, v);
        }
        Ok(PsiFunctional { ring: ring.clone(), degree_shift, deg_max, values: clean })
    }

    /// `1 -> 1`, everything else to zero: the identity operation.
    pub fn counit(ring: &Ring, deg_max: u32) -> PsiFunctional {
        let mut values = BTreeMap::new();
        values.insert(Vec::new(), Scalar::one(ring));
        PsiFunctional { ring: ring.clone(), degree_shift: 0, deg_max, values }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn degree_shift(&self) -> i64 {
        self.degree_shift
    }

    pub fn deg_max(&self) -> u32 {
        self.deg_max
    }

    pub fn values(&self) -> &BTreeMap<Vec<u16>, Scalar> {
        &self.values
    }

    pub fn value(&self, rbar: &[u16]) -> Scalar {
        self.values.get(&trimmed(rbar)).cloned().unwrap_or_else(|| Scalar::zero(&self.ring))
    }

    /// `psi(sum_r lambda_r s^r) = sum_r lambda_r psi(s^r)`.
    pub fn apply(&self, split: &BTreeMap<Vec<u16>, Scalar>) -> Result<Scalar> {
        let mut acc = Scalar::zero(&self.ring);
        for (k, lambda) in split {
            let k = trimmed(k);
            if let Some(v) = self.values.get(&k) {
                acc = acc.add(&lambda.coerce_into(&self.ring)?.mul(v)?)?;
            }
        }
        Ok(acc)
    }
}

/// First element whose image is not integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub r: usize,
    pub exps: Vec<u16>,
    /// Degree of `alpha` and its index in the lattice basis of that degree.
    pub alpha_degree: u32,
    pub alpha_index: usize,
    pub alpha: Scalar,
    pub z_monomial: Vec<u16>,
    pub value: Scalar,
    /// Coordinates of `value` in the b-monomial basis of its degree.
    pub coordinates: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassifyVerdict {
    /// Integral on every tested element.
    Pass { r_max: usize, deg_max: u32, elements: usize },
    Fail(Box<Certificate>),
}

impl ClassifyVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ClassifyVerdict::Pass { .. })
    }
}

struct Job {
    r: usize,
    exps: Vec<u16>,
    w: u32,
    index: usize,
    alpha: Scalar,
}

fn exponent_vectors(r: usize, total: u32) -> Vec<Vec<u16>> {
    fn rec(r: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() + 1 == r {
            cur.push(left as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x as u16);
            rec(r, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(r, total, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Test `psi o S_LN` on every basis element `alpha z^I` of
/// `Omega^n((P^inf)^r)`, `r <= r_max`, with `alpha` of degree at most
/// `deg_max`, at every `z`-monomial whose value only involves `s`-degrees up
/// to `deg_max`. The first failure in `(r, I, alpha index)` order is returned.
pub fn integrality_classify(
    ctx: &LazardCtx,
    psi: &PsiFunctional,
    n: i64,
    m: i64,
    r_max: usize,
    deg_max: u32,
) -> Result<ClassifyVerdict> {
    if psi.degree_shift != m - n {
        return Err(Error::Precondition(format!(
            "functional shifts degree by {}, operation needs {}",
            psi.degree_shift,
            m - n
        )));
    }
    if deg_max > psi.deg_max {
        return Err(Error::BoundExceeded(format!("functional known to degree {}, asked for {deg_max}", psi.deg_max)));
    }
    if deg_max > ctx.trunc() {
        return Err(Error::DegreeOutOfRange { requested: deg_max, available: ctx.trunc() });
    }
    let trunc = n + 2 * deg_max as i64;
    if trunc < 0 {
        return Ok(ClassifyVerdict::Pass { r_max, deg_max, elements: 0 });
    }
    let trunc = trunc as u32;
    let ln = LnOperation::new(ctx, deg_max)?;

    let mut jobs = Vec::new();
    for r in 0..=r_max {
        let mut by_exps: Vec<Job> = Vec::new();
        for w in 0..=deg_max {
            let zdeg = n + w as i64;
            if zdeg < 0 {
                continue;
            }
            let basis = ctx.basis_elements(w)?;
            for exps in exponent_vectors(r, zdeg as u32) {
                for (index, alpha) in basis.iter().enumerate() {
                    by_exps.push(Job { r, exps: exps.clone(), w, index, alpha: alpha.clone() });
                }
            }
        }
        by_exps.sort_by(|a, b| a.exps.cmp(&b.exps).then(a.w.cmp(&b.w)).then(a.index.cmp(&b.index)));
        jobs.extend(by_exps);
    }
    let elements = jobs.len();

    let b_ring = ctx.b_ring().clone();
    let results: Vec<Result<Option<Certificate>>> = jobs
        .par_iter()
        .map(|job| {
            let space = ProjProductRing::infinite(ctx.universal(), job.r, trunc)?;
            let e = CobElement::monomial(&space, &job.alpha, &job.exps)?;
            let total = ln.total(&e)?;
            for (z, c) in total.coefficients() {
                let zdeg: i64 = z.iter().map(|&x| x as i64).sum();
                if zdeg - n > deg_max as i64 {
                    continue;
                }
                let value = psi.apply(&ln.split_s(&c, &b_ring))?;
                if !ctx.member(&value, &[])? {
                    let (_, coordinates) = ctx.coordinates(&value)?;
                    return Ok(Some(Certificate {
                        r: job.r,
                        exps: job.exps.clone(),
                        alpha_degree: job.w,
                        alpha_index: job.index,
                        alpha: job.alpha.clone(),
                        z_monomial: z,
                        value,
                        coordinates,
                    }));
                }
            }
            Ok(None)
        })
        .collect();
    for res in results {
        if let Some(cert) = res? {
            return Ok(ClassifyVerdict::Fail(Box::new(cert)));
        }
    }
    Ok(ClassifyVerdict::Pass { r_max, deg_max, elements })
}

/// Solve `A X = B` for a square rational matrix and ring-valued right-hand
/// sides.
fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<Scalar>, what: &str) -> Result<Vec<Scalar>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::SingularSystem(what.to_string()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = BigRational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        b[col] = b[col].scale(&inv)?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let v = &a[col][c] * &f;
                a[r][c] -= v;
            }
            b[r] = b[r].sub(&b[col].scale(&f)?)?;
        }
    }
    Ok(b)
}

/// The functional of an additive operation given by its values on the
/// lattice basis of `Lambda` in degrees `0..=deg`. Solved degree by degree:
/// in degree `w` the new unknowns are the values on `s`-monomials of degree
/// `w`, whose coefficients in `S_LN(alpha)` are the rational coordinates of
/// `alpha` itself (`b_k` evaluated at `s_k`).
pub fn decompose_additive(
    ctx: &LazardCtx,
    deg: u32,
    shift: i64,
    g: impl Fn(&Scalar) -> Result<Scalar>,
) -> Result<PsiFunctional> {
    let qring = ctx.b_ring().with_domain(&CoeffDomain::Rationals)?;
    let ln = LnOperation::new(ctx, deg)?;
    let mut values: BTreeMap<Vec<u16>, Scalar> = BTreeMap::new();
    for w in 0..=deg {
        let basis = ctx.basis_elements(w)?;
        let top = s_monomials(w);
        let mut rows = Vec::with_capacity(basis.len());
        let mut rhs = Vec::with_capacity(basis.len());
        for alpha in &basis {
            let split = ln.split_s(&ln.on_coefficient(alpha)?, ctx.b_ring());
            let mut known = Scalar::zero(&qring);
            for (k, lambda) in &split {
                let k = trimmed(k);
                if s_degree(&k) < w {
                    if let Some(v) = values.get(&k) {
                        known = known.add(&lambda.coerce_into(&qring)?.mul(v)?)?;
                    }
                }
            }
            let row: Vec<BigRational> = top
                .iter()
                .map(|k| {
                    let mut padded = k.clone();
                    padded.resize(deg as usize, 0);
                    split.get(&padded).map(|c| c.constant_term()).unwrap_or_else(BigRational::zero)
                })
                .collect();
            rows.push(row);
            rhs.push(g(alpha)?.coerce_into(&qring)?.sub(&known)?);
        }
        if rows.len() != top.len() {
            return Err(Error::SingularSystem(format!(
                "degree {w}: {} equations for {} unknowns",
                rows.len(),
                top.len()
            )));
        }
        let sol = solve_square(rows, rhs, &format!("degree {w}"))?;
        for (k, v) in top.into_iter().zip(sol) {
            if !v.is_zero() {
                values.insert(k, v);
            }
        }
    }
    PsiFunctional::new(&qring, shift, deg, values)
}
