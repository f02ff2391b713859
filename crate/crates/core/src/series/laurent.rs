//! Laurent series in one distinguished variable with truncated power-series
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{TruncSeries, VarTable};
use crate::error::{Error, Result};
use crate::scalars::{Ring, Scalar};

/// Marker for "every exponent is known" (the series is a Laurent polynomial).
pub const EXACT: i64 = 1 << 40;

fn cap(e: i64) -> i64 {
    e.min(EXACT)
}

/// `sum_k c_k t^k` with `k >= min_exp`. Coefficients with `k > max_exp` are
/// unknown; every coefficient is a body series with the common body
/// truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    t_var: String,
    ring: Ring,
    body: VarTable,
    body_trunc: u32,
    max_exp: i64,
    coeffs: BTreeMap<i64, TruncSeries>,
}

impl LaurentSeries {
    pub fn zero(t_var: &str, ring: &Ring, body: &VarTable, body_trunc: u32) -> LaurentSeries {
        LaurentSeries {
            t_var: t_var.into(),
            ring: ring.clone(),
            body: body.clone(),
            body_trunc,
            max_exp: EXACT,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c * t^k`, exact.
    pub fn monomial(t_var: &str, c: &TruncSeries, k: i64) -> LaurentSeries {
        let mut out = LaurentSeries::zero(t_var, c.ring(), c.vars(), c.trunc());
        if !c.is_zero() {
            out.coeffs.insert(k, c.clone());
        }
        out
    }

    /// `t^k` with unit coefficient.
    pub fn t_power(t_var: &str, ring: &Ring, body: &VarTable, body_trunc: u32, k: i64) -> LaurentSeries {
        LaurentSeries::monomial(t_var, &TruncSeries::one(ring, body, body_trunc), k)
    }

    /// Split a series in `t` and body variables. `max_exp` is the highest
    /// exponent of `t` the caller vouches for.
    pub fn from_series(f: &TruncSeries, t_var: &str, body: &VarTable, body_trunc: u32, max_exp: i64) -> Result<LaurentSeries> {
        let ti = f.vars().index(t_var).ok_or_else(|| Error::UnknownVariable(t_var.into()))?;
        let mut out = LaurentSeries::zero(t_var, f.ring(), body, body_trunc);
        out.max_exp = cap(max_exp);
        let mut grouped: BTreeMap<i64, Vec<(Vec<u16>, Scalar)>> = BTreeMap::new();
        for (ve, c) in f.coefficients() {
            let k = ve[ti] as i64;
            if k > out.max_exp {
                continue;
            }
            let mut be = vec![0u16; body.len()];
            for (j, name) in f.vars().names().iter().enumerate() {
                if j == ti || ve[j] == 0 {
                    continue;
                }
                let bj = body.index(name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                be[bj] = ve[j];
            }
            grouped.entry(k).or_default().push((be, c));
        }
        for (k, terms) in grouped {
            let s = TruncSeries::from_terms(f.ring(), body, body_trunc, terms)?;
            if !s.is_zero() {
                out.coeffs.insert(k, s);
            }
        }
        Ok(out)
    }

    /// Build from explicit body coefficients.
    pub fn from_coeffs(t_var: &str, ring: &Ring, body: &VarTable, body_trunc: u32, max_exp: i64, coeffs: impl IntoIterator<Item = (i64, TruncSeries)>) -> Result<LaurentSeries> {
        let mut out = LaurentSeries::zero(t_var, ring, body, body_trunc);
        out.max_exp = cap(max_exp);
        for (k, c) in coeffs {
            if c.ring() != ring || c.vars() != body {
                return Err(Error::VarMismatch);
            }
            out.add_coeff(k, &c.truncate(body_trunc))?;
        }
        Ok(out)
    }

    pub fn t_var(&self) -> &str {
        &self.t_var
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn body(&self) -> &VarTable {
        &self.body
    }

    pub fn body_trunc(&self) -> u32 {
        self.body_trunc
    }

    /// Highest reliable exponent (`EXACT` for Laurent polynomials).
    pub fn max_exp(&self) -> i64 {
        self.max_exp
    }

    pub fn is_exact(&self) -> bool {
        self.max_exp >= EXACT
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &TruncSeries)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i64) -> Result<TruncSeries> {
        if k > self.max_exp {
            return Err(Error::InsufficientPrecision(format!("t^{k} requested, known up to t^{}", self.max_exp)));
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(|| TruncSeries::zero(&self.ring, &self.body, self.body_trunc)))
    }

    fn add_coeff(&mut self, k: i64, c: &TruncSeries) -> Result<()> {
        if k > self.max_exp || c.is_zero() {
            return Ok(());
        }
        let s = match self.coeffs.remove(&k) {
            Some(old) => old.add(c)?,
            None => c.clone(),
        };
        if !s.is_zero() {
            self.coeffs.insert(k, s);
        }
        Ok(())
    }

    fn check_compatible(&self, other: &LaurentSeries) -> Result<()> {
        self.ring.check_same(&other.ring)?;
        if self.body != other.body || self.t_var != other.t_var {
            return Err(Error::VarMismatch);
        }
        Ok(())
    }

    fn reliable(&self) -> LaurentSeries {
        let mut out = self.clone();
        let m = self.max_exp;
        out.coeffs.retain(|k, _| *k <= m);
        out
    }

    /// Forget coefficients above `max_exp`.
    pub fn truncate_t(&self, max_exp: i64) -> LaurentSeries {
        let mut out = self.clone();
        out.max_exp = out.max_exp.min(max_exp);
        out.reliable()
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.max_exp = self.max_exp.min(other.max_exp);
        out.body_trunc = self.body_trunc.min(other.body_trunc);
        out = out.reliable();
        for (k, c) in &other.coeffs {
            out.add_coeff(*k, c)?;
        }
        for c in out.coeffs.values_mut() {
            *c = c.truncate(out.body_trunc);
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn neg(&self) -> LaurentSeries {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_compatible(other)?;
        let body_trunc = self.body_trunc.min(other.body_trunc);
        let mut out = LaurentSeries::zero(&self.t_var, &self.ring, &self.body, body_trunc);
        let (Some(a0), Some(b0)) = (self.min_exp(), other.min_exp()) else {
            out.max_exp = match (self.min_exp(), other.min_exp()) {
                (None, None) => cap(self.max_exp.saturating_add(other.max_exp)),
                (None, Some(b)) => cap(self.max_exp.saturating_add(b)),
                (Some(a), None) => cap(other.max_exp.saturating_add(a)),
                _ => unreachable!(),
            };
            return Ok(out);
        };
        out.max_exp = cap((self.max_exp.saturating_add(b0)).min(other.max_exp.saturating_add(a0)));
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if k > out.max_exp {
                    break;
                }
                out.add_coeff(k, &a.truncate(body_trunc).mul(&b.truncate(body_trunc))?)?;
            }
        }
        Ok(out)
    }

    /// Multiply every coefficient by a body series.
    pub fn scale(&self, c: &TruncSeries) -> Result<LaurentSeries> {
        let mut out = LaurentSeries::zero(&self.t_var, &self.ring, &self.body, self.body_trunc.min(c.trunc()));
        out.max_exp = self.max_exp;
        for (k, a) in &self.coeffs {
            out.add_coeff(*k, &a.mul(c)?)?;
        }
        Ok(out)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        let mut out = self.clone();
        out.max_exp = if self.is_exact() { EXACT } else { self.max_exp + k };
        out.coeffs = self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect();
        out
    }

    /// Inverse of `t^k (w + N)`: `w` a power series in `t` whose constant
    /// coefficient has invertible augmentation, `N` collecting the lower
    /// coefficients, all nilpotent. Since `N^m` vanishes once its body weight
    /// exceeds the body truncation, `1/(w + N) = w^-1 sum_m (-N w^-1)^m` is a
    /// finite sum. `max_exp` caps the precision computed for exact inputs.
    pub fn invert(&self, max_exp: i64) -> Result<LaurentSeries> {
        let k = self
            .coeffs
            .iter()
            .find(|(_, c)| !c.augmentation().is_zero())
            .map(|(e, _)| *e)
            .ok_or_else(|| Error::NotInvertible("no coefficient with a unit weight-zero part".into()))?;
        if !self.ring.domain().is_unit(&self.coeffs[&k].augmentation()) {
            return Err(Error::NotInvertible(format!("coefficient of t^{k} is not a unit")));
        }
        // Work with u' = t^-k u = w + N.
        let u = self.shift(-k);
        let w_max = u.max_exp.min(max_exp.saturating_add(k));
        let mut w = LaurentSeries::zero(&self.t_var, &self.ring, &self.body, self.body_trunc);
        let mut n = w.clone();
        for (e, c) in &u.coeffs {
            if *e >= 0 {
                w.add_coeff(*e, c)?;
            } else {
                n.add_coeff(*e, c)?;
            }
        }
        w.max_exp = u.max_exp;
        let winv = invert_power_series(&w, w_max)?;
        let mut result = winv.clone();
        if let Some(nmin) = n.min_exp() {
            let minw = n.coeffs.values().map(|c| c.min_weight()).min().unwrap().max(1);
            // Terms m = 0 ..= ceil(body_trunc / minw); N^m vanishes beyond.
            let terms = self.body_trunc.div_ceil(minw) + 1;
            let q = n.mul(&winv)?.neg();
            let mut power = winv.clone();
            for _ in 1..terms {
                power = power.mul(&q)?;
                if power.is_zero() && power.max_exp < nmin {
                    break;
                }
                result = result.add(&power)?;
            }
        }
        let mut out = result.shift(-k);
        if out.is_exact() {
            out = out.truncate_t(max_exp);
        }
        Ok(out)
    }

    /// Coefficient of `t^-1`.
    pub fn residue(&self) -> Result<TruncSeries> {
        self.coeff(-1)
    }

    /// Drop body coefficients beyond a new truncation.
    pub fn truncate_body(&self, body_trunc: u32) -> LaurentSeries {
        let mut out = self.clone();
        out.body_trunc = body_trunc.min(self.body_trunc);
        for c in out.coeffs.values_mut() {
            *c = c.truncate(out.body_trunc);
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// The part with exponents `< 0`.
    pub fn principal_part(&self) -> LaurentSeries {
        let mut out = self.clone();
        out.coeffs.retain(|k, _| *k < 0);
        out.max_exp = out.max_exp.min(EXACT);
        out
    }
}

/// Inverse of a power series in `t` (exponents >= 0) with a unit constant
/// coefficient, computed through `t^max_exp`.
fn invert_power_series(w: &LaurentSeries, max_exp: i64) -> Result<LaurentSeries> {
    let w0 = w.coeff(0)?;
    let w0inv = w0.inverse()?;
    let reach = w.max_exp.min(max_exp);
    let mut out = LaurentSeries::zero(&w.t_var, &w.ring, &w.body, w.body_trunc);
    out.max_exp = reach;
    let mut v: Vec<TruncSeries> = vec![w0inv.clone()];
    for nidx in 1..=reach.max(0) {
        let mut acc = TruncSeries::zero(&w.ring, &w.body, w.body_trunc);
        for (j, wj) in w.coeffs.range(1..=nidx) {
            acc = acc.add(&wj.mul(&v[(nidx - j) as usize])?)?;
        }
        v.push(acc.mul(&w0inv)?.neg());
    }
    if reach >= 0 {
        for (e, c) in v.into_iter().enumerate() {
            out.add_coeff(e as i64, &c)?;
        }
    }
    Ok(out)
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|(k, c)| format!("({})*{}^{}", c, self.t_var, k)).collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" + "))?;
        }
        if !self.is_exact() {
            write!(f, " + O({}^{})", self.t_var, self.max_exp + 1)?;
        }
        Ok(())
    }
}
