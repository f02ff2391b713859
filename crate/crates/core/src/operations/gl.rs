//! Families `g_l: A^(n-l) -> B^(m-l)[[z_1..z_l]]` describing an additive
//! operation `A^n -> B^m` through its values on `alpha z_1 ... z_l`.
//!
//! Each level stores the images of a fixed basis of `A^(n-l)`; other
//! elements are expanded in that basis. Axiom (a_iii) is read with the
//! linear terms of the source law included, i.e. the sum runs over all
//! `(i, j) != (0, 0)`, which is what pulling back along the Segre map gives.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cobordism::{z_vars, CobElement, ProjProductRing};
use crate::error::{Error, Result};
use crate::fgl::FormalGroupLaw;
use crate::lazard::LazardCtx;
use crate::scalars::{Monomial, Ring, Scalar};
use crate::series::{TruncSeries, VarTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlAxiom {
    /// `g_l(alpha)` is symmetric in `z_1..z_l`.
    Symmetric,
    /// `g_l(alpha)` is divisible by `z_1 ... z_l`.
    Divisible,
    /// Compatibility with the source law along the Segre map.
    Additivity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlViolation {
    pub axiom: GlAxiom,
    pub level: usize,
    pub alpha_index: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlFamily {
    source: FormalGroupLaw,
    target: FormalGroupLaw,
    n: i64,
    trunc: u32,
    basis: Vec<Vec<Scalar>>,
    values: Vec<Vec<TruncSeries>>,
}

/// Bases of `A^(n-l) = Lambda_(l-n)` for `l = 0..=levels`.
pub fn lazard_level_basis(ctx: &LazardCtx, n: i64, levels: usize) -> Result<Vec<Vec<Scalar>>> {
    (0..=levels as i64)
        .map(|l| if l < n { Ok(Vec::new()) } else { ctx.basis_elements((l - n) as u32) })
        .collect()
}

/// `{1}` at every level, for ungraded theories over a ring of constants.
pub fn point_level_basis(ring: &Ring, levels: usize) -> Vec<Vec<Scalar>> {
    vec![vec![Scalar::one(ring)]; levels + 1]
}

/// Rational coordinates of `x` in the span of `basis` (assumed independent).
fn express_in_basis(x: &Scalar, basis: &[Scalar]) -> Option<Vec<BigRational>> {
    if x.is_zero() {
        return Some(vec![BigRational::zero(); basis.len()]);
    }
    let mut monos: BTreeMap<Monomial, usize> = BTreeMap::new();
    for s in basis.iter().chain(std::iter::once(x)) {
        for (m, _) in s.poly().terms() {
            let k = monos.len();
            monos.entry(m.clone()).or_insert(k);
        }
    }
    let ncols = basis.len();
    let mut rows = vec![vec![BigRational::zero(); ncols + 1]; monos.len()];
    for (k, s) in basis.iter().enumerate() {
        for (m, c) in s.poly().terms() {
            rows[monos[m]][k] = c.clone();
        }
    }
    for (m, c) in x.poly().terms() {
        rows[monos[m]][ncols] = c.clone();
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            return None;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..=ncols {
                    let d = &rows[r][c] * &f;
                    rows[i][c] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some((0..ncols).map(|k| rows[k][ncols].clone()).collect())
}

/// Distinct permutations of a multiset, in lexicographic order.
fn permutations(v: &[u16]) -> Vec<Vec<u16>> {
    let mut cur = v.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

/// Decreasing sequences of length `l` summing to `s`.
fn decreasing(l: usize, s: u32) -> Vec<Vec<u16>> {
    fn rec(l: usize, left: u32, cap: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == l {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in (0..=cap.min(left)).rev() {
            cur.push(x as u16);
            rec(l, left - x, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, s, s, &mut Vec::new(), &mut out);
    out
}

impl GlFamily {
    /// `values[l][k]` is `g_l(basis[l][k])`, a series in `z_1..z_l` over the
    /// target ring.
    pub fn new(
        source: &FormalGroupLaw,
        target: &FormalGroupLaw,
        n: i64,
        trunc: u32,
        basis: Vec<Vec<Scalar>>,
        values: Vec<Vec<TruncSeries>>,
    ) -> Result<GlFamily> {
        if basis.is_empty() || basis.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: values.len() });
        }
        for (l, (b, v)) in basis.iter().zip(&values).enumerate() {
            if b.len() != v.len() {
                return Err(Error::DimensionMismatch { expected: b.len(), got: v.len() });
            }
            for a in b {
                source.ring().check_same(a.ring())?;
            }
            for s in v {
                target.ring().check_same(s.ring())?;
                if s.vars() != &z_vars(l) {
                    return Err(Error::VarMismatch);
                }
                if s.trunc() < trunc {
                    return Err(Error::InsufficientPrecision(format!(
                        "level {l} known to weight {}, family needs {trunc}",
                        s.trunc()
                    )));
                }
            }
        }
        let values = values.into_iter().map(|v| v.into_iter().map(|s| s.truncate(trunc)).collect()).collect();
        Ok(GlFamily { source: source.clone(), target: target.clone(), n, trunc, basis, values })
    }

    /// The family of an operation: `g_l(alpha) = G(alpha z_1 ... z_l)` on
    /// `(P^inf)^l`.
    pub fn from_operation(
        source: &FormalGroupLaw,
        target: &FormalGroupLaw,
        n: i64,
        trunc: u32,
        basis: Vec<Vec<Scalar>>,
        op: impl Fn(&CobElement) -> Result<CobElement>,
    ) -> Result<GlFamily> {
        let mut values = Vec::with_capacity(basis.len());
        for (l, b) in basis.iter().enumerate() {
            let space = ProjProductRing::infinite(source, l, trunc)?;
            let mut level = Vec::with_capacity(b.len());
            for alpha in b {
                let e = CobElement::monomial(&space, alpha, &vec![1; l])?;
                level.push(op(&e)?.series().clone());
            }
            values.push(level);
        }
        GlFamily::new(source, target, n, trunc, basis, values)
    }

    pub fn source(&self) -> &FormalGroupLaw {
        &self.source
    }

    pub fn target(&self) -> &FormalGroupLaw {
        &self.target
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    /// Highest level stored.
    pub fn levels(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn values(&self) -> &[Vec<TruncSeries>] {
        &self.values
    }

    pub fn value(&self, l: usize, k: usize) -> Result<&TruncSeries> {
        self.values
            .get(l)
            .and_then(|v| v.get(k))
            .ok_or_else(|| Error::IndexOutOfRange(format!("level {l}, basis element {k}")))
    }

    /// Replace one stored value (for building test families).
    pub fn with_value(&self, l: usize, k: usize, s: TruncSeries) -> Result<GlFamily> {
        let mut values = self.values.clone();
        let slot = values
            .get_mut(l)
            .and_then(|v| v.get_mut(k))
            .ok_or_else(|| Error::IndexOutOfRange(format!("level {l}, basis element {k}")))?;
        *slot = s;
        GlFamily::new(&self.source, &self.target, self.n, self.trunc, self.basis.clone(), values)
    }

    /// Coefficient of `z_1 ... z_l` in every stored value.
    pub fn constants(&self) -> Vec<Vec<Scalar>> {
        self.values
            .iter()
            .enumerate()
            .map(|(l, v)| v.iter().map(|s| s.coeff(&vec![1; l])).collect())
            .collect()
    }

    /// `g_level(x)` for an arbitrary element of `A^(n-level)`.
    fn apply(&self, level: usize, x: &Scalar) -> Result<TruncSeries> {
        let vars = z_vars(level);
        if x.is_zero() {
            return Ok(TruncSeries::zero(self.target.ring(), &vars, self.trunc));
        }
        let coords = express_in_basis(x, &self.basis[level])
            .ok_or_else(|| Error::NotInLattice(format!("{x} at level {level}")))?;
        let mut acc = TruncSeries::zero(self.target.ring(), &vars, self.trunc);
        for (c, v) in coords.iter().zip(&self.values[level]) {
            if !c.is_zero() {
                let c = Scalar::from_rational(self.target.ring(), c)?;
                acc = acc.add(&v.scale(&c)?)?;
            }
        }
        Ok(acc)
    }

    /// Left minus right side of (a_iii) for `g_l(alpha)` in `x, y, z_2..z_l`,
    /// restricted to the monomials `x^a y^b ...` that stored levels determine.
    fn additivity_residual(&self, l: usize, k: usize) -> Result<TruncSeries> {
        let levels = self.levels();
        let mut names: Vec<String> = vec!["x".into(), "y".into()];
        names.extend((2..=l).map(|i| format!("z{i}")));
        let table = VarTable::new(names.iter().map(|s| (s.clone(), 1)))?;
        let ring = self.target.ring();
        let t = self.trunc.min(self.target.trunc());
        let var = |name: &str| TruncSeries::var(ring, &table, t, name);

        let sum = self.target.series().truncate(t).reindex(&table)?;
        let mut b = BTreeMap::new();
        b.insert("z1".to_string(), sum);
        for i in 2..=l {
            b.insert(format!("z{i}"), var(&format!("z{i}"))?);
        }
        let mut residual = self.values[l][k].substitute(&table, &b)?;

        let alpha = &self.basis[l][k];
        let x = var("x")?;
        let y = var("y")?;
        // Terms from levels beyond the stored ones only reach x^a y^b with
        // a + b >= i + j; compare below the first such term.
        let mut bound = u32::MAX;
        for i in 0..=t as usize {
            for j in 0..=t as usize - i {
                if i + j == 0 {
                    continue;
                }
                let a = self.source.coeff(i as u16, j as u16);
                if a.is_zero() {
                    continue;
                }
                let level = l + i + j - 1;
                let image = alpha.mul(&a)?;
                if image.is_zero() {
                    continue;
                }
                if level > levels {
                    bound = bound.min((i + j - 1) as u32);
                    continue;
                }
                let g = self.apply(level, &image)?;
                let mut b = BTreeMap::new();
                for q in 0..level {
                    let img = if q < i {
                        x.clone()
                    } else if q < i + j {
                        y.clone()
                    } else {
                        var(&format!("z{}", q - i - j + 2))?
                    };
                    b.insert(format!("z{}", q + 1), img);
                }
                residual = residual.sub(&g.substitute(&table, &b)?)?;
            }
        }
        Ok(residual.truncate(t).filter_vars(|e| ((e[0] + e[1]) as u32) <= bound))
    }
}

/// First axiom violated by the stored data, if any.
pub fn gl_validate(f: &GlFamily) -> Result<Option<GlViolation>> {
    let viol = |axiom, level, alpha_index, detail: String| Some(GlViolation { axiom, level, alpha_index, detail });
    for (l, v) in f.values.iter().enumerate() {
        for (k, s) in v.iter().enumerate() {
            let coeffs = s.coefficients();
            for (e, c) in &coeffs {
                for i in 0..l.saturating_sub(1) {
                    let mut sw = e.clone();
                    sw.swap(i, i + 1);
                    let other = coeffs.get(&sw).cloned().unwrap_or_else(|| Scalar::zero(s.ring()));
                    if &other != c {
                        return Ok(viol(GlAxiom::Symmetric, l, k, format!("z^{e:?} vs z^{sw:?}")));
                    }
                }
            }
        }
    }
    for (l, v) in f.values.iter().enumerate() {
        for (k, s) in v.iter().enumerate() {
            if let Some((e, _)) = s.coefficients().into_iter().find(|(e, c)| !c.is_zero() && e.contains(&0)) {
                return Ok(viol(GlAxiom::Divisible, l, k, format!("term z^{e:?}")));
            }
        }
    }
    for l in 1..=f.levels() {
        for k in 0..f.basis[l].len() {
            match f.additivity_residual(l, k) {
                Ok(r) => {
                    if let Some((e, c)) = r.coefficients().into_iter().find(|(_, c)| !c.is_zero()) {
                        return Ok(viol(GlAxiom::Additivity, l, k, format!("x,y,z^{e:?}: {c}")));
                    }
                }
                Err(Error::NotInLattice(m)) => {
                    return Ok(viol(GlAxiom::Additivity, l, k, format!("not in the stored span: {m}")));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Rebuild a family from its constants `h_(l,0)` (the coefficients of
/// `z_1 ... z_l`). Proceeds by the degree `s` of `z^ibar` in
/// `g_l = z_1...z_l sum h_(l,ibar) z^ibar`: the coefficient of
/// `x^i1 y z_2^(i2+1) ...` in (a_iii) is `(i1 + 1) h_(l,ibar)` plus terms
/// already known. The result is reliable to weight `min(trunc, levels)`.
pub fn gl_reconstruct(
    source: &FormalGroupLaw,
    target: &FormalGroupLaw,
    n: i64,
    basis: Vec<Vec<Scalar>>,
    constants: &[Vec<Scalar>],
    trunc: u32,
) -> Result<GlFamily> {
    if !target.ring().is_torsion_free() {
        return Err(Error::Precondition(format!("target ring {} has torsion", target.ring())));
    }
    if basis.len() != constants.len() || basis.is_empty() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: constants.len() });
    }
    let levels = basis.len() - 1;
    let t = trunc.min(levels as u32);
    let ring = target.ring();
    let mut values = Vec::with_capacity(basis.len());
    for (l, (b, c)) in basis.iter().zip(constants).enumerate() {
        if b.len() != c.len() {
            return Err(Error::DimensionMismatch { expected: b.len(), got: c.len() });
        }
        let level = c
            .iter()
            .map(|h| TruncSeries::from_terms(ring, &z_vars(l), t, vec![(vec![1; l], h.coerce_into(ring)?)]))
            .collect::<Result<Vec<_>>>()?;
        values.push(level);
    }
    let mut fam = GlFamily::new(source, target, n, t, basis, values)?;
    for s in 1..=levels as u32 {
        let mut updates = Vec::new();
        for l in 1..=levels {
            if l as u32 + s > t {
                continue;
            }
            for k in 0..fam.basis[l].len() {
                let residual = fam.additivity_residual(l, k)?;
                let mut terms = Vec::new();
                for ibar in decreasing(l, s) {
                    let mut at = vec![ibar[0], 1];
                    at.extend(ibar[1..].iter().map(|&i| i + 1));
                    let coef = residual.coeff(&at);
                    if coef.is_zero() {
                        continue;
                    }
                    let h = coef.neg().exact_div(&Scalar::from_int(ring, ibar[0] as i64 + 1))?;
                    for perm in permutations(&ibar) {
                        terms.push((perm.iter().map(|&i| i + 1).collect::<Vec<u16>>(), h.clone()));
                    }
                }
                if !terms.is_empty() {
                    updates.push((l, k, TruncSeries::from_terms(ring, &z_vars(l), t, terms)?));
                }
            }
        }
        for (l, k, add) in updates {
            fam.values[l][k] = fam.values[l][k].add(&add)?;
        }
    }
    Ok(fam)
}
