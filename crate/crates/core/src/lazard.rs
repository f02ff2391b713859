//! The Lazard ring to a fixed degree, realized inside `Z[b1, b2, ...]` by
//! twisting the additive law with `beta(x) = x + b1 x^2 + b2 x^3 + ...`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fgl::{x_only, FormalGroupLaw};
use crate::scalars::hnf_with_transform;
use crate::scalars::{lattice_member, Generator, IntegerLattice, Monomial, Poly, Ring, RingDescriptor, Scalar};
use crate::series::TruncSeries;

/// A monomial in the universal coefficients: sorted `((i, j), exponent)`
/// with `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AMonomial(pub Vec<((u16, u16), u16)>);

impl AMonomial {
    pub fn one() -> AMonomial {
        AMonomial(Vec::new())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|((i, j), e)| (*i as u32 + *j as u32 - 1) * *e as u32).sum()
    }

    pub fn to_string_named(&self) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|((i, j), e)| if *e == 1 { format!("a{i}_{j}") } else { format!("a{i}_{j}^{e}") })
            .collect();
        parts.join("*")
    }
}

/// Per-degree lattice data.
#[derive(Clone, Debug)]
pub struct DegreeData {
    pub degree: u32,
    /// b-monomials of this weight, in graded-lex order: the coordinates.
    pub b_basis: Vec<Monomial>,
    /// All a-monomials of this degree (the spanning set).
    pub a_monomials: Vec<AMonomial>,
    /// Indices of a spanning subset whose rows already generate the lattice.
    pub chosen: Vec<usize>,
    pub lattice: IntegerLattice,
    /// `transform * rows(chosen) = [lattice.basis; 0]`.
    pub transform: Vec<Vec<BigInt>>,
    /// Rows of every spanning a-monomial, in b-coordinates.
    pub rows: Vec<Vec<BigInt>>,
}

/// The Lazard ring through degree `trunc`.
#[derive(Clone, Debug)]
pub struct LazardCtx {
    trunc: u32,
    b_ring: Ring,
    fu: FormalGroupLaw,
    a_table: BTreeMap<(u16, u16), Scalar>,
    degrees: Vec<DegreeData>,
    pn: Vec<Scalar>,
}

/// `Z[b1..bn]` with `b_k` of weight `k`.
pub fn b_ring(n: u32) -> Ring {
    Ring::polynomial(RingDescriptor::Integers, (1..=n).map(|k| Generator::new(format!("b{k}"), k)).collect()).unwrap()
}

/// `beta(x) = x + b1 x^2 + ... + bn x^(n+1)` over `ring`, which must contain
/// generators `b1..bn`; truncated at total weight `trunc`.
pub fn beta_series(ring: &Ring, prefix: &str, n: u32, trunc: u32) -> Result<TruncSeries> {
    let mut terms = vec![(vec![1u16], Scalar::one(ring))];
    for k in 1..=n {
        terms.push((vec![k as u16 + 1], Scalar::generator(ring, &format!("{prefix}{k}"))?));
    }
    TruncSeries::from_terms(ring, &x_only(), trunc, terms)
}

/// The universal law `beta(beta^-1(x) + beta^-1(y))` with every coefficient
/// `a_{i,j}`, `i + j - 1 <= n`, exact. Stored at total weight `2n + 1`.
pub fn universal_law(n: u32) -> Result<FormalGroupLaw> {
    let ring = b_ring(n);
    let t = 2 * n + 1;
    let beta = beta_series(&ring, "b", n, t)?;
    let additive = FormalGroupLaw::additive(&ring, t);
    additive.reparametrize(&beta)
}

fn generators_up_to(n: u32) -> Vec<(u16, u16)> {
    let mut g = Vec::new();
    for w in 1..=n {
        for i in 1..=(w + 1) / 2 {
            let j = w + 1 - i;
            g.push((i as u16, j as u16));
        }
    }
    g
}

fn enumerate_a_monomials(gens: &[(u16, u16)], n: u32) -> Vec<AMonomial> {
    fn rec(gens: &[(u16, u16)], start: usize, left: u32, cur: &mut Vec<((u16, u16), u16)>, out: &mut Vec<AMonomial>) {
        if left == 0 {
            out.push(AMonomial(cur.clone()));
            return;
        }
        for k in start..gens.len() {
            let (i, j) = gens[k];
            let w = i as u32 + j as u32 - 1;
            if w > left {
                continue;
            }
            let mut e = 1u16;
            while w * e as u32 <= left {
                cur.push(((i, j), e));
                rec(gens, k + 1, left - w * e as u32, cur, out);
                cur.pop();
                e += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(gens, 0, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Monomials of weight `n` in `b1..bn`, graded-lex sorted.
fn b_monomials(n: u32, nvars: usize, weights: &[u32]) -> Vec<Monomial> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u16>, weights: &[u32], out: &mut Vec<Monomial>) {
        if k == cur.len() {
            if left == 0 {
                out.push(Monomial::new(cur.clone(), weights));
            }
            return;
        }
        let w = weights[k];
        let mut e = 0u16;
        while e as u32 * w <= left {
            cur[k] = e;
            rec(k + 1, left - e as u32 * w, cur, weights, out);
            e += 1;
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    rec(0, n, &mut vec![0; nvars], weights, &mut out);
    out.sort();
    out
}

impl LazardCtx {
    /// Build the context: universal law, coefficient table, lattices for
    /// degrees `0..=n`, and the classes `[P^k]`.
    pub fn build(n: u32) -> Result<LazardCtx> {
        let fu = universal_law(n)?;
        let ring = fu.ring().clone();
        let mut a_table = BTreeMap::new();
        for (i, j) in generators_up_to(n) {
            a_table.insert((i, j), fu.coeff(i, j));
        }
        let w = fu.invariant_form()?;
        let pn: Vec<Scalar> = (0..=n).map(|k| w.coeff(&[k as u16])).collect();
        let mut ctx = LazardCtx { trunc: n, b_ring: ring, fu, a_table, degrees: Vec::new(), pn };
        for d in 0..=n {
            let data = ctx.degree_data(d)?;
            ctx.degrees.push(data);
        }
        Ok(ctx)
    }

    fn degree_data(&self, d: u32) -> Result<DegreeData> {
        let weights = self.b_ring.weights();
        let b_basis = b_monomials(d, weights.len(), &weights);
        let index: HashMap<&Monomial, usize> = b_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let gens = generators_up_to(d);
        let a_monomials = enumerate_a_monomials(&gens, d);
        let mut rows = Vec::with_capacity(a_monomials.len());
        for am in &a_monomials {
            let v = self.a_monomial_value(am);
            let mut row = vec![BigInt::zero(); b_basis.len()];
            for (m, c) in v.poly().terms() {
                row[index[m]] = c.numer().clone();
            }
            rows.push(row);
        }
        let ncols = b_basis.len();
        let mut chosen: Vec<usize> = Vec::new();
        let mut lattice = IntegerLattice { ambient_rank: ncols, degree: d, basis: Vec::new() };
        let mut transform = Vec::new();
        for (k, row) in rows.iter().enumerate() {
            let v: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            if row.iter().all(|x| x.is_zero()) || lattice_member(&v, &lattice, &[])? {
                continue;
            }
            chosen.push(k);
            let sub: Vec<Vec<BigInt>> = chosen.iter().map(|&c| rows[c].clone()).collect();
            let (h, u) = hnf_with_transform(&sub, ncols, true);
            lattice = IntegerLattice { ambient_rank: ncols, degree: d, basis: h };
            transform = u.unwrap();
        }
        Ok(DegreeData { degree: d, b_basis, a_monomials, chosen, lattice, transform, rows })
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn b_ring(&self) -> &Ring {
        &self.b_ring
    }

    pub fn universal(&self) -> &FormalGroupLaw {
        &self.fu
    }

    pub fn a(&self, i: u16, j: u16) -> Result<&Scalar> {
        let key = (i.min(j), i.max(j));
        self.a_table
            .get(&key)
            .ok_or_else(|| Error::DegreeOutOfRange { requested: i as u32 + j as u32 - 1, available: self.trunc })
    }

    pub fn a_table(&self) -> &BTreeMap<(u16, u16), Scalar> {
        &self.a_table
    }

    /// `[P^n]`, the coefficients of the invariant form.
    pub fn pn(&self, n: u32) -> Result<&Scalar> {
        self.pn.get(n as usize).ok_or(Error::DegreeOutOfRange { requested: n, available: self.trunc })
    }

    pub fn degree(&self, d: u32) -> Result<&DegreeData> {
        self.degrees.get(d as usize).ok_or(Error::DegreeOutOfRange { requested: d, available: self.trunc })
    }

    pub fn lattice(&self, d: u32) -> Result<&IntegerLattice> {
        Ok(&self.degree(d)?.lattice)
    }

    pub fn lazard_rank(&self, d: u32) -> Result<usize> {
        Ok(self.lattice(d)?.rank())
    }

    pub fn a_monomial_value(&self, m: &AMonomial) -> Scalar {
        let mut acc = Scalar::one(&self.b_ring);
        for ((i, j), e) in &m.0 {
            for _ in 0..*e {
                acc = acc.mul(&self.a_table[&(*i, *j)]).unwrap();
            }
        }
        acc
    }

    /// Basis of `Lambda_d` as elements of `Z[b]`.
    pub fn basis_elements(&self, d: u32) -> Result<Vec<Scalar>> {
        let data = self.degree(d)?;
        Ok(data.lattice.basis.iter().map(|row| self.from_coords(d, row)).collect())
    }

    fn from_coords(&self, d: u32, row: &[BigInt]) -> Scalar {
        let data = &self.degrees[d as usize];
        let mut p = Poly::zero();
        for (m, c) in data.b_basis.iter().zip(row) {
            p.add_term(m.clone(), BigRational::from_integer(c.clone()), self.b_ring.domain());
        }
        Scalar::from_poly(&self.b_ring, p)
    }

    /// Coordinates of a homogeneous element (any ring whose generators are
    /// named `b1, b2, ...` with matching weights) in the degree-`d` b-basis.
    pub fn coordinates(&self, x: &Scalar) -> Result<(u32, Vec<BigRational>)> {
        let d = match x.homogeneous_degree()? {
            Some(d) => d,
            None => return Ok((0, vec![BigRational::zero()])),
        };
        let data = self.degree(d)?;
        let names: Vec<&str> = x.ring().generators().iter().map(|g| g.name.as_str()).collect();
        let mut map = Vec::with_capacity(names.len());
        for g in x.ring().generators() {
            let k = self
                .b_ring
                .generator_index(&g.name)
                .filter(|&k| self.b_ring.generators()[k].weight == g.weight);
            map.push(k);
        }
        let index: HashMap<&Monomial, usize> = data.b_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let weights = self.b_ring.weights();
        let mut v = vec![BigRational::zero(); data.b_basis.len()];
        for (m, c) in x.poly().terms() {
            let mut e = vec![0u16; weights.len()];
            for (k, &x) in m.exps().iter().enumerate() {
                if x > 0 {
                    let idx = map[k].ok_or_else(|| Error::UnknownVariable(names[k].to_string()))?;
                    e[idx] = x;
                }
            }
            let mono = Monomial::new(e, &weights);
            v[index[&mono]] += c;
        }
        Ok((d, v))
    }

    /// Whether `x` lies in `Lambda_d (x) Z[S^-1]`.
    pub fn member(&self, x: &Scalar, inverted: &[BigInt]) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        let (d, v) = self.coordinates(x)?;
        lattice_member(&v, self.lattice(d)?, inverted)
    }

    /// Rational a-monomial expression of a homogeneous element of
    /// `Lambda (x) Q`; fails with `NotInLattice` outside the rational span.
    pub fn express_rational(&self, x: &Scalar) -> Result<Vec<(AMonomial, BigRational)>> {
        if x.is_zero() {
            return Ok(Vec::new());
        }
        let (d, v) = self.coordinates(x)?;
        let data = self.degree(d)?;
        let y = data
            .lattice
            .rational_coordinates(&v)?
            .ok_or_else(|| Error::NotInLattice(x.to_string()))?;
        let mut coeffs = vec![BigRational::zero(); data.chosen.len()];
        for (yi, urow) in y.iter().zip(&data.transform) {
            if yi.is_zero() {
                continue;
            }
            for (c, u) in coeffs.iter_mut().zip(urow) {
                *c += yi * BigRational::from_integer(u.clone());
            }
        }
        Ok(data
            .chosen
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&k, c)| (data.a_monomials[k].clone(), c))
            .collect())
    }

    /// An integer combination of a-monomials equal to `x`. The solution is
    /// deterministic: it is supported on a fixed spanning subset chosen
    /// greedily in a-monomial order.
    pub fn express_in_a_monomials(&self, x: &Scalar) -> Result<Vec<(AMonomial, BigInt)>> {
        if !self.member(x, &[])? {
            return Err(Error::NotInLattice(x.to_string()));
        }
        Ok(self
            .express_rational(x)?
            .into_iter()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                (m, c.to_integer())
            })
            .collect())
    }

    /// Split a (not necessarily homogeneous) element into homogeneous parts
    /// and express each in a-monomials.
    pub fn express_any(&self, x: &Scalar) -> Result<Vec<(AMonomial, BigRational)>> {
        let mut parts: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in x.poly().terms() {
            parts.entry(m.weight()).or_default().add_term(m.clone(), c.clone(), x.ring().domain());
        }
        let mut out = Vec::new();
        for (_, p) in parts {
            out.extend(self.express_rational(&Scalar::from_poly(x.ring(), p))?);
        }
        Ok(out)
    }

    /// Integer relations among the a-monomials of degree `d`: each vector
    /// (indexed like `a_monomials`) sums to zero in `Z[b]`.
    pub fn relations(&self, d: u32) -> Result<Vec<Vec<BigInt>>> {
        let data = self.degree(d)?;
        let n = data.a_monomials.len();
        let mut out = Vec::new();
        // Kernel rows of the transform.
        for urow in data.transform.iter().skip(data.lattice.rank()) {
            let mut rel = vec![BigInt::zero(); n];
            for (&k, u) in data.chosen.iter().zip(urow) {
                rel[k] = u.clone();
            }
            out.push(rel);
        }
        // Unchosen monomials expressed through the chosen ones.
        for k in 0..n {
            if data.chosen.contains(&k) {
                continue;
            }
            let x = self.a_monomial_value(&data.a_monomials[k]);
            let mut rel = vec![BigInt::zero(); n];
            rel[k] = -BigInt::one();
            for (m, c) in self.express_in_a_monomials(&x)? {
                let idx = data.a_monomials.iter().position(|a| a == &m).unwrap();
                rel[idx] += c;
            }
            out.push(rel);
        }
        Ok(out)
    }

    pub(crate) fn from_parts(trunc: u32, fu: FormalGroupLaw, degrees: Vec<DegreeData>) -> Result<LazardCtx> {
        let b_ring = fu.ring().clone();
        let mut a_table = BTreeMap::new();
        for (i, j) in generators_up_to(trunc) {
            a_table.insert((i, j), fu.coeff(i, j));
        }
        let w = fu.invariant_form()?;
        let pn = (0..=trunc).map(|k| w.coeff(&[k as u16])).collect();
        Ok(LazardCtx { trunc, b_ring, fu, a_table, degrees, pn })
    }

    pub(crate) fn degrees(&self) -> &[DegreeData] {
        &self.degrees
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partitions(n: u32) -> usize {
        let n = n as usize;
        let mut p = vec![0usize; n + 1];
        p[0] = 1;
        for k in 1..=n {
            for m in k..=n {
                p[m] += p[m - k];
            }
        }
        p[n]
    }

    #[test]
    fn small_context() {
        let ctx = LazardCtx::build(2).unwrap();
        assert_eq!(ctx.a(1, 1).unwrap().to_string(), "2*b1");
        assert_eq!(ctx.a(1, 2).unwrap(), ctx.a(2, 1).unwrap());
        assert_eq!(ctx.pn(1).unwrap().to_string(), "-2*b1");
        assert!(ctx.pn(0).unwrap().is_one());
        assert!(ctx.universal().check().unwrap().ok());
    }

    #[test]
    fn ranks_are_partition_numbers() {
        let ctx = LazardCtx::build(5).unwrap();
        for d in 0..=5 {
            assert_eq!(ctx.lazard_rank(d).unwrap(), partitions(d), "degree {d}");
        }
    }

    #[test]
    fn membership_examples() {
        let ctx = LazardCtx::build(3).unwrap();
        let r = ctx.b_ring().clone();
        let b1 = Scalar::generator(&r, "b1").unwrap();
        let two_b1 = b1.scale(&BigRational::from_integer(2.into())).unwrap();
        assert!(ctx.member(&two_b1, &[]).unwrap());
        assert!(!ctx.member(&b1, &[]).unwrap());
        assert!(ctx.member(&b1, &[BigInt::from(2)]).unwrap());
        let b2 = Scalar::generator(&r, "b2").unwrap();
        assert!(matches!(ctx.member(&b1.add(&b2).unwrap(), &[]), Err(Error::NonHomogeneous)));
    }

    #[test]
    fn expressions() {
        let ctx = LazardCtx::build(3).unwrap();
        let a11 = AMonomial(vec![((1, 1), 1)]);
        assert_eq!(ctx.express_in_a_monomials(ctx.a(1, 1).unwrap()).unwrap(), vec![(a11.clone(), BigInt::one())]);
        assert_eq!(ctx.express_in_a_monomials(ctx.pn(1).unwrap()).unwrap(), vec![(a11, -BigInt::one())]);
        assert!(ctx.express_in_a_monomials(&Scalar::zero(ctx.b_ring())).unwrap().is_empty());
        for d in 0..=3 {
            for x in ctx.basis_elements(d).unwrap() {
                let e = ctx.express_in_a_monomials(&x).unwrap();
                let mut back = Scalar::zero(ctx.b_ring());
                for (m, c) in e {
                    back = back.add(&ctx.a_monomial_value(&m).scale(&BigRational::from_integer(c)).unwrap()).unwrap();
                }
                assert_eq!(back, x);
            }
            for rel in ctx.relations(d).unwrap() {
                let mut s = Scalar::zero(ctx.b_ring());
                for (m, c) in ctx.degree(d).unwrap().a_monomials.iter().zip(rel) {
                    s = s.add(&ctx.a_monomial_value(m).scale(&BigRational::from_integer(c)).unwrap()).unwrap();
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn augmentation_gives_additive_law() {
        let ctx = LazardCtx::build(3).unwrap();
        let z = Ring::integers();
        for ((_, _), a) in ctx.a_table() {
            assert!(a.constant_term().is_zero());
        }
        for n in 1..=3 {
            assert!(ctx.pn(n).unwrap().constant_term().is_zero());
        }
        let _ = z;
    }
}
