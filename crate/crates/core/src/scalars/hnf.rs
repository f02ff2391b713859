//! Hermite normal form over Z and lattice membership after inverting a
//! finite set of integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ring::prime_factors;
use crate::error::{Error, Result};

/// Row lattice in Hermite normal form: upper echelon, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerLattice {
    pub ambient_rank: usize,
    pub degree: u32,
    #[serde(with = "matrix_strings")]
    pub basis: Vec<Vec<BigInt>>,
}

mod matrix_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.into_iter()
            .map(|r| r.into_iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

impl IntegerLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect()
    }

    /// Rational coordinates of `v` in the basis, or `None` if `v` is not in
    /// the rational span.
    pub fn rational_coordinates(&self, v: &[BigRational]) -> Result<Option<Vec<BigRational>>> {
        if v.len() != self.ambient_rank {
            return Err(Error::DimensionMismatch { expected: self.ambient_rank, got: v.len() });
        }
        let mut rest: Vec<BigRational> = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &piv) in self.basis.iter().zip(&self.pivots()) {
            let c = &rest[piv] / BigRational::from_integer(row[piv].clone());
            if !c.is_zero() {
                for (j, x) in row.iter().enumerate().skip(piv) {
                    rest[j] -= &c * BigRational::from_integer(x.clone());
                }
            }
            coords.push(c);
        }
        Ok(rest.iter().all(|x| x.is_zero()).then_some(coords))
    }
}

fn row_sub_mul(rows: &mut [Vec<BigInt>], target: usize, src: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= k * y;
    }
}

/// Hermite normal form of the row span of `matrix`, optionally tracking a
/// unimodular transform `u` with `u * matrix = [h; 0]`.
pub(crate) fn hnf_with_transform(matrix: &[Vec<BigInt>], ncols: usize, track: bool) -> (Vec<Vec<BigInt>>, Option<Vec<Vec<BigInt>>>) {
    let nrows = matrix.len();
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut u: Vec<Vec<BigInt>> = if track {
        (0..nrows).map(|i| (0..nrows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
    } else {
        Vec::new()
    };
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        // Euclid down the column until a single nonzero entry remains at row r.
        loop {
            let mut best: Option<usize> = None;
            for i in r..nrows {
                if !a[i][col].is_zero() && best.map_or(true, |b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            if track {
                u.swap(r, b);
            }
            let mut done = true;
            for i in (r + 1)..nrows {
                if !a[i][col].is_zero() {
                    let k = a[i][col].div_floor(&a[r][col]);
                    row_sub_mul(&mut a, i, r, &k);
                    if track {
                        row_sub_mul(&mut u, i, r, &k);
                    }
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a.get(r).map_or(true, |row| row[col].is_zero()) {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
            if track {
                for x in u[r].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in 0..r {
            let k = a[i][col].div_floor(&a[r][col]);
            row_sub_mul(&mut a, i, r, &k);
            if track {
                row_sub_mul(&mut u, i, r, &k);
            }
        }
        r += 1;
    }
    a.truncate(r);
    (a, track.then_some(u))
}

/// Hermite normal form of the row span.
pub fn hnf(matrix: &[Vec<BigInt>], ncols: usize, degree: u32) -> IntegerLattice {
    let (basis, _) = hnf_with_transform(matrix, ncols, false);
    IntegerLattice { ambient_rank: ncols, degree, basis }
}

/// Whether `v` lies in `lat ⊗ Z[S⁻¹]` for `S = inverted`.
pub fn lattice_member(v: &[BigRational], lat: &IntegerLattice, inverted: &[BigInt]) -> Result<bool> {
    let Some(coords) = lat.rational_coordinates(v)? else {
        return Ok(false);
    };
    let primes: Vec<BigInt> = inverted.iter().filter(|s| !s.is_zero()).flat_map(prime_factors).collect();
    Ok(coords.iter().all(|c| {
        let mut d = c.denom().clone();
        for p in &primes {
            while (&d % p).is_zero() {
                d /= p;
            }
        }
        d.is_one()
    }))
}
