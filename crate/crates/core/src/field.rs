//! Small finite fields: prime fields GF(p) and binary extension fields GF(2^m).
//!
//! Elements are `u32` values in `0..order`. For GF(2^m) an element is the bit
//! pattern of its polynomial over GF(2), reduced modulo a fixed irreducible.

use crate::error::{Error, Result};

/// Default reduction polynomials for GF(2^m), m = 1..=8.
const BINARY_POLYS: [u32; 8] = [
    0b11,        // x + 1
    0b111,       // x^2 + x + 1
    0b1011,      // x^3 + x + 1
    0b1_0011,    // x^4 + x + 1
    0b10_0101,   // x^5 + x^2 + 1
    0b100_0011,  // x^6 + x + 1
    0b1000_0011, // x^7 + x + 1
    0x11B,       // x^8 + x^4 + x^3 + x + 1
];

pub const MAX_PRIME: u32 = 65_537;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u32),
    Binary { degree: u32, poly: u32 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_mod(mut a: u32, m: u32) -> u32 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

fn is_irreducible(poly: u32, degree: u32) -> bool {
    if poly == 0 || poly_degree(poly) != degree {
        return false;
    }
    // trial division by every polynomial of degree 1..=degree/2
    (2u32..(1 << (degree / 2 + 1))).all(|d| poly_degree(d) == 0 || poly_mod(poly, d) != 0)
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p > MAX_PRIME {
            return Err(Error::OutOfRange(format!("prime {p} exceeds {MAX_PRIME}")));
        }
        Ok(FieldSpec::Prime(p))
    }

    /// GF(2^m) with the default reduction polynomial.
    pub fn binary(degree: u32) -> Result<Self> {
        if !(1..=8).contains(&degree) {
            return Err(Error::OutOfRange(format!(
                "binary field degree {degree} not in 1..=8"
            )));
        }
        Ok(FieldSpec::Binary {
            degree,
            poly: BINARY_POLYS[degree as usize - 1],
        })
    }

    pub fn binary_with_poly(degree: u32, poly: u32) -> Result<Self> {
        if !(1..=16).contains(&degree) {
            return Err(Error::OutOfRange(format!(
                "binary field degree {degree} not in 1..=16"
            )));
        }
        if !is_irreducible(poly, degree) {
            return Err(Error::NotIrreducible { poly, degree });
        }
        Ok(FieldSpec::Binary { degree, poly })
    }

    /// Prime order gives GF(p); a power of two 2^m (m <= 8) gives GF(2^m).
    pub fn from_order(q: u32) -> Result<Self> {
        if q >= 2 && q.is_power_of_two() && !is_prime(q as u64) {
            return Self::binary(q.trailing_zeros());
        }
        Self::prime(q)
    }

    pub fn order(&self) -> u32 {
        match *self {
            FieldSpec::Prime(p) => p,
            FieldSpec::Binary { degree, .. } => 1 << degree,
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match *self {
            FieldSpec::Prime(p) => ((a as u64 + b as u64) % p as u64) as u32,
            FieldSpec::Binary { .. } => a ^ b,
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match *self {
            FieldSpec::Prime(p) => {
                if a == 0 {
                    0
                } else {
                    p - a
                }
            }
            FieldSpec::Binary { .. } => a,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match *self {
            FieldSpec::Prime(p) => ((a as u64 * b as u64) % p as u64) as u32,
            FieldSpec::Binary { degree, poly } => {
                let mut acc = 0u32;
                let mut x = a;
                let mut y = b;
                while y != 0 {
                    if y & 1 == 1 {
                        acc ^= x;
                    }
                    y >>= 1;
                    x <<= 1;
                    if x >> degree & 1 == 1 {
                        x ^= poly;
                    }
                }
                acc
            }
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.order() as u64 - 2))
        }
    }

    pub fn dot(&self, u: &[u32], v: &[u32]) -> u32 {
        u.iter()
            .zip(v)
            .fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Rank of the given column vectors (all of equal length).
    pub fn rank(&self, columns: &[&[u32]]) -> usize {
        let Some(first) = columns.first() else {
            return 0;
        };
        let rows = first.len();
        // work on the transpose: one row per column vector
        let mut m: Vec<Vec<u32>> = columns.iter().map(|c| c.to_vec()).collect();
        let mut rank = 0;
        for col in 0..rows {
            let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = self.inv(m[rank][col]).expect("pivot is nonzero");
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let factor = self.mul(m[r][col], inv);
                    for c in col..rows {
                        let t = self.mul(factor, m[rank][c]);
                        m[r][c] = self.sub(m[r][c], t);
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    pub fn check_element(&self, a: u32) -> Result<()> {
        if a >= self.order() {
            return Err(Error::OutOfRange(format!(
                "element {a} not in field of order {}",
                self.order()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_polys_are_irreducible() {
        for m in 1..=8 {
            let FieldSpec::Binary { degree, poly } = FieldSpec::binary(m).unwrap() else {
                unreachable!()
            };
            assert!(is_irreducible(poly, degree), "degree {m}");
        }
        assert!(!is_irreducible(0b101, 2)); // x^2 + 1 = (x+1)^2
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for f in [
            FieldSpec::prime(5).unwrap(),
            FieldSpec::prime(257).unwrap(),
            FieldSpec::binary(4).unwrap(),
            FieldSpec::binary(8).unwrap(),
        ] {
            for a in 1..f.order() {
                let b = f.inv(a).unwrap();
                assert_eq!(f.mul(a, b), 1, "{f:?} a={a}");
            }
        }
    }

    #[test]
    fn aes_field_known_product() {
        let f = FieldSpec::binary(8).unwrap();
        assert_eq!(f.mul(0x57, 0x83), 0xC1);
    }

    #[test]
    fn from_order_dispatch() {
        assert_eq!(FieldSpec::from_order(5).unwrap(), FieldSpec::Prime(5));
        assert_eq!(FieldSpec::from_order(2).unwrap(), FieldSpec::Prime(2));
        assert_eq!(FieldSpec::from_order(16).unwrap().order(), 16);
        assert!(matches!(FieldSpec::from_order(6), Err(Error::NotPrime(6))));
    }

    #[test]
    fn rank_over_gf2_and_gf3() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        let a: &[u32] = &[0, 1, 1];
        let b: &[u32] = &[1, 0, 1];
        let c: &[u32] = &[1, 1, 0];
        assert_eq!(f2.rank(&[a, b, c]), 2);
        assert_eq!(f3.rank(&[a, b, c]), 3);
    }
}
