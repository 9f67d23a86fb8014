//! Small Galois fields GF(q) backed by log/antilog tables.

use crate::error::{Error, Result};

/// Prime powers with built-in tables.
pub const SUPPORTED_ORDERS: [usize; 7] = [2, 3, 4, 5, 7, 8, 9];

/// GF(q) with elements encoded as `0..q`.
///
/// An element is the base-`p` digit string of its coefficients over the prime
/// subfield, so addition is digitwise mod `p`; multiplication goes through
/// discrete logarithms with respect to a primitive element.
#[derive(Debug, Clone)]
pub struct GaloisField {
    q: usize,
    p: usize,
    degree: usize,
    exp: Vec<u8>,
    log: Vec<u8>,
    add: Vec<Vec<u8>>,
    neg: Vec<u8>,
}

impl GaloisField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, degree, modulus): (usize, usize, &[usize]) = match q {
            2 => (2, 1, &[0]),
            3 => (3, 1, &[0]),
            5 => (5, 1, &[0]),
            7 => (7, 1, &[0]),
            // monic irreducible x^k + Σ c_i x^i, stored as the low coefficients c_0..c_{k-1}
            4 => (2, 2, &[1, 1]),
            8 => (2, 3, &[1, 1, 0]),
            9 => (3, 2, &[1, 0]),
            _ => {
                return Err(Error::Parameter(format!(
                    "GF({q}) is not supported; choose one of {SUPPORTED_ORDERS:?}"
                )))
            }
        };
        let digits = |x: usize| -> Vec<usize> { (0..degree).map(|i| (x / p.pow(i as u32)) % p).collect() };
        let encode = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let add: Vec<Vec<u8>> = (0..q)
            .map(|a| {
                (0..q)
                    .map(|b| {
                        let s: Vec<usize> =
                            digits(a).iter().zip(digits(b)).map(|(x, y)| (x + y) % p).collect();
                        encode(&s) as u8
                    })
                    .collect()
            })
            .collect();
        let neg: Vec<u8> = (0..q)
            .map(|a| encode(&digits(a).iter().map(|&x| (p - x) % p).collect::<Vec<_>>()) as u8)
            .collect();

        let poly_mul = |a: usize, b: usize| -> usize {
            if degree == 1 {
                return (a * b) % p;
            }
            let (da, db) = (digits(a), digits(b));
            let mut prod = vec![0usize; 2 * degree - 1];
            for (i, x) in da.iter().enumerate() {
                for (j, y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            // reduce with x^k = -Σ c_i x^i
            for top in (degree..prod.len()).rev() {
                let coef = prod[top];
                if coef == 0 {
                    continue;
                }
                prod[top] = 0;
                for (i, &c) in modulus.iter().enumerate() {
                    let shift = top - degree + i;
                    prod[shift] = (prod[shift] + coef * (p - c % p)) % p;
                }
            }
            encode(&prod[..degree])
        };

        let multiplicative_order = |g: usize| -> usize {
            let mut acc = g;
            let mut k = 1;
            while acc != 1 && k <= q {
                acc = poly_mul(acc, g);
                k += 1;
            }
            k
        };
        let generator = (1..q)
            .find(|&g| multiplicative_order(g) == q - 1)
            .ok_or_else(|| Error::Parameter(format!("no primitive element found for GF({q})")))?;

        let mut exp = vec![0u8; q - 1];
        let mut log = vec![0u8; q];
        let mut acc = 1usize;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = acc as u8;
            log[acc] = k as u8;
            acc = poly_mul(acc, generator);
        }
        Ok(Self { q, p, degree, exp, log, add, neg })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize][b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[(self.log[a as usize] as usize + self.log[b as usize] as usize) % n]
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        let n = self.q - 1;
        self.exp[(n - self.log[a as usize] as usize) % n]
    }

    /// Reduces the rows in place to reduced row echelon form and returns the rank.
    pub fn rref(&self, rows: &mut [Vec<u8>]) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let scale = self.inv(rows[rank][col]);
            for v in rows[rank].iter_mut() {
                *v = self.mul(*v, scale);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..cols {
                        let t = self.mul(factor, rows[rank][c]);
                        rows[r][c] = self.sub(rows[r][c], t);
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    pub fn rank(&self, rows: &[Vec<u8>]) -> usize {
        let mut work = rows.to_vec();
        self.rref(&mut work)
    }
}
