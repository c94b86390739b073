//! Arithmetic in the small finite fields GF(q) for q up to 16.
//!
//! Prime fields are plain modular arithmetic. The extension fields are
//! represented as polynomials over the prime subfield with a fixed modulus:
//! GF(4) uses x^2+x+1, GF(8) uses x^3+x+1, GF(9) uses x^2+1 and GF(16) uses
//! x^4+x+1. An element's `value` encodes its coefficient vector in base p,
//! least significant digit first, so for characteristic two the value is
//! just the usual bit pattern and addition is XOR.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Field sizes with precomputed tables.
pub const SUPPORTED_ORDERS: [u16; 9] = [2, 3, 4, 5, 7, 8, 9, 13, 16];

/// Multiplication/inverse tables for one GF(q).
#[derive(Debug)]
pub struct Field {
    q: u16,
    p: u16,
    add: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

fn modulus_poly(q: u16) -> Option<(u16, &'static [u16])> {
    // Coefficients of the reduction polynomial, constant term first,
    // excluding the leading monomial.
    match q {
        4 => Some((2, &[1, 1])),       // x^2 + x + 1
        8 => Some((2, &[1, 1, 0])),    // x^3 + x + 1
        9 => Some((3, &[1, 0])),       // x^2 + 1
        16 => Some((2, &[1, 1, 0, 0])), // x^4 + x + 1
        _ => None,
    }
}

fn digits(mut value: u16, p: u16, len: usize) -> Vec<u16> {
    let mut out = vec![0u16; len];
    for d in out.iter_mut() {
        *d = value % p;
        value /= p;
    }
    out
}

fn undigits(ds: &[u16], p: u16) -> u16 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl Field {
    /// Returns the shared table set for GF(q).
    pub fn get(q: u16) -> Result<&'static Field> {
        static FIELDS: OnceLock<Vec<Field>> = OnceLock::new();
        let all = FIELDS.get_or_init(|| {
            SUPPORTED_ORDERS.iter().map(|&q| Field::build(q)).collect()
        });
        SUPPORTED_ORDERS
            .iter()
            .position(|&s| s == q)
            .map(|i| &all[i])
            .ok_or(Error::UnsupportedField(q))
    }

    fn build(q: u16) -> Field {
        let n = q as usize;
        let (p, degree, red): (u16, usize, Vec<u16>) = match modulus_poly(q) {
            Some((p, red)) => (p, red.len(), red.to_vec()),
            None => (q, 1, vec![]),
        };

        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..q {
            for b in 0..q {
                let (s, m) = if degree == 1 {
                    ((a + b) % p, (a * b) % p)
                } else {
                    let da = digits(a, p, degree);
                    let db = digits(b, p, degree);
                    let sum: Vec<u16> =
                        da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    // Schoolbook product followed by reduction: replace x^degree
                    // with -red(x), i.e. (p-1)*red(x) coefficient-wise.
                    let mut prod = vec![0u16; 2 * degree - 1];
                    for (i, &x) in da.iter().enumerate() {
                        for (j, &y) in db.iter().enumerate() {
                            prod[i + j] = (prod[i + j] + x * y) % p;
                        }
                    }
                    for i in (degree..prod.len()).rev() {
                        let c = prod[i];
                        if c != 0 {
                            prod[i] = 0;
                            for (k, &r) in red.iter().enumerate() {
                                let idx = i - degree + k;
                                prod[idx] = (prod[idx] + c * (p - r) % p) % p;
                            }
                        }
                    }
                    (undigits(&sum, p), undigits(&prod[..degree], p))
                };
                add[a as usize * n + b as usize] = s as u8;
                mul[a as usize * n + b as usize] = m as u8;
            }
        }

        let mut inv = vec![0u8; n];
        for a in 1..q {
            for b in 1..q {
                if mul[a as usize * n + b as usize] == 1 {
                    inv[a as usize] = b as u8;
                    break;
                }
            }
        }

        Field { q, p, add, mul, inv }
    }

    pub fn order(&self) -> u16 {
        self.q
    }

    pub fn characteristic(&self) -> u16 {
        self.p
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, q: self.q }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, q: self.q }
    }

    pub fn element(&self, value: u16) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement { value: value as u8, q: self.q })
        } else {
            Err(Error::domain(format!("{value} is not a residue in GF({})", self.q)))
        }
    }

    /// All field elements in value order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|v| FieldElement { value: v as u8, q: self.q })
    }

    fn check(&self, a: FieldElement) -> Result<usize> {
        if a.q == self.q {
            Ok(a.value as usize)
        } else {
            Err(Error::FieldMismatch(self.q, a.q))
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (i, j) = (self.check(a)?, self.check(b)?);
        Ok(FieldElement { value: self.add[i * self.q as usize + j], q: self.q })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (i, j) = (self.check(a)?, self.check(b)?);
        Ok(FieldElement { value: self.mul[i * self.q as usize + j], q: self.q })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        let i = self.check(a)?;
        if i == 0 {
            return Err(Error::ZeroInverse(self.q));
        }
        Ok(FieldElement { value: self.inv[i], q: self.q })
    }

    pub fn pow(&self, a: FieldElement, mut e: u32) -> Result<FieldElement> {
        let mut base = a;
        self.check(a)?;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            base = self.mul(base, base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Additive inverse.
    pub fn neg(&self, a: FieldElement) -> Result<FieldElement> {
        let i = self.check(a)?;
        if self.p == 2 || i == 0 {
            return Ok(a);
        }
        // Scan is fine at these sizes.
        for b in self.elements() {
            if self.add(a, b)?.is_zero() {
                return Ok(b);
            }
        }
        unreachable!("additive inverse exists in a field");
    }
}

/// An element of GF(q), tagged with its field size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement {
    value: u8,
    q: u16,
}

impl FieldElement {
    pub fn value(&self) -> u16 {
        self.value as u16
    }

    pub fn field_order(&self) -> u16 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
