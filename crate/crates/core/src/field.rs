//! Exact arithmetic in F_{p^k}.
//!
//! Elements are encoded as integers in `[0, p^k)`: the base-`p` digits of
//! the encoding are the coefficients of `1, g, g^2, ...` where `g` is a root
//! of the defining minimal polynomial. For `k = 1` this is the usual residue
//! representation and all operations take a fast path.

use std::fmt;

use crate::error::{Error, Result};

/// A handle to an element of a [`Field`]. Meaningless without its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The raw integer encoding.
    pub fn encoding(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// F_{p^k} presented as F_p[g]/(m(g)) with `m` monic irreducible of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    p: u64,
    k: u32,
    order: u64,
    /// Monic minimal polynomial, low degree first, length `k + 1`.
    modulus: Vec<u64>,
}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// F_{p^k}. With `minimal_polynomial = None` the first monic irreducible
    /// polynomial of degree `k` in lexicographic coefficient order is used.
    /// Coefficients are given low degree first; a non-monic polynomial is
    /// normalized.
    pub fn new(p: u64, k: u32, minimal_polynomial: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let order = checked_pow(p, k)
            .filter(|&o| o < (1u64 << 63))
            .ok_or_else(|| Error::InvalidField(format!("{p}^{k} does not fit in 63 bits")))?;
        let modulus = match minimal_polynomial {
            Some(coeffs) => {
                let mut m: Vec<u64> = coeffs.iter().map(|&c| c % p).collect();
                while m.last() == Some(&0) {
                    m.pop();
                }
                if m.len() != k as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "minimal polynomial has degree {}, expected {k}",
                        m.len().saturating_sub(1)
                    )));
                }
                let lead_inv = inv_mod(m[k as usize], p);
                for c in m.iter_mut() {
                    *c = mul_mod(*c, lead_inv, p);
                }
                if !dense_is_irreducible(&m, p) {
                    return Err(Error::InvalidField(
                        "minimal polynomial is reducible over F_p".into(),
                    ));
                }
                m
            }
            None if k == 1 => vec![0, 1],
            None => first_irreducible(p, k),
        };
        Ok(Field {
            p,
            k,
            order,
            modulus,
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// The number of elements, `p^k`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Monic minimal polynomial of the generator `g`, low degree first.
    pub fn minimal_polynomial(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The generator `g`. For `k = 1` this is the root of the degree one
    /// minimal polynomial.
    pub fn generator(&self) -> FieldElement {
        if self.k == 1 {
            FieldElement((self.p - self.modulus[0]) % self.p)
        } else {
            FieldElement(self.p)
        }
    }

    /// Image of an integer under Z -> F_p -> F_{p^k}.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u64)
    }

    /// Element from its encoding, if the encoding is in range.
    pub fn element(&self, encoding: u64) -> Option<FieldElement> {
        (encoding < self.order).then_some(FieldElement(encoding))
    }

    /// The element `sum_i coords[i] * g^i`. Indices past `k - 1` are reduced
    /// through the minimal polynomial.
    pub fn from_coordinates(&self, coords: &[u64]) -> FieldElement {
        let g = self.generator();
        coords.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
            self.add(self.mul(acc, g), FieldElement(c % self.p))
        })
    }

    /// Coordinates in the basis `1, g, ..., g^{k-1}`.
    pub fn coordinates(&self, a: FieldElement) -> Vec<u64> {
        self.decode(a)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    fn decode(&self, a: FieldElement) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.k as usize);
        let mut x = a.0;
        for _ in 0..self.k {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    fn encode(&self, digits: &[u64]) -> FieldElement {
        let mut x = 0u64;
        for &d in digits.iter().rev() {
            x = x * self.p + d;
        }
        FieldElement(x)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let digits: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        self.encode(&digits)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let digits: Vec<u64> = self
            .decode(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.encode(&digits)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.p));
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, self.p)) % self.p;
            }
        }
        // reduce modulo the monic modulus
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let sub = mul_mod(c, m, self.p);
                let idx = d - k + i;
                prod[idx] = (prod[idx] + self.p - sub) % self.p;
            }
        }
        prod.truncate(k);
        self.encode(&prod)
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.k == 1 {
            return Ok(FieldElement(inv_mod(a.0, self.p)));
        }
        Ok(self.pow(a, self.order - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^{p^e}`.
    pub fn frobenius(&self, a: FieldElement, e: u32) -> FieldElement {
        if self.k == 1 {
            return a;
        }
        let mut x = a;
        for _ in 0..(e % self.k) {
            x = self.pow(x, self.p);
        }
        x
    }

    /// The unique `b` with `b^{p^e} = a`: `e` applications of
    /// `x -> x^{p^{k-1}}`.
    pub fn frobenius_inverse(&self, a: FieldElement, e: u32) -> FieldElement {
        if self.k == 1 {
            return a;
        }
        let steps = (e % self.k) * (self.k - 1) % self.k;
        self.frobenius(a, steps)
    }

    /// Display helper: the element as a polynomial in `g` (or an integer
    /// when it lies in the prime field).
    pub fn display(&self, a: FieldElement) -> FieldDisplay<'_> {
        FieldDisplay { field: self, a }
    }

    /// True when the element lies in F_p.
    pub fn in_prime_field(&self, a: FieldElement) -> bool {
        a.0 < self.p
    }
}

pub struct FieldDisplay<'a> {
    field: &'a Field,
    a: FieldElement,
}

impl fmt::Display for FieldDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = self.field;
        if field.in_prime_field(self.a) {
            return write!(f, "{}", self.a.0);
        }
        let digits = field.decode(self.a);
        let mut first = true;
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, d) {
                (0, d) => write!(f, "{d}")?,
                (1, 1) => f.write_str("g")?,
                (1, d) => write!(f, "{d}*g")?,
                (i, 1) => write!(f, "g^{i}")?,
                (i, d) => write!(f, "{d}*g^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Remainder of dense `a` modulo monic dense `m` over F_p.
fn dense_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, mi, p)) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn dense_is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = match checked_pow(p, d as u32) {
            Some(c) => c,
            None => return true,
        };
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                divisor.push(x % p);
                x /= p;
            }
            divisor.push(1);
            if dense_rem(m, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    let count = checked_pow(p, k).expect("field order checked by caller");
    for idx in 0..count {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut x = idx;
        for _ in 0..k {
            m.push(x % p);
            x /= p;
        }
        m.push(1);
        if m[0] != 0 && dense_is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.mul(f3.from_int(2), f3.from_int(2)), f3.one());
        let f7 = Field::prime(7).unwrap();
        // brute force inverse of 3 mod 7
        let brute = (1..7).find(|x| (3 * x) % 7 == 1).unwrap();
        assert_eq!(brute, 5);
        assert_eq!(f7.inv(f7.from_int(3)).unwrap(), f7.from_int(brute));
        assert_eq!(f7.inv(f7.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn gf4_generator_square() {
        // g^2 = g + 1, i.e. g^2 + g + 1 = 0 over F_2
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let g = f4.generator();
        let g_plus_1 = f4.add(g, f4.one());
        assert_eq!(f4.mul(g, g), g_plus_1);
        // (g+1)^2 = g, so the square root of g is g+1
        assert_eq!(f4.mul(g_plus_1, g_plus_1), g);
        assert_eq!(f4.frobenius_inverse(g, 1), g_plus_1);
    }

    #[test]
    fn frobenius_inverse_edge_cases() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.frobenius_inverse(f5.from_int(2), 1), f5.from_int(2));
        let f9 = Field::new(3, 2, None).unwrap();
        for a in f9.elements() {
            assert_eq!(f9.frobenius_inverse(a, 0), a);
        }
    }

    #[test]
    fn frobenius_inverse_roundtrip() {
        for (p, k) in [(2, 3), (3, 2), (5, 2), (2, 4), (7, 1)] {
            let f = Field::new(p, k, None).unwrap();
            for a in f.elements() {
                for e in 0..=3 * k {
                    let b = f.frobenius_inverse(a, e);
                    let q = p.pow(e);
                    assert_eq!(f.pow(b, q), a, "p={p} k={k} e={e}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!(Field::prime(4), Err(Error::InvalidField(_))));
        assert!(matches!(Field::prime(1), Err(Error::InvalidField(_))));
        // x^2 + 1 = (x+1)^2 over F_2
        assert!(matches!(
            Field::new(2, 2, Some(&[1, 0, 1])),
            Err(Error::InvalidField(_))
        ));
        // wrong degree
        assert!(Field::new(3, 2, Some(&[1, 1])).is_err());
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_right_order() {
        let f = Field::new(3, 3, None).unwrap();
        for a in f.elements().filter(|a| !a.is_zero()) {
            assert_eq!(f.pow(a, f.order() - 1), f.one());
            assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn display_of_extension_elements() {
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let g = f4.generator();
        assert_eq!(f4.display(g).to_string(), "g");
        assert_eq!(f4.display(f4.add(g, f4.one())).to_string(), "g+1");
        assert_eq!(f4.display(f4.one()).to_string(), "1");
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }
}
