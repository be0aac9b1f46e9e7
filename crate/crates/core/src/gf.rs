//! Arithmetic in `F_{p^k}` for odd `p`, and the projective line over it.
//!
//! Elements are polynomials of degree `< k` over `Z_p` reduced modulo a fixed
//! monic irreducible. They are stored packed as their index in the odometer
//! enumeration (constant coefficient fastest), so `FieldElement` is `Copy`
//! and enumeration order is plain integer order.

use std::fmt;

use serde_json::{json, Value};

use crate::cyclestruct::Chi;
use crate::numthy::is_prime;
use crate::{Error, Result};

/// Largest field order [`Field::build`] will construct.
pub const MAX_FIELD_ORDER: u64 = 1_000_000;

const MAX_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    /// Position in the field's enumeration order.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjectivePoint {
    Finite(FieldElement),
    Infinity,
}

/// `F_{p^k}` together with its defining polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u64,
    k: u32,
    /// `k + 1` coefficients, constant term first, leading coefficient 1.
    modulus: Vec<u64>,
    order: u64,
}

impl Field {
    /// Builds `F_{p^k}` from the lexicographically smallest monic irreducible
    /// of degree `k`, comparing `(c_0, …, c_{k-1})` with `c_0` most
    /// significant.
    pub fn build(p: u64, k: u32) -> Result<Field> {
        if k == 0 {
            return Err(Error::Zero);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let order = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p, k })?;
        let k_us = k as usize;
        let mut coeffs = vec![0u64; k_us + 1];
        coeffs[k_us] = 1;
        for idx in 0..order {
            let mut rest = idx;
            for c in coeffs[..k_us].iter_mut().rev() {
                *c = rest % p;
                rest /= p;
            }
            if poly::is_irreducible(&coeffs, p) {
                return Ok(Field {
                    p,
                    k,
                    modulus: coeffs,
                    order,
                });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The element at position `index` of the enumeration.
    pub fn element(&self, index: u64) -> Option<FieldElement> {
        (index < self.order).then_some(FieldElement(index))
    }

    /// All elements in enumeration order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    pub fn from_coefficients(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Precondition(format!(
                "expected {} residues modulo {}",
                self.k, self.p
            )));
        }
        Ok(self.pack(coeffs))
    }

    /// Coefficients, constant term first.
    pub fn coefficients(&self, x: FieldElement) -> Vec<u64> {
        let mut buf = [0u64; MAX_DEGREE];
        self.unpack(x, &mut buf);
        buf[..self.k as usize].to_vec()
    }

    fn unpack(&self, x: FieldElement, out: &mut [u64]) {
        let mut rest = x.0;
        for c in out[..self.k as usize].iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
    }

    fn pack(&self, coeffs: &[u64]) -> FieldElement {
        FieldElement(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut x);
        self.unpack(b, &mut y);
        for (u, v) in x.iter_mut().zip(&y).take(self.k as usize) {
            *u = (*u + v) % self.p;
        }
        self.pack(&x[..self.k as usize])
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let mut x = [0u64; MAX_DEGREE];
        self.unpack(a, &mut x);
        for u in x.iter_mut().take(self.k as usize) {
            *u = (self.p - *u) % self.p;
        }
        self.pack(&x[..self.k as usize])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p;
        if self.k == 1 {
            return FieldElement(a.0 * b.0 % p);
        }
        let k = self.k as usize;
        let (mut x, mut y) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut x);
        self.unpack(b, &mut y);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += x[i] * y[j];
            }
        }
        for c in prod.iter_mut().take(2 * k - 1) {
            *c %= p;
        }
        // reduce by the monic modulus from the top down
        for top in (k..2 * k - 1).rev() {
            let t = prod[top];
            if t == 0 {
                continue;
            }
            prod[top] = 0;
            for j in 0..k {
                let idx = top - k + j;
                prod[idx] = (prod[idx] + t * (p - self.modulus[j])) % p;
            }
        }
        self.pack(&prod[..k])
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
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
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, self.order - 2))
    }

    /// `χ(a)`: [`Chi::Square`] iff `a^{(q-1)/2} = 1`.
    pub fn quadratic_character(&self, a: FieldElement) -> Result<Chi> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(if self.pow(a, (self.order - 1) / 2) == self.one() {
            Chi::Square
        } else {
            Chi::NonSquare
        })
    }

    /// First nonzero element in enumeration order with character `chi`.
    pub fn canonical_a(&self, chi: Chi) -> FieldElement {
        self.elements()
            .skip(1)
            .find(|&a| self.quadratic_character(a) == Ok(chi))
            .expect("odd-order fields contain squares and non-squares")
    }

    /// Colon-separated residues, constant term first.
    pub fn format_element(&self, x: FieldElement) -> String {
        self.coefficients(x)
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn format_point(&self, x: ProjectivePoint) -> String {
        match x {
            ProjectivePoint::Finite(e) => self.format_element(e),
            ProjectivePoint::Infinity => "inf".to_string(),
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let coeffs = s
            .split(':')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Precondition(format!("bad field element {s:?}: {e}")))?;
        self.from_coefficients(&coeffs)
    }

    /// `{"p":…,"k":…,"modulus":[…]}`
    pub fn to_json(&self) -> Value {
        json!({ "p": self.p, "k": self.k, "modulus": self.modulus })
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order)
    }
}

/// Dense polynomials over `Z_p`, constant term first. Only what the
/// irreducibility test needs.
mod poly {
    use crate::numthy::pow_mod;

    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn rem(mut a: Vec<u64>, f: &[u64], p: u64) -> Vec<u64> {
        trim(&mut a);
        let df = f.len() - 1;
        let lead_inv = pow_mod(f[df], p - 2, p);
        while a.len() > df {
            let top = a.len() - 1;
            let t = a[top] * lead_inv % p;
            for (j, &c) in f.iter().enumerate() {
                let idx = top - df + j;
                a[idx] = (a[idx] + t * (p - c)) % p;
            }
            trim(&mut a);
        }
        a
    }

    fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(out, f, p)
    }

    fn pow_mod_poly(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = base.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(&acc, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            exp >>= 1;
        }
        acc
    }

    fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: a monic `f` of degree `k` is irreducible iff
    /// `gcd(x^{p^i} - x, f) = 1` for every `1 <= i <= k/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        let x = rem(vec![0, 1], f, p);
        let mut h = x.clone();
        for _ in 0..k / 2 {
            h = pow_mod_poly(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(f.to_vec(), diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}
