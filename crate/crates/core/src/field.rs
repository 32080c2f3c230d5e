//! Small finite fields `GF(p^e)` with table-driven arithmetic.
//!
//! Element ids encode the coefficient vector of the residue polynomial as a
//! base-`p` integer, constant term in the least significant digit. The
//! modulus is the smallest monic irreducible polynomial of degree `e` under
//! the same encoding of its lower coefficients, so GF(4) uses `X^2 + X + 1`,
//! GF(8) uses `X^3 + X + 1` and GF(9) uses `X^2 + 1`. Prime fields use the
//! modulus `X`.

use std::ops::Range;

use crate::error::{Error, Result};

/// Fields above this order are rejected; the full multiplication table is
/// precomputed.
pub const MAX_FIELD_ORDER: u64 = 1024;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, e)` with `n = p^e` and `p` prime, or `None`.
pub fn is_prime_power(n: u64) -> Result<Option<(u64, u32)>> {
    if n < 2 {
        return Err(Error::BelowTwo(n));
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > n {
        // n itself is prime
        return Ok(Some((n, 1)));
    }
    let mut rest = n;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    Ok((rest == 1).then_some((p, e)))
}

// Polynomials over GF(p), coefficients low degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    let lead_inv = mod_inverse(*b.last().expect("nonzero divisor"), p);
    let mut r = trim(a.to_vec());
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = r[r.len() - 1] * lead_inv % p;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - factor * bc % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

fn digits(mut id: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(id % p);
        id /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `degree` whose lower coefficients are the
/// base-`p` digits of `lower`.
fn monic(lower: u32, p: u32, degree: usize) -> Vec<u32> {
    let mut f = digits(lower, p, degree);
    f.push(1);
    f
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    let deg = f.len().saturating_sub(1);
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for lower in 0..p.pow(d as u32) {
            if poly_rem(&f, &monic(lower, p, d), p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    e: u32,
    order: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Field {
    pub fn new(m: u64) -> Result<Self> {
        let (p, e) = is_prime_power(m)?.ok_or(Error::NotPrimePower(m))?;
        if m > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(m));
        }
        let (p, order) = (p as u32, m as u32);
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..order)
                .map(|lower| monic(lower, p, e as usize))
                .find(|f| is_irreducible(f, p))
                .expect("an irreducible polynomial exists for every degree")
        };

        let n = order as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        let mut neg = vec![0; n];
        let mut inv = vec![0; n];
        let digit_vecs: Vec<Vec<u32>> = (0..order).map(|a| digits(a, p, e as usize)).collect();
        for a in 0..n {
            let da = &digit_vecs[a];
            neg[a] = undigits(&da.iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p);
            for b in 0..n {
                let db = &digit_vecs[b];
                let sum: Vec<u32> = da.iter().zip(db).map(|(&x, &y)| (x + y) % p).collect();
                add[a * n + b] = undigits(&sum, p);
                let prod = if e == 1 {
                    vec![(a as u32 * b as u32) % p]
                } else {
                    poly_rem(&poly_mul(&trim(da.clone()), &trim(db.clone()), p), &modulus, p)
                };
                let v = undigits(&prod, p);
                mul[a * n + b] = v;
                if v == 1 {
                    inv[a] = b as u32;
                }
            }
        }
        Ok(Field {
            p,
            e,
            order,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Element ids `0..m` in canonical order.
    pub fn elements(&self) -> Range<u32> {
        0..self.order
    }

    pub fn check(&self, a: u32) -> Result<u32> {
        if a < self.order {
            Ok(a)
        } else {
            Err(Error::ElementOutOfRange {
                element: a,
                order: self.order,
            })
        }
    }

    // add/mul/neg/sub index precomputed tables and panic on ids outside the
    // field; use `check` on untrusted input.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.order as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        match self.check(a)? {
            0 => Err(Error::InverseOfZero),
            a => Ok(self.inv[a as usize]),
        }
    }

    pub fn pow(&self, a: u32, mut exp: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Horner evaluation of `f` at `point`.
    pub fn eval(&self, f: &Poly, point: u32) -> Result<u32> {
        self.check(point)?;
        f.coeffs
            .iter()
            .rev()
            .try_fold(0, |acc, &c| Ok(self.add(self.mul(acc, point), self.check(c)?)))
    }

    /// Every polynomial of degree at most `t-1`, as coefficient vectors of
    /// length `t` in base-`m` counting order (constant term fastest).
    pub fn polys(&self, t: usize) -> impl Iterator<Item = Poly> + '_ {
        let total = (self.order as u64).pow(t as u32);
        (0..total).map(move |mut k| {
            let mut coeffs = Vec::with_capacity(t);
            for _ in 0..t {
                coeffs.push((k % self.order as u64) as u32);
                k /= self.order as u64;
            }
            Poly { coeffs }
        })
    }
}

/// Polynomial over a field, coefficients (element ids) constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Poly { coeffs }
    }

    /// Builds a polynomial of degree at most `t-1`; trailing zero
    /// coefficients beyond that are allowed.
    pub fn bounded(coeffs: Vec<u32>, t: usize) -> Result<Self> {
        let p = Poly { coeffs };
        match p.degree() {
            Some(degree) if degree + 1 > t => Err(Error::DegreeTooLarge {
                degree,
                bound: t.saturating_sub(1),
            }),
            _ => Ok(p),
        }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    /// Coefficient of `X^(t-1)`; zero if absent.
    pub fn leading_coeff(&self, t: usize) -> u32 {
        t.checked_sub(1).and_then(|i| self.coeffs.get(i)).copied().unwrap_or(0)
    }
}
