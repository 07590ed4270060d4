//! Finite fields with tabulated arithmetic.
//!
//! Elements are labels `0..q`. For an extension `B[y]/(g)` of a base field `B`
//! of size `b`, the label of `c_0 + c_1 y + ... + c_{k-1} y^{k-1}` is
//! `c_0 + c_1 b + ... + c_{k-1} b^{k-1}`, so labels of the base field embed as
//! themselves. The prime field labels are the integers `0..p`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};

/// Largest field size for which addition and multiplication tables are built.
pub const MAX_FIELD_SIZE: u64 = 1024;

/// A finite-field element label.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite field of size `q = p^degree` with full operation tables.
#[derive(PartialEq, Eq)]
pub struct Gf {
    p: u32,
    q: u32,
    degree: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

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

impl Gf {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Gf> {
        if !is_prime(p as u64) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if p as u64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(p as u64));
        }
        let q = p as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = ((a + b) % q) as u32;
                mul[a * q + b] = ((a * b) % q) as u32;
            }
        }
        Ok(Gf::from_tables(p, 1, add, mul))
    }

    /// The extension `base[y]/(modulus)`; `modulus` must be monic irreducible over `base`.
    pub fn extension(base: &Arc<Gf>, modulus: &Poly) -> Result<Gf> {
        let ring = PolyRing::new(base.clone());
        if modulus.degree().unwrap_or(0) < 1 || modulus.lead() != Fe::ONE {
            return Err(Error::invalid("extension modulus must be monic of degree >= 1"));
        }
        if !ring.is_irreducible(modulus) {
            return Err(Error::NotIrreducible(ring.display(modulus, "y")));
        }
        let k = modulus.degree().unwrap() as u32;
        let size = (base.q as u64).checked_pow(k).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(size));
        }
        let q = size as usize;
        let b = base.q as usize;
        let to_poly = |label: usize| {
            let mut c = Vec::with_capacity(k as usize);
            let mut l = label;
            for _ in 0..k {
                c.push(Fe((l % b) as u32));
                l /= b;
            }
            Poly::new(c)
        };
        let to_label = |p: &Poly| {
            let mut l = 0usize;
            for c in p.coeffs().iter().rev() {
                l = l * b + c.0 as usize;
            }
            l as u32
        };
        let polys: Vec<Poly> = (0..q).map(to_poly).collect();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for c in a..q {
                let s = to_label(&ring.add(&polys[a], &polys[c]));
                let m = to_label(&ring.rem(&ring.mul(&polys[a], &polys[c]), modulus));
                add[a * q + c] = s;
                add[c * q + a] = s;
                mul[a * q + c] = m;
                mul[c * q + a] = m;
            }
        }
        Ok(Gf::from_tables(base.p, base.degree * k, add, mul))
    }

    fn from_tables(p: u32, degree: u32, add: Vec<u32>, mul: Vec<u32>) -> Gf {
        let q = (add.len() as f64).sqrt().round() as usize;
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u32;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as u32;
                }
            }
        }
        Gf { p, q: q as u32, degree, add, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[(a.0 * self.q + b.0) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            None
        } else {
            Some(Fe(self.inv[a.0 as usize]))
        }
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.q
    }
}

/// A finite field `F_p[y]/(modulus)` described by its prime and modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub f: u32,
    /// Coefficients over `F_p`, lowest degree first, monic of degree `f`.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// `F_{p^f}` with the smallest monic irreducible modulus, where candidates
    /// `y^f + c_{f-1} y^{f-1} + ... + c_0` are ordered by the integer `sum c_k p^k`.
    pub fn new(p: u32, f: u32) -> Result<FieldSpec> {
        if f == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let prime = Arc::new(Gf::prime(p)?);
        let size = (p as u64).checked_pow(f).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(size));
        }
        let ring = PolyRing::new(prime);
        for i in 0..(p as u64).pow(f) {
            let mut c = Vec::with_capacity(f as usize + 1);
            let mut l = i;
            for _ in 0..f {
                c.push(Fe((l % p as u64) as u32));
                l /= p as u64;
            }
            c.push(Fe::ONE);
            let cand = Poly::new(c);
            if ring.is_irreducible(&cand) {
                return Ok(FieldSpec { p, f, modulus: cand.coeffs().iter().map(|c| c.0).collect() });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn prime(p: u32) -> Result<FieldSpec> {
        FieldSpec::new(p, 1)
    }

    /// `F_q` for a prime power `q`.
    pub fn of_size(q: u32) -> Result<FieldSpec> {
        let (p, f) = prime_power(q).ok_or_else(|| Error::invalid(format!("{q} is not a prime power")))?;
        FieldSpec::new(p, f)
    }

    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.f)
    }

    /// Validates the description and builds the tables.
    pub fn build(&self) -> Result<Arc<Gf>> {
        let prime = Arc::new(Gf::prime(self.p)?);
        if self.modulus.len() != self.f as usize + 1 {
            return Err(Error::invalid(format!(
                "modulus must have {} coefficients, got {}",
                self.f + 1,
                self.modulus.len()
            )));
        }
        if self.modulus.iter().any(|&c| c >= self.p) {
            return Err(Error::invalid("modulus coefficient out of range"));
        }
        if *self.modulus.last().unwrap() != 1 {
            return Err(Error::invalid("modulus must be monic"));
        }
        if self.f == 1 {
            // every monic linear modulus gives F_p with the same labels
            return Ok(prime);
        }
        let m = Poly::new(self.modulus.iter().map(|&c| Fe(c)).collect());
        Ok(Arc::new(Gf::extension(&prime, &m)?))
    }
}

/// Splits `q = p^f`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut f = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}
