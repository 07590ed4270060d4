//! Dense univariate polynomials over a tabulated finite field.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Gf};

/// Coefficients lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Fe>", into = "Vec<Fe>")]
pub struct Poly(Vec<Fe>);

impl From<Vec<Fe>> for Poly {
    fn from(v: Vec<Fe>) -> Self {
        Poly::new(v)
    }
}

impl From<Poly> for Vec<Fe> {
    fn from(p: Poly) -> Self {
        p.0
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_labels(labels: &[u32]) -> Poly {
        Poly::new(labels.iter().map(|&c| Fe(c)).collect())
    }

    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn one() -> Poly {
        Poly(vec![Fe::ONE])
    }

    pub fn constant(c: Fe) -> Poly {
        Poly::new(vec![c])
    }

    /// `c * T^k`.
    pub fn monomial(c: Fe, k: usize) -> Poly {
        let mut v = vec![Fe::ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// The variable `T`.
    pub fn x() -> Poly {
        Poly::monomial(Fe::ONE, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.0.get(k).copied().unwrap_or(Fe::ZERO)
    }

    pub fn lead(&self) -> Fe {
        self.0.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn labels(&self) -> Vec<u32> {
        self.0.iter().map(|c| c.0).collect()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// Keeps only the terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(self.0.iter().take(n).copied().collect())
    }
}

/// Polynomial arithmetic over a fixed coefficient field.
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: Arc<Gf>,
}

impl PolyRing {
    pub fn new(field: Arc<Gf>) -> PolyRing {
        PolyRing { field }
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let f = &self.field;
        Poly::new((0..n).map(|k| f.add(a.coeff(k), b.coeff(k))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let f = &self.field;
        Poly::new((0..n).map(|k| f.sub(a.coeff(k), b.coeff(k))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly::new(a.0.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, a: &Poly, c: Fe) -> Poly {
        Poly::new(a.0.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut out = vec![Fe::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly::new(out)
    }

    /// Product truncated to degree `< n`.
    pub fn mul_trunc(&self, a: &Poly, b: &Poly, n: usize) -> Poly {
        let f = &self.field;
        let len = (a.0.len() + b.0.len()).saturating_sub(1).min(n);
        let mut out = vec![Fe::ZERO; len];
        for (i, &x) in a.0.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate().take(len - i) {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut base = a.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("division by the zero polynomial");
        let f = &self.field;
        let lead_inv = f.inv(b.lead()).unwrap();
        let mut r = a.0.clone();
        if r.len() <= db {
            return (Poly::zero(), a.clone());
        }
        let mut quot = vec![Fe::ZERO; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c.is_zero() {
                continue;
            }
            let t = f.mul(c, lead_inv);
            quot[k - db] = t;
            for (i, &bc) in b.0.iter().enumerate() {
                let idx = k - db + i;
                r[idx] = f.sub(r[idx], f.mul(t, bc));
            }
        }
        r.truncate(db);
        (Poly::new(quot), Poly::new(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        if a.0.len() < b.0.len() {
            return a.clone();
        }
        self.divrem(a, b).1
    }

    /// Division that must leave no remainder.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if b.is_zero() {
            return Err(Error::invalid("division by the zero polynomial"));
        }
        let (q, r) = self.divrem(a, b);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible)
        }
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match self.field.inv(a.lead()) {
            Some(i) => self.scale(a, i),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn powmod(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&Poly::one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), m);
            }
            e >>= 1;
            if e > 0 {
                base = self.rem(&self.mul(&base, &base), m);
            }
        }
        acc
    }

    /// `a(T^k)`.
    pub fn inflate(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fe::ZERO; (a.0.len() - 1) * k + 1];
        for (i, &c) in a.0.iter().enumerate() {
            v[i * k] = c;
        }
        Poly::new(v)
    }

    /// `a^(s^k)` where `s` is the coefficient field size; coefficients are fixed by Frobenius.
    pub fn frobenius(&self, a: &Poly, k: u32) -> Poly {
        self.inflate(a, (self.field.size() as usize).pow(k))
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        let f = &self.field;
        Poly::new(a.0.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as i64))).collect())
    }

    /// Horner evaluation at a field element.
    pub fn eval(&self, a: &Poly, x: Fe) -> Fe {
        a.0.iter().rev().fold(Fe::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    /// `a(b(T))`.
    pub fn compose(&self, a: &Poly, b: &Poly) -> Poly {
        a.0.iter().rev().fold(Poly::zero(), |acc, &c| self.add(&self.mul(&acc, b), &Poly::constant(c)))
    }

    /// Rabin's test over the coefficient field.
    pub fn is_irreducible(&self, g: &Poly) -> bool {
        let n = match g.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n as u64,
        };
        let s = self.field.size() as u64;
        let g = self.monic(g);
        let x = Poly::x();
        // x^(s^k) mod g by repeated s-th powering
        let frob = |k: u64| {
            let mut y = self.rem(&x, &g);
            for _ in 0..k {
                y = self.powmod(&y, s, &g);
            }
            y
        };
        if !self.sub(&frob(n), &self.rem(&x, &g)).is_zero() {
            return false;
        }
        let mut m = n;
        let mut l = 2;
        let mut primes = Vec::new();
        while m > 1 {
            if m % l == 0 {
                primes.push(l);
                while m % l == 0 {
                    m /= l;
                }
            }
            l += 1;
        }
        primes.into_iter().all(|l| {
            let h = self.sub(&frob(n / l), &x);
            self.gcd(&h, &g).degree() == Some(0)
        })
    }

    /// Human-readable form in the variable `var`.
    pub fn display(&self, a: &Poly, var: &str) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (k, &c) in a.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = if c == Fe::ONE && k > 0 { String::new() } else { c.0.to_string() };
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let sep = if !coeff.is_empty() && !mono.is_empty() { "*" } else { "" };
            terms.push(format!("{coeff}{sep}{mono}"));
        }
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gf;

    fn f2() -> PolyRing {
        PolyRing::new(Arc::new(Gf::prime(2).unwrap()))
    }

    fn p(l: &[u32]) -> Poly {
        Poly::from_labels(l)
    }

    #[test]
    fn exact_divide_t2_plus_t_by_t() {
        let r = f2();
        assert_eq!(r.div_exact(&p(&[0, 1, 1]), &p(&[0, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(r.div_exact(&p(&[1, 1, 1]), &p(&[0, 1])), Err(Error::NotDivisible));
    }

    #[test]
    fn gcd_over_f2() {
        let r = f2();
        assert_eq!(r.gcd(&p(&[1, 0, 1]), &p(&[1, 1])), p(&[1, 1]));
    }

    #[test]
    fn irreducibility_over_f2() {
        let r = f2();
        assert!(r.is_irreducible(&p(&[1, 1, 1])));
        assert!(!r.is_irreducible(&p(&[1, 0, 1])));
        assert!(r.is_irreducible(&p(&[1, 1, 0, 1])));
        assert!(!r.is_irreducible(&p(&[1, 1, 1, 1])));
        assert!(r.is_irreducible(&p(&[1, 1, 0, 0, 1])));
        // (T^2+T+1)^2 has no roots but is reducible
        assert!(!r.is_irreducible(&p(&[1, 0, 1, 0, 1])));
    }

    #[test]
    fn frobenius_is_inflation() {
        let r = f2();
        let a = p(&[1, 1, 0, 1]);
        assert_eq!(r.frobenius(&a, 2), r.pow(&a, 4));
    }
}
