//! Carlitz polynomials over `F_r[T]`.
//!
//! `e_j(x) = prod_{deg h < j} (x - h)` is `F_r`-linear in `x`, stored as the
//! coefficients of `x, x^r, ..., x^(r^j)`; `D_j` is the product of the monic
//! `h` of degree `j`, and `E_j = e_j / D_j`. We take `E_0(x) = x`.

use std::sync::{Arc, RwLock};

use crate::binom::{binom_mod_p, digits};
use crate::digit::{BasisFamily, Mode, SeedFunctions};
use crate::error::{Error, Result};
use crate::field::{Fe, Gf};
use crate::local::{Kind, LocalField, LocalFieldSpec, Repr};
use crate::poly::{Poly, PolyRing};

#[derive(Default)]
struct Cache {
    d: Vec<Poly>,
    e: Vec<Vec<Poly>>,
}

/// Carlitz data over `F_r[T]` with write-once caches of `D_j` and `e_j`.
pub struct CarlitzContext {
    ring: PolyRing,
    r: u64,
    cache: RwLock<Cache>,
}

impl std::fmt::Debug for CarlitzContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CarlitzContext").field("r", &self.r).finish()
    }
}

impl CarlitzContext {
    pub fn new(field: Arc<Gf>) -> CarlitzContext {
        let r = field.size() as u64;
        CarlitzContext { ring: PolyRing::new(field), r, cache: RwLock::new(Cache::default()) }
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    fn ensure(&self, j: usize) {
        if self.cache.read().unwrap().d.len() > j {
            return;
        }
        let mut c = self.cache.write().unwrap();
        let ring = &self.ring;
        if c.d.is_empty() {
            c.d.push(Poly::one());
            c.e.push(vec![Poly::one()]);
        }
        while c.d.len() <= j {
            let m = c.d.len();
            // D_m = (T^(r^m) - T) D_{m-1}^r
            let t_rm = Poly::monomial(Fe::ONE, self.r.pow(m as u32) as usize);
            let d = ring.mul(&ring.sub(&t_rm, &Poly::x()), &ring.frobenius(&c.d[m - 1], 1));
            // e_m = e_{m-1}^r - D_{m-1}^(r-1) e_{m-1}
            let prev = &c.e[m - 1];
            let dr1 = ring.pow(&c.d[m - 1], self.r - 1);
            let mut e = vec![Poly::zero(); m + 1];
            for (k, a) in prev.iter().enumerate() {
                e[k + 1] = ring.add(&e[k + 1], &ring.frobenius(a, 1));
                e[k] = ring.sub(&e[k], &ring.mul(&dr1, a));
            }
            c.d.push(d);
            c.e.push(e);
        }
    }

    /// `D_j`.
    pub fn d(&self, j: usize) -> Poly {
        self.ensure(j);
        self.cache.read().unwrap().d[j].clone()
    }

    /// Coefficients of `x^(r^k)`, `k <= j`, in `e_j(x)`.
    pub fn e(&self, j: usize) -> Vec<Poly> {
        self.ensure(j);
        self.cache.read().unwrap().e[j].clone()
    }

    /// `e_j(h)` for a polynomial `h`.
    pub fn eval_e(&self, j: usize, h: &Poly) -> Poly {
        let ring = &self.ring;
        self.e(j)
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (k, a)| ring.add(&acc, &ring.mul(a, &ring.frobenius(h, k as u32))))
    }

    /// `E_j(h) = e_j(h) / D_j`; `E_0(h) = h`.
    pub fn eval_big_e(&self, j: usize, h: &Poly) -> Poly {
        self.ring.div_exact(&self.eval_e(j, h), &self.d(j)).expect("E_j maps F_r[T] into F_r[T]")
    }

    /// `script E_i(h) = prod_j E_j(h)^(c_j)` over the base-`r` digits `c_j` of `i`.
    pub fn eval_script_e(&self, i: u64, h: &Poly) -> Poly {
        digits(i, self.r).iter().enumerate().fold(Poly::one(), |acc, (j, &c)| {
            if c == 0 {
                acc
            } else {
                self.ring.mul(&acc, &self.ring.pow(&self.eval_big_e(j, h), c))
            }
        })
    }

    /// Carlitz factorial `prod_j D_j^(c_j)`.
    pub fn factorial(&self, i: u64) -> Poly {
        digits(i, self.r)
            .iter()
            .enumerate()
            .fold(Poly::one(), |acc, (j, &c)| self.ring.mul(&acc, &self.ring.pow(&self.d(j), c)))
    }

    /// `e_j` as a dense polynomial in `x`: entry `m` is the coefficient of `x^m`.
    pub fn e_dense(&self, j: usize) -> Vec<Poly> {
        let e = self.e(j);
        let top = self.r.pow(j as u32) as usize;
        let mut out = vec![Poly::zero(); top + 1];
        for (k, a) in e.into_iter().enumerate() {
            out[self.r.pow(k as u32) as usize] = a;
        }
        out
    }

    /// Valuation of `E_j(S^k)` at the place `S = 1/T`, `None` when the value is 0.
    pub fn valuation_at_infinity(&self, j: usize, k: u64) -> Option<i64> {
        let ring = &self.ring;
        let top = k * self.r.pow(j as u32);
        // T^(k r^j) e_j(T^-k) = sum_i a_i T^(k (r^j - r^i))
        let num = self.e(j).iter().enumerate().fold(Poly::zero(), |acc, (i, a)| {
            let shift = (top - k * self.r.pow(i as u32)) as usize;
            ring.add(&acc, &ring.mul(a, &Poly::monomial(Fe::ONE, shift)))
        });
        let den_deg = top as i64 + self.d(j).degree()? as i64;
        num.degree().map(|d| den_deg - d as i64)
    }

    /// Exponent of the largest power of `f` dividing the nonzero `a`.
    pub fn ord(&self, a: &Poly, f: &Poly) -> u64 {
        let mut v = 0;
        let mut cur = a.clone();
        loop {
            let (q, r) = self.ring.divrem(&cur, f);
            if !r.is_zero() || cur.is_zero() {
                return v;
            }
            cur = q;
            v += 1;
        }
    }
}

/// Outcome of the addition-formula check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionReport {
    pub holds: bool,
    /// First sample `(x, y)` index where the two sides differ.
    pub witness: Option<usize>,
}

/// Checks `E_i(x + y) = sum_{j + k = i} binom(i, j) E_j(x) E_k(y)` on samples modulo `T^prec`.
pub fn addition_formula_check(ctx: &CarlitzContext, i: u64, samples: &[(Poly, Poly)], prec: usize) -> AdditionReport {
    let ring = ctx.ring();
    let f = ring.field();
    let p = f.characteristic();
    for (s, (x, y)) in samples.iter().enumerate() {
        let lhs = ctx.eval_script_e(i, &ring.add(x, y)).truncate(prec);
        let mut rhs = Poly::zero();
        for j in 0..=i {
            let b = binom_mod_p(i as i64, j, p);
            if b == 0 {
                continue;
            }
            let term = ring.mul(&ctx.eval_script_e(j, x), &ctx.eval_script_e(i - j, y));
            rhs = ring.add(&rhs, &ring.scale(&term, f.from_int(b as i64)));
        }
        if lhs != rhs.truncate(prec) {
            return AdditionReport { holds: false, witness: Some(s) };
        }
    }
    AdditionReport { holds: true, witness: None }
}

/// Seeds `E_j`, evaluated exactly on polynomial representatives.
pub struct CarlitzSeeds {
    ctx: Arc<CarlitzContext>,
    d: u32,
}

impl CarlitzSeeds {
    pub fn context(&self) -> &Arc<CarlitzContext> {
        &self.ctx
    }
}

impl SeedFunctions for CarlitzSeeds {
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        if k.kind() == Kind::Padic {
            return Err(Error::invalid("Carlitz seeds need characteristic p"));
        }
        let x = x.poly();
        Ok((0..count).map(|j| k.reduce(&Repr::Poly(self.ctx.eval_big_e(j, x)), prec)).collect())
    }

    fn loss(&self, j: usize) -> i64 {
        (j / self.d as usize) as i64
    }
}

/// Seeds `E_{j,T,q}` on `F_q[[T]]`, digit base `q`, linear mode.
pub fn local_carlitz_family(q: u32) -> Result<BasisFamily> {
    let k = LocalFieldSpec::laurent(q)?.build()?;
    let ctx = Arc::new(CarlitzContext::new(k.coeff_field().clone()));
    Ok(BasisFamily::new(k.clone(), k.q(), 1, Mode::Linear, "carlitz", Arc::new(CarlitzSeeds { ctx, d: 1 })))
}

/// Seeds `E_{j,T,r}` on the completion at `pi`, digit base `r`, `d` seeds per level.
pub fn global_carlitz_family(r: u32, pi: &[u32]) -> Result<BasisFamily> {
    let k = LocalFieldSpec::at_pi(r, pi)?.build()?;
    carlitz_family_on(k)
}

/// The Carlitz family on a characteristic `p` field: base `q` at `T`, base `r` at `pi`.
pub fn carlitz_family_on(k: Arc<LocalField>) -> Result<BasisFamily> {
    let ctx = Arc::new(CarlitzContext::new(k.coeff_field().clone()));
    match k.kind() {
        Kind::Laurent => {
            Ok(BasisFamily::new(k.clone(), k.q(), 1, Mode::Linear, "carlitz", Arc::new(CarlitzSeeds { ctx, d: 1 })))
        }
        Kind::AtPi => {
            let d = k.d();
            Ok(BasisFamily::new(
                k.clone(),
                k.r(),
                d as usize,
                Mode::Sublinear,
                "carlitz-at-pi",
                Arc::new(CarlitzSeeds { ctx, d }),
            ))
        }
        Kind::Padic => Err(Error::invalid("Carlitz family needs characteristic p")),
    }
}

/// `E_1(x)` at the place `1/T`, for `x = sum_k c_k S^k` with `S = 1/T`, as the
/// coefficients of `S^0 .. S^(prec-1)`:
/// `E_1(x) = (x^r - x) S^r / (1 - S^(r-1))`.
pub fn e1_at_infinity(field: &Arc<Gf>, x: &[Fe], prec: usize) -> Vec<Fe> {
    let ring = PolyRing::new(field.clone());
    let r = field.size() as u64;
    let x = Poly::new(x.to_vec());
    let num = ring.sub(&ring.pow(&x, r), &x);
    let shifted = ring.mul(&num, &Poly::monomial(Fe::ONE, r as usize));
    // geometric series sum_m S^((r-1) m)
    let mut geo = vec![Fe::ZERO; prec];
    let mut m = 0;
    while m < prec {
        geo[m] = Fe::ONE;
        m += r as usize - 1;
    }
    let v = ring.mul_trunc(&shifted, &Poly::new(geo), prec);
    (0..prec).map(|k| v.coeff(k)).collect()
}
