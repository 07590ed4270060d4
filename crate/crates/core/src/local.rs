//! Truncated arithmetic in `F_q((T))`, in the completion of `F_r(T)` at a monic
//! irreducible `pi`, and in `Q_p`.
//!
//! Integral elements are handled as [`Repr`] values reduced modulo `pi^n`:
//! polynomials over the coefficient field in characteristic `p`, integers in
//! `Q_p`. A [`LocalElem`] is `pi^val * unit` known modulo `pi^prec`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, Gf};
use crate::poly::{Poly, PolyRing};

/// Largest absolute precision offered in characteristic `p`.
pub const MAX_CHAR_P_PREC: i64 = 256;

/// Description of a local field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalFieldSpec {
    /// `F_q((T))` with uniformizer `T`.
    Laurent { coeff: FieldSpec },
    /// The completion of `F_r(T)` at the monic irreducible `pi` (coefficient labels over `F_r`).
    AtPi { coeff: FieldSpec, pi: Vec<u32> },
    /// `Q_p` with uniformizer `p`.
    Padic { p: u32 },
}

impl LocalFieldSpec {
    pub fn laurent(q: u32) -> Result<LocalFieldSpec> {
        Ok(LocalFieldSpec::Laurent { coeff: FieldSpec::of_size(q)? })
    }

    pub fn at_pi(r: u32, pi: &[u32]) -> Result<LocalFieldSpec> {
        Ok(LocalFieldSpec::AtPi { coeff: FieldSpec::of_size(r)?, pi: pi.to_vec() })
    }

    pub fn padic(p: u32) -> LocalFieldSpec {
        LocalFieldSpec::Padic { p }
    }

    pub fn build(&self) -> Result<Arc<LocalField>> {
        LocalField::new(self.clone()).map(Arc::new)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Laurent,
    AtPi,
    Padic,
}

/// An integral element modulo a power of the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repr {
    Poly(Poly),
    Int(u128),
}

impl Repr {
    pub fn poly(&self) -> &Poly {
        match self {
            Repr::Poly(p) => p,
            Repr::Int(_) => panic!("integer representative used as a polynomial"),
        }
    }

    pub fn int(&self) -> u128 {
        match self {
            Repr::Int(n) => *n,
            Repr::Poly(_) => panic!("polynomial representative used as an integer"),
        }
    }
}

impl fmt::Display for Repr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repr::Poly(p) => write!(f, "{:?}", p.labels()),
            Repr::Int(n) => write!(f, "{n}"),
        }
    }
}

/// A built local field with residue and coefficient field tables.
pub struct LocalField {
    spec: LocalFieldSpec,
    kind: Kind,
    coeff: Arc<Gf>,
    residue: Arc<Gf>,
    ring: PolyRing,
    pi: Poly,
    d: u32,
    p: u32,
    q: u64,
    max_prec: i64,
    pi_powers: Vec<Poly>,
    teich_cache: RwLock<HashMap<u32, (i64, Repr)>>,
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalField").field("spec", &self.spec).finish()
    }
}

impl LocalField {
    pub fn new(spec: LocalFieldSpec) -> Result<LocalField> {
        match &spec {
            LocalFieldSpec::Laurent { coeff } => {
                let f = coeff.build()?;
                let q = f.size() as u64;
                Ok(LocalField {
                    kind: Kind::Laurent,
                    coeff: f.clone(),
                    residue: f.clone(),
                    ring: PolyRing::new(f.clone()),
                    pi: Poly::x(),
                    d: 1,
                    p: f.characteristic(),
                    q,
                    max_prec: MAX_CHAR_P_PREC,
                    pi_powers: Vec::new(),
                    teich_cache: RwLock::new(HashMap::new()),
                    spec,
                })
            }
            LocalFieldSpec::AtPi { coeff, pi } => {
                let f = coeff.build()?;
                if pi.iter().any(|&c| c >= f.size()) {
                    return Err(Error::invalid("coefficient of pi out of range"));
                }
                let pi_poly = Poly::from_labels(pi);
                let residue = Arc::new(Gf::extension(&f, &pi_poly)?);
                let ring = PolyRing::new(f.clone());
                let d = pi_poly.degree().unwrap() as u32;
                let max_prec = (MAX_CHAR_P_PREC / d as i64).max(8);
                let mut pi_powers = vec![Poly::one()];
                for k in 1..=max_prec as usize {
                    let next = ring.mul(&pi_powers[k - 1], &pi_poly);
                    pi_powers.push(next);
                }
                Ok(LocalField {
                    kind: Kind::AtPi,
                    coeff: f.clone(),
                    q: residue.size() as u64,
                    residue,
                    ring,
                    pi: pi_poly,
                    d,
                    p: f.characteristic(),
                    max_prec,
                    pi_powers,
                    teich_cache: RwLock::new(HashMap::new()),
                    spec,
                })
            }
            LocalFieldSpec::Padic { p } => {
                let f = Arc::new(Gf::prime(*p)?);
                let mut max_prec = 0;
                let mut m: u128 = 1;
                while m * (*p as u128) < (1u128 << 63) {
                    m *= *p as u128;
                    max_prec += 1;
                }
                Ok(LocalField {
                    kind: Kind::Padic,
                    coeff: f.clone(),
                    residue: f.clone(),
                    ring: PolyRing::new(f),
                    pi: Poly::zero(),
                    d: 1,
                    p: *p,
                    q: *p as u64,
                    max_prec,
                    pi_powers: Vec::new(),
                    teich_cache: RwLock::new(HashMap::new()),
                    spec,
                })
            }
        }
    }

    pub fn spec(&self) -> &LocalFieldSpec {
        &self.spec
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_padic(&self) -> bool {
        self.kind == Kind::Padic
    }

    /// `F_r` for the completion at `pi`, `F_q` for Laurent series, `F_p` for `Q_p`.
    pub fn coeff_field(&self) -> &Arc<Gf> {
        &self.coeff
    }

    pub fn residue_field(&self) -> &Arc<Gf> {
        &self.residue
    }

    /// Polynomial ring over the coefficient field (characteristic `p` settings).
    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    /// The uniformizer as a polynomial (characteristic `p` settings).
    pub fn pi_poly(&self) -> &Poly {
        &self.pi
    }

    /// Residue field size.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Coefficient field size `r`, with `q = r^d`.
    pub fn r(&self) -> u64 {
        self.coeff.size() as u64
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn max_prec(&self) -> i64 {
        self.max_prec
    }

    pub fn check_prec(&self, n: i64) -> Result<()> {
        if n > self.max_prec {
            return Err(Error::InsufficientPrecision { needed: n, have: self.max_prec });
        }
        if n < 0 {
            return Err(Error::invalid(format!("negative precision {n}")));
        }
        Ok(())
    }

    /// Number of points of `O / m^n`.
    pub fn num_points(&self, n: u32) -> Result<usize> {
        self.q
            .checked_pow(n)
            .filter(|&m| m <= 1 << 24)
            .map(|m| m as usize)
            .ok_or_else(|| Error::invalid(format!("level {n} is too large for q = {}", self.q)))
    }

    fn modulus(&self, n: i64) -> u128 {
        (self.p as u128).pow(n as u32)
    }

    pub fn zero(&self) -> Repr {
        match self.kind {
            Kind::Padic => Repr::Int(0),
            _ => Repr::Poly(Poly::zero()),
        }
    }

    pub fn one(&self) -> Repr {
        match self.kind {
            Kind::Padic => Repr::Int(1),
            _ => Repr::Poly(Poly::one()),
        }
    }

    /// The image of an integer, modulo `pi^n`.
    pub fn int(&self, k: i64, n: i64) -> Repr {
        match self.kind {
            Kind::Padic => {
                let m = self.modulus(n) as i128;
                Repr::Int((k as i128).rem_euclid(m) as u128)
            }
            _ => Repr::Poly(Poly::constant(self.coeff.from_int(k))),
        }
    }

    /// `pi^k` as an exact representative.
    pub fn pi_pow(&self, k: i64) -> Repr {
        match self.kind {
            Kind::Laurent => Repr::Poly(Poly::monomial(Fe::ONE, k as usize)),
            Kind::AtPi => Repr::Poly(self.pi_power_poly(k)),
            Kind::Padic => Repr::Int(self.modulus(k)),
        }
    }

    fn pi_power_poly(&self, k: i64) -> Poly {
        match self.pi_powers.get(k as usize) {
            Some(p) => p.clone(),
            None => self.ring.pow(&self.pi, k as u64),
        }
    }

    pub fn reduce(&self, a: &Repr, n: i64) -> Repr {
        match (self.kind, a) {
            (Kind::Laurent, Repr::Poly(p)) => Repr::Poly(p.truncate(n.max(0) as usize)),
            (Kind::AtPi, Repr::Poly(p)) => {
                if p.degree().is_none_or(|deg| (deg as i64) < n * self.d as i64) {
                    return a.clone();
                }
                Repr::Poly(self.ring.rem(p, &self.pi_power_poly(n)))
            }
            (Kind::Padic, Repr::Int(x)) => Repr::Int(x % self.modulus(n)),
            _ => panic!("representative does not match the field kind"),
        }
    }

    pub fn add(&self, a: &Repr, b: &Repr, n: i64) -> Repr {
        match (a, b) {
            (Repr::Poly(x), Repr::Poly(y)) => self.reduce(&Repr::Poly(self.ring.add(x, y)), n),
            (Repr::Int(x), Repr::Int(y)) => {
                let m = self.modulus(n);
                Repr::Int((x % m + y % m) % m)
            }
            _ => panic!("mixed representatives"),
        }
    }

    pub fn neg(&self, a: &Repr, n: i64) -> Repr {
        match a {
            Repr::Poly(x) => self.reduce(&Repr::Poly(self.ring.neg(x)), n),
            Repr::Int(x) => {
                let m = self.modulus(n);
                Repr::Int((m - x % m) % m)
            }
        }
    }

    pub fn sub(&self, a: &Repr, b: &Repr, n: i64) -> Repr {
        self.add(a, &self.neg(b, n), n)
    }

    pub fn mul(&self, a: &Repr, b: &Repr, n: i64) -> Repr {
        match (self.kind, a, b) {
            (Kind::Laurent, Repr::Poly(x), Repr::Poly(y)) => Repr::Poly(self.ring.mul_trunc(x, y, n.max(0) as usize)),
            (_, Repr::Poly(x), Repr::Poly(y)) => self.reduce(&Repr::Poly(self.ring.mul(x, y)), n),
            (_, Repr::Int(x), Repr::Int(y)) => {
                let m = self.modulus(n);
                Repr::Int(((x % m) * (y % m)) % m)
            }
            _ => panic!("mixed representatives"),
        }
    }

    pub fn scale(&self, a: &Repr, c: Fe, n: i64) -> Repr {
        match a {
            Repr::Poly(x) => self.reduce(&Repr::Poly(self.ring.scale(x, c)), n),
            Repr::Int(_) => self.mul(a, &Repr::Int(c.0 as u128), n),
        }
    }

    pub fn pow(&self, a: &Repr, mut e: u64, n: i64) -> Repr {
        let mut base = self.reduce(a, n);
        let mut acc = self.reduce(&self.one(), n);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base, n);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base, n);
            }
        }
        acc
    }

    pub fn is_zero_mod(&self, a: &Repr, n: i64) -> bool {
        match self.reduce(a, n) {
            Repr::Poly(p) => p.is_zero(),
            Repr::Int(x) => x == 0,
        }
    }

    /// `v(a)`, or `n` when `a` vanishes modulo `pi^n`.
    pub fn valuation(&self, a: &Repr, n: i64) -> i64 {
        let a = self.reduce(a, n);
        match (self.kind, &a) {
            (Kind::Laurent, Repr::Poly(p)) => p.low_degree().map_or(n, |k| k as i64),
            (Kind::AtPi, Repr::Poly(p)) => {
                if p.is_zero() {
                    return n;
                }
                let mut v = 0;
                let mut cur = p.clone();
                loop {
                    let (quo, rem) = self.ring.divrem(&cur, &self.pi);
                    if !rem.is_zero() {
                        return v;
                    }
                    cur = quo;
                    v += 1;
                }
            }
            (Kind::Padic, Repr::Int(x)) => {
                if *x == 0 {
                    return n;
                }
                let mut v = 0;
                let mut y = *x;
                while y % self.p as u128 == 0 {
                    y /= self.p as u128;
                    v += 1;
                }
                v
            }
            _ => panic!("representative does not match the field kind"),
        }
    }

    /// `a / pi^k` for `a` divisible by `pi^k`.
    pub fn shift_down(&self, a: &Repr, k: i64) -> Repr {
        if k <= 0 {
            return a.clone();
        }
        match (self.kind, a) {
            (Kind::Laurent, Repr::Poly(p)) => {
                Repr::Poly(Poly::new(p.coeffs().iter().skip(k as usize).copied().collect()))
            }
            (Kind::AtPi, Repr::Poly(p)) => Repr::Poly(self.ring.divrem(p, &self.pi_power_poly(k)).0),
            (Kind::Padic, Repr::Int(x)) => Repr::Int(x / self.modulus(k)),
            _ => panic!("representative does not match the field kind"),
        }
    }

    /// `a * pi^k` modulo `pi^n`.
    pub fn shift_up(&self, a: &Repr, k: i64, n: i64) -> Repr {
        if k >= n {
            return self.zero();
        }
        match (self.kind, a) {
            (Kind::Laurent, Repr::Poly(p)) => {
                let mut c = vec![Fe::ZERO; k as usize];
                c.extend_from_slice(p.coeffs());
                Repr::Poly(Poly::new(c).truncate(n as usize))
            }
            _ => self.mul(a, &self.pi_pow(k), n),
        }
    }

    /// Reduction modulo the maximal ideal, as a residue field label.
    pub fn residue(&self, a: &Repr) -> Fe {
        match (self.kind, a) {
            (Kind::Laurent, Repr::Poly(p)) => p.coeff(0),
            (Kind::AtPi, Repr::Poly(p)) => {
                let r = self.ring.rem(p, &self.pi);
                let base = self.coeff.size();
                Fe(r.coeffs().iter().rev().fold(0, |acc, c| acc * base + c.0))
            }
            (Kind::Padic, Repr::Int(x)) => Fe((x % self.p as u128) as u32),
            _ => panic!("representative does not match the field kind"),
        }
    }

    /// The canonical representative of a residue class: degree `< d` polynomial or integer `< p`.
    pub fn lift_residue(&self, c: Fe) -> Repr {
        match self.kind {
            Kind::Padic => Repr::Int(c.0 as u128),
            Kind::Laurent => Repr::Poly(Poly::constant(c)),
            Kind::AtPi => Repr::Poly(self.digits_poly(c.0 as u64, self.d as usize)),
        }
    }

    fn digits_poly(&self, mut i: u64, len: usize) -> Poly {
        let r = self.coeff.size() as u64;
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push(Fe((i % r) as u32));
            i /= r;
        }
        Poly::new(c)
    }

    /// Teichmuller lift of a residue modulo `pi^n`.
    pub fn teichmuller(&self, c: Fe, n: i64) -> Repr {
        if self.kind == Kind::Laurent || c.is_zero() || n <= 1 {
            return self.reduce(&self.lift_residue(c), n);
        }
        if let Some((have, lift)) = self.teich_cache.read().unwrap().get(&c.0) {
            if *have >= n {
                return self.reduce(lift, n);
            }
        }
        // a -> a^q (or a^p in Q_p, where q = p) is a contraction onto the lift
        let mut x = self.lift_residue(c);
        loop {
            let next = self.pow(&x, self.q, n);
            if next == x {
                break;
            }
            x = next;
        }
        self.teich_cache.write().unwrap().insert(c.0, (n, x.clone()));
        x
    }

    /// Inverse of a unit modulo `pi^n`.
    pub fn unit_inverse(&self, u: &Repr, n: i64) -> Result<Repr> {
        let r = self.residue(u);
        let r_inv = self.residue.inv(r).ok_or(Error::NotDivisible)?;
        let mut x = self.lift_residue(r_inv);
        let two = self.int(2, n);
        let mut k = 1;
        while k < n {
            k = (2 * k).min(n);
            let ux = self.mul(u, &x, k);
            x = self.mul(&x, &self.sub(&two, &ux, k), k);
        }
        Ok(self.reduce(&x, n))
    }

    /// Canonical representative number `i` of `O / m^n`: base-`r` digits of `i`
    /// as coefficients in characteristic `p`, the integer `i` in `Z_p`.
    pub fn canonical_rep(&self, i: usize, n: u32) -> Repr {
        match self.kind {
            Kind::Padic => Repr::Int(i as u128),
            _ => Repr::Poly(self.digits_poly(i as u64, (self.d * n) as usize)),
        }
    }

    pub fn canonical_reps(&self, n: u32) -> Result<Vec<Repr>> {
        Ok((0..self.num_points(n)?).map(|i| self.canonical_rep(i, n)).collect())
    }

    /// Index of the canonical representative congruent to `a` modulo `pi^n`.
    pub fn index_of(&self, a: &Repr, n: u32) -> usize {
        match self.reduce(a, n as i64) {
            Repr::Int(x) => x as usize,
            Repr::Poly(p) => {
                let r = self.coeff.size() as usize;
                p.coeffs().iter().rev().fold(0, |acc, c| acc * r + c.0 as usize)
            }
        }
    }

    /// An integral element from a representative known modulo `pi^prec`.
    pub fn elem(&self, a: &Repr, prec: i64) -> LocalElem {
        let a = self.reduce(a, prec);
        let v = self.valuation(&a, prec);
        LocalElem { val: v, unit: self.reduce(&self.shift_down(&a, v), prec - v), prec }
    }

    /// `pi^val * a` known modulo `pi^prec`.
    pub fn elem_shifted(&self, a: &Repr, val: i64, prec: i64) -> LocalElem {
        let e = self.elem(a, prec - val);
        LocalElem { val: e.val + val, unit: e.unit, prec }
    }

    pub fn elem_zero(&self, prec: i64) -> LocalElem {
        LocalElem { val: prec, unit: self.zero(), prec }
    }

    pub fn elem_one(&self, prec: i64) -> LocalElem {
        self.elem(&self.one(), prec)
    }

    pub fn elem_int(&self, k: i64, prec: i64) -> LocalElem {
        self.elem(&self.int(k, prec), prec)
    }

    /// Element with the given digit window starting at `val`: Teichmuller digits in
    /// characteristic `p`, base-`p` digits in `Q_p`.
    pub fn elem_from_digits(&self, val: i64, digits: &[Fe], prec: i64) -> Result<LocalElem> {
        if prec < val {
            return Err(Error::invalid("precision below valuation"));
        }
        self.check_prec(prec - val)?;
        if digits.len() as i64 > prec - val {
            return Err(Error::invalid("more digits than the precision window"));
        }
        if let Some(c) = digits.iter().find(|c| !self.residue.contains(**c)) {
            return Err(Error::invalid(format!("digit {} outside the residue field", c.0)));
        }
        let rel = prec - val;
        let mut acc = self.zero();
        for (k, &c) in digits.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = match self.kind {
                Kind::Padic => self.lift_residue(c),
                _ => self.teichmuller(c, rel - k as i64),
            };
            acc = self.add(&acc, &self.shift_up(&t, k as i64, rel), rel);
        }
        Ok(self.elem_shifted(&acc, val, prec))
    }

    /// Digits of `x` from `x.val()` up to `x.prec() - 1`; see [`LocalField::elem_from_digits`].
    pub fn digits(&self, x: &LocalElem) -> Vec<Fe> {
        match self.kind {
            Kind::Padic => {
                let mut y = x.unit.int();
                (0..x.rel_prec())
                    .map(|_| {
                        let dgt = (y % self.p as u128) as u32;
                        y /= self.p as u128;
                        Fe(dgt)
                    })
                    .collect()
            }
            _ => self.teichmuller_digits_of_unit(&x.unit, x.rel_prec()),
        }
    }

    fn teichmuller_digits_of_unit(&self, u: &Repr, rel: i64) -> Vec<Fe> {
        if self.kind == Kind::Laurent {
            let p = u.poly();
            return (0..rel.max(0) as usize).map(|k| p.coeff(k)).collect();
        }
        let mut y = u.clone();
        let mut out = Vec::with_capacity(rel.max(0) as usize);
        for k in 0..rel {
            let c = self.residue(&y);
            out.push(c);
            let left = rel - k;
            let t = self.teichmuller(c, left);
            y = self.shift_down(&self.sub(&y, &t, left), 1);
        }
        out
    }

    /// `omega_j(x)` as an element known to the precision of `x`.
    pub fn teichmuller_digit(&self, x: &LocalElem, j: i64) -> Result<LocalElem> {
        if j >= x.prec {
            return Err(Error::InsufficientPrecision { needed: j + 1, have: x.prec });
        }
        if j < x.val {
            return Ok(self.elem_zero(x.prec));
        }
        let digits = self.teichmuller_digits_of_unit(&x.unit, j - x.val + 1);
        let c = digits[(j - x.val) as usize];
        let prec = x.prec.max(1);
        Ok(self.elem(&self.teichmuller(c, prec), prec))
    }

    /// Residues of `omega_0(a), ..., omega_{count-1}(a)` for an integral representative.
    pub fn teichmuller_residues(&self, a: &Repr, count: usize) -> Vec<Fe> {
        let n = count as i64;
        self.teichmuller_digits_of_unit(&self.reduce(a, n), n)
    }

    /// All Teichmuller digits `omega_j(x)` for `val <= j < prec` as residues.
    pub fn teichmuller_digits(&self, x: &LocalElem) -> Vec<Fe> {
        self.teichmuller_digits_of_unit(&x.unit, x.rel_prec())
    }
}

/// `pi^val * unit`, known modulo `pi^prec`. Zero to the known precision is
/// stored with `val == prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalElem {
    val: i64,
    unit: Repr,
    prec: i64,
}

impl LocalElem {
    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn unit(&self) -> &Repr {
        &self.unit
    }

    pub fn rel_prec(&self) -> i64 {
        self.prec - self.val
    }

    pub fn is_zero(&self) -> bool {
        self.val >= self.prec
    }

    /// Exact valuation, or `None` when the element is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Representative modulo `pi^prec`; fails for non-integral elements.
    pub fn to_repr(&self, k: &LocalField) -> Result<Repr> {
        if self.is_zero() {
            return Ok(k.zero());
        }
        if self.val < 0 {
            return Err(Error::NotIntegral { index: 0 });
        }
        Ok(k.shift_up(&self.unit, self.val, self.prec))
    }

    /// Forgets precision beyond `prec`.
    pub fn truncate(&self, k: &LocalField, prec: i64) -> LocalElem {
        if prec >= self.prec {
            return self.clone();
        }
        if self.val >= prec {
            return k.elem_zero(prec);
        }
        LocalElem { val: self.val, unit: k.reduce(&self.unit, prec - self.val), prec }
    }

    pub fn neg(&self, k: &LocalField) -> LocalElem {
        LocalElem { val: self.val, unit: k.neg(&self.unit, self.rel_prec()), prec: self.prec }
    }

    pub fn add(&self, other: &LocalElem, k: &LocalField) -> LocalElem {
        let prec = self.prec.min(other.prec);
        if self.is_zero() || self.val >= prec {
            return other.truncate(k, prec);
        }
        if other.is_zero() || other.val >= prec {
            return self.truncate(k, prec);
        }
        let m = self.val.min(other.val);
        let rel = prec - m;
        let a = k.shift_up(&self.unit, self.val - m, rel);
        let b = k.shift_up(&other.unit, other.val - m, rel);
        k.elem_shifted(&k.add(&a, &b, rel), m, prec)
    }

    pub fn sub(&self, other: &LocalElem, k: &LocalField) -> LocalElem {
        self.add(&other.neg(k), k)
    }

    pub fn mul(&self, other: &LocalElem, k: &LocalField) -> LocalElem {
        let prec = (self.prec + other.val).min(other.prec + self.val);
        let val = self.val + other.val;
        if self.is_zero() || other.is_zero() || val >= prec {
            return k.elem_zero(prec);
        }
        LocalElem { val, unit: k.mul(&self.unit, &other.unit, prec - val), prec }
    }

    pub fn div(&self, other: &LocalElem, k: &LocalField) -> Result<LocalElem> {
        if other.is_zero() {
            return Err(Error::PrecisionExhausted("division by an element indistinguishable from zero".into()));
        }
        if self.is_zero() {
            return Ok(k.elem_zero(self.prec - other.val));
        }
        let rel = self.rel_prec().min(other.rel_prec());
        let inv = k.unit_inverse(&other.unit, rel)?;
        Ok(LocalElem {
            val: self.val - other.val,
            unit: k.mul(&self.unit, &inv, rel),
            prec: self.val - other.val + rel,
        })
    }

    /// `pi^s * self`.
    pub fn shift(&self, s: i64) -> LocalElem {
        LocalElem { val: self.val + s, unit: self.unit.clone(), prec: self.prec + s }
    }

    /// `self^e` for `e >= 1`; `e = 0` gives 1 at the relative precision of `self`.
    pub fn pow(&self, e: u64, k: &LocalField) -> LocalElem {
        if e == 0 {
            return k.elem_one(self.rel_prec().max(0));
        }
        let mut acc: Option<LocalElem> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, k),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k);
            }
        }
        acc.unwrap()
    }

    /// True when `self - other` vanishes modulo `pi^prec` (both must be known that far).
    pub fn eq_mod(&self, other: &LocalElem, k: &LocalField, prec: i64) -> bool {
        let d = self.sub(other, k);
        d.val >= prec.min(d.prec) && d.prec >= prec
    }

    /// Equality up to the smaller of the two precisions.
    pub fn agrees(&self, other: &LocalElem, k: &LocalField) -> bool {
        self.sub(other, k).is_zero()
    }
}
