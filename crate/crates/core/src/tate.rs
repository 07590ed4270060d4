//! The Baker basis `B_m = prod_j omega_j^(c_j)` and q-simplified series in
//! variables `X_j`, which model continuous functions through `X_j -> omega_j(x)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::digit::{BasisFamily, Expander, Mode, SeedFunctions};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::local::{LocalElem, LocalField, Repr};
use crate::quotient::FunctionTable;

/// Seeds `omega_j`, the Teichmuller digits.
#[derive(Clone, Debug, Default)]
pub struct BakerSeeds;

impl SeedFunctions for BakerSeeds {
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        Ok(k.teichmuller_residues(x, count).into_iter().map(|c| k.teichmuller(c, prec)).collect())
    }

    // omega_j(x) depends on x modulo pi^(j+1) only and is exact on representatives
    fn loss(&self, _j: usize) -> i64 {
        0
    }
}

/// Seeds `omega_j`, digit base `q`, general mode; any of the three settings.
pub fn baker_family(field: Arc<LocalField>) -> BasisFamily {
    let q = field.q();
    BasisFamily::new(field, q, 1, Mode::General, "baker", Arc::new(BakerSeeds))
}

/// Sparse exponent vector: `(variable, exponent)` pairs sorted by variable, exponents positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(j: u32) -> Monomial {
        Monomial(vec![(j, 1)])
    }

    pub fn new(mut pairs: Vec<(u32, u32)>) -> Result<Monomial> {
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("repeated variable in exponent vector"));
        }
        pairs.retain(|&(_, e)| e > 0);
        Ok(Monomial(pairs))
    }

    /// The monomial whose exponents are the base-`q` digits of `m`.
    pub fn from_index(m: u64, q: u64) -> Monomial {
        let mut out = Vec::new();
        let mut m = m;
        let mut j = 0;
        while m > 0 {
            if !m.is_multiple_of(q) {
                out.push((j, (m % q) as u32));
            }
            m /= q;
            j += 1;
        }
        Monomial(out)
    }

    /// Inverse of [`Monomial::from_index`] for simplified monomials.
    pub fn to_index(&self, q: u64) -> u64 {
        self.0.iter().map(|&(j, e)| e as u64 * q.pow(j)).sum()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn max_var(&self) -> Option<u32> {
        self.0.last().map(|&(j, _)| j)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, e)), Some(&&(j, f))) => match i.cmp(&j) {
                    Ordering::Less => {
                        out.push((i, e));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((j, f));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((i, e + f));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// Applies `X^q = X` until every exponent is at most `q - 1`.
    pub fn simplify(&self, q: u64) -> Monomial {
        let q = q as u32;
        Monomial(self.0.iter().map(|&(j, e)| (j, if e < q { e } else { (e - 1) % (q - 1) + 1 })).collect())
    }

    pub fn is_simplified(&self, q: u64) -> bool {
        self.0.iter().all(|&(_, e)| (e as u64) < q)
    }

    fn exponent(&self, j: u32) -> u32 {
        self.0.iter().find(|&&(i, _)| i == j).map_or(0, |&(_, e)| e)
    }
}

/// Graded lexicographic: total degree, then exponents compared from variable 0 upward.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let top = self.max_var().max(other.max_var()).unwrap_or(0);
            (0..=top).map(|j| other.exponent(j).cmp(&self.exponent(j))).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite series `sum c_m X^m` with coefficients known modulo `pi^prec`.
#[derive(Clone, Debug)]
pub struct Series {
    field: Arc<LocalField>,
    prec: i64,
    terms: BTreeMap<Monomial, LocalElem>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.terms == other.terms
    }
}

impl Series {
    pub fn zero(field: Arc<LocalField>, prec: i64) -> Series {
        Series { field, prec, terms: BTreeMap::new() }
    }

    /// The precision is lowered to that of the least precise coefficient.
    pub fn from_terms(field: Arc<LocalField>, prec: i64, terms: Vec<(Monomial, LocalElem)>) -> Series {
        let prec = terms.iter().map(|(_, c)| c.prec()).fold(prec, i64::min);
        let mut s = Series::zero(field, prec);
        for (m, c) in terms {
            s.add_term(m, &c);
        }
        s
    }

    pub fn constant(field: Arc<LocalField>, c: &LocalElem) -> Series {
        let prec = c.prec();
        Series::from_terms(field, prec, vec![(Monomial::one(), c.clone())])
    }

    /// `X_j`.
    pub fn var(field: Arc<LocalField>, j: u32, prec: i64) -> Series {
        let one = field.elem_one(prec);
        Series::from_terms(field, prec, vec![(Monomial::var(j), one)])
    }

    pub fn field(&self) -> &Arc<LocalField> {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, LocalElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest variable index in use.
    pub fn max_var(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.max_var()).max()
    }

    /// Minimum coefficient valuation, `None` for the zero series.
    pub fn norm_valuation(&self) -> Option<i64> {
        self.terms.values().map(|c| c.val()).min()
    }

    fn add_term(&mut self, m: Monomial, c: &LocalElem) {
        let k = &self.field;
        let c = c.truncate(k, self.prec);
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c, k).truncate(k, self.prec),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    fn rebuild(&self, prec: i64) -> Series {
        let mut out = Series::zero(self.field.clone(), prec);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = self.rebuild(self.prec.min(other.prec));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Series {
        let k = &self.field;
        Series {
            field: k.clone(),
            prec: self.prec,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg(k))).collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &LocalElem) -> Series {
        let k = &self.field;
        let prec = (self.prec + c.val()).min(c.prec() + self.norm_valuation().unwrap_or(self.prec));
        let mut out = Series::zero(k.clone(), prec);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &a.mul(c, k));
        }
        out
    }

    /// Product without simplification.
    pub fn mul(&self, other: &Series) -> Series {
        let k = &self.field;
        let va = self.norm_valuation().unwrap_or(self.prec);
        let vb = other.norm_valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        let mut out = Series::zero(k.clone(), prec);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_term(m.mul(n), &a.mul(b, k));
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Series {
        let one = self.field.elem_one(self.prec);
        let mut acc = Series::constant(self.field.clone(), &one);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_q_simplified(&self) -> bool {
        let q = self.field.q();
        self.terms.keys().all(|m| m.is_simplified(q))
    }

    /// The unique representative modulo the ideal generated by `X_j^q - X_j`.
    pub fn q_simplify(&self) -> QSimplifiedSeries {
        let q = self.field.q();
        let mut out = Series::zero(self.field.clone(), self.prec);
        for (m, c) in &self.terms {
            out.add_term(m.simplify(q), c);
        }
        QSimplifiedSeries(out)
    }
}

/// A series whose exponents are all at most `q - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSimplifiedSeries(Series);

impl QSimplifiedSeries {
    pub fn series(&self) -> &Series {
        &self.0
    }

    pub fn into_series(self) -> Series {
        self.0
    }

    pub fn field(&self) -> &Arc<LocalField> {
        self.0.field()
    }

    pub fn prec(&self) -> i64 {
        self.0.prec
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &QSimplifiedSeries) -> QSimplifiedSeries {
        QSimplifiedSeries(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &QSimplifiedSeries) -> QSimplifiedSeries {
        QSimplifiedSeries(self.0.sub(&other.0))
    }

    pub fn mul(&self, other: &QSimplifiedSeries) -> QSimplifiedSeries {
        self.0.mul(&other.0).q_simplify()
    }

    /// Coefficient norm as a valuation, `None` for zero.
    pub fn norm_valuation(&self) -> Option<i64> {
        self.0.norm_valuation()
    }

    /// Substitutes the residues `omega_j` for `X_j`; `digits[j]` must exist for every variable used.
    fn eval_digits(&self, digits: &[LocalElem]) -> LocalElem {
        let k = self.field();
        let prec = self.prec();
        let mut acc = k.elem_zero(prec);
        for (m, c) in &self.0.terms {
            let mut t = c.clone();
            for &(j, e) in m.pairs() {
                t = t.mul(&digits[j as usize].pow(e as u64, k), k);
            }
            acc = acc.add(&t, k);
        }
        acc
    }

    fn digit_values(&self, x: &Repr, count: usize) -> Vec<LocalElem> {
        let k = self.field();
        let prec = self.prec().max(1);
        k.teichmuller_residues(x, count).into_iter().map(|c| k.elem(&k.teichmuller(c, prec), prec)).collect()
    }

    /// The value at `x`, substituting `omega_j(x)` for `X_j`.
    pub fn evaluate_at_point(&self, x: &LocalElem) -> Result<LocalElem> {
        let k = self.field().clone();
        let count = self.0.max_var().map_or(0, |j| j as usize + 1);
        if x.prec() < count as i64 {
            return Err(Error::InsufficientPrecision { needed: count as i64, have: x.prec() });
        }
        if x.val() < 0 {
            return Err(Error::NotIntegral { index: 0 });
        }
        let rep = x.to_repr(&k)?;
        Ok(self.eval_digits(&self.digit_values(&rep, count)))
    }

    /// Tabulates the function at level `n`; variables must be below `n`.
    pub fn to_function(&self, n: u32, prec: i64) -> Result<FunctionTable> {
        if let Some(j) = self.0.max_var() {
            if j >= n {
                return Err(Error::VariableOutOfRange { index: j as usize, level: n });
            }
        }
        let k = self.field().clone();
        let prec = prec.min(self.prec());
        let values: Vec<LocalElem> = (0..k.num_points(n)?)
            .map(|v| self.eval_digits(&self.digit_values(&k.canonical_rep(v, n), n as usize)))
            .collect();
        FunctionTable::new(k, n, prec, values)
    }

    /// Expands a table in the Baker basis and reads `B_m` as the monomial with exponents the digits of `m`.
    pub fn from_function(table: &FunctionTable) -> Result<QSimplifiedSeries> {
        let k = table.field().clone();
        let family = baker_family(k.clone());
        let expander = Expander::new(&family, table.level(), table.prec())?;
        let exp = expander.expand(table)?;
        let prec = exp.coeffs.iter().map(|c| c.prec()).min().unwrap_or(table.prec());
        let terms =
            exp.coeffs.iter().enumerate().map(|(m, c)| (Monomial::from_index(m as u64, k.q()), c.clone())).collect();
        Ok(QSimplifiedSeries(Series::from_terms(k, prec, terms)))
    }

    /// Indicator of `a + pi^n O`: the product over `j < n` of the Lagrange interpolant that is 1 at
    /// `omega_j(a)` and 0 at the other Teichmuller lifts. In characteristic `p` the lifts form `F_q`
    /// and each factor equals `1 - (X_j - omega_j(a))^(q-1)`; over `Q_p` that form is only right mod `p`.
    pub fn ball_indicator(field: Arc<LocalField>, a: &LocalElem, n: u32, prec: i64) -> Result<QSimplifiedSeries> {
        if a.prec() < n as i64 {
            return Err(Error::InsufficientPrecision { needed: n as i64, have: a.prec() });
        }
        let rep = if n == 0 { field.zero() } else { a.to_repr(&field)? };
        let one = Series::constant(field.clone(), &field.elem_one(prec));
        let lifts: Vec<(Fe, LocalElem)> =
            field.residue_field().elements().map(|c| (c, field.elem(&field.teichmuller(c, prec), prec))).collect();
        let mut acc = one.q_simplify();
        for (j, c) in field.teichmuller_residues(&rep, n as usize).into_iter().enumerate() {
            let w = &lifts.iter().find(|(d, _)| *d == c).expect("residue has a lift").1;
            let x = Series::var(field.clone(), j as u32, prec);
            let mut factor = one.clone();
            let mut denom = field.elem_one(prec);
            for (d, v) in &lifts {
                if *d == c {
                    continue;
                }
                factor = factor.mul(&x.sub(&Series::constant(field.clone(), v)));
                denom = denom.mul(&w.sub(v, &field), &field);
            }
            // distinct lifts differ by a unit
            let inv = field.elem_one(prec).div(&denom, &field)?;
            acc = acc.mul(&factor.scale(&inv).q_simplify());
        }
        Ok(acc)
    }

    /// `Y^k` with `Y = sum_{j<n} pi^j X_j`, simplified.
    pub fn y_power(field: Arc<LocalField>, k: u64, n: u32, prec: i64) -> QSimplifiedSeries {
        let mut y = Series::zero(field.clone(), prec);
        for j in 0..n {
            let c = field.elem(&field.pi_pow(j as i64), prec);
            y = y.add(&Series::var(field.clone(), j, prec).scale(&c));
        }
        let one = Series::constant(field.clone(), &field.elem_one(prec)).q_simplify();
        let y = y.q_simplify();
        (0..k).fold(one, |acc, _| acc.mul(&y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalFieldSpec;

    #[test]
    fn simplify_exponents() {
        assert_eq!(Monomial::new(vec![(1, 5)]).unwrap().simplify(3), Monomial::var(1));
        assert_eq!(Monomial::new(vec![(0, 4)]).unwrap().simplify(3), Monomial::new(vec![(0, 2)]).unwrap());
        assert_eq!(Monomial::new(vec![(0, 2)]).unwrap().simplify(2), Monomial::var(0));
    }

    #[test]
    fn generator_of_ideal_vanishes() {
        for q in [2u32, 3, 4] {
            let k = LocalFieldSpec::laurent(q).unwrap().build().unwrap();
            let x = Series::var(k.clone(), 0, 4);
            assert!(x.pow(q as u64).sub(&x).q_simplify().is_zero());
            let xq1 = x.pow(q as u64 - 1);
            let one = Series::constant(k.clone(), &k.elem_one(4));
            assert!(xq1.mul(&one.sub(&xq1)).q_simplify().is_zero());
        }
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(vec![(0, 1)]).unwrap();
        let b = Monomial::new(vec![(1, 1)]).unwrap();
        let c = Monomial::new(vec![(0, 1), (1, 1)]).unwrap();
        assert!(Monomial::one() < a);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn unit_indicator_is_x0_power() {
        let k = LocalFieldSpec::laurent(3).unwrap().build().unwrap();
        let s = Series::var(k.clone(), 0, 3).pow(2).q_simplify();
        let t = s.to_function(2, 3).unwrap();
        for (v, val) in t.values().iter().enumerate() {
            let expect = if v % 3 == 0 { 0 } else { 1 };
            assert_eq!(*val, k.elem_int(expect, 3));
        }
    }
}
