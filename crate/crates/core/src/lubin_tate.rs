//! Lubin-Tate endomorphisms `[a](X) = sum_n C_n(a) X^n` for a Frobenius series
//! `f = [pi]`, over `Z_p` or `F_q[[T]]`.
//!
//! `[a]` is solved degree by degree from `[a](X) = aX + ...` and
//! `f([a](X)) = [a](f(X))`: the new coefficient `c_m` enters both sides
//! linearly, as `pi c_m` and `pi^m c_m`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::digit::{BasisFamily, Mode, SeedFunctions};
use crate::error::{Error, Result};
use crate::local::{Kind, LocalElem, LocalField, Repr};

/// Truncated power series with `LocalElem` coefficients, index = degree.
pub type Series = Vec<LocalElem>;

pub fn series_mul(k: &LocalField, a: &[LocalElem], b: &[LocalElem], deg: usize, prec: i64) -> Series {
    let mut out = vec![k.elem_zero(prec); deg + 1];
    for (i, x) in a.iter().enumerate().take(deg + 1) {
        if x.is_zero() && x.prec() >= prec {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] = out[i + j].add(&x.mul(y, k), k);
        }
    }
    out
}

/// `g(h(X))` modulo `X^(deg+1)`; `h` must have no constant term.
pub fn series_compose(k: &LocalField, g: &[LocalElem], h: &[LocalElem], deg: usize, prec: i64) -> Series {
    let mut acc = vec![k.elem_zero(prec); deg + 1];
    for c in g.iter().take(deg + 1).rev() {
        acc = series_mul(k, &acc, h, deg, prec);
        acc[0] = acc[0].add(c, k);
    }
    acc
}

fn series_min_prec(s: &[LocalElem]) -> i64 {
    s.iter().map(|c| c.prec()).min().unwrap_or(i64::MAX)
}

/// A Lubin-Tate formal group given by its Frobenius series, truncated at degree `M`.
pub struct LubinTateGroup {
    field: Arc<LocalField>,
    frobenius: Vec<Repr>,
    degree: usize,
    cache: RwLock<HashMap<Repr, (i64, Series)>>,
}

impl std::fmt::Debug for LubinTateGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LubinTateGroup").field("field", self.field.spec()).field("degree", &self.degree).finish()
    }
}

impl LubinTateGroup {
    /// `X^q + pi X`.
    pub fn standard(field: Arc<LocalField>, degree: usize) -> Result<LubinTateGroup> {
        let q = field.q() as usize;
        let mut f = vec![field.zero(); q + 1];
        f[1] = field.pi_pow(1);
        f[q] = field.add(&f[q], &field.one(), field.max_prec());
        LubinTateGroup::new(field, f, degree)
    }

    /// Validates `f = pi X mod X^2` and `f = X^q mod pi`.
    pub fn new(field: Arc<LocalField>, frobenius: Vec<Repr>, degree: usize) -> Result<LubinTateGroup> {
        if field.kind() == Kind::AtPi {
            return Err(Error::invalid("Lubin-Tate groups are supported over Z_p and F_q[[T]]"));
        }
        if degree == 0 {
            return Err(Error::invalid("truncation degree must be positive"));
        }
        let q = field.q() as usize;
        let top = field.max_prec();
        let coeff = |i: usize| frobenius.get(i).cloned().unwrap_or_else(|| field.zero());
        if !field.is_zero_mod(&coeff(0), top) {
            return Err(Error::invalid("Frobenius series must have no constant term"));
        }
        if field.reduce(&coeff(1), top) != field.reduce(&field.pi_pow(1), top) {
            return Err(Error::invalid("Frobenius series must be pi X modulo X^2"));
        }
        for i in 2..frobenius.len().max(q + 1) {
            let want = if i == q { 1 } else { 0 };
            if field.residue(&coeff(i)).0 != want {
                return Err(Error::invalid("Frobenius series must be X^q modulo pi"));
            }
        }
        Ok(LubinTateGroup { field, frobenius, degree, cache: RwLock::new(HashMap::new()) })
    }

    pub fn field(&self) -> &Arc<LocalField> {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn frobenius(&self) -> &[Repr] {
        &self.frobenius
    }

    fn frobenius_series(&self, prec: i64) -> Series {
        (0..=self.degree)
            .map(|i| match self.frobenius.get(i) {
                Some(c) => self.field.elem(c, prec),
                None => self.field.elem_zero(prec),
            })
            .collect()
    }

    /// Coefficients `C_0(a), ..., C_M(a)` of `[a](X)`, each known modulo `pi^prec`.
    pub fn endomorphism(&self, a: &Repr, prec: i64) -> Result<Series> {
        let k = &self.field;
        // C_n(a) modulo pi^prec can depend on more digits of a than prec
        let key = a.clone();
        if let Some((have, s)) = self.cache.read().unwrap().get(&key) {
            if *have >= prec {
                return Ok(s.iter().map(|c| c.truncate(k, prec)).collect());
            }
        }
        let mut work = prec + 2;
        loop {
            let work_eff = work.min(k.max_prec());
            let s = self.solve(a, work_eff)?;
            if series_min_prec(&s) >= prec {
                let out: Series = s.iter().map(|c| c.truncate(k, prec)).collect();
                self.cache.write().unwrap().insert(key, (prec, out.clone()));
                return Ok(out);
            }
            if work_eff == k.max_prec() {
                return Err(Error::PrecisionExhausted(format!(
                    "[a](X) to degree {} needs more than {} digits",
                    self.degree,
                    k.max_prec()
                )));
            }
            work += (prec - series_min_prec(&s)).max(1) + 2;
        }
    }

    fn solve(&self, a: &Repr, work: i64) -> Result<Series> {
        let k = &self.field;
        let m_max = self.degree;
        let f = self.frobenius_series(work);
        let pi = k.elem(&k.pi_pow(1), work);
        let mut c = vec![k.elem_zero(work); m_max + 1];
        if m_max >= 1 {
            c[1] = k.elem(a, work);
        }
        for m in 2..=m_max {
            // with c_m = 0: f(phi) - phi(f) has degree-m coefficient -(pi - pi^m) c_m
            let lhs = series_compose(k, &f, &c, m, work);
            let rhs = series_compose(k, &c, &f, m, work);
            let defect = lhs[m].sub(&rhs[m], k);
            let denom = pi.sub(&pi.pow(m as u64, k), k);
            c[m] = defect.neg(k).div(&denom, k)?;
        }
        Ok(c)
    }

    /// `C_n(a)` for `n <= M`.
    pub fn coefficient(&self, n: usize, a: &Repr, prec: i64) -> Result<LocalElem> {
        if n > self.degree {
            return Err(Error::invalid(format!("index {n} exceeds truncation degree {}", self.degree)));
        }
        Ok(self.endomorphism(a, prec)?[n].clone())
    }

    /// The formal group law `F(X, Y)`, as coefficients `law[i][j]` of `X^i Y^j`, `i + j <= M`.
    pub fn law(&self, prec: i64) -> Result<Vec<Vec<LocalElem>>> {
        let k = &self.field;
        let m_max = self.degree;
        let work = (prec + m_max as i64 + 2).min(k.max_prec());
        let f = self.frobenius_series(work);
        let zero = k.elem_zero(work);
        let mut law = vec![vec![zero.clone(); m_max + 1]; m_max + 1];
        if m_max >= 1 {
            law[1][0] = k.elem_one(work);
            law[0][1] = k.elem_one(work);
        }
        let pi = k.elem(&k.pi_pow(1), work);
        // powers of f(X), reused for F(f(X), f(Y))
        let mut fpow = vec![vec![zero.clone(); m_max + 1]];
        fpow[0][0] = k.elem_one(work);
        for i in 1..=m_max {
            let next = series_mul(k, &fpow[i - 1], &f, m_max, work);
            fpow.push(next);
        }
        for m in 2..=m_max {
            // f(F) - F(f(X), f(Y)) in degree m, with the degree-m part of F still zero
            let mut lhs = bivariate_one(k, m, work);
            let mut pw = lhs.clone();
            lhs[0][0] = zero.clone();
            for fk in f.iter().take(m + 1).skip(1) {
                pw = bivariate_mul(k, &pw, &law, m, work);
                for i in 0..=m {
                    lhs[i][m - i] = lhs[i][m - i].add(&fk.mul(&pw[i][m - i], k), k);
                }
            }
            let denom = pi.sub(&pi.pow(m as u64, k), k);
            let mut next = Vec::with_capacity(m + 1);
            for i in 0..=m {
                let j = m - i;
                let mut rhs = zero.clone();
                for (a, row) in law.iter().enumerate().take(m + 1) {
                    for (b, c) in row.iter().enumerate().take(m + 1 - a) {
                        if c.is_zero() {
                            continue;
                        }
                        rhs = rhs.add(&c.mul(&fpow[a][i].mul(&fpow[b][j], k), k), k);
                    }
                }
                next.push(lhs[i][j].sub(&rhs, k).neg(k).div(&denom, k)?);
            }
            for (i, c) in next.into_iter().enumerate() {
                law[i][m - i] = c;
            }
        }
        Ok(law)
    }

    /// `F(g(X), h(X))` for series without constant term.
    pub fn apply_law(&self, law: &[Vec<LocalElem>], g: &[LocalElem], h: &[LocalElem], prec: i64) -> Series {
        let k = &self.field;
        let m = self.degree;
        let mut gp = vec![k.elem_one(prec)];
        gp.resize(m + 1, k.elem_zero(prec));
        let mut g_pows = vec![gp];
        let mut h_pows = vec![g_pows[0].clone()];
        for i in 1..=m {
            g_pows.push(series_mul(k, &g_pows[i - 1], g, m, prec));
            h_pows.push(series_mul(k, &h_pows[i - 1], h, m, prec));
        }
        let mut out = vec![k.elem_zero(prec); m + 1];
        for (a, row) in law.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if a + b > m || c.is_zero() {
                    continue;
                }
                let t = series_mul(k, &g_pows[a], &h_pows[b], m, prec);
                for d in 0..=m {
                    out[d] = out[d].add(&c.mul(&t[d], k), k);
                }
            }
        }
        out
    }

    /// `[pi^s](X) / pi^s`, the finite-stage approximation of the logarithm.
    pub fn log_stage(&self, s: u32, prec: i64) -> Result<Series> {
        let k = &self.field;
        let f = self.frobenius_series(prec);
        let mut g: Series = vec![k.elem_zero(prec); self.degree + 1];
        g[1] = k.elem_one(prec);
        for _ in 0..s {
            g = series_compose(k, &f, &g, self.degree, prec);
        }
        let pis = k.elem(&k.pi_pow(s as i64), prec);
        g.iter().map(|c| c.div(&pis, k)).collect()
    }

    /// Compares `lambda_s([a](X))` with `a lambda_s(X)`. Their difference is
    /// `([a]([pi^s]) - a [pi^s]) / pi^s`, whose coefficients up to degree `M < q^(J+1)`
    /// vanish modulo `pi^(s - 2J)`.
    pub fn check_log_equivariance(&self, a: &Repr, s: u32, prec: i64) -> Result<LogCheck> {
        let k = &self.field;
        let lam = self.log_stage(s, prec)?;
        let end = self.endomorphism(a, prec)?;
        let lhs = series_compose(k, &lam, &end, self.degree, prec);
        let ae = k.elem(a, prec);
        let mut j = 0i64;
        while (k.q() as u128).pow(j as u32 + 1) <= self.degree as u128 {
            j += 1;
        }
        let tracked = lhs.iter().chain(lam.iter()).map(|c| c.prec()).min().unwrap_or(prec);
        let checked_to = tracked.min(s as i64 - 2 * j);
        let holds = lhs.iter().zip(&lam).all(|(l, r)| l.sub(&ae.mul(r, k), k).val() >= checked_to);
        Ok(LogCheck { checked_to, holds })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCheck {
    /// Valuation up to which the identity was compared.
    pub checked_to: i64,
    pub holds: bool,
}

fn bivariate_one(k: &LocalField, m: usize, prec: i64) -> Vec<Vec<LocalElem>> {
    let mut out = vec![vec![k.elem_zero(prec); m + 1]; m + 1];
    out[0][0] = k.elem_one(prec);
    out
}

fn bivariate_mul(
    k: &LocalField,
    a: &[Vec<LocalElem>],
    b: &[Vec<LocalElem>],
    m: usize,
    prec: i64,
) -> Vec<Vec<LocalElem>> {
    let mut out = vec![vec![k.elem_zero(prec); m + 1]; m + 1];
    for i1 in 0..=m {
        for j1 in 0..=m - i1 {
            let x = &a[i1][j1];
            if x.is_zero() {
                continue;
            }
            for i2 in 0..=m - i1 - j1 {
                for j2 in 0..=m - i1 - j1 - i2 {
                    let y = &b[i2][j2];
                    if y.is_zero() {
                        continue;
                    }
                    out[i1 + i2][j1 + j2] = out[i1 + i2][j1 + j2].add(&x.mul(y, k), k);
                }
            }
        }
    }
    out
}

/// Seeds `C_{q^j}`.
pub struct LubinTateSeeds {
    group: Arc<LubinTateGroup>,
}

impl SeedFunctions for LubinTateSeeds {
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        let q = k.q() as usize;
        if count == 0 {
            return Ok(Vec::new());
        }
        let need = q.pow(count as u32 - 1);
        if need > self.group.degree {
            return Err(Error::invalid(format!(
                "truncation degree {} is below q^{} = {need}",
                self.group.degree,
                count - 1
            )));
        }
        let s = self.group.endomorphism(x, prec)?;
        (0..count as u32).map(|j| s[q.pow(j)].to_repr(k)).collect()
    }

    fn loss(&self, j: usize) -> i64 {
        j as i64
    }
}

/// Seeds `C_{q^j}` for the group, digit base `q`, general mode.
pub fn lubin_tate_family(group: Arc<LubinTateGroup>) -> BasisFamily {
    let k = group.field().clone();
    BasisFamily::new(k.clone(), k.q(), 1, Mode::General, "lubin-tate", Arc::new(LubinTateSeeds { group }))
}
