//! Digit extension of seed families, finite-level certification, and
//! expansion of tabulated functions in a certified basis.
//!
//! For digit base `b` and `i = sum c_j b^j`, the extended function is
//! `f_i = prod e_j^(c_j)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::local::{Kind, LocalElem, LocalField, Repr};
use crate::par::Exec;
use crate::quotient::{FunctionTable, ResidueMatrix};

/// Which hypotheses a certificate checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reductions are residue-field linear and form a basis of the dual of `O / m^n`.
    Linear,
    /// Reductions are linear over the coefficient field `F_r` and separate points.
    Sublinear,
    /// Reductions are constant on cosets and give a bijection `O / m^n -> F^n`.
    General,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Linear => "linear",
            Mode::Sublinear => "sublinear",
            Mode::General => "general",
        };
        f.write_str(s)
    }
}

/// A sequence of integer-valued functions `e_0, e_1, ...` on `O`.
pub trait SeedFunctions: Send + Sync {
    /// `e_0(x), ..., e_{count-1}(x)` modulo `pi^prec` for a representative `x`.
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>>;

    /// If `x` is only known modulo `pi^n`, `e_j(x)` is known modulo `pi^(n - loss(j))`.
    fn loss(&self, j: usize) -> i64;
}

/// Seeds together with their digit base and certification mode.
#[derive(Clone)]
pub struct BasisFamily {
    field: Arc<LocalField>,
    base: u64,
    seeds_per_level: usize,
    mode: Mode,
    label: String,
    seeds: Arc<dyn SeedFunctions>,
    exec: Exec,
}

impl fmt::Debug for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisFamily")
            .field("label", &self.label)
            .field("field", self.field.spec())
            .field("base", &self.base)
            .field("mode", &self.mode)
            .finish()
    }
}

impl BasisFamily {
    pub fn new(
        field: Arc<LocalField>,
        base: u64,
        seeds_per_level: usize,
        mode: Mode,
        label: &str,
        seeds: Arc<dyn SeedFunctions>,
    ) -> BasisFamily {
        BasisFamily { field, base, seeds_per_level, mode, label: label.to_string(), seeds, exec: Exec::default() }
    }

    pub fn with_exec(mut self, exec: Exec) -> BasisFamily {
        self.exec = exec;
        self
    }

    pub fn field(&self) -> &Arc<LocalField> {
        &self.field
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// Number of seeds governing level `n`.
    pub fn seed_count(&self, n: u32) -> usize {
        self.seeds_per_level * n as usize
    }

    pub fn loss(&self, j: usize) -> i64 {
        self.seeds.loss(j)
    }

    pub fn seeds(&self, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        self.seeds.eval(&self.field, x, count, prec)
    }

    fn digits_needed(&self, count: usize) -> usize {
        let mut needed = 0;
        let mut m = count.saturating_sub(1) as u64;
        while m > 0 {
            needed += 1;
            m /= self.base;
        }
        needed
    }

    /// `f_0, ..., f_{count-1}` from seed values, each modulo `pi^prec`.
    pub fn extend(&self, seeds: &[Repr], count: usize, prec: i64) -> Vec<Repr> {
        let k = &self.field;
        let b = self.base as usize;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i == 0 {
                out.push(k.reduce(&k.one(), prec));
                continue;
            }
            // strip one unit from the lowest nonzero digit
            let mut j = 0;
            let mut pw = 1;
            while (i / pw) % b == 0 {
                pw *= b;
                j += 1;
            }
            out.push(k.mul(&out[i - pw], &seeds[j], prec));
        }
        out
    }

    /// `f_0(x), ..., f_{count-1}(x)` modulo `pi^prec`.
    pub fn basis_values(&self, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        let seeds = self.seeds(x, self.digits_needed(count), prec)?;
        Ok(self.extend(&seeds, count, prec))
    }

    /// `f_i` tabulated at level `n`.
    pub fn digit_extend(&self, i: usize, n: u32, prec: i64) -> Result<FunctionTable> {
        let k = self.field.clone();
        k.check_prec(prec)?;
        let points = k.num_points(n)?;
        let values = self.exec.try_map_range(points, |v| {
            let x = k.canonical_rep(v, n);
            let f = self.basis_values(&x, i + 1, prec)?;
            Ok::<_, Error>(k.elem(&f[i], prec))
        })?;
        FunctionTable::new(k.clone(), n, prec, values)
    }

    /// Residues `e_j(x) mod pi` for every point of level `n`, indexed `[point][seed]`.
    pub fn seed_residues(&self, n: u32) -> Result<Vec<Vec<Fe>>> {
        let k = &self.field;
        let count = self.seed_count(n);
        self.exec.try_map_range(k.num_points(n)?, |v| {
            let vals = self.seeds(&k.canonical_rep(v, n), count, 1)?;
            Ok(vals.iter().map(|r| k.residue(r)).collect())
        })
    }
}

/// Why a certificate failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `seed` takes different residues at `point` and `point + pi^n * offset`.
    CosetConstancy { point: usize, offset: usize, seed: usize },
    /// Two points with the same seed residues.
    Collision { v: usize, w: usize },
    /// `seed(x + y) != seed(x) + seed(y)` modulo `pi`.
    Additivity { x: usize, y: usize, seed: usize },
    /// `seed(c x) != c seed(x)` modulo `pi`.
    Scalar { x: usize, scalar: u32, seed: usize },
    /// The residue matrix on the standard basis is singular.
    SingularEvidence { rank: usize },
    /// Linear checks are not defined in this setting.
    Unsupported { reason: String },
}

/// Outcome of [`certify`], with enough data to recheck it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub family: String,
    pub mode: Mode,
    pub level: u32,
    pub pass: bool,
    pub coset_constant: bool,
    pub separating: bool,
    pub linear: Option<bool>,
    /// `e_j(b_k) mod pi` for seeds `j` and standard elements `b_k`.
    pub evidence_matrix: Vec<Vec<u32>>,
    /// The evidence matrix is triangular with nonzero diagonal.
    pub unit_pivots: bool,
    /// Seed residues at each point, in canonical point order.
    pub bijection: Vec<Vec<u32>>,
    pub witness: Option<Witness>,
}

impl Certificate {
    /// Rechecks separation and evidence rank from the stored tables alone.
    pub fn recheck(&self, k: &LocalField) -> bool {
        let mut seen = HashMap::new();
        for (i, row) in self.bijection.iter().enumerate() {
            if seen.insert(row.clone(), i).is_some() {
                return false;
            }
        }
        if self.mode != Mode::Sublinear {
            let n = self.bijection.first().map_or(0, |r| r.len()) as u32;
            if self.bijection.len() as u64 != k.q().pow(n) {
                return false;
            }
        }
        let rows: Vec<Vec<Fe>> = self.evidence_matrix.iter().map(|r| r.iter().map(|&c| Fe(c)).collect()).collect();
        let m = ResidueMatrix::from_rows(k.residue_field().clone(), &rows);
        self.mode == Mode::General || m.rank().invertible == Some(true)
    }
}

/// Standard elements for the evidence matrix: `pi^k` for `k < n`, or `T^k`
/// for `k < dn` in sublinear mode.
fn evidence_points(k: &LocalField, n: u32, mode: Mode) -> Vec<Repr> {
    match mode {
        Mode::Sublinear => {
            (0..(k.d() * n) as usize).map(|e| Repr::Poly(crate::poly::Poly::monomial(Fe::ONE, e))).collect()
        }
        _ => (0..n as i64).map(|e| k.pi_pow(e)).collect(),
    }
}

/// Checks the digit-principle hypotheses for `family` at level `n`.
pub fn certify(family: &BasisFamily, n: u32, mode: Mode) -> Result<Certificate> {
    let k = family.field().clone();
    let count = family.seed_count(n);
    let points = k.num_points(n)?;
    let residues = family.seed_residues(n)?;
    let rf = k.residue_field().clone();
    let mut witness = None;

    // constancy on cosets of m^n, probing offsets up to level 2
    let offsets = k.canonical_reps(2)?;
    let coset_fail = family.exec().map_range(points, |v| -> Result<Option<Witness>> {
        let x = k.canonical_rep(v, n);
        for (o, y) in offsets.iter().enumerate().skip(1) {
            let z = k.add(&x, &k.shift_up(y, n as i64, n as i64 + 2), n as i64 + 2);
            let vals = family.seeds(&z, count, 1)?;
            for (j, r) in vals.iter().enumerate() {
                if k.residue(r) != residues[v][j] {
                    return Ok(Some(Witness::CosetConstancy { point: v, offset: o, seed: j }));
                }
            }
        }
        Ok(None)
    });
    let mut coset_constant = true;
    for r in coset_fail {
        if let Some(w) = r? {
            coset_constant = false;
            witness.get_or_insert(w);
            break;
        }
    }

    // separation: scan pi^j * u for j = n-1 down to 0 against the origin, then everything
    let mut separating = true;
    'deep: for j in (0..n).rev() {
        let units = k.num_points(n - j)?;
        for u in 1..units {
            let ur = k.canonical_rep(u, n - j);
            if k.valuation(&ur, 1) != 0 {
                continue;
            }
            let w = k.index_of(&k.shift_up(&ur, j as i64, n as i64), n);
            if residues[w] == residues[0] {
                separating = false;
                witness.get_or_insert(Witness::Collision { v: 0, w });
                break 'deep;
            }
        }
    }
    if separating {
        let mut seen: HashMap<&[Fe], usize> = HashMap::with_capacity(points);
        for (w, row) in residues.iter().enumerate() {
            if let Some(&v) = seen.get(row.as_slice()) {
                separating = false;
                witness.get_or_insert(Witness::Collision { v, w });
                break;
            }
            seen.insert(row, w);
        }
    }
    if separating && mode != Mode::Sublinear && (rf.size() as u64).pow(count as u32) != points as u64 {
        separating = false;
        witness.get_or_insert(Witness::Unsupported { reason: "seed count does not match the level".into() });
    }

    // linearity over the residue field (linear) or the coefficient field (sublinear)
    let linear = if mode == Mode::General {
        None
    } else if k.kind() == Kind::Padic {
        witness.get_or_insert(Witness::Unsupported { reason: "Z_p has no linear structure over F_p".into() });
        Some(false)
    } else {
        let ok = check_linearity(family, n, mode, &residues, &mut witness)?;
        Some(ok)
    };

    let basis = evidence_points(&k, n, mode);
    let mut matrix = vec![vec![Fe::ZERO; basis.len()]; count];
    for (c, b) in basis.iter().enumerate() {
        let vals = family.seeds(b, count, 1)?;
        for (j, r) in vals.iter().enumerate() {
            matrix[j][c] = k.residue(r);
        }
    }
    let evidence = ResidueMatrix::from_rows(rf.clone(), &matrix);
    let unit_pivots = evidence.is_unit_triangular_shape();
    let rank = evidence.rank();
    let evidence_ok = mode == Mode::General || rank.invertible == Some(true);
    if !evidence_ok {
        witness.get_or_insert(Witness::SingularEvidence { rank: rank.rank });
    }
    let pass = coset_constant && separating && linear != Some(false) && evidence_ok;
    Ok(Certificate {
        family: family.label().to_string(),
        mode,
        level: n,
        pass,
        coset_constant,
        separating,
        linear,
        evidence_matrix: evidence.to_rows(),
        unit_pivots,
        bijection: residues.iter().map(|r| r.iter().map(|c| c.0).collect()).collect(),
        witness: if pass { None } else { witness },
    })
}

fn check_linearity(
    family: &BasisFamily,
    n: u32,
    mode: Mode,
    residues: &[Vec<Fe>],
    witness: &mut Option<Witness>,
) -> Result<bool> {
    let k = family.field();
    let rf = k.residue_field();
    let points = residues.len();
    let reps = k.canonical_reps(n)?;
    let nn = n as i64;
    let add_fail = family.exec().map_range(points, |x| {
        for y in x..points {
            let s = k.index_of(&k.add(&reps[x], &reps[y], nn), n);
            for j in 0..residues[x].len() {
                if residues[s][j] != rf.add(residues[x][j], residues[y][j]) {
                    return Some(Witness::Additivity { x, y, seed: j });
                }
            }
        }
        None
    });
    if let Some(w) = add_fail.into_iter().flatten().next() {
        witness.get_or_insert(w);
        return Ok(false);
    }
    let scalars: Vec<(Fe, Repr)> = match mode {
        Mode::Sublinear => {
            k.coeff_field().elements().map(|c| (c, Repr::Poly(crate::poly::Poly::constant(c)))).collect()
        }
        _ => rf.elements().map(|c| (c, k.teichmuller(c, nn))).collect(),
    };
    for x in 0..points {
        for (c, lift) in &scalars {
            let s = k.index_of(&k.mul(lift, &reps[x], nn), n);
            for j in 0..residues[x].len() {
                if residues[s][j] != rf.mul(*c, residues[x][j]) {
                    witness.get_or_insert(Witness::Scalar { x, scalar: c.0, seed: j });
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Result of the span check over the residue field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    pub size: usize,
    pub rank: usize,
    pub spans: bool,
    /// Coefficients of a vanishing combination of the reduced `f_i`, if any.
    pub dependency: Option<Vec<u32>>,
}

/// Rank of the reduced `f_i`, `i < q^n`, as functions on `O / m^n`.
pub fn span_check(family: &BasisFamily, n: u32) -> Result<SpanReport> {
    let k = family.field();
    let rf = k.residue_field();
    let points = k.num_points(n)?;
    let residues = family.seed_residues(n)?;
    let b = family.base() as usize;
    // reduced digit products, rows indexed by i
    let mut rows = vec![vec![Fe::ZERO; points]; points];
    for v in 0..points {
        rows[0][v] = Fe::ONE;
        for i in 1..points {
            let mut j = 0;
            let mut pw = 1;
            while (i / pw) % b == 0 {
                pw *= b;
                j += 1;
            }
            rows[i][v] = rf.mul(rows[i - pw][v], residues[v][j]);
        }
    }
    // columns of the transpose are the functions f_i
    let mut t = vec![vec![Fe::ZERO; points]; points];
    for (i, row) in rows.iter().enumerate() {
        for (v, &c) in row.iter().enumerate() {
            t[v][i] = c;
        }
    }
    let rep = ResidueMatrix::from_rows(rf.clone(), &t).rank();
    Ok(SpanReport {
        size: points,
        rank: rep.rank,
        spans: rep.rank == points,
        dependency: rep.column_dependency.map(|d| d.iter().map(|c| c.0).collect()),
    })
}

/// Coefficients `a_i` of a table in a basis, with the basis label.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub basis_label: String,
    pub level: u32,
    pub prec: i64,
    pub coeffs: Vec<LocalElem>,
}

impl Expansion {
    /// Smallest coefficient valuation, `None` when all vanish.
    pub fn coeff_norm(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.valuation()).min()
    }
}

/// Solves `sum_i a_i f_i(x_v) = f(x_v)` over the canonical points of one level,
/// with the inverse basis matrix computed once.
pub struct Expander {
    family: BasisFamily,
    level: u32,
    prec: i64,
    size: usize,
    matrix: Vec<Repr>,
    inverse: Vec<Repr>,
    certificate: Certificate,
}

impl Expander {
    /// Certifies `family` at `level` and inverts the basis matrix modulo `pi^prec`.
    pub fn new(family: &BasisFamily, level: u32, prec: i64) -> Result<Expander> {
        let k = family.field().clone();
        k.check_prec(prec)?;
        let certificate = certify(family, level, family.mode())?;
        if !certificate.pass {
            return Err(Error::NotCertified { level, reason: format!("{:?}", certificate.witness) });
        }
        let size = k.num_points(level)?;
        let rows =
            family.exec().try_map_range(size, |v| family.basis_values(&k.canonical_rep(v, level), size, prec))?;
        let matrix: Vec<Repr> = rows.into_iter().flatten().collect();
        let inverse = invert(&k, &matrix, size, prec)
            .ok_or_else(|| Error::NotCertified { level, reason: "basis matrix has no unit pivot".into() })?;
        Ok(Expander { family: family.clone(), level, prec, size, matrix, inverse, certificate })
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `f_i(x_v)` modulo `pi^prec`.
    pub fn basis_value(&self, v: usize, i: usize) -> &Repr {
        &self.matrix[v * self.size + i]
    }

    pub fn expand(&self, table: &FunctionTable) -> Result<Expansion> {
        let k = self.family.field();
        if table.level() != self.level {
            return Err(Error::LevelMismatch(table.level(), self.level));
        }
        if table.field().spec() != k.spec() {
            return Err(Error::invalid("table and basis live over different fields"));
        }
        let (scaled, shift, work) = scale_integral(k, table.values(), table.prec(), self.prec)?;
        let coeffs = self.family.exec().map_range(self.size, |i| {
            let mut acc = k.zero();
            for (v, w) in scaled.iter().enumerate() {
                acc = k.add(&acc, &k.mul(&self.inverse[i * self.size + v], w, work), work);
            }
            k.elem_shifted(&acc, shift, work + shift)
        });
        Ok(Expansion { basis_label: self.family.label().to_string(), level: self.level, prec: work + shift, coeffs })
    }

    /// `sum_i a_i f_i` tabulated on the canonical points.
    pub fn evaluate(&self, coeffs: &[LocalElem]) -> Result<FunctionTable> {
        let k = self.family.field();
        if coeffs.len() != self.size {
            return Err(Error::invalid(format!("expected {} coefficients, got {}", self.size, coeffs.len())));
        }
        let in_prec = coeffs.iter().map(|c| c.prec()).min().unwrap_or(self.prec);
        let (scaled, shift, work) = scale_integral(k, coeffs, in_prec, self.prec)?;
        let values = self.family.exec().map_range(self.size, |v| {
            let mut acc = k.zero();
            for (i, a) in scaled.iter().enumerate() {
                acc = k.add(&acc, &k.mul(self.basis_value(v, i), a, work), work);
            }
            k.elem_shifted(&acc, shift, work + shift)
        });
        FunctionTable::new(k.clone(), self.level, work + shift, values)
    }
}

/// Multiplies by `pi^(-s)` with `s` the smallest valuation (when negative) and returns
/// representatives, `s`, and the working precision after the shift.
fn scale_integral(k: &LocalField, values: &[LocalElem], prec: i64, cap: i64) -> Result<(Vec<Repr>, i64, i64)> {
    let shift = values.iter().filter_map(|v| v.valuation()).min().unwrap_or(0).min(0);
    let work = (prec - shift).min(cap);
    if work <= 0 {
        return Err(Error::PrecisionExhausted("no significant digits after scaling".into()));
    }
    let reps = values.iter().map(|v| v.shift(-shift).truncate(k, work).to_repr(k)).collect::<Result<Vec<_>>>()?;
    Ok((reps, shift, work))
}

/// Gauss-Jordan inverse over `O / pi^prec`, choosing the first unit in each column.
fn invert(k: &LocalField, a: &[Repr], n: usize, prec: i64) -> Option<Vec<Repr>> {
    let mut m: Vec<Repr> = a.to_vec();
    let mut inv: Vec<Repr> =
        (0..n * n).map(|idx| if idx / n == idx % n { k.reduce(&k.one(), prec) } else { k.zero() }).collect();
    let unit = |r: &Repr| !k.residue(r).is_zero();
    for c in 0..n {
        let p = (c..n).find(|&r| unit(&m[r * n + c]))?;
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
                inv.swap(p * n + j, c * n + j);
            }
        }
        let s = k.unit_inverse(&m[c * n + c], prec).ok()?;
        for j in 0..n {
            m[c * n + j] = k.mul(&m[c * n + j], &s, prec);
            inv[c * n + j] = k.mul(&inv[c * n + j], &s, prec);
        }
        for r in 0..n {
            if r == c || k.is_zero_mod(&m[r * n + c], prec) {
                continue;
            }
            let t = m[r * n + c].clone();
            for j in 0..n {
                let a = k.mul(&t, &m[c * n + j], prec);
                m[r * n + j] = k.sub(&m[r * n + j], &a, prec);
                let b = k.mul(&t, &inv[c * n + j], prec);
                inv[r * n + j] = k.sub(&inv[r * n + j], &b, prec);
            }
        }
    }
    Some(inv)
}
