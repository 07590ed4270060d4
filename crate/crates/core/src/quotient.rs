//! Function tables on `O / m^n`, residue-field linear algebra and point indicators.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, Gf};
use crate::local::{LocalElem, LocalField, Repr};
use crate::par::Exec;

/// Values of a function at the canonical representatives of `O / m^level`,
/// each known modulo `pi^prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    field: Arc<LocalField>,
    level: u32,
    prec: i64,
    values: Vec<LocalElem>,
}

impl FunctionTable {
    /// Values with more precision than `prec` are truncated; fewer is an error.
    pub fn new(field: Arc<LocalField>, level: u32, prec: i64, values: Vec<LocalElem>) -> Result<FunctionTable> {
        let n = field.num_points(level)?;
        if values.len() != n {
            return Err(Error::invalid(format!("table needs {n} values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| v.prec() < prec) {
            return Err(Error::InsufficientPrecision { needed: prec, have: v.prec() });
        }
        let values = values.iter().map(|v| v.truncate(&field, prec)).collect();
        Ok(FunctionTable { field, level, prec, values })
    }

    /// Tabulates an integral function given on exact representatives modulo `pi^prec`.
    pub fn from_fn<F>(field: Arc<LocalField>, level: u32, prec: i64, exec: Exec, f: F) -> Result<FunctionTable>
    where
        F: Fn(&Repr) -> Repr + Sync + Send,
    {
        field.check_prec(prec)?;
        let n = field.num_points(level)?;
        let k = field.clone();
        let values = exec.map_range(n, |i| k.elem(&f(&k.canonical_rep(i, level)), prec));
        Ok(FunctionTable { field, level, prec, values })
    }

    pub fn field(&self) -> &Arc<LocalField> {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn values(&self) -> &[LocalElem] {
        &self.values
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.val() >= 0)
    }

    /// Smallest valuation of a value, `None` for the zero table.
    pub fn sup_norm(&self) -> Option<i64> {
        self.values.iter().filter_map(|v| v.valuation()).min()
    }

    pub fn add(&self, other: &FunctionTable) -> Result<FunctionTable> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b, &self.field)).collect();
        Ok(FunctionTable { field: self.field.clone(), level: self.level, prec: self.prec.min(other.prec), values })
    }

    /// Values modulo the maximal ideal.
    pub fn reduce(&self) -> Result<Vec<Fe>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_zero() || v.val() > 0 {
                    Ok(Fe::ZERO)
                } else if v.val() < 0 {
                    Err(Error::NotIntegral { index: i })
                } else {
                    Ok(self.field.residue(v.unit()))
                }
            })
            .collect()
    }
}

/// A matrix over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMatrix {
    field: Arc<Gf>,
    rows: usize,
    cols: usize,
    entries: Vec<Fe>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// Outcome of Gaussian elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    /// `Some` only for square matrices.
    pub invertible: Option<bool>,
    /// A nonzero vector `c` with `sum_k c_k * column_k = 0`, when the columns are dependent.
    pub column_dependency: Option<Vec<Fe>>,
}

impl ResidueMatrix {
    pub fn new(field: Arc<Gf>, rows: usize, cols: usize, entries: Vec<Fe>) -> ResidueMatrix {
        assert_eq!(entries.len(), rows * cols, "entry count does not match the shape");
        ResidueMatrix {
            field,
            rows,
            cols,
            entries,
            row_labels: (0..rows).map(|i| i.to_string()).collect(),
            col_labels: (0..cols).map(|i| i.to_string()).collect(),
        }
    }

    pub fn from_rows(field: Arc<Gf>, rows: &[Vec<Fe>]) -> ResidueMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ResidueMatrix::new(field, rows.len(), cols, entries)
    }

    pub fn identity(field: Arc<Gf>, n: usize) -> ResidueMatrix {
        let entries = (0..n * n).map(|k| if k / n == k % n { Fe::ONE } else { Fe::ZERO }).collect();
        ResidueMatrix::new(field, n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|c| c.0).collect()).collect()
    }

    /// Rank by elimination with the first nonzero entry of each column as pivot.
    pub fn rank(&self) -> RankReport {
        let f = &self.field;
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
                continue;
            };
            for k in 0..cols {
                m.swap(r * cols + k, p * cols + k);
            }
            let inv = f.inv(m[r * cols + c]).unwrap();
            for k in 0..cols {
                m[r * cols + k] = f.mul(m[r * cols + k], inv);
            }
            for i in 0..rows {
                if i == r || m[i * cols + c].is_zero() {
                    continue;
                }
                let t = m[i * cols + c];
                for k in 0..cols {
                    m[i * cols + k] = f.sub(m[i * cols + k], f.mul(t, m[r * cols + k]));
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        let column_dependency = (0..cols).find(|c| !pivot_cols.contains(c)).map(|free| {
            // reduced row echelon form: x_free = 1, pivot variables read off
            let mut v = vec![Fe::ZERO; cols];
            v[free] = Fe::ONE;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = f.neg(m[row * cols + free]);
            }
            v
        });
        RankReport { rank: r, invertible: (rows == cols).then_some(r == rows), column_dependency }
    }

    /// Square, triangular (upper or lower) with nonzero diagonal.
    pub fn is_unit_triangular_shape(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let diag = (0..n).all(|i| !self.get(i, i).is_zero());
        let upper = (0..n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()));
        let lower = (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j).is_zero()));
        diag && (upper || lower)
    }

    /// `M * v`.
    pub fn apply(&self, v: &[Fe]) -> Vec<Fe> {
        let f = &self.field;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }
}

/// The delta function at point `v` of `O / m^n`, in factored form
/// `prod_j (1 - (Y_j - a_j)^(q-1))` with `Y_j` the `j`-th seed reduction.
#[derive(Clone, Debug)]
pub struct Indicator {
    field: Arc<Gf>,
    point: usize,
    targets: Vec<Fe>,
}

/// Builds the indicator of point `v` from seed reductions `seeds[j][w]`, checking that
/// the seeds separate `v` from every other point.
pub fn build_indicator(field: Arc<Gf>, v: usize, seeds: &[Vec<Fe>]) -> Result<Indicator> {
    let points = seeds.first().map_or(1, |s| s.len());
    if v >= points {
        return Err(Error::invalid(format!("point {v} out of range")));
    }
    let targets: Vec<Fe> = seeds.iter().map(|s| s[v]).collect();
    if let Some(w) = (0..points).find(|&w| w != v && seeds.iter().all(|s| s[w] == s[v])) {
        return Err(Error::NotSeparating { v: v.min(w), w: v.max(w) });
    }
    Ok(Indicator { field, point: v, targets })
}

impl Indicator {
    pub fn point(&self) -> usize {
        self.point
    }

    /// Evaluates the factored form at a point given by its seed reductions.
    pub fn eval(&self, seed_values: &[Fe]) -> Fe {
        let f = &self.field;
        let e = f.size() as u64 - 1;
        self.targets
            .iter()
            .zip(seed_values)
            .fold(Fe::ONE, |acc, (&a, &y)| f.mul(acc, f.sub(Fe::ONE, f.pow(f.sub(y, a), e))))
    }

    /// Expanded form: exponent vectors (one entry per seed, each `<= q - 1`) with coefficients.
    pub fn expand(&self) -> BTreeMap<Vec<u32>, Fe> {
        let f = &self.field;
        let q1 = f.size() - 1;
        // 1 - (Y - a)^(q-1) = 1 - sum_k binom(q-1, k) Y^k (-a)^(q-1-k)
        let factor = |a: Fe| -> Vec<Fe> {
            let mut c: Vec<Fe> = (0..=q1)
                .map(|k| {
                    let b = f.from_int(crate::binom::binom_mod_p(q1 as i64, k as u64, f.characteristic()) as i64);
                    f.neg(f.mul(b, f.pow(f.neg(a), (q1 - k) as u64)))
                })
                .collect();
            c[0] = f.add(c[0], Fe::ONE);
            c
        };
        let mut terms: BTreeMap<Vec<u32>, Fe> = BTreeMap::new();
        terms.insert(Vec::new(), Fe::ONE);
        for &a in &self.targets {
            let fac = factor(a);
            let mut next = BTreeMap::new();
            for (exps, c) in &terms {
                for (k, &b) in fac.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e.push(k as u32);
                    let entry = next.entry(e).or_insert(Fe::ZERO);
                    *entry = f.add(*entry, f.mul(*c, b));
                }
            }
            terms = next;
        }
        terms.retain(|_, c| !c.is_zero());
        terms
    }
}

/// Evaluates an expanded exponent-vector combination at given seed values (`0^0 = 1`).
pub fn eval_expanded(field: &Gf, terms: &BTreeMap<Vec<u32>, Fe>, seed_values: &[Fe]) -> Fe {
    terms.iter().fold(Fe::ZERO, |acc, (exps, &c)| {
        let m = exps.iter().zip(seed_values).fold(c, |m, (&e, &y)| field.mul(m, field.pow(y, e as u64)));
        field.add(acc, m)
    })
}
