//! Finitely additive measures on `F_q[[T]]` at a fixed level, their transforms
//! into divided power series, and convolution.

use std::sync::Arc;

use crate::binom::binom_mod_p;
use crate::digit::{certify, BasisFamily};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::local::{Kind, LocalElem, LocalField};
use crate::par::Exec;

/// Masses of the `q^n` balls `rep_v + T^n O`, in canonical point order.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    field: Arc<LocalField>,
    level: u32,
    prec: i64,
    values: Vec<LocalElem>,
}

impl Measure {
    pub fn new(field: Arc<LocalField>, level: u32, prec: i64, values: Vec<LocalElem>) -> Result<Measure> {
        if field.kind() != Kind::Laurent {
            return Err(Error::invalid("measures are supported on F_q[[T]]"));
        }
        let n = field.num_points(level)?;
        if values.len() != n {
            return Err(Error::invalid(format!("measure needs {n} ball masses, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| v.prec() < prec) {
            return Err(Error::InsufficientPrecision { needed: prec, have: v.prec() });
        }
        let values = values.iter().map(|v| v.truncate(&field, prec)).collect();
        Ok(Measure { field, level, prec, values })
    }

    pub fn zero(field: Arc<LocalField>, level: u32, prec: i64) -> Result<Measure> {
        let n = field.num_points(level)?;
        Measure::new(field.clone(), level, prec, vec![field.elem_zero(prec); n])
    }

    /// Unit mass on the ball of the point with index `v`.
    pub fn dirac(field: Arc<LocalField>, level: u32, prec: i64, v: usize) -> Result<Measure> {
        let mut m = Measure::zero(field, level, prec)?;
        if v >= m.values.len() {
            return Err(Error::invalid(format!("point {v} is out of range")));
        }
        m.values[v] = m.field.elem_one(prec);
        Ok(m)
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

    pub fn add(&self, other: &Measure) -> Result<Measure> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let k = &self.field;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b, k)).collect();
        Measure::new(k.clone(), self.level, self.prec.min(other.prec), values)
    }

    pub fn scale(&self, c: &LocalElem) -> Result<Measure> {
        let k = &self.field;
        let values: Vec<LocalElem> = self.values.iter().map(|a| a.mul(c, k)).collect();
        let prec = values.iter().map(|v| v.prec()).min().unwrap_or(self.prec).min(self.prec);
        Measure::new(k.clone(), self.level, prec, values)
    }

    /// `(nu * mu)(B) = sum over a + b in B of nu(a) mu(b)`.
    pub fn convolve(&self, other: &Measure, exec: Exec) -> Result<Measure> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let k = &self.field;
        let n = self.level;
        let prec = self.prec.min(other.prec);
        let size = self.values.len();
        let reps = k.canonical_reps(n)?;
        // the sum of two canonical representatives is again one, so the index is exact
        let values = exec.map_range(size, |c| {
            let mut acc = k.elem_zero(prec);
            for a in 0..size {
                let neg_a = k.neg(&reps[a], n as i64);
                let b = k.index_of(&k.add(&reps[c], &neg_a, n as i64), n);
                acc = acc.add(&self.values[a].mul(&other.values[b], k), k);
            }
            acc
        });
        Measure::new(k.clone(), n, prec, values)
    }

    /// `c_i = sum_v f_i(rep_v) nu(B_v)` for `i < q^n`; the family must certify at this level.
    pub fn transform(&self, family: &BasisFamily) -> Result<DividedPowerSeries> {
        self.transform_to(family, self.values.len())
    }

    /// As [`Measure::transform`] with `count` coefficients, at most `q^n`.
    pub fn transform_to(&self, family: &BasisFamily, count: usize) -> Result<DividedPowerSeries> {
        let k = &self.field;
        if family.field().spec() != k.spec() {
            return Err(Error::invalid("basis family lives on a different field"));
        }
        if count > self.values.len() {
            return Err(Error::invalid(format!(
                "index bound {count} exceeds the {} balls at level {}",
                self.values.len(),
                self.level
            )));
        }
        let cert = certify(family, self.level, family.mode())?;
        if !cert.pass {
            return Err(Error::NotCertified { level: self.level, reason: format!("{:?}", cert.witness) });
        }
        let prec = self.prec;
        let rows = family
            .exec()
            .try_map_range(self.values.len(), |v| family.basis_values(&k.canonical_rep(v, self.level), count, prec))?;
        let coeffs = (0..count)
            .map(|i| {
                rows.iter()
                    .zip(&self.values)
                    .fold(k.elem_zero(prec), |acc, (f, nu)| acc.add(&k.elem(&f[i], prec).mul(nu, k), k))
            })
            .collect();
        Ok(DividedPowerSeries { field: k.clone(), coeffs })
    }
}

/// `sum_i c_i X^i / i!`, truncated to the stored indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DividedPowerSeries {
    field: Arc<LocalField>,
    pub coeffs: Vec<LocalElem>,
}

impl DividedPowerSeries {
    pub fn new(field: Arc<LocalField>, coeffs: Vec<LocalElem>) -> DividedPowerSeries {
        DividedPowerSeries { field, coeffs }
    }

    /// `(X^i/i!)(X^j/j!) = binom(i+j, i) X^(i+j)/(i+j)!`, truncated to the shorter length.
    pub fn mul(&self, other: &DividedPowerSeries) -> DividedPowerSeries {
        let k = &self.field;
        let p = k.characteristic();
        let len = self.coeffs.len().min(other.coeffs.len());
        let prec = self.coeffs.iter().chain(&other.coeffs).map(|c| c.prec()).min().unwrap_or(0);
        let coeffs = (0..len)
            .map(|s| {
                (0..=s).fold(k.elem_zero(prec), |acc, i| {
                    let b = binom_mod_p(s as i64, i as u64, p);
                    if b == 0 {
                        return acc;
                    }
                    let c = self.coeffs[i].mul(&other.coeffs[s - i], k);
                    acc.add(&c.mul(&k.elem(&k.scale(&k.one(), Fe(b), prec), prec), k), k)
                })
            })
            .collect();
        DividedPowerSeries { field: k.clone(), coeffs }
    }

    pub fn agrees(&self, other: &DividedPowerSeries) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.agrees(b, &self.field))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::local_carlitz_family;
    use crate::local::LocalFieldSpec;

    #[test]
    fn dirac_convolution_and_transform() {
        let fam = local_carlitz_family(2).unwrap();
        let k = fam.field().clone();
        let d1 = Measure::dirac(k.clone(), 2, 4, 1).unwrap();
        let d3 = Measure::dirac(k.clone(), 2, 4, 3).unwrap();
        // 1 + (1 + T) = T
        assert_eq!(d1.convolve(&d3, Exec::Sequential).unwrap(), Measure::dirac(k.clone(), 2, 4, 2).unwrap());
        let d0 = Measure::dirac(k.clone(), 2, 4, 0).unwrap().transform(&fam).unwrap();
        assert_eq!(d0.coeffs[0], k.elem_one(4));
        assert!(d0.coeffs[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn rejects_padic() {
        let k = LocalFieldSpec::padic(2).build().unwrap();
        assert!(Measure::zero(k, 1, 3).is_err());
    }
}
