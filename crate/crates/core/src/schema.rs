//! JSON forms of elements, tables, expansions, series and measures.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::digit::Expansion;
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::local::{LocalElem, LocalField, LocalFieldSpec};
use crate::measure::{DividedPowerSeries, Measure};
use crate::quotient::FunctionTable;
use crate::tate::{Monomial, QSimplifiedSeries, Series};

/// `pi^val * sum_k digits[k] pi^k`, known modulo `pi^precN`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemJson {
    pub val: i64,
    pub digits: Vec<u32>,
    #[serde(rename = "precN")]
    pub prec: i64,
}

impl ElemJson {
    pub fn from_elem(k: &LocalField, x: &LocalElem) -> ElemJson {
        let mut digits: Vec<u32> = k.digits(x).into_iter().map(|c| c.0).collect();
        while digits.last() == Some(&0) {
            digits.pop();
        }
        ElemJson { val: x.val(), digits, prec: x.prec() }
    }

    pub fn to_elem(&self, k: &LocalField) -> Result<LocalElem> {
        let digits: Vec<Fe> = self.digits.iter().map(|&c| Fe(c)).collect();
        k.elem_from_digits(self.val, &digits, self.prec)
    }
}

fn elems(k: &LocalField, xs: &[ElemJson]) -> Result<Vec<LocalElem>> {
    xs.iter().map(|x| x.to_elem(k)).collect()
}

/// Values at the canonical points of level `level`; also the form of a measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub field: LocalFieldSpec,
    pub level: u32,
    #[serde(rename = "precN")]
    pub prec: i64,
    pub values: Vec<ElemJson>,
}

impl TableJson {
    pub fn from_table(t: &FunctionTable) -> TableJson {
        let k = t.field();
        TableJson {
            field: k.spec().clone(),
            level: t.level(),
            prec: t.prec(),
            values: t.values().iter().map(|v| ElemJson::from_elem(k, v)).collect(),
        }
    }

    pub fn to_table(&self) -> Result<FunctionTable> {
        let k = self.field.build()?;
        FunctionTable::new(k.clone(), self.level, self.prec, elems(&k, &self.values)?)
    }

    pub fn from_measure(m: &Measure) -> TableJson {
        let k = m.field();
        TableJson {
            field: k.spec().clone(),
            level: m.level(),
            prec: m.prec(),
            values: m.values().iter().map(|v| ElemJson::from_elem(k, v)).collect(),
        }
    }

    pub fn to_measure(&self) -> Result<Measure> {
        let k = self.field.build()?;
        Measure::new(k.clone(), self.level, self.prec, elems(&k, &self.values)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub index: u64,
    pub value: ElemJson,
}

/// Expansion coefficients; zero coefficients are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientsJson {
    pub basis_label: String,
    pub field: LocalFieldSpec,
    pub level: u32,
    #[serde(rename = "precN")]
    pub prec: i64,
    pub coeffs: Vec<CoeffJson>,
}

impl CoefficientsJson {
    pub fn from_expansion(k: &LocalField, e: &Expansion) -> CoefficientsJson {
        CoefficientsJson {
            basis_label: e.basis_label.clone(),
            field: k.spec().clone(),
            level: e.level,
            prec: e.prec,
            coeffs: e
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| CoeffJson { index: i as u64, value: ElemJson::from_elem(k, c) })
                .collect(),
        }
    }

    /// Dense coefficients `a_0 .. a_{size-1}` at the stated precision.
    pub fn dense(&self, k: &LocalField, size: usize) -> Result<Vec<LocalElem>> {
        let mut out = vec![k.elem_zero(self.prec); size];
        for c in &self.coeffs {
            let slot = out
                .get_mut(c.index as usize)
                .ok_or_else(|| Error::invalid(format!("coefficient index {} is out of range", c.index)))?;
            *slot = c.value.to_elem(k)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<(u32, u32)>,
    pub coeff: ElemJson,
}

/// A series in graded lexicographic term order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub q: u64,
    pub field: LocalFieldSpec,
    #[serde(rename = "precN")]
    pub prec: i64,
    pub terms: Vec<TermJson>,
}

impl SeriesJson {
    pub fn from_series(s: &Series) -> SeriesJson {
        let k = s.field();
        SeriesJson {
            q: k.q(),
            field: k.spec().clone(),
            prec: s.prec(),
            terms: s
                .terms()
                .iter()
                .map(|(m, c)| TermJson { exponents: m.pairs().to_vec(), coeff: ElemJson::from_elem(k, c) })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<Series> {
        let k: Arc<LocalField> = self.field.build()?;
        if k.q() != self.q {
            return Err(Error::invalid(format!("q = {} does not match the field", self.q)));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((Monomial::new(t.exponents.clone())?, t.coeff.to_elem(&k)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::from_terms(k, self.prec, terms))
    }

    pub fn from_simplified(s: &QSimplifiedSeries) -> SeriesJson {
        SeriesJson::from_series(s.series())
    }
}

/// Coefficients `c_i` of `X^i / i!`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DividedPowerJson {
    pub field: LocalFieldSpec,
    pub coeffs: Vec<ElemJson>,
}

impl DividedPowerJson {
    pub fn from_series(k: &LocalField, s: &DividedPowerSeries) -> DividedPowerJson {
        DividedPowerJson {
            field: k.spec().clone(),
            coeffs: s.coeffs.iter().map(|c| ElemJson::from_elem(k, c)).collect(),
        }
    }
}
