use std::io::Read;
use std::sync::Arc;

use digitbasis::schema::ElemJson;
use digitbasis::{Error, LocalElem, LocalField, LocalFieldSpec, Poly, Repr};
use serde::de::DeserializeOwned;

use crate::Global;

/// Exit code and message for a failed job.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure { code: if e.is_mathematical() { 1 } else { 2 }, message: e.to_string() }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// `laurent:Q`, `padic:P`, `at-pi:R:c0,c1,...` or a JSON object.
pub fn parse_field_spec(s: &str) -> Outcome<LocalFieldSpec> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Failure::input(format!("field spec: {e}")));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<u32>().map_err(|_| Failure::input(format!("field spec {s:?}: bad number {t:?}")));
    match parts.as_slice() {
        ["laurent", q] => Ok(LocalFieldSpec::laurent(num(q)?)?),
        ["padic", p] => Ok(LocalFieldSpec::padic(num(p)?)),
        ["at-pi", r, pi] => Ok(LocalFieldSpec::at_pi(num(r)?, &parse_labels(pi)?)?),
        _ => Err(Failure::input(format!("unrecognised field spec {s:?}"))),
    }
}

pub fn field(g: &Global) -> Outcome<Arc<LocalField>> {
    let spec = match (&g.field, g.q, g.p) {
        (Some(f), None, None) => parse_field_spec(f)?,
        (None, Some(q), None) => LocalFieldSpec::laurent(q)?,
        (None, None, Some(p)) => LocalFieldSpec::padic(p),
        (None, None, None) => return Err(Failure::input("no field given: use --field, --q or --p")),
        _ => return Err(Failure::input("give only one of --field, --q, --p")),
    };
    Ok(spec.build()?)
}

pub fn level(g: &Global) -> Outcome<u32> {
    g.level.ok_or_else(|| Failure::input("--level is required"))
}

pub fn prec(g: &Global) -> Outcome<i64> {
    match g.prec {
        Some(n) if n >= 1 => Ok(n),
        Some(n) => Err(Failure::input(format!("--precN must be positive, got {n}"))),
        None => Err(Failure::input("--precN is required")),
    }
}

pub fn read_source(src: &str) -> Outcome<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(src).map_err(|e| Failure::input(format!("{src}: {e}")))
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Outcome<T> {
    serde_json::from_str(text).map_err(|e| Failure::input(format!("{what}: {e}")))
}

pub fn payload<T: DeserializeOwned>(g: &Global, what: &str) -> Outcome<T> {
    let src =
        g.json.as_deref().ok_or_else(|| Failure::input(format!("{what} payload required: use --json <path|->")))?;
    parse_json(&read_source(src)?, what)
}

/// Comma-separated labels, lowest degree first; empty means zero.
pub fn parse_labels(s: &str) -> Outcome<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::input(format!("bad label {t:?}"))))
        .collect()
}

pub fn parse_poly(s: &str) -> Outcome<Poly> {
    Ok(Poly::from_labels(&parse_labels(s)?))
}

/// An integer in `Q_p`, or a label list for the polynomial settings.
pub fn parse_repr(k: &LocalField, s: &str) -> Outcome<Repr> {
    if k.is_padic() {
        let v: i64 = s.trim().parse().map_err(|_| Failure::input(format!("bad integer {s:?}")))?;
        Ok(k.int(v, k.max_prec()))
    } else {
        let labels = parse_labels(s)?;
        let q = k.coeff_field().size();
        if let Some(c) = labels.iter().find(|&&c| c >= q) {
            return Err(Failure::input(format!("label {c} is out of range for F_{q}")));
        }
        Ok(k.reduce(&Repr::Poly(Poly::from_labels(&labels)), k.max_prec()))
    }
}

/// An element JSON object, or a representative in the form of [`parse_repr`] taken at `prec`.
pub fn parse_elem(k: &LocalField, s: &str, prec: Option<i64>) -> Outcome<LocalElem> {
    if s.trim_start().starts_with('{') {
        let e: ElemJson = parse_json(s, "element")?;
        return Ok(e.to_elem(k)?);
    }
    let prec = prec.ok_or_else(|| Failure::input("--precN is required for a bare representative"))?;
    Ok(k.elem(&parse_repr(k, s)?, prec))
}

pub fn parse_frobenius(k: &LocalField, s: &str) -> Outcome<Vec<Repr>> {
    s.split(';').map(|t| parse_repr(k, t)).collect()
}
