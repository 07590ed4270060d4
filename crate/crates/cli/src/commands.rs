use std::sync::Arc;

use digitbasis::carlitz::CarlitzContext;
use digitbasis::families::LubinTateOptions;
use digitbasis::hyperdiff::{hyperdiff_local, hyperdiff_poly};
use digitbasis::lubin_tate::LubinTateGroup;
use digitbasis::schema::{CoefficientsJson, DividedPowerJson, ElemJson, SeriesJson, TableJson};
use digitbasis::tate::{baker_family, QSimplifiedSeries};
use digitbasis::{
    build_family, certify as run_certify, BasisFamily, Exec, Expander, FieldSpec, FunctionTable, LocalField, Mode,
    PolyRing,
};
use serde::Serialize;

use crate::input::*;
use crate::{FamilyArgs, Global};

fn emit<T: Serialize>(value: &T) -> Outcome<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::input(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

fn family_on(k: Arc<LocalField>, level: u32, args: &FamilyArgs) -> Outcome<BasisFamily> {
    let frobenius = args.frobenius.as_deref().map(|s| parse_frobenius(&k, s)).transpose()?;
    let lt = LubinTateOptions { frobenius, degree: args.degree };
    Ok(build_family(args.family, k, level, &lt)?)
}

pub fn certify(g: &Global, args: &FamilyArgs, mode: Option<Mode>) -> Outcome<bool> {
    let k = field(g)?;
    let n = level(g)?;
    let family = family_on(k, n, args)?;
    let cert = run_certify(&family, n, mode.unwrap_or(family.mode()))?;
    emit(&cert)?;
    if !cert.pass {
        eprintln!("certification failed: {:?}", cert.witness);
    }
    Ok(cert.pass)
}

fn builtin_table(g: &Global, name: &str) -> Outcome<FunctionTable> {
    let k = field(g)?;
    let (n, prec) = (level(g)?, prec(g)?);
    let e = match name.split_once(':') {
        None if name == "identity" => 1,
        Some(("power", e)) => e.parse().map_err(|_| Failure::input(format!("bad exponent {e:?}")))?,
        _ => return Err(Failure::input(format!("unknown function {name:?}: use identity or power:K"))),
    };
    let kk = k.clone();
    Ok(FunctionTable::from_fn(k, n, prec, Exec::default(), move |x| kk.pow(x, e, prec))?)
}

pub fn expand(g: &Global, args: &FamilyArgs, function: Option<&str>) -> Outcome<bool> {
    let table = match function {
        Some(name) => builtin_table(g, name)?,
        None => payload::<TableJson>(g, "table")?.to_table()?,
    };
    let k = table.field().clone();
    let family = family_on(k.clone(), table.level(), args)?;
    let ex = Expander::new(&family, table.level(), table.prec())?;
    emit(&CoefficientsJson::from_expansion(&k, &ex.expand(&table)?))?;
    Ok(true)
}

pub fn eval(g: &Global, args: &FamilyArgs) -> Outcome<bool> {
    let c: CoefficientsJson = payload(g, "coefficients")?;
    if c.basis_label != args.family.name() {
        return Err(Failure::input(format!("coefficients are for {:?}, not {}", c.basis_label, args.family)));
    }
    let k = c.field.build()?;
    let family = family_on(k.clone(), c.level, args)?;
    let ex = Expander::new(&family, c.level, c.prec)?;
    let coeffs = c.dense(&k, ex.size())?;
    emit(&TableJson::from_table(&ex.evaluate(&coeffs)?))?;
    Ok(true)
}

fn coeff_ring(g: &Global) -> Outcome<PolyRing> {
    match (&g.field, g.q) {
        (None, Some(q)) => Ok(PolyRing::new(FieldSpec::of_size(q)?.build()?)),
        _ => {
            let k = field(g)?;
            if k.is_padic() {
                return Err(Failure::input("polynomial commands need a function field"));
            }
            Ok(k.ring().clone())
        }
    }
}

#[derive(Serialize)]
struct CarlitzOut {
    r: u32,
    j: usize,
    /// `D_j`
    d: Vec<u32>,
    /// coefficients of `x^(r^k)` in `e_j(x)`, `k <= j`
    e: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    big_e: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    script_e: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factorial: Option<Vec<u32>>,
}

pub fn carlitz(g: &Global, j: usize, h: Option<&str>, i: Option<u64>) -> Outcome<bool> {
    let ring = coeff_ring(g)?;
    let ctx = CarlitzContext::new(ring.field().clone());
    let h = h.map(parse_poly).transpose()?;
    let out = CarlitzOut {
        r: ring.field().size(),
        j,
        d: ctx.d(j).labels(),
        e: ctx.e(j).iter().map(|p| p.labels()).collect(),
        big_e: h.as_ref().map(|h| ctx.eval_big_e(j, h).labels()),
        script_e: h.as_ref().zip(i).map(|(h, i)| ctx.eval_script_e(i, h).labels()),
        factorial: i.map(|i| ctx.factorial(i).labels()),
    };
    emit(&out)?;
    Ok(true)
}

#[derive(Serialize)]
struct PolyOut {
    j: u64,
    poly: Vec<u32>,
}

pub fn hyperdiff(g: &Global, j: u64, poly: Option<&str>) -> Outcome<bool> {
    if let Some(p) = poly {
        let ring = coeff_ring(g)?;
        let f = parse_poly(p)?;
        emit(&PolyOut { j, poly: hyperdiff_poly(&ring, j, &f).labels() })?;
        return Ok(true);
    }
    let src = g.json.as_deref().ok_or_else(|| Failure::input("give --poly or a --json payload"))?;
    let value: serde_json::Value = parse_json(&read_source(src)?, "hyperdiff input")?;
    if value.is_array() {
        let labels: Vec<u32> = serde_json::from_value(value).map_err(|e| Failure::input(format!("polynomial: {e}")))?;
        let ring = coeff_ring(g)?;
        let f = digitbasis::Poly::from_labels(&labels);
        emit(&PolyOut { j, poly: hyperdiff_poly(&ring, j, &f).labels() })?;
    } else {
        let k = field(g)?;
        let e: ElemJson = serde_json::from_value(value).map_err(|e| Failure::input(format!("element: {e}")))?;
        let x = e.to_elem(&k)?;
        emit(&ElemJson::from_elem(&k, &hyperdiff_local(&k, j, &x)?))?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct EndomorphismOut {
    degree: usize,
    #[serde(rename = "precN")]
    prec: i64,
    coeffs: Vec<ElemJson>,
}

pub fn lubin_tate(g: &Global, a: &str, frobenius: Option<&str>, degree: Option<usize>) -> Outcome<bool> {
    let k = field(g)?;
    let prec = prec(g)?;
    let degree = match (degree, g.level) {
        (Some(d), _) => d,
        (None, Some(n)) => (k.q() as usize).pow(n.max(1)),
        (None, None) => return Err(Failure::input("give --degree or --level")),
    };
    let group = match frobenius {
        Some(f) => LubinTateGroup::new(k.clone(), parse_frobenius(&k, f)?, degree)?,
        None => LubinTateGroup::standard(k.clone(), degree)?,
    };
    let s = group.endomorphism(&parse_repr(&k, a)?, prec)?;
    emit(&EndomorphismOut { degree, prec, coeffs: s.iter().map(|c| ElemJson::from_elem(&k, c)).collect() })?;
    Ok(true)
}

pub fn baker(g: &Global, m: u64) -> Outcome<bool> {
    let k = field(g)?;
    let family = baker_family(k);
    emit(&TableJson::from_table(&family.digit_extend(m as usize, level(g)?, prec(g)?)?))?;
    Ok(true)
}

pub fn tate_simplify(g: &Global) -> Outcome<bool> {
    let s = payload::<SeriesJson>(g, "series")?.to_series()?;
    emit(&SeriesJson::from_simplified(&s.q_simplify()))?;
    Ok(true)
}

pub fn tate_eval(g: &Global, x: &str) -> Outcome<bool> {
    let s = payload::<SeriesJson>(g, "series")?.to_series()?;
    let k = s.field().clone();
    let x = parse_elem(&k, x, g.prec.or(Some(s.prec())))?;
    emit(&ElemJson::from_elem(&k, &s.q_simplify().evaluate_at_point(&x)?))?;
    Ok(true)
}

pub fn tate_to_function(g: &Global) -> Outcome<bool> {
    let s = payload::<SeriesJson>(g, "series")?.to_series()?;
    let prec = g.prec.unwrap_or(s.prec());
    emit(&TableJson::from_table(&s.q_simplify().to_function(level(g)?, prec)?))?;
    Ok(true)
}

pub fn tate_from_function(g: &Global) -> Outcome<bool> {
    let t = payload::<TableJson>(g, "table")?.to_table()?;
    emit(&SeriesJson::from_simplified(&QSimplifiedSeries::from_function(&t)?))?;
    Ok(true)
}

pub fn measure_transform(g: &Global, args: &FamilyArgs, count: Option<usize>) -> Outcome<bool> {
    let m = payload::<TableJson>(g, "measure")?.to_measure()?;
    let k = m.field().clone();
    let family = family_on(k.clone(), m.level(), args)?;
    let count = count.unwrap_or(m.values().len());
    emit(&DividedPowerJson::from_series(&k, &m.transform_to(&family, count)?))?;
    Ok(true)
}

pub fn measure_convolve(g: &Global, other: &str) -> Outcome<bool> {
    let a = payload::<TableJson>(g, "measure")?.to_measure()?;
    let b = parse_json::<TableJson>(&read_source(other)?, "measure")?.to_measure()?;
    emit(&TableJson::from_measure(&a.convolve(&b, Exec::default())?))?;
    Ok(true)
}
