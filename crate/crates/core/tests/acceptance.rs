//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use digitbasis::binom::binom_mod_p;
use digitbasis::carlitz::{addition_formula_check, local_carlitz_family, CarlitzContext};
use digitbasis::charzero::{digit_binomial_reduction, mahler_diagonal_valuation, mahler_transition};
use digitbasis::digit::{certify, span_check, Expander};
use digitbasis::hyperdiff::{chain_rule, hyperdiff_poly, local_hyperdiff_family};
use digitbasis::lubin_tate::LubinTateGroup;
use digitbasis::measure::Measure;
use digitbasis::tate::{baker_family, Monomial, QSimplifiedSeries, Series};
use digitbasis::{Exec, Fe, FunctionTable, LocalElem, LocalField, Poly, PolyRing, Repr};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_value() -> Outcome {
    let f = Arc::new(digitbasis::Gf::prime(3).unwrap());
    let ring = PolyRing::new(f);
    let input = Poly::from_labels(&[1, 1, 0, 2, 0, 0, 0, 2, 0, 1]);
    let start = Instant::now();
    let out = hyperdiff_poly(&ring, 3, &input);
    let elapsed = start.elapsed();
    ensure(out == Poly::from_labels(&[2, 0, 0, 0, 1]), || format!("got {}", ring.display(&out, "T")))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("D_3 = 2 + T^4 in {elapsed:?}"))
}

fn certification_suite_passes() -> Outcome {
    let start = Instant::now();
    let suite = certification_suite();
    for (family, n) in &suite {
        let points = family.field().num_points(*n).unwrap();
        ensure(points <= 625, || format!("{} level {n} has {points} points", family.label()))?;
        let cert = certify(family, *n, family.mode()).map_err(|e| e.to_string())?;
        ensure(cert.pass, || format!("{} level {n}: {:?}", family.label(), cert.witness))?;
        ensure(cert.unit_pivots, || format!("{} level {n}: evidence {:?}", family.label(), cert.evidence_matrix))?;
        ensure(cert.recheck(family.field()), || format!("{} level {n}: recheck failed", family.label()))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} certificates in {elapsed:?}", suite.len()))
}

fn span_oracle() -> Outcome {
    let mut checked = 0;
    for (family, n) in certification_suite() {
        let k = family.field().clone();
        let size = k.num_points(n).unwrap();
        if size > 81 {
            continue;
        }
        let rows: Vec<Vec<Fe>> = (0..size)
            .map(|i| family.digit_extend(i, n, 1).and_then(|t| t.reduce()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let rank = oracle_rank(k.residue_field(), &rows);
        ensure(rank == size, || format!("{} level {n}: rank {rank} of {size}", family.label()))?;
        let report = span_check(&family, n).map_err(|e| e.to_string())?;
        ensure(report.rank == rank, || format!("{} level {n}: library rank {}", family.label(), report.rank))?;
        checked += 1;
    }
    Ok(format!("{checked} families at full rank"))
}

fn round_trip_expansion() -> Outcome {
    use digitbasis::carlitz::global_carlitz_family;
    use digitbasis::charzero::digit_binomial_family;
    use digitbasis::hyperdiff::completion_hyperdiff_family;
    let settings = vec![
        (local_carlitz_family(2).unwrap(), 3),
        (local_hyperdiff_family(3).unwrap(), 2),
        (baker_family(laurent(2)), 3),
        (global_carlitz_family(2, &PI).unwrap(), 2),
        (completion_hyperdiff_family(2, &PI).unwrap(), 2),
        (baker_family(at_pi()), 2),
        (digit_binomial_family(3).unwrap(), 2),
        (baker_family(padic(5)), 2),
    ];
    let mut rng = rng(4);
    let mut tables = 0;
    for (family, n) in &settings {
        let k = family.field().clone();
        let ex = Expander::new(family, *n, 5).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let t = random_table(&k, &mut rng, *n, 5);
            let a = ex.expand(&t).map_err(|e| e.to_string())?;
            let back = ex.evaluate(&a.coeffs).map_err(|e| e.to_string())?;
            ensure(back == t, || format!("{} level {n}: round trip differs", family.label()))?;
            ensure(a.coeff_norm() == t.sup_norm(), || {
                format!("{} level {n}: coeff norm {:?} vs sup norm {:?}", family.label(), a.coeff_norm(), t.sup_norm())
            })?;
            tables += 1;
        }
    }
    Ok(format!("{tables} tables over {} settings", settings.len()))
}

fn frobenius_expansion() -> Outcome {
    for q in [2u32, 3] {
        let family = local_hyperdiff_family(q).unwrap();
        let k = family.field().clone();
        let prec = 5;
        let table = FunctionTable::from_fn(k.clone(), 4, prec, Exec::default(), |x| k.pow(x, q as u64, prec))
            .map_err(|e| e.to_string())?;
        let a = Expander::new(&family, 4, prec).and_then(|ex| ex.expand(&table)).map_err(|e| e.to_string())?;
        let ring = k.ring();
        let b = ring.sub(&Poly::monomial(Fe::ONE, q as usize), &Poly::x());
        for (i, c) in a.coeffs.iter().enumerate() {
            let power = (0..=3).find(|&j| (q as usize).pow(j) == i);
            let expect = match power {
                Some(j) => k.elem(&Repr::Poly(ring.pow(&b, j as u64).truncate(prec as usize)), prec),
                None => k.elem_zero(prec),
            };
            ensure(c.agrees(&expect, &k) && c.prec() >= prec, || format!("q = {q}: a_{i} = {c:?}"))?;
        }
    }
    Ok("a_{q^j} = (T^q - T)^j, others 0, mod T^5".into())
}

fn jeong_coincidence() -> Outcome {
    let mut count = 0;
    for q in [2u32, 3] {
        let k = laurent(q);
        let ctx = CarlitzContext::new(k.coeff_field().clone());
        for n in 1..=4 {
            for v in 0..k.num_points(n).unwrap() {
                let x = k.canonical_rep(v, n);
                for j in 0..n as usize {
                    let d = hyperdiff_poly(k.ring(), j as u64, x.poly()).coeff(0);
                    let e = ctx.eval_big_e(j, x.poly()).coeff(0);
                    ensure(d == e, || format!("q = {q}, n = {n}, point {v}, j = {j}: {} vs {}", d.0, e.0))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} residues agree"))
}

/// Pascal's triangle modulo p.
fn pascal(n: usize, p: u32) -> Vec<Vec<u8>> {
    let mut t = vec![vec![0u8; n]; n];
    for x in 0..n {
        t[x][0] = 1;
        for m in 1..=x {
            t[x][m] = ((t[x - 1][m - 1] as u32 + t[x - 1][m] as u32) % p) as u8;
        }
    }
    t
}

fn base_digits(mut x: usize, p: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn lucas_suite() -> Outcome {
    for p in [2u32, 3, 5] {
        let n = (p as usize).pow(4);
        let t = pascal(n, p);
        let pu = p as usize;
        for x in 0..n {
            let dx = base_digits(x, pu, 4);
            for m in 0..n {
                let cm = base_digits(m, pu, 4);
                let lucas = dx.iter().zip(&cm).fold(1u32, |acc, (&d, &c)| acc * t[d][c] as u32 % p);
                let exact = t[x][m] as u32;
                ensure(exact == lucas, || format!("p = {p}: binom({x}, {m})"))?;
                ensure(binom_mod_p(x as i64, m as u64, p) == exact, || format!("library binom({x}, {m}) mod {p}"))?;
                // {x over m} = prod binom(x, p^j)^(c_j) against prod d_j^(c_j)
                let digit_binom = cm
                    .iter()
                    .enumerate()
                    .fold(1u32, |acc, (j, &c)| acc * (t[x][pu.pow(j as u32)] as u32).pow(c as u32) % p);
                let reduction = dx.iter().zip(&cm).fold(1u32, |acc, (&d, &c)| acc * (d as u32).pow(c as u32) % p);
                ensure(digit_binom == reduction, || format!("p = {p}: digit binomial ({x}, {m})"))?;
                ensure(digit_binomial_reduction(x as u64, m as u64, p) == reduction, || {
                    format!("library reduction ({x}, {m}) mod {p}")
                })?;
            }
        }
    }
    Ok("all x, m < p^4 for p = 2, 3, 5".into())
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn mahler_diagonal() -> Outcome {
    for p in [2u32, 3, 5] {
        for i in 0..=200u64 {
            let digits = base_digits(i as usize, p as usize, 8);
            let denom = digits
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .fold(BigUint::one(), |acc, (j, &c)| acc * factorial((p as u64).pow(j as u32)).pow(c as u32));
            let num = factorial(i);
            ensure((&num % &denom).is_zero(), || format!("p = {p}, i = {i}: ratio is not an integer"))?;
            let ratio = num / denom;
            ensure(!(ratio % BigUint::from(p)).is_zero(), || format!("p = {p}, i = {i}: ratio divisible by p"))?;
            ensure(mahler_diagonal_valuation(i, p) == 0, || format!("library valuation at p = {p}, i = {i}"))?;
        }
        let t = mahler_transition(p, 40);
        ensure(t.diagonal_valuations.iter().all(|&v| v == 0), || format!("p = {p}: transition diagonal"))?;
    }
    Ok("unit diagonal for i <= 200".into())
}

fn lubin_tate_identifications() -> Outcome {
    // G_m over Z_2
    let k = padic(2);
    let g = LubinTateGroup::standard(k.clone(), 8).map_err(|e| e.to_string())?;
    for a in 0..16u128 {
        let s = g.endomorphism(&Repr::Int(a), 6).map_err(|e| e.to_string())?;
        for n in 1..=8u32 {
            let exact = if n as u128 > a { 0 } else { (0..n as u128).fold(1u128, |acc, i| acc * (a - i) / (i + 1)) };
            let expect = k.elem_int((exact % 64) as i64, 6);
            ensure(s[n as usize].agrees(&expect, &k), || format!("Z_2: C_{n}({a}) = {:?}", s[n as usize]))?;
        }
    }
    // Carlitz module over F_2[[T]]
    let k = laurent(2);
    let g = LubinTateGroup::standard(k.clone(), 8).map_err(|e| e.to_string())?;
    let ctx = CarlitzContext::new(k.coeff_field().clone());
    let mut rng = rng(9);
    let mut points: Vec<Repr> = k.canonical_reps(4).unwrap();
    points.extend((0..8).map(|_| k.canonical_rep(rng.gen_range(0..1 << 10), 10)));
    for a in &points {
        let s = g.endomorphism(a, 4).map_err(|e| e.to_string())?;
        for n in 1..=8usize {
            let expect = if n.is_power_of_two() {
                let e = ctx.eval_big_e(n.trailing_zeros() as usize, a.poly());
                k.elem(&Repr::Poly(e), 4)
            } else {
                k.elem_zero(4)
            };
            ensure(s[n].agrees(&expect, &k), || format!("F_2[[T]]: C_{n}({a}) = {:?}", s[n]))?;
        }
    }
    // C_{q^j}(pi^j a) = a mod pi
    for k in [padic(2), padic(3), laurent(2)] {
        let q = k.q() as usize;
        let g = LubinTateGroup::standard(k.clone(), q * q).map_err(|e| e.to_string())?;
        for a in k.canonical_reps(2).unwrap() {
            for j in 0..=2usize {
                let x = k.mul(&k.pi_pow(j as i64), &a, 8);
                let c = g.coefficient(q.pow(j as u32), &x, 2).map_err(|e| e.to_string())?;
                let c = c.to_repr(&k).map_err(|e| e.to_string())?;
                ensure(k.residue(&c) == k.residue(&a), || format!("{:?}: C_(q^{j})(pi^{j} {a})", k.spec()))?;
            }
        }
    }
    Ok("G_m and Carlitz instances, and the digit congruence".into())
}

fn baker_legendre() -> Outcome {
    for p in [3u32, 5, 7] {
        let k = padic(p);
        let family = baker_family(k.clone());
        let squares: Vec<u32> = (1..p).map(|x| x * x % p).collect();
        let i = ((p - 1) / 2) as usize;
        for x in 1..p {
            let vals = family.basis_values(&Repr::Int(x as u128), i + 1, 3).map_err(|e| e.to_string())?;
            let got = k.residue(&vals[i]).0;
            let legendre = if squares.contains(&x) { 1 } else { p - 1 };
            ensure(got == legendre, || format!("p = {p}, x = {x}: {got} vs {legendre}"))?;
        }
    }
    Ok("Legendre symbol for p = 3, 5, 7".into())
}

fn random_series(k: &Arc<LocalField>, rng: &mut rand_chacha::ChaCha8Rng, n: u32, prec: i64) -> QSimplifiedSeries {
    let q = k.q();
    let terms = (0..rng.gen_range(0..6))
        .map(|_| {
            let m = rng.gen_range(0..q.pow(n));
            let shift = rng.gen_range(0..2);
            (Monomial::from_index(m, q), random_elem(k, rng, prec, shift))
        })
        .collect();
    Series::from_terms(k.clone(), prec, terms).q_simplify()
}

fn tate_model() -> Outcome {
    for k in [laurent(2), laurent(3), laurent(4), padic(5), at_pi()] {
        let q = k.q();
        let x = Series::var(k.clone(), 0, 4);
        let xq1 = x.pow(q - 1);
        let one = Series::constant(k.clone(), &k.elem_one(4));
        ensure(xq1.mul(&one.sub(&xq1)).q_simplify().is_zero(), || format!("q = {q}: product does not vanish"))?;
    }
    let mut rng = rng(11);
    let prec = 4;
    let mut pairs = 0;
    for (k, n) in [(laurent(2), 3), (laurent(3), 2), (padic(3), 2), (padic(2), 3), (at_pi(), 2)] {
        for _ in 0..50 {
            let s = random_series(&k, &mut rng, n, prec);
            let t = s.to_function(n, prec).map_err(|e| e.to_string())?;
            let back = QSimplifiedSeries::from_function(&t).map_err(|e| e.to_string())?;
            ensure(back == s, || format!("{:?} n = {n}: series round trip", k.spec()))?;
            let table = random_table(&k, &mut rng, n, prec);
            let s2 = QSimplifiedSeries::from_function(&table).map_err(|e| e.to_string())?;
            ensure(s2.to_function(n, prec).map_err(|e| e.to_string())? == table, || {
                format!("{:?} n = {n}: table round trip", k.spec())
            })?;
            pairs += 1;
        }
    }
    // isometry over all residue coefficients for q = 2
    let k = laurent(2);
    let mut series = 0;
    for n in 0..=3u32 {
        let size = 1u64 << n;
        for mask in 0..(1u64 << size) {
            let terms = (0..size)
                .filter(|m| mask >> m & 1 == 1)
                .map(|m| (Monomial::from_index(m, 2), k.elem_one(prec)))
                .collect();
            let s = Series::from_terms(k.clone(), prec, terms).q_simplify();
            let t = s.to_function(n, prec).map_err(|e| e.to_string())?;
            ensure(t.sup_norm() == s.norm_valuation(), || format!("n = {n}, mask {mask:b}: norms differ"))?;
            series += 1;
        }
    }
    Ok(format!("{pairs} round-trip pairs, isometry on {series} series"))
}

fn random_measure(k: &Arc<LocalField>, rng: &mut rand_chacha::ChaCha8Rng) -> Measure {
    let values: Vec<LocalElem> = (0..4).map(|_| random_elem(k, rng, 4, 0)).collect();
    Measure::new(k.clone(), 2, 4, values).unwrap()
}

fn measures() -> Outcome {
    let mut rng = rng(12);
    for family in [local_carlitz_family(2).unwrap(), local_hyperdiff_family(2).unwrap()] {
        let k = family.field().clone();
        for _ in 0..50 {
            let nu = random_measure(&k, &mut rng);
            let mu = random_measure(&k, &mut rng);
            let conv = nu.convolve(&mu, Exec::default()).map_err(|e| e.to_string())?;
            let lhs = conv.transform(&family).map_err(|e| e.to_string())?;
            let rhs =
                nu.transform(&family).and_then(|a| Ok(a.mul(&mu.transform(&family)?))).map_err(|e| e.to_string())?;
            ensure(lhs.agrees(&rhs), || format!("{}: transform is not multiplicative", family.label()))?;
        }
    }
    let k = laurent(2);
    let ctx = CarlitzContext::new(k.coeff_field().clone());
    let mut samples: Vec<(Poly, Poly)> = Vec::new();
    for _ in 0..40 {
        let x = k.canonical_rep(rng.gen_range(0..1 << 8), 8).poly().clone();
        let y = k.canonical_rep(rng.gen_range(0..1 << 8), 8).poly().clone();
        samples.push((x, y));
    }
    for i in 0..4 {
        let r = addition_formula_check(&ctx, i, &samples, 4);
        ensure(r.holds, || format!("addition formula fails at i = {i}, sample {:?}", r.witness))?;
    }
    Ok("100 convolution pairs, addition formula for i < 4".into())
}

fn chain_rule_suite() -> Outcome {
    let k = at_pi();
    let mut rng = rng(13);
    for _ in 0..20 {
        let digits: Vec<Fe> = (0..6).map(|_| Fe(rng.gen_range(0..4))).collect();
        for j in 0..=3 {
            let r = chain_rule(&k, j, &digits, 3).map_err(|e| e.to_string())?;
            ensure(r.agree, || format!("j = {j}, digits {digits:?}: {:?} vs {:?}", r.direct, r.via_chain_rule))?;
        }
    }
    Ok("20 random f(pi), j <= 3, mod pi^3".into())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("worked hyperdifferential value", worked_value),
        ("certification suite", certification_suite_passes),
        ("span oracle", span_oracle),
        ("round-trip expansion", round_trip_expansion),
        ("Frobenius expansion", frobenius_expansion),
        ("hyperdifferential and Carlitz reductions coincide", jeong_coincidence),
        ("Lucas suite", lucas_suite),
        ("Mahler diagonal", mahler_diagonal),
        ("Lubin-Tate identifications", lubin_tate_identifications),
        ("Baker basis and Legendre symbol", baker_legendre),
        ("Tate model", tate_model),
        ("measures", measures),
        ("chain rule", chain_rule_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
