mod common;

use std::sync::Arc;

use common::*;
use digitbasis::binom::binom_mod_p;
use digitbasis::carlitz::{addition_formula_check, e1_at_infinity, CarlitzContext};
use digitbasis::hyperdiff::{
    chain_rule, congruence_checks, hyperdiff_local, hyperdiff_poly, leibniz_check, taylor_by_substitution, taylor_map,
    taylor_mul,
};
use digitbasis::{Fe, FieldSpec, Gf, Poly, PolyRing, Repr};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn gf(q: u32) -> Arc<Gf> {
    FieldSpec::of_size(q).unwrap().build().unwrap()
}

fn ctx(q: u32) -> CarlitzContext {
    CarlitzContext::new(gf(q))
}

/// All polynomials of degree `< j` over `F_r`, by label counting.
fn all_below(r: u32, j: usize) -> Vec<Poly> {
    (0..(r as usize).pow(j as u32))
        .map(|mut i| {
            let mut c = Vec::new();
            for _ in 0..j {
                c.push((i % r as usize) as u32);
                i /= r as usize;
            }
            Poly::from_labels(&c)
        })
        .collect()
}

/// `prod (x - a)` as a dense polynomial in `x` with coefficients in `F_r[T]`.
fn product_oracle(ring: &PolyRing, roots: &[Poly]) -> Vec<Poly> {
    let mut acc = vec![Poly::one()];
    for a in roots {
        let mut next = vec![Poly::zero(); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] = ring.add(&next[k + 1], c);
            next[k] = ring.sub(&next[k], &ring.mul(c, a));
        }
        acc = next;
    }
    acc
}

fn random_poly(rng: &mut ChaCha8Rng, q: u32, degs: std::ops::Range<usize>) -> Poly {
    let deg = rng.gen_range(degs);
    Poly::from_labels(&(0..=deg).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>())
}

#[test]
fn carlitz_polynomials_match_products() {
    for r in [2u32, 3, 4] {
        let c = ctx(r);
        let ring = c.ring();
        for j in 0..=3 {
            let below = all_below(r, j);
            assert_eq!(c.e_dense(j), product_oracle(ring, &below), "e_{j} r={r}");
            // D_j is the product of the monic polynomials of degree j
            let t_j = Poly::monomial(Fe::ONE, j);
            let monic: Vec<Poly> = below.iter().map(|a| ring.add(a, &t_j)).collect();
            let d = monic.iter().fold(Poly::one(), |acc, m| ring.mul(&acc, m));
            assert_eq!(c.d(j), d, "D_{j} r={r}");
        }
    }
}

#[test]
fn carlitz_small_values() {
    let c = ctx(2);
    let ring = c.ring();
    // E_1(h) = (h^2 - h) / (T^2 - T)
    for h in all_below(2, 5) {
        let num = ring.sub(&ring.pow(&h, 2), &h);
        let want = ring.div_exact(&num, &c.d(1)).unwrap();
        assert_eq!(c.eval_big_e(1, &h), want);
    }
    for j in 0..4 {
        let t_j = Poly::monomial(Fe::ONE, j);
        for a in all_below(2, j) {
            assert!(c.eval_big_e(j, &a).is_zero());
            assert_eq!(c.eval_big_e(j, &ring.add(&a, &t_j)), Poly::one());
        }
        assert_eq!(c.eval_script_e(2u64.pow(j as u32), &Poly::x()), c.eval_big_e(j, &Poly::x()));
    }
    assert_eq!(c.factorial(3), ring.mul(&c.d(0), &c.d(1)));
}

#[test]
fn orders_of_carlitz_factorials() {
    for r in [2u32, 3, 4] {
        let c = ctx(r);
        let r = r as u64;
        for j in 0..=4 {
            assert_eq!(c.ord(&c.d(j), &Poly::x()), (r.pow(j as u32) - 1) / (r - 1));
        }
    }
    let c = ctx(2);
    let pi = Poly::from_labels(&PI);
    for k in 0..=5u32 {
        // count the monic degree-k polynomials divisible by pi^i
        let want: u64 = (1..=k / 2).map(|i| 2u64.pow(k - 2 * i)).sum();
        assert_eq!(c.ord(&c.d(k as usize), &pi), want);
        assert_eq!(want, (2u64.pow(k) - 2u64.pow(k % 2)) / 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn carlitz_quotients_are_integral_and_linear(r in prop::sample::select(vec![2u32, 3, 4]), seed in any::<u64>()) {
        let c = ctx(r);
        let ring = c.ring();
        let mut g = rng(seed);
        let h = random_poly(&mut g, r, 0..7);
        let k = random_poly(&mut g, r, 0..7);
        let s = Fe(g.gen_range(0..r));
        for j in 0..=4 {
            let (eh, ek) = (c.eval_e(j, &h), c.eval_e(j, &k));
            prop_assert!(ring.div_exact(&eh, &c.d(j)).is_ok());
            prop_assert_eq!(c.eval_e(j, &ring.add(&h, &k)), ring.add(&eh, &ek));
            prop_assert_eq!(c.eval_e(j, &ring.scale(&h, s)), ring.scale(&eh, s));
        }
        // E_1(pi g) vanishes modulo pi for pi of degree d
        let pi = Poly::from_labels(&PI);
        if r == 2 {
            let v = c.eval_big_e(1, &ring.mul(&pi, &k));
            prop_assert!(ring.rem(&v, &pi).is_zero());
        }
    }
}

#[test]
fn addition_formula_samples() {
    let c = ctx(3);
    let mut g = rng(5);
    let samples: Vec<(Poly, Poly)> =
        (0..6).map(|_| (random_poly(&mut g, 3, 4..5), random_poly(&mut g, 3, 4..5))).collect();
    for i in [1u64, 2, 4, 5, 9, 13] {
        assert!(addition_formula_check(&c, i, &samples, 6).holds, "i={i}");
    }
}

#[test]
fn carlitz_values_at_infinity_lie_in_the_maximal_ideal() {
    // At S = 1/T, E_j (j >= 1) sends S-integral inputs into S * O, so every reduction vanishes.
    for r in [2u32, 3] {
        let c = ctx(r);
        for j in 1..=3 {
            for k in 0..=20u64 {
                if let Some(v) = c.valuation_at_infinity(j, k) {
                    assert!(v >= 1, "r={r} j={j} k={k} v={v}");
                }
            }
            assert_eq!(c.valuation_at_infinity(j, 0), None);
        }
        // E_1(S) = -S^(r+1)
        assert_eq!(c.valuation_at_infinity(1, 1), Some(r as i64 + 1));
    }
    // the series form agrees on S^k
    let f = gf(2);
    for k in 1..=6usize {
        let mut x = vec![Fe::ZERO; k + 1];
        x[k] = Fe::ONE;
        let series = e1_at_infinity(&f, &x, 40);
        let lead = series.iter().position(|c| !c.is_zero()).map(|i| i as i64);
        assert_eq!(lead, ctx(2).valuation_at_infinity(1, k as u64), "k={k}");
        assert!(series[0].is_zero());
    }
}

#[test]
fn hyperdiff_values_at_infinity_lie_in_powers_of_s() {
    // D_j(S^m) = binom(-m, j) S^(m+j)
    for q in [2u32, 3] {
        let k = laurent(q);
        for m in 0..=9i64 {
            let x = k.elem_shifted(&k.one(), -m, 8);
            for j in 0..=4u64 {
                let d = hyperdiff_local(&k, j, &x).unwrap();
                let c = binom_mod_p(-m, j, q);
                if c == 0 {
                    assert!(d.is_zero() || d.valuation().unwrap() > -m - j as i64);
                } else {
                    assert_eq!(d.valuation(), Some(-m - j as i64));
                    assert_eq!(k.residue(d.unit()), Fe(c));
                }
            }
        }
    }
}

/// `D_j(T^m)` from `D_a(T)` and the product rule alone.
fn leibniz_recursion(ring: &PolyRing, j: usize, m: usize) -> Poly {
    if m == 0 {
        return if j == 0 { Poly::one() } else { Poly::zero() };
    }
    let d_t = |a: usize| match a {
        0 => Poly::x(),
        1 => Poly::one(),
        _ => Poly::zero(),
    };
    (0..=j.min(1))
        .fold(Poly::zero(), |acc, a| ring.add(&acc, &ring.mul(&d_t(a), &leibniz_recursion(ring, j - a, m - 1))))
}

#[test]
fn hyperdiff_is_determined_by_the_product_rule() {
    for q in [2u32, 3, 4] {
        let ring = PolyRing::new(gf(q));
        for m in 0..=12 {
            let t_m = Poly::monomial(Fe::ONE, m);
            for j in 0..=m + 1 {
                assert_eq!(hyperdiff_poly(&ring, j as u64, &t_m), leibniz_recursion(&ring, j, m), "q={q} m={m} j={j}");
            }
        }
    }
}

#[test]
fn hyperdiff_examples() {
    let ring = PolyRing::new(gf(2));
    let t = Poly::x();
    assert_eq!(hyperdiff_poly(&ring, 0, &t), t);
    assert!(hyperdiff_poly(&ring, 2, &t).is_zero());
    // D_1 D_1 = 2 D_2 = 0 in characteristic 2, while D_2(T^2) = 1
    let t2 = Poly::monomial(Fe::ONE, 2);
    assert!(hyperdiff_poly(&ring, 1, &hyperdiff_poly(&ring, 1, &t2)).is_zero());
    assert_eq!(hyperdiff_poly(&ring, 2, &t2), Poly::one());
    assert!(leibniz_check(&ring, 3, &vec![Poly::from_labels(&[1, 1, 0, 1]); 3]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn hyperdiff_identities(q in prop::sample::select(vec![2u32, 3, 4, 5]), seed in any::<u64>()) {
        let ring = PolyRing::new(gf(q));
        let p = ring.field().characteristic() as u64;
        let mut g = rng(seed);
        let f = random_poly(&mut g, q, 0..9);
        let h = random_poly(&mut g, q, 0..9);
        prop_assert_eq!(taylor_map(&ring, &f, 6), taylor_by_substitution(&ring, &f, 6));
        let fh = ring.mul(&f, &h);
        prop_assert_eq!(taylor_mul(&ring, &taylor_map(&ring, &f, 6), &taylor_map(&ring, &h, 6)), taylor_map(&ring, &fh, 6));
        for j in 0..=4u64 {
            prop_assert!(leibniz_check(&ring, j, &[f.clone(), h.clone(), Poly::from_labels(&[1, 2 % q, 1])]));
        }
        // D_i D_j = binom(i + j, i) D_(i+j)
        for i in 0..=3u64 {
            for j in 0..=3u64 {
                let lhs = hyperdiff_poly(&ring, i, &hyperdiff_poly(&ring, j, &f));
                let c = Fe(binom_mod_p((i + j) as i64, i, p as u32));
                prop_assert_eq!(lhs, ring.scale(&hyperdiff_poly(&ring, i + j, &f), c));
            }
        }
        // the p-fold iterate of D_1 vanishes
        let mut it = f.clone();
        for _ in 0..p {
            it = hyperdiff_poly(&ring, 1, &it);
        }
        prop_assert!(it.is_zero());
    }

    #[test]
    fn congruences_hold(seed in any::<u64>(), j in 0..4u64, extra in 0..3u64) {
        let ring = PolyRing::new(gf(3));
        let mut g = rng(seed);
        let f = random_poly(&mut g, 3, 1..4);
        prop_assume!(!f.is_zero());
        let h = random_poly(&mut g, 3, 3..4);
        let rep = congruence_checks(&ring, j, j + extra, &f, &h).unwrap();
        prop_assert!(rep.power_congruence);
        prop_assert!(rep.divisibility);
    }
}

#[test]
fn congruence_inputs_are_validated() {
    let ring = PolyRing::new(gf(2));
    assert!(congruence_checks(&ring, 3, 2, &Poly::x(), &Poly::one()).is_err());
    assert!(congruence_checks(&ring, 1, 2, &Poly::zero(), &Poly::one()).is_err());
}

#[test]
fn chain_rule_cases() {
    let k = at_pi();
    // f = 1 + pi: D_1 f = D_1 pi = pi' = 1 in characteristic 2
    let rep = chain_rule(&k, 1, &[Fe(1), Fe(1)], 4).unwrap();
    assert!(rep.agree);
    assert_eq!(rep.direct, k.elem(&Repr::Poly(Poly::one()), 4));
    let mut g = rng(17);
    for j in 0..=3 {
        for _ in 0..6 {
            let digits: Vec<Fe> = (0..5).map(|_| Fe(g.gen_range(0..4))).collect();
            assert!(chain_rule(&k, j, &digits, 4).unwrap().agree, "j={j} {digits:?}");
        }
    }
    assert!(chain_rule(&laurent(2), 1, &[Fe(1)], 3).is_err());
}
