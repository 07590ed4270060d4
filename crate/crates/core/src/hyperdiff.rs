//! Hyperdifferential operators `D_j`, with `D_j(T^m) = binom(m, j) T^(m-j)`.

use std::sync::Arc;

use crate::binom::binom_mod_p;
use crate::digit::{BasisFamily, Mode, SeedFunctions};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::local::{Kind, LocalElem, LocalField, Repr};
use crate::poly::{Poly, PolyRing};

/// `D_j(f)` on a polynomial over a field of characteristic `p`.
pub fn hyperdiff_poly(ring: &PolyRing, j: u64, f: &Poly) -> Poly {
    let k = ring.field();
    let p = k.characteristic();
    let c = f.coeffs();
    if (c.len() as u64) <= j {
        return Poly::zero();
    }
    Poly::new((j as usize..c.len()).map(|m| k.mul(c[m], Fe(binom_mod_p(m as i64, j, p)))).collect())
}

/// `sum_{j <= m} D_j(f) X^j`, returned as the coefficients of `X^0 .. X^m`.
pub fn taylor_map(ring: &PolyRing, f: &Poly, m: usize) -> Vec<Poly> {
    (0..=m as u64).map(|j| hyperdiff_poly(ring, j, f)).collect()
}

/// `f(T + X)` modulo `X^(m+1)`, by Horner substitution.
pub fn taylor_by_substitution(ring: &PolyRing, f: &Poly, m: usize) -> Vec<Poly> {
    let mut acc = vec![Poly::zero(); m + 1];
    for &c in f.coeffs().iter().rev() {
        // acc <- acc * (T + X) + c
        let mut next = vec![Poly::zero(); m + 1];
        for (j, a) in acc.iter().enumerate() {
            next[j] = ring.add(&next[j], &ring.mul(a, &Poly::x()));
            if j < m {
                next[j + 1] = ring.add(&next[j + 1], a);
            }
        }
        next[0] = ring.add(&next[0], &Poly::constant(c));
        acc = next;
    }
    acc
}

/// Product of two truncated Taylor images.
pub fn taylor_mul(ring: &PolyRing, a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let m = a.len().min(b.len());
    (0..m).map(|s| (0..=s).fold(Poly::zero(), |acc, t| ring.add(&acc, &ring.mul(&a[t], &b[s - t])))).collect()
}

/// `D_j(x)` for `x` in `F_q((T))`, term by term including negative exponents.
/// The result is known modulo `T^(prec - j)`.
pub fn hyperdiff_local(k: &LocalField, j: u64, x: &LocalElem) -> Result<LocalElem> {
    if k.kind() != Kind::Laurent {
        return Err(Error::invalid("hyperdiff_local expects a Laurent series field"));
    }
    let j = j as i64;
    if x.prec() <= j {
        return Err(Error::InsufficientPrecision { needed: j + 1, have: x.prec() });
    }
    let out_prec = x.prec() - j;
    if x.is_zero() {
        return Ok(k.elem_zero(out_prec));
    }
    let f = k.coeff_field();
    let p = f.characteristic();
    let unit = x.unit().poly();
    let start = x.val() - j;
    let coeffs: Vec<Fe> = (0..x.rel_prec())
        .map(|t| {
            let m = x.val() + t;
            f.mul(unit.coeff(t as usize), Fe(binom_mod_p(m, j as u64, p)))
        })
        .collect();
    Ok(k.elem_shifted(&Repr::Poly(Poly::new(coeffs)), start, out_prec))
}

/// Checks `D_j(f_1 ... f_m) = sum_{k_1 + ... + k_m = j} prod D_{k_l}(f_l)`.
pub fn leibniz_check(ring: &PolyRing, j: u64, factors: &[Poly]) -> bool {
    let product = factors.iter().fold(Poly::one(), |acc, f| ring.mul(&acc, f));
    let lhs = hyperdiff_poly(ring, j, &product);
    let j = j as usize;
    // partial[s] = sum over compositions of s among the factors seen so far
    let mut partial = vec![Poly::zero(); j + 1];
    partial[0] = Poly::one();
    for f in factors {
        let ds: Vec<Poly> = (0..=j as u64).map(|t| hyperdiff_poly(ring, t, f)).collect();
        partial = (0..=j)
            .map(|s| (0..=s).fold(Poly::zero(), |acc, t| ring.add(&acc, &ring.mul(&partial[s - t], &ds[t]))))
            .collect();
    }
    lhs == partial[j]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    /// `D_j(f^j) = (f')^j mod f`.
    pub power_congruence: bool,
    /// `D_j(f^n g) = 0 mod f^(n-j)`.
    pub divisibility: bool,
}

/// Verifies both congruences for `f`, the exponent `n >= j` and cofactor `g`.
pub fn congruence_checks(ring: &PolyRing, j: u64, n: u64, f: &Poly, g: &Poly) -> Result<CongruenceReport> {
    if n < j {
        return Err(Error::invalid(format!("need n >= j, got n = {n}, j = {j}")));
    }
    if f.is_zero() {
        return Err(Error::invalid("f must be nonzero"));
    }
    let lhs = hyperdiff_poly(ring, j, &ring.pow(f, j));
    let rhs = ring.pow(&ring.derivative(f), j);
    let power_congruence = ring.rem(&ring.sub(&lhs, &rhs), f).is_zero();
    let d = hyperdiff_poly(ring, j, &ring.mul(&ring.pow(f, n), g));
    let divisibility = ring.rem(&d, &ring.pow(f, n - j)).is_zero();
    Ok(CongruenceReport { power_congruence, divisibility })
}

/// Seeds `D_{j,T}` evaluated on polynomial representatives.
#[derive(Clone, Debug, Default)]
pub struct HyperdiffSeeds;

impl SeedFunctions for HyperdiffSeeds {
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        if k.kind() == Kind::Padic {
            return Err(Error::invalid("hyperdifferential seeds need characteristic p"));
        }
        let x = x.poly();
        Ok((0..count as u64).map(|j| k.reduce(&Repr::Poly(hyperdiff_poly(k.ring(), j, x)), prec)).collect())
    }

    fn loss(&self, j: usize) -> i64 {
        j as i64
    }
}

/// Seeds `D_j` on `F_q[[T]]`, digit base `q`, linear mode.
pub fn local_hyperdiff_family(q: u32) -> Result<BasisFamily> {
    hyperdiff_family_on(crate::local::LocalFieldSpec::laurent(q)?.build()?)
}

/// Seeds `D_{j,T}` on the completion at `pi`, digit base `r^d`, linear over `F_pi`.
pub fn completion_hyperdiff_family(r: u32, pi: &[u32]) -> Result<BasisFamily> {
    hyperdiff_family_on(crate::local::LocalFieldSpec::at_pi(r, pi)?.build()?)
}

pub fn hyperdiff_family_on(k: Arc<LocalField>) -> Result<BasisFamily> {
    let label = match k.kind() {
        Kind::Laurent => "hyperdiff",
        Kind::AtPi => "hyperdiff-at-pi",
        Kind::Padic => return Err(Error::invalid("hyperdifferential seeds need characteristic p")),
    };
    Ok(BasisFamily::new(k.clone(), k.q(), 1, Mode::Linear, label, Arc::new(HyperdiffSeeds)))
}

/// Compositions of `j` into `i` positive parts, summed over products of `D_{k_l}(pi)`:
/// entry `i` of the result is `sum_{k_1 + ... + k_i = j, k_l >= 1} prod_l D_{k_l}(pi)`.
fn composition_sums(ring: &PolyRing, pi: &Poly, j: usize) -> Vec<Poly> {
    let d: Vec<Poly> = (0..=j as u64).map(|t| hyperdiff_poly(ring, t, pi)).collect();
    // s[i][t]: compositions of t into i positive parts
    let mut s = vec![vec![Poly::zero(); j + 1]; j + 1];
    s[0][0] = Poly::one();
    for i in 1..=j {
        for t in i..=j {
            let mut acc = Poly::zero();
            for last in 1..=t - (i - 1) {
                acc = ring.add(&acc, &ring.mul(&s[i - 1][t - last], &d[last]));
            }
            s[i][t] = acc;
        }
    }
    (0..=j).map(|i| s[i][j].clone()).collect()
}

/// Both sides of the Teichmuller chain rule for `D_{j,T}(f(pi))`, where
/// `f(pi) = sum_k omega(a_k) pi^k` has Teichmuller digits `a_k`.
#[derive(Clone, Debug)]
pub struct ChainRuleReport {
    pub direct: LocalElem,
    pub via_chain_rule: LocalElem,
    pub agree: bool,
}

pub fn chain_rule(k: &LocalField, j: u64, digits: &[Fe], prec: i64) -> Result<ChainRuleReport> {
    if k.kind() != Kind::AtPi {
        return Err(Error::invalid("chain rule needs a completion at pi"));
    }
    if prec < 1 {
        return Err(Error::invalid("precision must be positive"));
    }
    let work = prec + j as i64;
    k.check_prec(work + digits.len() as i64)?;
    let ring = k.ring();
    let pi = k.pi_poly();
    let lift = |terms: &mut dyn Iterator<Item = (i64, Fe)>, n: i64| {
        let mut acc = k.zero();
        for (e, c) in terms {
            if c.is_zero() || e >= n {
                continue;
            }
            acc = k.add(&acc, &k.shift_up(&k.teichmuller(c, n), e, n), n);
        }
        acc
    };
    // direct: D_{j,T} applied to a representative of f(pi) modulo pi^(prec + j)
    let rep = lift(&mut digits.iter().enumerate().map(|(e, &c)| (e as i64, c)), work);
    let direct = k.reduce(&Repr::Poly(hyperdiff_poly(ring, j, rep.poly())), prec);

    let via = if j == 0 {
        k.reduce(&rep, prec)
    } else {
        let comps = composition_sums(ring, pi, j as usize);
        let p = k.characteristic();
        let f = k.residue_field();
        let mut acc = k.zero();
        for (i, comp) in comps.iter().enumerate().skip(1) {
            // D_{i,pi}(f) = sum_e binom(e, i) omega(a_e) pi^(e - i)
            let mut terms = digits
                .iter()
                .enumerate()
                .filter(|&(e, _)| e >= i)
                .map(|(e, &c)| (e as i64 - i as i64, f.mul(c, Fe(binom_mod_p(e as i64, i as u64, p)))));
            let di = lift(&mut terms, prec);
            acc = k.add(&acc, &k.mul(&di, &Repr::Poly(comp.clone()), prec), prec);
        }
        acc
    };
    let direct = k.elem(&direct, prec);
    let via_chain_rule = k.elem(&via, prec);
    let agree = direct == via_chain_rule;
    Ok(ChainRuleReport { direct, via_chain_rule, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gf;
    use crate::local::LocalFieldSpec;

    fn ring(p: u32) -> PolyRing {
        PolyRing::new(Arc::new(Gf::prime(p).unwrap()))
    }

    #[test]
    fn worked_example_over_f3() {
        let r = ring(3);
        let mut c = vec![0u32; 10];
        c[0] = 1;
        c[1] = 1;
        c[3] = 2;
        c[7] = 2;
        c[9] = 1;
        let d = hyperdiff_poly(&r, 3, &Poly::from_labels(&c));
        assert_eq!(d, Poly::from_labels(&[2, 0, 0, 0, 1]));
    }

    #[test]
    fn small_cases() {
        let r = ring(2);
        let f = Poly::from_labels(&[1, 1, 0, 1]);
        assert_eq!(hyperdiff_poly(&r, 0, &f), f);
        assert!(hyperdiff_poly(&r, 2, &Poly::x()).is_zero());
    }

    #[test]
    fn taylor_of_t_is_t_plus_x() {
        let r = ring(5);
        let t = taylor_map(&r, &Poly::x(), 3);
        assert_eq!(t[0], Poly::x());
        assert_eq!(t[1], Poly::one());
        assert!(t[2].is_zero());
        let f = Poly::from_labels(&[3, 0, 1, 4, 0, 2]);
        assert_eq!(taylor_map(&r, &f, 6), taylor_by_substitution(&r, &f, 6));
    }

    #[test]
    fn local_examples() {
        let k = LocalFieldSpec::laurent(3).unwrap().build().unwrap();
        let inv_t = k.elem_one(6).shift(-1);
        let d = hyperdiff_local(&k, 1, &inv_t).unwrap();
        let expected = k.elem_int(-1, 7).shift(-2).truncate(&k, 4);
        assert_eq!(d, expected);
        assert_eq!(d.prec(), 4);

        let c = k.elem_int(2, 6);
        assert!(hyperdiff_local(&k, 2, &c).unwrap().is_zero());

        let t5 = k.elem(&k.pi_pow(5), 9);
        let d = hyperdiff_local(&k, 2, &t5).unwrap();
        assert_eq!(d, k.elem(&k.pi_pow(3), 7));

        assert!(matches!(hyperdiff_local(&k, 6, &c), Err(Error::InsufficientPrecision { .. })));
    }

    #[test]
    fn congruences_for_t_and_pi() {
        let r = ring(2);
        let g = Poly::from_labels(&[1, 0, 1, 1]);
        for j in 0..4 {
            let rep = congruence_checks(&r, j, 5, &Poly::x(), &g).unwrap();
            assert!(rep.power_congruence && rep.divisibility);
        }
        let pi = Poly::from_labels(&[1, 1, 1]);
        let rep = congruence_checks(&r, 1, 3, &pi, &g).unwrap();
        assert!(rep.power_congruence && rep.divisibility);
        assert_eq!(r.derivative(&pi), Poly::one());
    }

    #[test]
    fn chain_rule_first_order_and_example() {
        let k = LocalFieldSpec::at_pi(2, &[1, 1, 1]).unwrap().build().unwrap();
        // f(pi) = 1 + pi
        let rep = chain_rule(&k, 2, &[Fe(1), Fe(1)], 3).unwrap();
        assert!(rep.agree);
        let rep = chain_rule(&k, 1, &[Fe(2), Fe(3), Fe(1)], 4).unwrap();
        assert!(rep.agree);
    }
}
