//! Binomial coefficient functions on `Z_p`, the digit-binomial basis and the
//! triangular transition to Mahler's basis.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::binom::{binom_mod_p, digits};
use crate::digit::{BasisFamily, Mode, SeedFunctions};
use crate::error::{Error, Result};
use crate::local::{Kind, LocalField, LocalFieldSpec, Repr};

/// `binom(x, m)` exactly.
pub fn binomial(x: u128, m: u64) -> BigUint {
    if (m as u128) > x {
        return BigUint::zero();
    }
    let m = m.min((x - m as u128) as u64);
    let mut acc = BigUint::one();
    for i in 0..m as u128 {
        acc = acc * BigUint::from(x - i) / BigUint::from(i + 1);
    }
    acc
}

/// `binom(x, m) mod modulus`.
pub fn binomial_mod(x: u128, m: u64, modulus: u128) -> u128 {
    (binomial(x, m) % BigUint::from(modulus)).to_u128().unwrap()
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += n / pk;
        pk = match pk.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    v
}

/// `{x over m} = prod_j binom(x, p^j)^(c_j)` with `c_j` the base-`p` digits of `m`.
pub fn digit_binomial(x: u128, m: u64, p: u32) -> BigUint {
    digits(m, p as u64)
        .iter()
        .enumerate()
        .fold(BigUint::one(), |acc, (j, &c)| acc * binomial(x, (p as u64).pow(j as u32)).pow(c as u32))
}

/// `{x over m} mod p` from the digits `d_j` of `x`: `prod_j d_j^(c_j)`.
pub fn digit_binomial_reduction(x: u64, m: u64, p: u32) -> u32 {
    let p = p as u64;
    let dx = digits(x, p);
    digits(m, p).iter().enumerate().fold(1u64, |acc, (j, &c)| {
        let d = dx.get(j).copied().unwrap_or(0);
        acc * d.pow(c as u32) % p
    }) as u32
}

/// `binom(x, m) mod p` both ways: exactly, and as the Lucas digit product.
pub fn lucas_pair(x: u64, m: u64, p: u32) -> (u32, u32) {
    let exact = (binomial(x as u128, m) % BigUint::from(p)).to_u32().unwrap();
    (exact, binom_mod_p(x as i64, m, p))
}

/// Seeds `binom(x, p^j)` on `Z_p`.
#[derive(Clone, Debug, Default)]
pub struct DigitBinomialSeeds;

impl SeedFunctions for DigitBinomialSeeds {
    fn eval(&self, k: &LocalField, x: &Repr, count: usize, prec: i64) -> Result<Vec<Repr>> {
        if k.kind() != Kind::Padic {
            return Err(Error::invalid("digit-binomial seeds live on Z_p"));
        }
        let p = k.characteristic() as u64;
        let m = (p as u128).pow(prec as u32);
        let x = x.int();
        Ok((0..count as u32).map(|j| Repr::Int(binomial_mod(x, p.pow(j), m))).collect())
    }

    fn loss(&self, j: usize) -> i64 {
        j as i64
    }
}

/// Seeds `binom(x, p^j)`, digit base `p`, general mode.
pub fn digit_binomial_family(p: u32) -> Result<BasisFamily> {
    let k = LocalFieldSpec::padic(p).build()?;
    Ok(BasisFamily::new(k, p as u64, 1, Mode::General, "digit-binomial", Arc::new(DigitBinomialSeeds)))
}

/// Expansion of `{x over i}` in the binomial basis for `i < n`.
#[derive(Clone, Debug)]
pub struct MahlerTransition {
    pub p: u32,
    /// `matrix[i][k]` is the coefficient of `binom(x, k)` in `{x over i}`; lower triangular.
    pub matrix: Vec<Vec<BigInt>>,
    /// `v_p` of the diagonal entries.
    pub diagonal_valuations: Vec<u64>,
}

/// Finite differences at 0 give the coefficients of `{x over i}` in the binomial basis.
pub fn mahler_transition(p: u32, n: usize) -> MahlerTransition {
    let vals: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|t| BigInt::from(digit_binomial(t as u128, i as u64, p))).collect()).collect();
    let matrix: Vec<Vec<BigInt>> = vals
        .iter()
        .map(|row| {
            (0..n)
                .map(|k| {
                    (0..=k).fold(BigInt::zero(), |acc, t| {
                        let c = BigInt::from(binomial(k as u128, t as u64)) * &row[t];
                        if (k - t) % 2 == 0 {
                            acc + c
                        } else {
                            acc - c
                        }
                    })
                })
                .collect()
        })
        .collect();
    let diagonal_valuations = (0..n)
        .map(|i| {
            let mut d = matrix[i][i].abs();
            let mut v = 0;
            let pb = BigInt::from(p);
            while !d.is_zero() && (&d % &pb).is_zero() {
                d /= &pb;
                v += 1;
            }
            v
        })
        .collect();
    MahlerTransition { p, matrix, diagonal_valuations }
}

/// `v_p(i! / prod_j ((p^j)!)^(c_j))` by Legendre's formula.
pub fn mahler_diagonal_valuation(i: u64, p: u32) -> i64 {
    let p = p as u64;
    let digit_part: u64 =
        digits(i, p).iter().enumerate().map(|(j, &c)| c * factorial_valuation(p.pow(j as u32), p)).sum();
    factorial_valuation(i, p) as i64 - digit_part as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(7, 2), BigUint::from(21u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(lucas_pair(7, 2, 3), (0, 0));
    }

    #[test]
    fn digit_binomial_reduces_to_digit() {
        for p in [2u32, 3, 5] {
            for x in 0..(p as u64).pow(3) {
                for j in 0..3 {
                    let m = (p as u64).pow(j);
                    let v = (binomial(x as u128, m) % BigUint::from(p)).to_u64().unwrap();
                    assert_eq!(v, digits(x, p as u64).get(j as usize).copied().unwrap_or(0));
                }
            }
        }
    }

    #[test]
    fn transition_diagonal() {
        let t = mahler_transition(3, 12);
        for i in 0..12 {
            for k in i + 1..12 {
                assert!(t.matrix[i][k].is_zero());
            }
            assert_eq!(t.diagonal_valuations[i] as i64, mahler_diagonal_valuation(i as u64, 3));
        }
        assert_eq!(t.matrix[2][2], BigInt::from(2));
        assert_eq!(t.matrix[3][3], BigInt::from(1));
    }
}
