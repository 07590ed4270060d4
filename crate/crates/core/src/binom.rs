//! Binomial coefficients modulo a prime via Lucas' theorem.

/// `binom(a, b) mod p` for `0 <= a, b < p`.
fn small_binom(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// `binom(m, j) mod p` for any integer `m`, using
/// `binom(m, j) = (-1)^j binom(j - m - 1, j)` when `m < 0`.
pub fn binom_mod_p(m: i64, j: u64, p: u32) -> u32 {
    let p = p as u64;
    if m < 0 {
        let b = binom_mod_p((j as i64) - m - 1, j, p as u32) as u64;
        return if j.is_multiple_of(2) { b as u32 } else { ((p - b) % p) as u32 };
    }
    let mut a = m as u64;
    let mut b = j;
    let mut acc = 1u64;
    while b > 0 {
        if a == 0 {
            return 0;
        }
        acc = acc * small_binom(a % p, b % p, p) % p;
        if acc == 0 {
            return 0;
        }
        a /= p;
        b /= p;
    }
    acc as u32
}

/// Base-`b` digits of `i`, least significant first.
pub fn digits(mut i: u64, b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while i > 0 {
        out.push(i % b);
        i /= b;
    }
    out
}

/// True when `i + j` has no carries in base `b`.
pub fn carry_free(i: u64, j: u64, b: u64) -> bool {
    let (mut x, mut y) = (i, j);
    while x > 0 || y > 0 {
        if x % b + y % b >= b {
            return false;
        }
        x /= b;
        y /= b;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(m: i64, j: u64) -> i128 {
        // falling product / j! over the integers
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for i in 0..j as i128 {
            num *= m as i128 - i;
            den *= i + 1;
        }
        num / den
    }

    #[test]
    fn agrees_with_integer_binomials() {
        for p in [2u32, 3, 5, 7] {
            for m in -12i64..=25 {
                for j in 0..=8u64 {
                    let e = exact(m, j).rem_euclid(p as i128) as u32;
                    assert_eq!(binom_mod_p(m, j, p), e, "binom({m},{j}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn seven_choose_two_mod_three() {
        assert_eq!(binom_mod_p(7, 2, 3), 0);
        assert_eq!(digits(7, 3), vec![1, 2]);
    }

    #[test]
    fn carries() {
        assert!(carry_free(1, 2, 2));
        assert!(!carry_free(1, 1, 2));
        assert!(carry_free(3, 5, 10));
    }
}
