#![allow(dead_code)]

use std::sync::Arc;

use digitbasis::carlitz::{global_carlitz_family, local_carlitz_family};
use digitbasis::charzero::digit_binomial_family;
use digitbasis::hyperdiff::{completion_hyperdiff_family, local_hyperdiff_family};
use digitbasis::lubin_tate::{lubin_tate_family, LubinTateGroup};
use digitbasis::tate::baker_family;
use digitbasis::{BasisFamily, Fe, FunctionTable, Gf, LocalElem, LocalField, LocalFieldSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PI: [u32; 3] = [1, 1, 1];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn laurent(q: u32) -> Arc<LocalField> {
    LocalFieldSpec::laurent(q).unwrap().build().unwrap()
}

pub fn padic(p: u32) -> Arc<LocalField> {
    LocalFieldSpec::padic(p).build().unwrap()
}

pub fn at_pi() -> Arc<LocalField> {
    LocalFieldSpec::at_pi(2, &PI).unwrap().build().unwrap()
}

/// Rank over a finite field by plain row reduction, written independently of the library.
pub fn oracle_rank(f: &Gf, rows: &[Vec<Fe>]) -> usize {
    let mut m: Vec<Vec<Fe>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = f.inv(m[rank][c]).unwrap();
        for r in 0..m.len() {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let factor = f.mul(m[r][c], inv);
            for k in c..cols {
                let t = f.mul(factor, m[rank][k]);
                m[r][k] = f.sub(m[r][k], t);
            }
        }
        rank += 1;
    }
    rank
}

/// A random element of `O` known modulo `pi^prec`, scaled by `pi^shift`.
pub fn random_elem(k: &LocalField, rng: &mut ChaCha8Rng, prec: i64, shift: i64) -> LocalElem {
    let rel = (prec - shift).max(0) as u32;
    let idx = rng.gen_range(0..k.num_points(rel).unwrap());
    k.elem_shifted(&k.canonical_rep(idx, rel), shift, prec)
}

pub fn random_table(k: &Arc<LocalField>, rng: &mut ChaCha8Rng, level: u32, prec: i64) -> FunctionTable {
    let shift = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..3) };
    let n = k.num_points(level).unwrap();
    let values = (0..n).map(|_| random_elem(k, rng, prec, shift)).collect();
    FunctionTable::new(k.clone(), level, prec, values).unwrap()
}

/// Every family and level named in the certification suite.
pub fn certification_suite() -> Vec<(BasisFamily, u32)> {
    let mut out = Vec::new();
    for q in [2, 3, 4] {
        for n in 1..=3 {
            out.push((local_carlitz_family(q).unwrap(), n));
        }
    }
    for q in [2, 3] {
        for n in 1..=4 {
            out.push((local_hyperdiff_family(q).unwrap(), n));
        }
    }
    for k in [laurent(2), laurent(3), padic(2), padic(3), padic(5), at_pi()] {
        for n in 1..=3 {
            out.push((baker_family(k.clone()), n));
        }
    }
    for p in [2, 3, 5] {
        for n in 1..=3 {
            out.push((digit_binomial_family(p).unwrap(), n));
        }
    }
    for n in 1..=2 {
        out.push((global_carlitz_family(2, &PI).unwrap(), n));
        out.push((completion_hyperdiff_family(2, &PI).unwrap(), n));
    }
    for k in [padic(2), padic(3), laurent(2)] {
        let q = k.q() as usize;
        let group = LubinTateGroup::standard(k, q * q).unwrap();
        out.push((lubin_tate_family(Arc::new(group)), 2));
    }
    out
}
