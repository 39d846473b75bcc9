//! Deterministic pseudo-random homogeneous probe elements.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graded::{Key, Ring, Series};
use crate::scalar::Q;

/// Parameter exponent vectors of total deformation degree `<= n`.
fn param_indices(ring: &Ring, n: u32) -> Vec<Vec<u32>> {
    let k = ring.n_params();
    let mut out = vec![vec![0; k]];
    for i in 0..k {
        let mut next = Vec::new();
        for base in &out {
            for e in 0..=n {
                let mut v = base.clone();
                v[i] = e;
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().filter(|v| v.iter().sum::<u32>() <= n).collect()
}

/// `count` homogeneous elements of `ring` with monomials of polynomial
/// degree `<= max_poly`, 1–4 terms each, small rational coefficients.
/// Identical arguments give identical probes.
pub fn probes(ring: &Ring, count: usize, seed: u64, max_poly: u32) -> Vec<Series> {
    let mut by_degree: BTreeMap<i64, Vec<Key>> = BTreeMap::new();
    let params = param_indices(ring, ring.truncation().n_param);
    for mono in ring.algebra().monomials_up_to(max_poly) {
        for p in &params {
            for hbar in 0..=ring.cap().max(0) as i32 {
                let key = Key {
                    params: p.clone(),
                    hbar,
                    mono: mono.clone(),
                };
                if ring.keeps(&key) {
                    by_degree.entry(ring.key_degree(&key)).or_default().push(key);
                }
            }
        }
    }
    let degrees: Vec<&Vec<Key>> = by_degree.values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let keys = degrees[rng.random_range(0..degrees.len())];
            let mut s = Series::zero();
            for _ in 0..rng.random_range(1..=4) {
                let key = keys[rng.random_range(0..keys.len())].clone();
                let num: i64 = rng.random_range(-5..=5);
                let den: i64 = rng.random_range(1..=3);
                s.add_term(key, Q::new(num.into(), den.into()));
            }
            if s.is_zero() {
                s.add_term(keys[0].clone(), Q::from_integer(1.into()));
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::build_a1;
    use crate::graded::{ParamSpec, Truncation};

    #[test]
    fn deterministic_and_homogeneous() {
        let a1 = build_a1(Truncation::new(6, 3, 2));
        let ring = a1.ring().with_params(vec![ParamSpec::deformation("u", 0)]).unwrap();
        let a = probes(&ring, 20, 7, 6);
        assert_eq!(a, probes(&ring, 20, 7, 6));
        assert_ne!(a, probes(&ring, 20, 8, 6));
        for p in &a {
            assert!(!p.is_zero());
            assert!(ring.degree(p).is_ok());
            assert_eq!(&ring.truncate(p), p);
        }
    }
}
