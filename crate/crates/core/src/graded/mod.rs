//! Graded-commutative algebras over the rationals, Koszul signs, and
//! truncated series in `h` and deformation parameters.
//!
//! One value type, [`Series`], carries every kind of element the rest of the
//! crate needs: plain algebra elements, `A[[h]]`, `A((h))` and parameter
//! series. What a series may contain is fixed by the [`Ring`] it lives in.

mod expr;
mod ring;
mod series;

pub use expr::{parse_monomial_rule, parse_operator, parse_series, render_series, OpLetter, OpWord};
pub use ring::{Key, ParamSpec, Ring, Truncation};
pub use series::Series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i64,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Self {
            name: name.into(),
            degree,
        }
    }
}

/// Generators of a free graded-commutative algebra together with the odd
/// integer `m` fixing the degree `1 - m` of `h`.
///
/// Generator order is the order given at construction; canonical monomials
/// list exponents in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    name: String,
    generators: Vec<GeneratorSpec>,
    m: i64,
}

pub(crate) const RESERVED_NAMES: &[&str] = &["h", "d"];

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Algebra {
    pub fn new(name: impl Into<String>, generators: Vec<GeneratorSpec>, m: i64) -> Result<Self> {
        if m.rem_euclid(2) != 1 {
            return Err(Error::InvalidAlgebra(format!("m = {m} must be odd")));
        }
        for (i, g) in generators.iter().enumerate() {
            if !valid_identifier(&g.name) || RESERVED_NAMES.contains(&g.name.as_str()) {
                return Err(Error::InvalidAlgebra(format!(
                    "generator name {:?} is not allowed",
                    g.name
                )));
            }
            if generators[..i].iter().any(|o| o.name == g.name) {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate generator {:?}",
                    g.name
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            generators,
            m,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// Degree of `h`, always even.
    pub fn hbar_degree(&self) -> i64 {
        1 - self.m
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn same_generators(&self, other: &Algebra) -> bool {
        self.generators == other.generators && self.m == other.m
    }

    /// All monomials with total exponent at most `max_poly_degree`, in
    /// graded-lex order. Odd generators appear with exponent 0 or 1.
    pub fn monomials_up_to(&self, max_poly_degree: u32) -> Vec<Vec<u32>> {
        let n = self.generators.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(
            alg: &Algebra,
            i: usize,
            remaining: u32,
            cur: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            let cap = if alg.generators[i].degree % 2 != 0 {
                remaining.min(1)
            } else {
                remaining
            };
            for e in 0..=cap {
                cur[i] = e;
                rec(alg, i + 1, remaining - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(self, 0, max_poly_degree, &mut cur, &mut out);
        out.sort_by(|a, b| monomial_cmp(a, b));
        out
    }

    pub fn monomial_degree(&self, exps: &[u32]) -> i64 {
        exps.iter()
            .zip(&self.generators)
            .map(|(&e, g)| e as i64 * g.degree)
            .sum()
    }
}

/// Graded-lex comparison of exponent vectors: total degree first, then
/// reverse-lex on exponents so that `t` precedes `dt` when `t` is listed first.
pub(crate) fn monomial_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// Sign of rearranging graded objects.
///
/// `perm[p]` is the original index of the object placed at position `p`.
/// The sign is the product of `(-1)^{d_i d_j}` over the inversions of `perm`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i32> {
    if perm.len() != degrees.len() {
        return Err(Error::LengthMismatch {
            perm: perm.len(),
            degrees: degrees.len(),
        });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::NotAPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(koszul_sign_unchecked(perm, degrees))
}

pub(crate) fn koszul_sign_unchecked(perm: &[usize], degrees: &[i64]) -> i32 {
    let mut odd_swaps = 0u32;
    for a in 0..perm.len() {
        if degrees[perm[a]] % 2 == 0 {
            continue;
        }
        for b in (a + 1)..perm.len() {
            if perm[a] > perm[b] && degrees[perm[b]] % 2 != 0 {
                odd_swaps += 1;
            }
        }
    }
    if odd_swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn koszul_sign_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 3]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 0]).unwrap(), 1);
    }

    #[test]
    fn koszul_sign_errors() {
        assert_eq!(
            koszul_sign(&[0, 1], &[1]),
            Err(Error::LengthMismatch {
                perm: 2,
                degrees: 1
            })
        );
        assert!(matches!(
            koszul_sign(&[0, 0], &[1, 1]),
            Err(Error::NotAPermutation(_))
        ));
    }

    #[test]
    fn algebra_validation() {
        assert!(Algebra::new("x", vec![], 2).is_err());
        assert!(Algebra::new("x", vec![GeneratorSpec::new("h", 0)], 1).is_err());
        assert!(Algebra::new(
            "x",
            vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("t", 1)],
            1
        )
        .is_err());
        assert!(Algebra::new("x", vec![GeneratorSpec::new("t", 0)], -3).is_ok());
    }

    #[test]
    fn monomial_enumeration_respects_odd_generators() {
        let a = Algebra::new(
            "A",
            vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("dt", -1)],
            1,
        )
        .unwrap();
        let ms = a.monomials_up_to(2);
        assert_eq!(
            ms,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1]]
        );
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn koszul_sign_is_multiplicative(
            (tau, sigma, degrees) in (1usize..7).prop_flat_map(|n| (
                perm_strategy(n),
                perm_strategy(n),
                proptest::collection::vec(-3i64..4, n),
            ))
        ) {
            // rearrange by tau, then by sigma
            let composite: Vec<usize> = sigma.iter().map(|&p| tau[p]).collect();
            let permuted: Vec<i64> = tau.iter().map(|&i| degrees[i]).collect();
            let lhs = koszul_sign(&composite, &degrees).unwrap();
            let rhs = koszul_sign(&tau, &degrees).unwrap() * koszul_sign(&sigma, &permuted).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
