//! The A₁ Landau–Ginzburg example (`W = t²/2`), its one-point target, the
//! A₂ companion (`W = t³/3`), and combinatorial oracles that share no code
//! with the cumulant machinery.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::Result;
use crate::graded::{Algebra, GeneratorSpec, Ring, Series, Truncation};
use crate::morphisms::{BvMorphism, LinearRuleMap};
use crate::operators::{BvInstance, Component, HbarOperator, PolyDiffOperator};
use crate::scalar::{double_factorial_odd, Q};

/// `K[t] ⊕ K[t]∂_t` with `deg t = 0`, `deg ∂_t = −1`, `m = 1`.
pub fn polyvector_algebra(name: &str) -> Arc<Algebra> {
    Arc::new(
        Algebra::new(
            name,
            vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("dt", -1)],
            1,
        )
        .expect("valid generators"),
    )
}

fn bv_from_text(alg: Arc<Algebra>, components: &[&str], trunc: Truncation) -> BvInstance {
    let plain = Ring::plain(alg.clone(), trunc);
    let comps = components
        .iter()
        .enumerate()
        .map(|(k, text)| {
            let deg = HbarOperator::component_degree(&alg, k);
            Component::Poly(PolyDiffOperator::parse(&plain, text, Some(deg)).expect("fixture operator"))
        })
        .collect();
    let delta = HbarOperator::new(&alg, comps).expect("fixture degrees");
    BvInstance::new(alg, delta, trunc)
}

/// `Δ_0 = {W, −}`: `g ↦ 0`, `g∂_t ↦ t g`; `Δ_1 = ∂`: `g∂_t ↦ g'`.
pub fn build_a1(trunc: Truncation) -> BvInstance {
    bv_from_text(polyvector_algebra("A1"), &["t * d/ddt", "d/dt d/ddt"], trunc)
}

/// A₁ with `Δ_1` replaced by `g∂_t ↦ g'''`, which violates the order bound.
pub fn build_a1_mutated(trunc: Truncation) -> BvInstance {
    bv_from_text(
        polyvector_algebra("A1-mutated"),
        &["t * d/ddt", "d/dt d/dt d/dt d/ddt"],
        trunc,
    )
}

/// `W = t³/3`: `Δ_0(g∂_t) = t² g`, `Δ_1 = ∂`.
pub fn build_a2(trunc: Truncation) -> BvInstance {
    bv_from_text(polyvector_algebra("A2"), &["t^2 * d/ddt", "d/dt d/ddt"], trunc)
}

/// The ground field with the zero operator.
pub fn build_b(trunc: Truncation) -> BvInstance {
    let alg = Arc::new(Algebra::new("B", Vec::new(), 1).expect("no generators"));
    BvInstance::new(alg, HbarOperator::zero(), trunc)
}

/// `f_i(t^k) = (−1)^i δ_{k,2i} (2i−1)!!`, `f_i(g∂_t) = 0`. Every monomial of
/// the window gets an explicit rule.
pub fn a1_to_b(source: &BvInstance, target: &BvInstance) -> Result<BvMorphism> {
    let n_poly = source.truncation.n_poly;
    // every nonzero component inside the polynomial window: twisting feeds
    // `h^{-k}` terms through f, so components above the `h` cap still matter
    let n_tables = (n_poly as usize / 2 + 1).max(source.ring().cap().max(0) as usize + 1);
    let tgt = target.ring();
    let mut rules: Vec<BTreeMap<Vec<u32>, Series>> = vec![BTreeMap::new(); n_tables];
    for m in source.algebra.monomials_up_to(n_poly) {
        let (a, odd) = (m[0], m[1]);
        let i = a as usize / 2;
        if odd == 0 && a % 2 == 0 && i < n_tables {
            let mut c = Q::from_integer(double_factorial_odd(i as u32));
            if i % 2 == 1 {
                c = -c;
            }
            rules[i].insert(m.clone(), tgt.scalar(c));
            if i > 0 {
                rules[0].insert(m, Series::zero());
            }
        } else {
            rules[0].insert(m, Series::zero());
        }
    }
    BvMorphism::new(source.clone(), target.clone(), LinearRuleMap { rules })
}

/// The A₁ source, B target, and morphism at one truncation.
pub struct A1Bundle {
    pub source: BvInstance,
    pub target: BvInstance,
    pub morphism: BvMorphism,
}

pub fn a1_bundle(trunc: Truncation) -> A1Bundle {
    let source = build_a1(trunc);
    let target = build_b(trunc);
    let morphism = a1_to_b(&source, &target).expect("fixture morphism");
    A1Bundle {
        source,
        target,
        morphism,
    }
}

/// Number of perfect matchings of `2k` labelled points, by enumeration.
fn count_matchings(points: &mut Vec<usize>) -> BigInt {
    if points.is_empty() {
        return BigInt::one();
    }
    let first = points.remove(0);
    let mut total = BigInt::from(0);
    for j in 0..points.len() {
        let partner = points.remove(j);
        total += count_matchings(points);
        points.insert(j, partner);
    }
    points.insert(0, first);
    total
}

/// Gaussian moment of `t^{2k}`: (number of perfect matchings)·(−h)^k, as an
/// element of `ring` (truncated there).
pub fn wick_moment(ring: &Ring, k: u32) -> Series {
    let mut pts: Vec<usize> = (0..2 * k as usize).collect();
    let mut c = Q::from_integer(count_matchings(&mut pts));
    if k % 2 == 1 {
        c = -c;
    }
    ring.hbar_pow(k as i32).scale(&c)
}

/// Connected Feynman sum for `κ_n(f)(t^{a_1}, …, t^{a_n})`: perfect
/// matchings of all legs whose vertex multigraph is connected, each edge
/// weighted by `−h`.
pub fn connected_cumulant_oracle(ring: &Ring, exps: &[u32]) -> Series {
    let owner: Vec<usize> = exps
        .iter()
        .enumerate()
        .flat_map(|(v, &a)| std::iter::repeat(v).take(a as usize))
        .collect();
    let n = exps.len();
    if owner.len() % 2 == 1 || n == 0 {
        return Series::zero();
    }
    let mut count = BigInt::from(0);
    let mut legs: Vec<usize> = (0..owner.len()).collect();
    let mut edges = Vec::new();
    enumerate_matchings(&mut legs, &mut edges, &mut |es: &[(usize, usize)]| {
        if connected(n, es.iter().map(|&(a, b)| (owner[a], owner[b]))) {
            count += 1;
        }
    });
    let e = owner.len() / 2;
    let mut c = Q::from_integer(count);
    if e % 2 == 1 {
        c = -c;
    }
    ring.hbar_pow(e as i32).scale(&c)
}

fn enumerate_matchings(
    legs: &mut Vec<usize>,
    edges: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    if legs.is_empty() {
        visit(edges);
        return;
    }
    let first = legs.remove(0);
    for j in 0..legs.len() {
        let partner = legs.remove(j);
        edges.push((first, partner));
        enumerate_matchings(legs, edges, visit);
        edges.pop();
        legs.insert(j, partner);
    }
    legs.insert(0, first);
}

fn connected(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}
