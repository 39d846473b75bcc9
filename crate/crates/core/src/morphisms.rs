//! BV∞ morphisms `f = Σ f_k h^k`, cumulants, and the induced L∞[1]
//! morphism components.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::{koszul_sign_unchecked, render_series, Key, ParamSpec, Ring, Series};
use crate::operators::{BvInstance, LinearOp, SweepRange};
use crate::operators::bracket_support::{degrees, monomial_tuples, product, render_tuple};
use crate::report::{Check, Report};
use crate::scalar::{factorial, sign_q, Q};

/// Per `h`-power, a table monomial → target element (parameter-free).
/// Unlisted monomials map to zero.
#[derive(Clone, Debug, Default)]
pub struct LinearRuleMap {
    pub rules: Vec<BTreeMap<Vec<u32>, Series>>,
}

impl LinearRuleMap {
    pub fn is_strict(&self) -> bool {
        self.rules
            .iter()
            .skip(1)
            .all(|t| t.values().all(Series::is_zero))
    }

    pub fn has_rule(&self, mono: &[u32]) -> bool {
        self.rules.iter().any(|t| t.contains_key(mono))
    }
}

/// A candidate BV∞ morphism between two instances.
#[derive(Clone, Debug)]
pub struct BvMorphism {
    pub source: BvInstance,
    pub target: BvInstance,
    pub map: LinearRuleMap,
}

impl BvMorphism {
    /// Validates degrees: `f_k` has degree `k(m − 1)`.
    pub fn new(source: BvInstance, target: BvInstance, map: LinearRuleMap) -> Result<Self> {
        if source.algebra.m() != target.algebra.m() {
            return Err(Error::DegreeMismatch(format!(
                "source has m = {}, target has m = {}",
                source.algebra.m(),
                target.algebra.m()
            )));
        }
        let tr = target.ring();
        for (k, table) in map.rules.iter().enumerate() {
            let shift = k as i64 * (source.algebra.m() - 1);
            for (mono, v) in table {
                if mono.len() != source.algebra.generators().len() {
                    return Err(Error::GeneratorMismatch(format!(
                        "rule monomial {mono:?} does not match the source generators"
                    )));
                }
                if let Some(d) = tr.degree(v)? {
                    let expect = source.algebra.monomial_degree(mono) + shift;
                    if d != expect {
                        return Err(Error::DegreeMismatch(format!(
                            "f_{k} sends a monomial of degree {} to {} of degree {d}",
                            source.algebra.monomial_degree(mono),
                            render_series(&tr, v)
                        )));
                    }
                }
            }
        }
        Ok(Self {
            source,
            target,
            map,
        })
    }

    /// The target ring matching a source ring (same parameters and cap).
    pub fn target_ring(&self, source_ring: &Ring) -> Result<Ring> {
        source_ring.over(self.target.algebra.clone())
    }

    pub fn identity(inst: &BvInstance) -> Self {
        let mut table = BTreeMap::new();
        for m in inst.algebra.monomials_up_to(inst.truncation.n_poly) {
            table.insert(m.clone(), inst.ring().monomial(&m));
        }
        Self {
            source: inst.clone(),
            target: inst.clone(),
            map: LinearRuleMap { rules: vec![table] },
        }
    }

    /// `f_k` alone, without the `h^k` factor.
    pub fn apply_component(&self, k: usize, src: &Ring, tgt: &Ring, s: &Series) -> Result<Series> {
        src.check_shape(s)?;
        let mut out = Series::zero();
        let Some(table) = self.map.rules.get(k) else {
            return Ok(out);
        };
        for (key, c) in s.terms() {
            if let Some(v) = table.get(&key.mono) {
                let prefix = Series::from_term(
                    Key {
                        params: key.params.clone(),
                        hbar: key.hbar,
                        mono: vec![0; tgt.n_gens()],
                    },
                    c.clone(),
                );
                out += tgt.mul(&prefix, &tgt.from_plain(v));
            }
        }
        Ok(out)
    }
}

/// `f(s) = Σ_k h^k f_k(s)`, linear over `h` and parameters.
pub fn apply_morphism(f: &BvMorphism, src: &Ring, tgt: &Ring, s: &Series) -> Result<Series> {
    if tgt.n_params() != src.n_params() || tgt.params() != src.params() {
        return Err(Error::GeneratorMismatch(
            "source and target rings carry different parameters".into(),
        ));
    }
    let mut out = Series::zero();
    for k in 0..f.map.rules.len() {
        let cap = tgt.cap() - k as i64;
        let part = s.filter(|key| src.weight(key) <= cap);
        if part.is_zero() {
            continue;
        }
        out += tgt.mul_hbar(&f.apply_component(k, src, tgt, &part)?, k as i32);
    }
    Ok(out)
}

/// A linear map between rings over two algebras, sending 1 to 1.
pub trait UnitalMap: Sync {
    fn apply_map(&self, src: &Ring, tgt: &Ring, s: &Series) -> Result<Series>;
}

impl UnitalMap for BvMorphism {
    fn apply_map(&self, src: &Ring, tgt: &Ring, s: &Series) -> Result<Series> {
        apply_morphism(self, src, tgt, s)
    }
}

/// Set partitions of `{0..n}` as restricted-growth strings.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let n = rgs.len();
        if i == n {
            let blocks = max;
            let mut parts = vec![Vec::new(); blocks];
            for (j, &b) in rgs.iter().enumerate() {
                parts[b].push(j);
            }
            out.push(parts);
            return;
        }
        for b in 0..=max {
            rgs[i] = b;
            rec(i + 1, max.max(b + 1), rgs, out);
        }
    }
    if n > 0 {
        rec(0, 0, &mut rgs, &mut out);
    }
    out
}

/// Cumulant as the partition sum with weights `(−1)^{k−1}(k−1)!`.
pub fn cumulant_partition(f: &dyn UnitalMap, src: &Ring, tgt: &Ring, args: &[Series]) -> Result<Series> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let degs = degrees(src, args)?;
    let mut out = Series::zero();
    for blocks in set_partitions(n) {
        let k = blocks.len();
        let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
        let sign = koszul_sign_unchecked(&perm, &degs) * if (k - 1) % 2 == 1 { -1 } else { 1 };
        let mut term = tgt.one();
        for b in &blocks {
            let inner = product(src, b.iter().map(|&i| args[i].clone()));
            term = tgt.mul(&term, &f.apply_map(src, tgt, &inner)?);
            if term.is_zero() {
                break;
            }
        }
        let w = Q::from_integer(factorial(k as u32 - 1)) * sign_q(sign < 0);
        out += term.scale(&w);
    }
    Ok(out)
}

fn probe_params(degs: &[i64]) -> Vec<ParamSpec> {
    degs.iter()
        .enumerate()
        .map(|(i, d)| ParamSpec::probe(format!("_J{}", i + 1), -d))
        .collect()
}

/// Cumulant as the `J_1 ⋯ J_n` coefficient of `log f(e^{Σ J_i a_i})`.
pub fn cumulant_generating(f: &dyn UnitalMap, src: &Ring, tgt: &Ring, args: &[Series]) -> Result<Series> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let degs = degrees(src, args)?;
    let probes = probe_params(&degs);
    let src_j = src.with_leading_params(probes.clone())?;
    let tgt_j = tgt.with_leading_params(probes)?;
    let mut x = Series::zero();
    for (i, a) in args.iter().enumerate() {
        x += src_j.mul(&src_j.param(i), &src.embed_into(&src_j, a)?);
    }
    let e = src_j.exp(&x)?;
    let l = tgt_j.log(&f.apply_map(&src_j, &tgt_j, &e)?)?;
    let mut out = Series::zero();
    for (k, c) in l.terms() {
        if k.params[..n].iter().all(|&e| e == 1) {
            out.add_term(
                Key {
                    params: k.params[n..].to_vec(),
                    hbar: k.hbar,
                    mono: k.mono.clone(),
                },
                c.clone(),
            );
        }
    }
    // J_1 a_1 ⋯ J_n a_n reordered to J_1 ⋯ J_n a_1 ⋯ a_n; the J's are
    // extracted from the left
    let mut odd_pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if (degs[i] * degs[j]).rem_euclid(2) == 1 {
                odd_pairs += 1;
            }
        }
    }
    Ok(out.scale(&sign_q(odd_pairs % 2 == 1)))
}

/// Cumulant computed both ways; errors if they differ.
pub fn cumulant_n(f: &dyn UnitalMap, src: &Ring, tgt: &Ring, args: &[Series]) -> Result<Series> {
    let a = cumulant_partition(f, src, tgt, args)?;
    let b = cumulant_generating(f, src, tgt, args)?;
    if a != b {
        return Err(Error::RouteDisagreement {
            what: format!("cumulant kappa_{}", args.len()),
            detail: format!(
                "partition sum {} vs generating function {}",
                render_series(tgt, &a),
                render_series(tgt, &b)
            ),
        });
    }
    Ok(a)
}

/// `F_n = h^{1−n} κ_n(f)`; pole-free on pole-free arguments.
pub fn linf_component_n(f: &dyn UnitalMap, src: &Ring, tgt: &Ring, args: &[Series]) -> Result<Series> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let shift = n as i64 - 1;
    let src_w = src.with_extra_precision(shift);
    let tgt_w = tgt.with_extra_precision(shift);
    let k = cumulant_n(f, &src_w, &tgt_w, args)?;
    if args.iter().all(Series::is_pole_free) {
        if let Some(low) = k.min_hbar() {
            if (low as i64) < shift {
                return Err(Error::Divisibility {
                    power: shift as u32,
                    detail: format!("kappa_{n}{} = {}", render_tuple(src, args), render_series(tgt, &k)),
                });
            }
        }
    }
    Ok(tgt.truncate(&k.shift_hbar(-(shift as i32))))
}

/// Unit, chain-map, cumulant condition, and the two lowest-order expanded
/// identities as spot checks.
pub fn verify_morphism(f: &BvMorphism, sweep: SweepRange) -> Report {
    let src = f.source.ring();
    let tgt = match f.target_ring(&src) {
        Ok(r) => r,
        Err(e) => {
            let mut rep = Report::new("morphism", f.source.truncation);
            rep.push(Check::fail("rings", e.to_string()));
            return rep;
        }
    };
    let t = f.source.truncation;
    let mut rep = Report::new(
        format!("morphism:{}->{}", f.source.name(), f.target.name()),
        t,
    );

    rep.push(match apply_morphism(f, &src, &tgt, &src.one()) {
        Ok(v) if v == tgt.one() => Check::pass("f(1) = 1"),
        Ok(v) => Check::fail("f(1) = 1", render_series(&tgt, &v)),
        Err(e) => Check::fail("f(1) = 1", e.to_string()),
    });

    let monos = f.source.algebra.monomials_up_to(t.n_poly);
    let touched: BTreeSet<Vec<u32>> = monos
        .iter()
        .flat_map(|m| {
            let mut v = vec![m.clone()];
            if let Ok(d) = f.source.delta.apply(&src, &src.monomial(m)) {
                v.extend(d.terms().map(|(k, _)| k.mono.clone()));
            }
            v
        })
        .collect();
    for m in touched.iter().filter(|m| !f.map.has_rule(m)) {
        rep.warnings.push(format!(
            "chain-map check touches {} which has no explicit rule (read as 0)",
            render_series(&src, &src.monomial(m))
        ));
    }
    let witness = monos.par_iter().find_map_first(|m| {
        let x = src.monomial(m);
        let lhs = f
            .source
            .delta
            .apply(&src, &x)
            .and_then(|d| apply_morphism(f, &src, &tgt, &d));
        let rhs = apply_morphism(f, &src, &tgt, &x).and_then(|y| f.target.delta.apply(&tgt, &y));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => None,
            (Ok(a), Ok(b)) => Some(format!(
                "at {}: f(delta x) = {} but delta'(f x) = {}",
                render_series(&src, &x),
                render_series(&tgt, &a),
                render_series(&tgt, &b)
            )),
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        }
    });
    rep.push(Check::from_witness("chain map", witness).with_range(format!(
        "{} monomials of polynomial degree <= {}, h-orders <= {}",
        monos.len(),
        t.n_poly,
        src.cap()
    )));

    for n in 2..=sweep.n_max {
        let tuples = monomial_tuples(&f.source.algebra, n, sweep.max_total_degree);
        let witness = tuples.par_iter().find_map_first(|tuple| {
            let args: Vec<Series> = tuple.iter().map(|m| src.monomial(m)).collect();
            match cumulant_partition(f, &src, &tgt, &args) {
                Ok(v) => {
                    let low = v.filter(|k| (k.hbar as i64) < n as i64 - 1);
                    (!low.is_zero()).then(|| {
                        format!(
                            "kappa_{n}{} = {}",
                            render_tuple(&src, &args),
                            render_series(&tgt, &v)
                        )
                    })
                }
                Err(e) => Some(e.to_string()),
            }
        });
        rep.push(
            Check::from_witness(format!("cumulant condition n={n}"), witness).with_range(format!(
                "{} tuples of {n} non-unit monomials with total polynomial degree <= {}",
                tuples.len(),
                sweep.max_total_degree
            )),
        );
    }

    rep.push(low_order_identities(f, &src, &tgt, sweep.max_total_degree));
    rep
}

/// `f_0(ab) = f_0(a) f_0(b)` on pairs and the six-term `f_1` identity on
/// triples of monomials.
fn low_order_identities(f: &BvMorphism, src: &Ring, tgt: &Ring, max_total: u32) -> Check {
    let f0 = |x: &Series| f.apply_component(0, src, tgt, x);
    let f1 = |x: &Series| f.apply_component(1, src, tgt, x);
    let pairs = monomial_tuples(&f.source.algebra, 2, max_total);
    for p in &pairs {
        let (a, b) = (src.monomial(&p[0]), src.monomial(&p[1]));
        let lhs = f0(&src.mul(&a, &b));
        let rhs = f0(&a).and_then(|x| Ok(tgt.mul(&x, &f0(&b)?)));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            (Ok(l), Ok(r)) => {
                return Check::fail(
                    "low-order identities",
                    format!(
                        "f_0 not multiplicative on {}: {} vs {}",
                        render_tuple(src, &[a, b]),
                        render_series(tgt, &l),
                        render_series(tgt, &r)
                    ),
                )
            }
            (Err(e), _) | (_, Err(e)) => return Check::fail("low-order identities", e.to_string()),
        }
    }
    let triples = monomial_tuples(&f.source.algebra, 3, max_total);
    let six_term = |a: &Series, b: &Series, c: &Series| -> Result<Series> {
        let d = |x: &Series| src.degree_or(x, 0);
        let (da, db, dc) = (d(a)?, d(b)?, d(c)?);
        let s = |e: i64| sign_q(e.rem_euclid(2) == 1);
        let m = |x: &Series, y: &Series| tgt.mul(x, y);
        let mut rhs = m(&f1(&src.mul(a, b))?, &f0(c)?);
        rhs += m(&f1(&src.mul(a, c))?, &f0(b)?).scale(&s(db * dc));
        rhs += m(&f1(&src.mul(b, c))?, &f0(a)?).scale(&s(da * (db + dc)));
        rhs -= m(&m(&f1(a)?, &f0(b)?), &f0(c)?);
        rhs -= m(&m(&f1(b)?, &f0(a)?), &f0(c)?).scale(&s(da * db));
        rhs -= m(&m(&f1(c)?, &f0(a)?), &f0(b)?).scale(&s(dc * (da + db)));
        Ok(f1(&product(src, [a.clone(), b.clone(), c.clone()]))? - rhs)
    };
    for tr in &triples {
        let xs: Vec<Series> = tr.iter().map(|m| src.monomial(m)).collect();
        match six_term(&xs[0], &xs[1], &xs[2]) {
            Ok(v) if v.is_zero() => {}
            Ok(v) => {
                return Check::fail(
                    "low-order identities",
                    format!(
                        "six-term f_1 identity fails on {}: defect {}",
                        render_tuple(src, &xs),
                        render_series(tgt, &v)
                    ),
                )
            }
            Err(e) => return Check::fail("low-order identities", e.to_string()),
        }
    }
    Check::pass("low-order identities").with_range(format!(
        "{} pairs and {} triples with total polynomial degree <= {max_total}",
        pairs.len(),
        triples.len()
    ))
}

/// `h`-coefficients of the scalar (generator-free, parameter-free) part.
pub fn scalar_coefficients(s: &Series) -> BTreeMap<i32, Q> {
    let mut out = BTreeMap::new();
    for (k, c) in s.terms() {
        if k.mono_is_unit() && k.params.iter().all(|&e| e == 0) {
            let e = out.entry(k.hbar).or_insert_with(Q::zero);
            *e += c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        for p in set_partitions(4) {
            // blocks ordered by their minimum
            let mins: Vec<usize> = p.iter().map(|b| b[0]).collect();
            let mut sorted = mins.clone();
            sorted.sort();
            assert_eq!(mins, sorted);
        }
    }
}
