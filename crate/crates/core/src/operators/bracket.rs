use std::sync::Arc;

use rayon::prelude::*;

use super::{ad_tower, HbarOperator, LinearOp};
use crate::error::{Error, Result};
use crate::graded::{koszul_sign_unchecked, render_series, Algebra, Ring, Series, Truncation};
use crate::report::{Check, Report};
use crate::scalar::sign_q;

/// A BV∞ algebra on a free graded-commutative algebra, at a truncation.
#[derive(Clone, Debug)]
pub struct BvInstance {
    pub algebra: Arc<Algebra>,
    pub delta: HbarOperator,
    pub truncation: Truncation,
}

impl BvInstance {
    pub fn new(algebra: Arc<Algebra>, delta: HbarOperator, truncation: Truncation) -> Self {
        Self {
            algebra,
            delta,
            truncation,
        }
    }

    pub fn name(&self) -> &str {
        self.algebra.name()
    }

    pub fn ring(&self) -> Ring {
        Ring::plain(self.algebra.clone(), self.truncation)
    }

    pub fn with_truncation(&self, truncation: Truncation) -> Self {
        Self {
            truncation,
            ..self.clone()
        }
    }
}

/// Tuple sweep bounds for universally quantified axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepRange {
    /// Largest arity checked.
    pub n_max: usize,
    /// Bound on the total polynomial degree of a tuple.
    pub max_total_degree: u32,
}

impl SweepRange {
    pub fn new(n_max: usize, max_total_degree: u32) -> Self {
        Self {
            n_max,
            max_total_degree,
        }
    }
}

/// Multisets of `n` non-unit monomials with total polynomial degree at most
/// `max_total`, as non-decreasing index tuples into `monomials_up_to`.
pub(crate) fn monomial_tuples(alg: &Algebra, n: usize, max_total: u32) -> Vec<Vec<Vec<u32>>> {
    let monos: Vec<Vec<u32>> = alg
        .monomials_up_to(max_total)
        .into_iter()
        .filter(|m| m.iter().any(|&e| e > 0))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        monos: &[Vec<u32>],
        n: usize,
        start: usize,
        budget: u32,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if cur.len() == n {
            out.push(cur.iter().map(|&i| monos[i].clone()).collect());
            return;
        }
        for i in start..monos.len() {
            let d: u32 = monos[i].iter().sum();
            if d > budget {
                continue;
            }
            cur.push(i);
            rec(monos, n, i, budget - d, cur, out);
            cur.pop();
        }
    }
    rec(&monos, n, 0, max_total, &mut cur, &mut out);
    out
}

/// All `(i, n−i)`-unshuffles as permutations (`perm[p]` = original index).
pub(crate) fn unshuffles(n: usize, i: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != i {
            continue;
        }
        let mut perm: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).collect();
        perm.extend((0..n).filter(|b| mask & (1 << b) == 0));
        out.push(perm);
    }
    out
}

pub(crate) fn degrees(ring: &Ring, args: &[Series]) -> Result<Vec<i64>> {
    args.iter().map(|a| ring.degree_or(a, 0)).collect()
}

pub(crate) fn product(ring: &Ring, items: impl IntoIterator<Item = Series>) -> Series {
    items
        .into_iter()
        .fold(ring.one(), |acc, x| ring.mul(&acc, &x))
}

/// Koszul bracket via the unshuffle expansion.
pub fn koszul_bracket_expansion(ring: &Ring, op: &dyn LinearOp, args: &[Series]) -> Result<Series> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let degs = degrees(ring, args)?;
    let mut out = Series::zero();
    for i in 1..=n {
        for perm in unshuffles(n, i) {
            let sign = koszul_sign_unchecked(&perm, &degs) * if (n - i) % 2 == 1 { -1 } else { 1 };
            let inner = product(ring, perm[..i].iter().map(|&j| args[j].clone()));
            let outer = product(ring, perm[i..].iter().map(|&j| args[j].clone()));
            let term = ring.mul(&op.apply(ring, &inner)?, &outer);
            out += term.scale(&sign_q(sign < 0));
        }
    }
    Ok(out)
}

/// Koszul bracket as `ad_{α_n} ⋯ ad_{α_1}(op)(1)`.
pub fn koszul_bracket_commutator(ring: &Ring, op: &dyn LinearOp, args: &[Series]) -> Result<Series> {
    if args.is_empty() {
        return Err(Error::ZeroArity);
    }
    ad_tower(ring, op, args, &ring.one())
}

/// Koszul bracket computed both ways; errors if they differ.
pub fn koszul_bracket(ring: &Ring, op: &dyn LinearOp, args: &[Series]) -> Result<Series> {
    let a = koszul_bracket_expansion(ring, op, args)?;
    let b = koszul_bracket_commutator(ring, op, args)?;
    if a != b {
        return Err(Error::RouteDisagreement {
            what: format!("Koszul bracket K_{}", args.len()),
            detail: format!(
                "expansion {} vs commutator {}",
                render_series(ring, &a),
                render_series(ring, &b)
            ),
        });
    }
    Ok(a)
}

pub(crate) fn render_tuple(ring: &Ring, args: &[Series]) -> String {
    let parts: Vec<String> = args.iter().map(|a| render_series(ring, a)).collect();
    format!("({})", parts.join(", "))
}

/// Verifies `ad_{a_{k+2}} ⋯ ad_{a_1}(op)(1) = 0` on monomial tuples. Tuples
/// containing the unit are skipped since `ad_1 = 0`.
pub fn check_order(ring: &Ring, op: &dyn LinearOp, k: usize, max_total_degree: u32) -> Check {
    let n = k + 2;
    let tuples = monomial_tuples(ring.algebra(), n, max_total_degree);
    let witness = tuples.par_iter().find_map_first(|t| {
        let args: Vec<Series> = t.iter().map(|m| ring.monomial(m)).collect();
        match koszul_bracket_commutator(ring, op, &args) {
            Ok(v) if v.is_zero() => None,
            Ok(v) => Some(format!("{} -> {}", render_tuple(ring, &args), render_series(ring, &v))),
            Err(e) => Some(format!("{} -> error: {e}", render_tuple(ring, &args))),
        }
    });
    Check::from_witness(format!("order <= {}", k + 1), witness).with_range(format!(
        "{} tuples of {n} non-unit monomials with total polynomial degree <= {max_total_degree}",
        tuples.len()
    ))
}

/// `μ_n = h^{1−n} K_n(Δ)`. For pole-free arguments the result must be
/// pole-free; a violation is a divisibility error.
pub fn mu_n(ring: &Ring, delta: &dyn LinearOp, args: &[Series]) -> Result<Series> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let shift = n as i64 - 1;
    let wide = ring.with_extra_precision(shift);
    let k = koszul_bracket(&wide, delta, args)?;
    if args.iter().all(Series::is_pole_free) {
        if let Some(low) = k.min_hbar() {
            if (low as i64) < shift {
                return Err(Error::Divisibility {
                    power: shift as u32,
                    detail: format!(
                        "K_{n}{} = {}",
                        render_tuple(ring, args),
                        render_series(ring, &k)
                    ),
                });
            }
        }
    }
    Ok(ring.truncate(&k.shift_hbar(-(shift as i32))))
}

/// Classical limit `l_n = μ_n|_{h=0}` on parameter-free, `h`-free inputs.
pub fn l_n(ring: &Ring, delta: &dyn LinearOp, args: &[Series]) -> Result<Series> {
    for a in args {
        if a.terms().any(|(k, _)| k.hbar != 0) {
            return Err(Error::Assertion("l_n takes h-free arguments".into()));
        }
    }
    let mu = mu_n(ring, delta, args)?;
    Ok(mu.filter(|k| k.hbar == 0))
}

/// Δ(1) = 0, Δ² = 0 on monomials, and Kₙ(Δ) ≡ 0 mod h^{n−1} on tuples.
pub fn verify_bv(inst: &BvInstance, sweep: SweepRange) -> Report {
    let ring = inst.ring();
    let mut rep = Report::new(format!("bv:{}", inst.name()), inst.truncation);
    rep.checks = verify_bv_operator(&ring, &inst.delta, sweep);
    rep
}

/// The three BV∞ axioms for an arbitrary degree-one operator on `ring`
/// (which may carry parameters), on monomials of the ring's polynomial
/// window.
pub fn verify_bv_operator(ring: &Ring, delta: &dyn LinearOp, sweep: SweepRange) -> Vec<Check> {
    let t = ring.truncation();
    let alg = ring.algebra().clone();
    let mut checks = Vec::new();

    checks.push(match delta.apply(ring, &ring.one()) {
        Ok(v) if v.is_zero() => Check::pass("delta(1) = 0"),
        Ok(v) => Check::fail("delta(1) = 0", render_series(ring, &v)),
        Err(e) => Check::fail("delta(1) = 0", e.to_string()),
    });

    let monos = alg.monomials_up_to(t.n_poly);
    let witness = monos.par_iter().find_map_first(|m| {
        let x = ring.monomial(m);
        let r = delta
            .apply(ring, &x)
            .and_then(|y| delta.apply(ring, &y));
        match r {
            Ok(v) if v.is_zero() => None,
            Ok(v) => Some(format!(
                "delta^2({}) = {}",
                render_series(ring, &x),
                render_series(ring, &v)
            )),
            Err(e) => Some(e.to_string()),
        }
    });
    checks.push(Check::from_witness("delta^2 = 0", witness).with_range(format!(
        "{} monomials of polynomial degree <= {}, weight <= {}",
        monos.len(),
        t.n_poly,
        ring.cap()
    )));

    for n in 2..=sweep.n_max {
        let tuples = monomial_tuples(&alg, n, sweep.max_total_degree);
        let witness = tuples.par_iter().find_map_first(|tuple| {
            let args: Vec<Series> = tuple.iter().map(|m| ring.monomial(m)).collect();
            match koszul_bracket_expansion(ring, delta, &args) {
                Ok(v) => {
                    let low: Series = v.filter(|k| (k.hbar as i64) < n as i64 - 1);
                    if low.is_zero() {
                        None
                    } else {
                        Some(format!(
                            "K_{n}{} has h-orders below {}: {}",
                            render_tuple(ring, &args),
                            n - 1,
                            render_series(ring, &low)
                        ))
                    }
                }
                Err(e) => Some(e.to_string()),
            }
        });
        checks.push(
            Check::from_witness(format!("koszul condition n={n}"), witness).with_range(format!(
                "{} tuples of {n} non-unit monomials with total polynomial degree <= {}",
                tuples.len(),
                sweep.max_total_degree
            )),
        );
    }
    checks
}

/// Generalized Jacobi identities of the L∞[1] structures `{μ_n}` and
/// `{l_n}` on monomial tuples.
pub fn check_l_infinity(inst: &BvInstance, sweep: SweepRange) -> Report {
    let ring = inst.ring();
    let mut rep = Report::new(format!("l-infinity:{}", inst.name()), inst.truncation);
    let delta = &inst.delta;
    for classical in [false, true] {
        let label = if classical { "l" } else { "mu" };
        for n in 1..=sweep.n_max {
            let mut tuples = monomial_tuples(&inst.algebra, n, sweep.max_total_degree);
            if n == 1 {
                tuples.push(vec![vec![0; inst.algebra.generators().len()]]);
            }
            let witness = tuples.par_iter().find_map_first(|tuple| {
                let args: Vec<Series> = tuple.iter().map(|m| ring.monomial(m)).collect();
                match jacobi_sum(&ring, delta, &args, classical) {
                    Ok(v) if v.is_zero() => None,
                    Ok(v) => Some(format!(
                        "{} -> {}",
                        render_tuple(&ring, &args),
                        render_series(&ring, &v)
                    )),
                    Err(e) => Some(format!("{} -> error: {e}", render_tuple(&ring, &args))),
                }
            });
            rep.push(
                Check::from_witness(format!("{label} jacobi n={n}"), witness).with_range(format!(
                    "{} tuples with total polynomial degree <= {}",
                    tuples.len(),
                    sweep.max_total_degree
                )),
            );
        }
    }
    rep
}

/// `Σ_{i} Σ_{σ ∈ Sh(i,n−i)} ε(σ) b_{n−i+1}(b_i(x_σ(1..i)), x_σ(i+1..n))`.
pub(crate) fn jacobi_sum(
    ring: &Ring,
    delta: &dyn LinearOp,
    args: &[Series],
    classical: bool,
) -> Result<Series> {
    let n = args.len();
    let degs = degrees(ring, args)?;
    let bracket = |xs: &[Series]| -> Result<Series> {
        if classical {
            l_n(ring, delta, xs)
        } else {
            mu_n(ring, delta, xs)
        }
    };
    let mut out = Series::zero();
    for i in 1..=n {
        for perm in unshuffles(n, i) {
            let sign = koszul_sign_unchecked(&perm, &degs);
            let inner: Vec<Series> = perm[..i].iter().map(|&j| args[j].clone()).collect();
            let mut outer = vec![bracket(&inner)?];
            outer.extend(perm[i..].iter().map(|&j| args[j].clone()));
            out += bracket(&outer)?.scale(&sign_q(sign < 0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{parse_series, GeneratorSpec};
    use crate::operators::{Component, PolyDiffOperator};
    use proptest::prelude::*;

    fn a1(delta1: &str) -> BvInstance {
        let alg = Arc::new(
            Algebra::new(
                "A1",
                vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("dt", -1)],
                1,
            )
            .unwrap(),
        );
        let r = Ring::plain(alg.clone(), Truncation::new(6, 4, 0));
        let d0 = PolyDiffOperator::parse(&r, "t * d/ddt", None).unwrap();
        let d1 = PolyDiffOperator::parse(&r, delta1, None).unwrap();
        let d = HbarOperator::new(&alg, vec![Component::Poly(d0), Component::Poly(d1)]).unwrap();
        BvInstance::new(alg, d, Truncation::new(6, 4, 0))
    }

    #[test]
    fn bracket_examples() {
        let inst = a1("d/dt d/ddt");
        let r = inst.ring();
        let p = |s: &str| parse_series(&r, s).unwrap();
        let d1 = PolyDiffOperator::parse(&r, "d/dt d/ddt", None).unwrap();
        let d0 = PolyDiffOperator::parse(&r, "t * d/ddt", None).unwrap();
        assert_eq!(koszul_bracket(&r, &inst.delta, &[p("t*dt")]).unwrap(), p("t^2 + h"));
        assert_eq!(koszul_bracket(&r, &d1, &[p("t"), p("t*dt")]).unwrap(), p("t"));
        assert!(koszul_bracket(&r, &d0, &[p("t^2*dt"), p("dt")]).unwrap().is_zero());
        assert_eq!(mu_n(&r, &inst.delta, &[p("t"), p("t*dt")]).unwrap(), p("t"));
        assert_eq!(l_n(&r, &inst.delta, &[p("t"), p("t*dt")]).unwrap(), p("t"));
        assert!(matches!(koszul_bracket(&r, &d1, &[]), Err(Error::ZeroArity)));
    }

    #[test]
    fn ad_examples() {
        let inst = a1("d/dt d/ddt");
        let r = inst.ring();
        let p = |s: &str| parse_series(&r, s).unwrap();
        let d1 = PolyDiffOperator::parse(&r, "d/dt d/ddt", None).unwrap();
        let d0 = PolyDiffOperator::parse(&r, "t * d/ddt", None).unwrap();
        assert!(ad_tower(&r, &inst.delta, &[r.one()], &p("t^2*dt")).unwrap().is_zero());
        assert_eq!(ad_tower(&r, &d1, &[p("t")], &p("dt")).unwrap(), r.one());
        assert_eq!(ad_tower(&r, &d0, &[p("t*dt")], &r.one()).unwrap(), p("t^2"));
    }

    #[test]
    fn order_checks() {
        let inst = a1("d/dt d/ddt");
        let r = inst.ring();
        let d0 = PolyDiffOperator::parse(&r, "t * d/ddt", None).unwrap();
        let d1 = PolyDiffOperator::parse(&r, "d/dt d/ddt", None).unwrap();
        assert!(check_order(&r, &d0, 0, 6).passed());
        let c = check_order(&r, &d1, 0, 6);
        assert!(!c.passed());
        assert!(check_order(&r, &d1, 1, 6).passed());
    }

    #[test]
    fn verify_bv_detects_order_three_component() {
        let good = verify_bv(&a1("d/dt d/ddt"), SweepRange::new(4, 6));
        assert!(good.passed(), "{}", good.render_text());
        let bad = verify_bv(&a1("d/dt d/dt d/dt d/ddt"), SweepRange::new(4, 6));
        let fail = bad.first_failure().unwrap();
        assert_eq!(fail.name, "koszul condition n=3");
    }

    #[test]
    fn l_infinity_relations() {
        let rep = check_l_infinity(&a1("d/dt d/ddt"), SweepRange::new(3, 4));
        assert!(rep.passed(), "{}", rep.render_text());
    }

    fn mixed() -> (Ring, PolyDiffOperator) {
        let alg = Arc::new(
            Algebra::new(
                "M",
                vec![
                    GeneratorSpec::new("x", 0),
                    GeneratorSpec::new("y", 1),
                    GeneratorSpec::new("z", -1),
                    GeneratorSpec::new("w", 2),
                ],
                1,
            )
            .unwrap(),
        );
        let r = Ring::plain(alg, Truncation::new(6, 3, 0));
        let op = PolyDiffOperator::parse(
            &r,
            "x^2 * d/dz + d/dx d/dz + w * d/dy + y * d/dx^2 + d/dz d/dx^2",
            None,
        );
        (r, op.unwrap())
    }

    fn arb_arg() -> impl Strategy<Value = Vec<u32>> {
        (0u32..3, 0u32..2, 0u32..2, 0u32..2).prop_map(|(a, b, c, d)| vec![a, b, c, d])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn two_route_bracket_agreement(args in proptest::collection::vec(arb_arg(), 1..5)) {
            let (r, op) = mixed();
            let xs: Vec<Series> = args.iter().map(|m| r.monomial(m)).collect();
            prop_assert!(koszul_bracket(&r, &op, &xs).is_ok());
        }

        #[test]
        fn bracket_graded_symmetry(a in arb_arg(), b in arb_arg(), c in arb_arg()) {
            let (r, op) = mixed();
            let xs = [r.monomial(&a), r.monomial(&b), r.monomial(&c)];
            let degs = degrees(&r, &xs).unwrap();
            let k = koszul_bracket_expansion(&r, &op, &xs).unwrap();
            let swapped = [xs[1].clone(), xs[0].clone(), xs[2].clone()];
            let k2 = koszul_bracket_expansion(&r, &op, &swapped).unwrap();
            let s = koszul_sign_unchecked(&[1, 0, 2], &degs);
            prop_assert_eq!(k, k2.scale(&sign_q(s < 0)));
        }

        #[test]
        fn apply_raises_degree_by_one(m in arb_arg()) {
            let (r, op) = mixed();
            let x = r.monomial(&m);
            let y = op.apply(&r, &x).unwrap();
            if let Some(d) = r.degree(&y).unwrap() {
                prop_assert_eq!(d, r.degree(&x).unwrap().unwrap() + 1);
            }
        }
    }
}
