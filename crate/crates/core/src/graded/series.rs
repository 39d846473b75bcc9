use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::ring::{Key, Ring};
use super::render_series;
use crate::error::{Error, Result};
use crate::scalar::{q, Q};

/// Finite rational combination of ring basis elements.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// elements. A series does not remember its ring; arithmetic that needs signs
/// or truncation goes through [`Ring`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<Key, Q>,
}

impl Series {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(key: Key, c: Q) -> Self {
        let mut s = Self::zero();
        s.add_term(key, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &Key) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, key: Key, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(&Key) -> bool) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn map_keys(&self, mut f: impl FnMut(&Key) -> Key) -> Series {
        let mut out = Series::zero();
        for (k, v) in &self.terms {
            out.add_term(f(k), v.clone());
        }
        out
    }

    /// Smallest `h`-power present, if any.
    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.hbar).min()
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.hbar).max()
    }

    /// `p` such that the series is `h^{-p}` times a power series.
    pub fn pole_order(&self) -> u32 {
        self.min_hbar().map_or(0, |m| (-m).max(0) as u32)
    }

    pub fn is_pole_free(&self) -> bool {
        self.pole_order() == 0
    }

    /// Coefficient of `h^p`, returned with `h`-power 0.
    pub fn hbar_coeff(&self, p: i32) -> Series {
        let mut out = Series::zero();
        for (k, v) in &self.terms {
            if k.hbar == p {
                out.add_term(
                    Key {
                        hbar: 0,
                        ..k.clone()
                    },
                    v.clone(),
                );
            }
        }
        out
    }

    /// Multiply by `h^p` without truncation (caller guarantees the cap).
    pub fn shift_hbar(&self, p: i32) -> Series {
        self.map_keys(|k| Key {
            hbar: k.hbar + p,
            ..k.clone()
        })
    }

    /// `s(h) -> s(-h)`.
    pub fn hbar_conjugate(&self) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    let v = if k.hbar.rem_euclid(2) == 1 { -v } else { v.clone() };
                    (k.clone(), v)
                })
                .collect(),
        }
    }

    /// Coefficient of the unit key, i.e. the constant scalar term.
    pub fn constant_term(&self) -> Q {
        self.terms
            .iter()
            .find(|(k, _)| k.is_unit())
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Q::zero)
    }

    /// True if the series has no algebra-generator content (a scalar in `h`
    /// and parameters).
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|k| k.mono_is_unit())
    }
}

impl Add for Series {
    type Output = Series;
    fn add(mut self, rhs: Series) -> Series {
        self += rhs;
        self
    }
}

impl Add<&Series> for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl AddAssign for Series {
    fn add_assign(&mut self, rhs: Series) {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
    }
}

impl AddAssign<&Series> for Series {
    fn add_assign(&mut self, rhs: &Series) {
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(mut self, rhs: Series) -> Series {
        self -= rhs;
        self
    }
}

impl Sub<&Series> for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let mut out = self.clone();
        out -= rhs.clone();
        out
    }
}

impl SubAssign for Series {
    fn sub_assign(&mut self, rhs: Series) {
        for (k, v) in rhs.terms {
            self.add_term(k, -v);
        }
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        -(self.clone())
    }
}

impl Ring {
    pub fn zero(&self) -> Series {
        Series::zero()
    }

    pub fn one(&self) -> Series {
        self.scalar(Q::one())
    }

    pub fn scalar(&self, c: Q) -> Series {
        Series::from_term(self.unit_key(), c)
    }

    pub fn int(&self, n: i64) -> Series {
        self.scalar(q(n))
    }

    /// `h^p`; may be truncated to zero.
    pub fn hbar_pow(&self, p: i32) -> Series {
        let key = Key {
            hbar: p,
            ..self.unit_key()
        };
        if self.keeps(&key) {
            Series::from_term(key, Q::one())
        } else {
            Series::zero()
        }
    }

    pub fn generator(&self, name: &str) -> Result<Series> {
        let i = self
            .algebra()
            .generator_index(name)
            .ok_or_else(|| Error::GeneratorMismatch(format!("unknown generator {name:?}")))?;
        let mut key = self.unit_key();
        key.mono[i] = 1;
        Ok(Series::from_term(key, Q::one()))
    }

    pub fn param(&self, i: usize) -> Series {
        let mut key = self.unit_key();
        key.params[i] = 1;
        if self.keeps(&key) {
            Series::from_term(key, Q::one())
        } else {
            Series::zero()
        }
    }

    /// Monomial `x^exps` of the algebra with coefficient 1.
    pub fn monomial(&self, exps: &[u32]) -> Series {
        let key = Key {
            mono: exps.to_vec(),
            ..self.unit_key()
        };
        Series::from_term(key, Q::one())
    }

    /// Checks that every key of `s` has the shape of this ring.
    pub fn check_shape(&self, s: &Series) -> Result<()> {
        for (k, _) in s.terms() {
            if k.params.len() != self.n_params() || k.mono.len() != self.n_gens() {
                return Err(Error::GeneratorMismatch(format!(
                    "series term has {} parameters and {} generators, ring expects {} and {}",
                    k.params.len(),
                    k.mono.len(),
                    self.n_params(),
                    self.n_gens()
                )));
            }
        }
        Ok(())
    }

    pub fn truncate(&self, s: &Series) -> Series {
        s.filter(|k| self.keeps(k))
    }

    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = Series::zero();
        for (ka, va) in a.terms() {
            for (kb, vb) in b.terms() {
                if let Some((k, neg)) = self.mul_keys(ka, kb) {
                    let v = va * vb;
                    out.add_term(k, if neg { -v } else { v });
                }
            }
        }
        out
    }

    /// Multiplication that reports a generator-set mismatch instead of
    /// silently misreading exponent vectors.
    pub fn try_mul(&self, a: &Series, b: &Series) -> Result<Series> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        Ok(self.mul(a, b))
    }

    pub fn mul_hbar(&self, s: &Series, p: i32) -> Series {
        self.truncate(&s.shift_hbar(p))
    }

    pub fn pow(&self, s: &Series, n: u32) -> Series {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, s);
        }
        acc
    }

    /// Degree of a homogeneous series; `None` for zero, `Err` if mixed.
    pub fn degree(&self, s: &Series) -> Result<Option<i64>> {
        let mut deg = None;
        for (k, _) in s.terms() {
            let d = self.key_degree(k);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(Error::Inhomogeneous(format!(
                        "{} has terms of degree {e} and {d}",
                        render_series(self, s)
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Degree of a homogeneous series, reading zero as degree `default`.
    pub fn degree_or(&self, s: &Series, default: i64) -> Result<i64> {
        Ok(self.degree(s)?.unwrap_or(default))
    }

    pub fn is_odd(&self, s: &Series) -> Result<bool> {
        Ok(self.degree_or(s, 0)?.rem_euclid(2) == 1)
    }

    /// Left derivative with respect to algebra generator `g`.
    pub fn derivative_gen(&self, g: usize, s: &Series) -> Series {
        let odd = self.gen_is_odd(g);
        let mut out = Series::zero();
        for (k, v) in s.terms() {
            let e = k.mono[g];
            if e == 0 {
                continue;
            }
            let mut neg = false;
            if odd {
                neg ^= self.parity_params(&k.params);
                neg ^= self.parity_mono(&k.mono[..g]);
            }
            let mut nk = k.clone();
            nk.mono[g] -= 1;
            let c = if odd { v.clone() } else { v * q(e as i64) };
            out.add_term(nk, if neg { -c } else { c });
        }
        out
    }

    /// Left derivative with respect to parameter `i`.
    pub fn derivative_param(&self, i: usize, s: &Series) -> Series {
        let odd = self.param_is_odd(i);
        let mut out = Series::zero();
        for (k, v) in s.terms() {
            let e = k.params[i];
            if e == 0 {
                continue;
            }
            let neg = odd && self.parity_params(&k.params[..i]);
            let mut nk = k.clone();
            nk.params[i] -= 1;
            let c = if odd { v.clone() } else { v * q(e as i64) };
            out.add_term(nk, if neg { -c } else { c });
        }
        out
    }

    /// Part of `s` of deformation-parameter degree `d`.
    pub fn u_part(&self, s: &Series, d: u32) -> Series {
        s.filter(|k| self.u_degree(k) == d)
    }

    /// Set all deformation parameters to zero.
    pub fn at_u_zero(&self, s: &Series) -> Series {
        self.u_part(s, 0)
    }

    fn nilpotent_key(&self, k: &Key) -> bool {
        self.u_degree(k) >= 1 || self.probe_degree(k) >= 1 || k.hbar >= 1
    }

    fn check_weights(&self, s: &Series) -> Result<()> {
        for (k, v) in s.terms() {
            if self.weight(k) < 0 {
                return Err(Error::NegativeWeight(render_series(
                    self,
                    &Series::from_term(k.clone(), v.clone()),
                )));
            }
        }
        Ok(())
    }

    /// `sum x^n / n!` up to the truncation.
    pub fn exp(&self, x: &Series) -> Result<Series> {
        self.check_weights(x)?;
        for (k, v) in x.terms() {
            if !self.nilpotent_key(k) {
                return Err(Error::NonNilpotent(render_series(
                    self,
                    &Series::from_term(k.clone(), v.clone()),
                )));
            }
        }
        let x = self.truncate(x);
        let mut result = self.one();
        let mut term = self.one();
        let mut n = 1i64;
        loop {
            term = self.mul(&term, &x).scale(&Q::new(1.into(), n.into()));
            if term.is_zero() {
                break;
            }
            result += &term;
            n += 1;
        }
        Ok(result)
    }

    /// `sum (-1)^{n+1} (y - 1)^n / n` up to the truncation.
    pub fn log(&self, y: &Series) -> Result<Series> {
        self.check_weights(y)?;
        let mut constant = Series::zero();
        let mut rest = Series::zero();
        for (k, v) in y.terms() {
            if self.nilpotent_key(k) {
                rest.add_term(k.clone(), v.clone());
            } else {
                constant.add_term(k.clone(), v.clone());
            }
        }
        if constant != self.one() {
            return Err(Error::NonUnitConstant(render_series(self, &constant)));
        }
        let rest = self.truncate(&rest);
        let mut result = Series::zero();
        let mut power = self.one();
        let mut n = 1i64;
        loop {
            power = self.mul(&power, &rest);
            if power.is_zero() {
                break;
            }
            let c = Q::new(if n % 2 == 1 { 1 } else { -1 }.into(), n.into());
            result += power.scale(&c);
            n += 1;
        }
        Ok(result)
    }

    /// Reads a parameter-free series (e.g. one built in the plain ring over
    /// the same algebra) as an element of this ring.
    pub fn from_plain(&self, s: &Series) -> Series {
        let n = self.n_params();
        self.truncate(&s.map_keys(|k| {
            debug_assert!(k.params.iter().all(|&e| e == 0));
            Key {
                params: vec![0; n],
                hbar: k.hbar,
                mono: k.mono.clone(),
            }
        }))
    }

    /// Drops all parameters, keeping only terms free of them.
    pub fn to_plain(&self, s: &Series) -> Series {
        s.filter(|k| k.params.iter().all(|&e| e == 0))
            .map_keys(|k| Key {
                params: Vec::new(),
                hbar: k.hbar,
                mono: k.mono.clone(),
            })
    }

    /// Re-express a series of `self` in `target`, which must have the same
    /// algebra generators and carry this ring's parameters as a suffix of its
    /// own parameter list.
    pub fn embed_into(&self, target: &Ring, s: &Series) -> Result<Series> {
        let extra = target
            .n_params()
            .checked_sub(self.n_params())
            .ok_or_else(|| Error::GeneratorMismatch("target ring has fewer parameters".into()))?;
        if target.params()[extra..] != *self.params() || target.n_gens() != self.n_gens() {
            return Err(Error::GeneratorMismatch(
                "rings are not compatible for embedding".into(),
            ));
        }
        Ok(target.truncate(&s.map_keys(|k| {
            let mut params = vec![0; extra];
            params.extend_from_slice(&k.params);
            Key {
                params,
                hbar: k.hbar,
                mono: k.mono.clone(),
            }
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{parse_series, Algebra, GeneratorSpec, ParamSpec, Truncation};
    use crate::scalar::q_frac;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn a1() -> Arc<Algebra> {
        Arc::new(
            Algebra::new(
                "A",
                vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("dt", -1)],
                1,
            )
            .unwrap(),
        )
    }

    fn mixed() -> Arc<Algebra> {
        Arc::new(
            Algebra::new(
                "M",
                vec![
                    GeneratorSpec::new("x", 0),
                    GeneratorSpec::new("y", 1),
                    GeneratorSpec::new("z", -1),
                    GeneratorSpec::new("w", 2),
                    GeneratorSpec::new("v", 3),
                ],
                1,
            )
            .unwrap(),
        )
    }

    fn ring_u(n_param: u32) -> Ring {
        Ring::new(
            a1(),
            vec![ParamSpec::deformation("u", 0)],
            Truncation::new(10, 4, n_param),
        )
        .unwrap()
    }

    fn p(r: &Ring, s: &str) -> Series {
        parse_series(r, s).unwrap()
    }

    #[test]
    fn multiply_examples() {
        let r = Ring::plain(a1(), Truncation::default());
        let t = p(&r, "t");
        let dt = p(&r, "dt");
        assert_eq!(r.mul(&t, &t), p(&r, "t^2"));
        assert!(r.mul(&dt, &dt).is_zero());
        let tdt = p(&r, "t*dt");
        assert_eq!(r.mul(&t, &tdt), p(&r, "t^2*dt"));
        assert_eq!(r.mul(&tdt, &t), r.mul(&t, &tdt));
    }

    #[test]
    fn odd_generators_anticommute() {
        let r = Ring::plain(mixed(), Truncation::default());
        let y = p(&r, "y");
        let z = p(&r, "z");
        assert_eq!(r.mul(&y, &z), -r.mul(&z, &y));
    }

    #[test]
    fn generator_mismatch_is_reported() {
        let r = Ring::plain(a1(), Truncation::default());
        let other = Ring::plain(mixed(), Truncation::default());
        let x = p(&other, "x");
        assert!(matches!(
            r.try_mul(&r.one(), &x),
            Err(Error::GeneratorMismatch(_))
        ));
    }

    #[test]
    fn exp_examples() {
        let r = ring_u(2);
        assert_eq!(r.exp(&Series::zero()).unwrap(), r.one());
        assert_eq!(
            r.exp(&p(&r, "u*t")).unwrap(),
            p(&r, "1 + u*t + 1/2*u^2*t^2")
        );
        assert_eq!(
            r.exp(&p(&r, "u*h^-1")).unwrap(),
            p(&r, "1 + u*h^-1 + 1/2*u^2*h^-2")
        );
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        let r = ring_u(2);
        assert!(matches!(r.exp(&p(&r, "t")), Err(Error::NonNilpotent(_))));
        assert!(matches!(r.exp(&p(&r, "2")), Err(Error::NonNilpotent(_))));
        assert!(matches!(
            r.exp(&p(&r, "u*h^-2")),
            Err(Error::NegativeWeight(_))
        ));
    }

    #[test]
    fn log_examples() {
        let r = ring_u(2);
        assert!(r.log(&r.one()).unwrap().is_zero());
        assert_eq!(r.log(&p(&r, "1 + u*t")).unwrap(), p(&r, "u*t - 1/2*u^2*t^2"));
        let e = r.exp(&p(&r, "u*h^-1")).unwrap();
        assert_eq!(r.log(&e).unwrap(), p(&r, "u*h^-1"));
        assert!(matches!(
            r.log(&p(&r, "2 + u")),
            Err(Error::NonUnitConstant(_))
        ));
        assert!(matches!(r.log(&p(&r, "u")), Err(Error::NonUnitConstant(_))));
    }

    #[test]
    fn hbar_conjugation() {
        let r = Ring::plain(a1(), Truncation::default());
        assert_eq!(r.one().hbar_conjugate(), r.one());
        assert_eq!(p(&r, "h").hbar_conjugate(), p(&r, "-h"));
        let s = p(&r, "3*h^2 + h^3*t");
        assert_eq!(s.hbar_conjugate().hbar_conjugate(), s);
    }

    #[test]
    fn homogeneous_hbar_series_degree_rule() {
        let alg = Arc::new(
            Algebra::new("C", vec![GeneratorSpec::new("x", 2)], 3).unwrap(),
        );
        let r = Ring::plain(alg, Truncation::default());
        // h has degree -2 here, so x^2 + h*x^3 is homogeneous of degree 4
        let s = p(&r, "x^2 + h*x^3");
        assert_eq!(r.degree(&s).unwrap(), Some(4));
        assert!(r.degree(&p(&r, "x + h*x")).is_err());
        for k in 0..=1 {
            let c = s.hbar_coeff(k);
            assert_eq!(r.degree(&c).unwrap().unwrap() + k as i64 * (1 - 3), 4);
        }
    }

    #[test]
    fn weight_truncation() {
        let r = ring_u(2);
        // cap = 4 + 2
        assert!(r.hbar_pow(7).is_zero());
        assert!(!r.hbar_pow(6).is_zero());
        assert!(r.pow(&p(&r, "u"), 3).is_zero());
        assert_eq!(r.cap(), 6);
    }

    #[test]
    fn probe_params_truncate_individually() {
        let r = Ring::plain(a1(), Truncation::default())
            .with_leading_params(vec![ParamSpec::probe("J", 0)])
            .unwrap();
        let j = r.param(0);
        assert!(r.mul(&j, &j).is_zero());
        assert_eq!(r.exp(&r.mul(&j, &p(&r, "t"))).unwrap(), p(&r, "1 + J*t"));
    }

    #[test]
    fn embedding_prepends_parameters() {
        let r = ring_u(2);
        let big = r.with_leading_params(vec![ParamSpec::probe("J", 0)]).unwrap();
        let s = p(&r, "u*t");
        let e = r.embed_into(&big, &s).unwrap();
        assert_eq!(e, p(&big, "u*t"));
    }

    #[test]
    fn parameter_derivative() {
        let r = ring_u(3);
        let s = p(&r, "u^3*t + 2*u");
        assert_eq!(r.derivative_param(0, &s), p(&r, "3*u^2*t + 2"));
        assert_eq!(q_frac(1, 2) * q(2), q(1));
    }

    fn arb_mono() -> impl Strategy<Value = Vec<u32>> {
        (0u32..3, 0u32..2, 0u32..2, 0u32..2, 0u32..2)
            .prop_map(|(a, b, c, d, e)| vec![a, b, c, d, e])
    }

    fn arb_elem() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
        proptest::collection::vec((arb_mono(), -3i64..4), 0..4)
    }

    fn build(r: &Ring, terms: &[(Vec<u32>, i64)]) -> Series {
        let mut s = Series::zero();
        for (m, c) in terms {
            s += r.monomial(m).scale(&q(*c));
        }
        s
    }

    proptest! {
        #[test]
        fn graded_commutativity(a in arb_mono(), b in arb_mono()) {
            let r = Ring::plain(mixed(), Truncation::new(10, 3, 0));
            let x = r.monomial(&a);
            let y = r.monomial(&b);
            let dx = r.key_degree(&Key { params: vec![], hbar: 0, mono: a.clone() });
            let dy = r.key_degree(&Key { params: vec![], hbar: 0, mono: b.clone() });
            let sign = if (dx * dy).rem_euclid(2) == 1 { q(-1) } else { q(1) };
            prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x).scale(&sign));
        }

        #[test]
        fn associativity_and_unit(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            let r = Ring::plain(mixed(), Truncation::new(10, 3, 0));
            let (x, y, z) = (build(&r, &a), build(&r, &b), build(&r, &c));
            prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
            prop_assert_eq!(r.mul(&r.one(), &x), x.clone());
            prop_assert_eq!(r.mul(&x, &r.one()), x);
        }

        #[test]
        fn log_exp_round_trip(
            c1 in -3i64..4, c2 in -3i64..4, c3 in -3i64..4, k in 0u32..3,
        ) {
            let r = ring_u(3);
            let x = p(&r, &format!("{c1}*u*t^{k} + {c2}*u^2*h^-1 + {c3}*u*h^-1*t + {c1}*h"));
            let e = r.exp(&x).unwrap();
            prop_assert_eq!(r.log(&e).unwrap(), x);
            let y = p(&r, &format!("1 + {c1}*u*t + {c2}*h*dt*t + {c3}*u^2*h^-1"));
            let l = r.log(&y).unwrap();
            prop_assert_eq!(r.exp(&l).unwrap(), y);
        }
    }
}
