use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{valid_identifier, Algebra, RESERVED_NAMES};
use crate::error::{Error, Result};

/// A formal parameter adjoined to the algebra.
///
/// Parameters with `max_exp == None` are deformation parameters: their total
/// degree is bounded by `n_param` and counts toward the truncation weight.
/// Parameters with a `max_exp` (probe parameters) are bounded individually.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_exp: Option<u32>,
}

impl ParamSpec {
    pub fn deformation(name: impl Into<String>, degree: i64) -> Self {
        Self {
            name: name.into(),
            degree,
            max_exp: None,
        }
    }

    pub fn probe(name: impl Into<String>, degree: i64) -> Self {
        Self {
            name: name.into(),
            degree,
            max_exp: Some(1),
        }
    }
}

/// Polynomial degree bound for sweeps, `h`-order, and parameter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_poly: u32,
    pub n_hbar: u32,
    pub n_param: u32,
}

impl Truncation {
    pub fn new(n_poly: u32, n_hbar: u32, n_param: u32) -> Self {
        Self {
            n_poly,
            n_hbar,
            n_param,
        }
    }

    pub fn with_n_poly(self, n_poly: u32) -> Self {
        Self { n_poly, ..self }
    }

    pub fn with_n_hbar(self, n_hbar: u32) -> Self {
        Self { n_hbar, ..self }
    }

    pub fn with_n_param(self, n_param: u32) -> Self {
        Self { n_param, ..self }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(10, 5, 3)
    }
}

/// Basis element `u^I h^p x^M` of a ring. Parameters come first in the
/// canonical order, then `h` (even, central), then the algebra generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub params: Vec<u32>,
    pub hbar: i32,
    pub mono: Vec<u32>,
}

impl Key {
    pub fn is_unit(&self) -> bool {
        self.hbar == 0 && self.params.iter().all(|&e| e == 0) && self.mono.iter().all(|&e| e == 0)
    }

    pub fn mono_is_unit(&self) -> bool {
        self.mono.iter().all(|&e| e == 0)
    }

    pub fn poly_degree(&self) -> u32 {
        self.mono.iter().sum()
    }
}

#[derive(Debug)]
struct RingInner {
    algebra: Arc<Algebra>,
    params: Vec<ParamSpec>,
    trunc: Truncation,
    param_odd: Vec<bool>,
    gen_odd: Vec<bool>,
    has_deformation_params: bool,
}

/// The coefficient ring a [`super::Series`] lives in: `A ⊗ K[params] ⊗ K((h))`
/// modulo the truncation.
///
/// Truncation is by weight `w = (h-power) + (deformation-parameter degree)`,
/// keeping `w <= cap`, together with the parameter-order bound. Every series
/// produced by the crate has terms of non-negative weight, so the discarded
/// part is an ideal and all kept coefficients are exact.
#[derive(Clone, Debug)]
pub struct Ring {
    inner: Arc<RingInner>,
    cap: i64,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap
            && self.inner.trunc == other.inner.trunc
            && self.inner.params == other.inner.params
            && self.inner.algebra.same_generators(&other.inner.algebra)
    }
}

impl Ring {
    pub fn new(algebra: Arc<Algebra>, params: Vec<ParamSpec>, trunc: Truncation) -> Result<Self> {
        for (i, p) in params.iter().enumerate() {
            if !valid_identifier(&p.name) || RESERVED_NAMES.contains(&p.name.as_str()) {
                return Err(Error::InvalidAlgebra(format!(
                    "parameter name {:?} is not allowed",
                    p.name
                )));
            }
            if params[..i].iter().any(|o| o.name == p.name)
                || algebra.generator_index(&p.name).is_some()
            {
                return Err(Error::InvalidAlgebra(format!(
                    "parameter name {:?} clashes with another symbol",
                    p.name
                )));
            }
        }
        let param_odd = params.iter().map(|p| p.degree % 2 != 0).collect();
        let gen_odd = algebra
            .generators()
            .iter()
            .map(|g| g.degree % 2 != 0)
            .collect();
        let has_deformation_params = params.iter().any(|p| p.max_exp.is_none());
        let cap = trunc.n_hbar as i64
            + if has_deformation_params {
                trunc.n_param as i64
            } else {
                0
            };
        Ok(Self {
            inner: Arc::new(RingInner {
                algebra,
                params,
                trunc,
                param_odd,
                gen_odd,
                has_deformation_params,
            }),
            cap,
        })
    }

    /// Ring without parameters.
    pub fn plain(algebra: Arc<Algebra>, trunc: Truncation) -> Self {
        Self::new(algebra, Vec::new(), trunc).expect("no parameters to validate")
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.inner.algebra
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.inner.params
    }

    pub fn truncation(&self) -> Truncation {
        self.inner.trunc
    }

    pub fn m(&self) -> i64 {
        self.inner.algebra.m()
    }

    /// Largest kept weight.
    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn has_deformation_params(&self) -> bool {
        self.inner.has_deformation_params
    }

    /// Same ring with the weight cap raised by `extra`; used when a result
    /// will later be divided by a power of `h`.
    pub fn with_extra_precision(&self, extra: i64) -> Self {
        Self {
            inner: self.inner.clone(),
            cap: self.cap + extra,
        }
    }

    pub fn with_cap(&self, cap: i64) -> Self {
        Self {
            inner: self.inner.clone(),
            cap,
        }
    }

    /// Ring with `extra` parameters placed before the existing ones.
    pub fn with_leading_params(&self, extra: Vec<ParamSpec>) -> Result<Self> {
        let mut params = extra;
        params.extend(self.inner.params.iter().cloned());
        let r = Ring::new(self.inner.algebra.clone(), params, self.inner.trunc)?;
        Ok(r.with_cap(self.cap))
    }

    /// Same parameters and truncation over another algebra.
    pub fn over(&self, algebra: Arc<Algebra>) -> Result<Self> {
        let r = Ring::new(algebra, self.inner.params.clone(), self.inner.trunc)?;
        Ok(r.with_cap(self.cap))
    }

    pub fn with_params(&self, params: Vec<ParamSpec>) -> Result<Self> {
        Ring::new(self.inner.algebra.clone(), params, self.inner.trunc)
    }

    pub fn with_truncation(&self, trunc: Truncation) -> Self {
        Ring::new(self.inner.algebra.clone(), self.inner.params.clone(), trunc)
            .expect("parameters already validated")
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.inner.params.iter().position(|p| p.name == name)
    }

    pub fn n_params(&self) -> usize {
        self.inner.params.len()
    }

    pub fn n_gens(&self) -> usize {
        self.inner.gen_odd.len()
    }

    pub(crate) fn gen_is_odd(&self, i: usize) -> bool {
        self.inner.gen_odd[i]
    }

    pub(crate) fn param_is_odd(&self, i: usize) -> bool {
        self.inner.param_odd[i]
    }

    pub fn unit_key(&self) -> Key {
        Key {
            params: vec![0; self.n_params()],
            hbar: 0,
            mono: vec![0; self.n_gens()],
        }
    }

    pub fn key_degree(&self, k: &Key) -> i64 {
        let p: i64 = k
            .params
            .iter()
            .zip(&self.inner.params)
            .map(|(&e, s)| e as i64 * s.degree)
            .sum();
        p + self.inner.algebra.monomial_degree(&k.mono) + k.hbar as i64 * self.inner.algebra.hbar_degree()
    }

    /// Total degree of the deformation parameters.
    pub fn u_degree(&self, k: &Key) -> u32 {
        k.params
            .iter()
            .zip(&self.inner.params)
            .filter(|(_, s)| s.max_exp.is_none())
            .map(|(&e, _)| e)
            .sum()
    }

    /// Total degree of the probe parameters.
    pub fn probe_degree(&self, k: &Key) -> u32 {
        k.params
            .iter()
            .zip(&self.inner.params)
            .filter(|(_, s)| s.max_exp.is_some())
            .map(|(&e, _)| e)
            .sum()
    }

    pub fn weight(&self, k: &Key) -> i64 {
        k.hbar as i64 + self.u_degree(k) as i64
    }

    pub fn keeps(&self, k: &Key) -> bool {
        if self.weight(k) > self.cap || self.u_degree(k) > self.inner.trunc.n_param {
            return false;
        }
        for (i, (&e, s)) in k.params.iter().zip(&self.inner.params).enumerate() {
            if let Some(max) = s.max_exp {
                if e > max {
                    return false;
                }
            }
            if e > 1 && self.inner.param_odd[i] {
                return false;
            }
        }
        true
    }

    pub(crate) fn parity_params(&self, params: &[u32]) -> bool {
        params
            .iter()
            .enumerate()
            .filter(|(i, _)| self.inner.param_odd[*i])
            .map(|(_, &e)| e)
            .sum::<u32>()
            % 2
            == 1
    }

    pub(crate) fn parity_mono(&self, mono: &[u32]) -> bool {
        mono.iter()
            .enumerate()
            .filter(|(i, _)| self.inner.gen_odd[*i])
            .map(|(_, &e)| e)
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn key_is_odd(&self, k: &Key) -> bool {
        self.parity_params(&k.params) ^ self.parity_mono(&k.mono)
    }

    /// Product of two basis elements: `Some((key, negative))`, or `None` when
    /// the product vanishes or is truncated away.
    pub fn mul_keys(&self, a: &Key, b: &Key) -> Option<(Key, bool)> {
        let params = merge_exps(&a.params, &b.params, &self.inner.param_odd)?;
        let mono = merge_exps(&a.mono, &b.mono, &self.inner.gen_odd)?;
        let key = Key {
            params,
            hbar: a.hbar + b.hbar,
            mono,
        };
        if !self.keeps(&key) {
            return None;
        }
        let mut neg = self.parity_mono(&a.mono) && self.parity_params(&b.params);
        neg ^= merge_sign(&a.params, &b.params, &self.inner.param_odd);
        neg ^= merge_sign(&a.mono, &b.mono, &self.inner.gen_odd);
        Some((key, neg))
    }
}

fn merge_exps(a: &[u32], b: &[u32], odd: &[bool]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        let e = a[i] + b[i];
        if odd[i] && e > 1 {
            return None;
        }
        out.push(e);
    }
    Some(out)
}

/// Sign of moving each odd generator of `b` left past the odd generators of
/// `a` with larger index.
fn merge_sign(a: &[u32], b: &[u32], odd: &[bool]) -> bool {
    let mut swaps = 0u32;
    let mut odd_in_a_after = 0u32;
    for j in (0..a.len()).rev() {
        if odd[j] {
            swaps += b[j] * odd_in_a_after;
            odd_in_a_after += a[j];
        }
    }
    swaps % 2 == 1
}
