use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{render_series, ParamSpec, Ring, Series};
use crate::operators::{koszul_bracket_expansion, BvInstance, LinearOp};
use crate::scalar::{factorial, Q};

use super::ContractionData;

/// A pole-free element `γ(u, h)` of degree `1 − m` with `γ(0) = 0`.
#[derive(Clone, Debug)]
pub struct McElement {
    ring: Ring,
    gamma: Series,
    labels: Vec<String>,
}

impl McElement {
    /// Validates shape, degree, normalization and pole-freeness. The MC
    /// equation itself is checked by [`mc_residual`].
    pub fn new(ring: Ring, gamma: Series, labels: Vec<String>) -> Result<Self> {
        ring.check_shape(&gamma)?;
        let expect = 1 - ring.m();
        if let Some(d) = ring.degree(&gamma)? {
            if d != expect {
                return Err(Error::DegreeMismatch(format!(
                    "MC element {} has degree {d}, expected {expect}",
                    render_series(&ring, &gamma)
                )));
            }
        }
        let constant = ring.at_u_zero(&gamma);
        if !constant.is_zero() {
            return Err(Error::Assertion(format!(
                "MC element must vanish at u = 0, has {}",
                render_series(&ring, &constant)
            )));
        }
        if !gamma.is_pole_free() {
            return Err(Error::Pole(render_series(&ring, &gamma)));
        }
        Ok(Self {
            ring,
            gamma,
            labels,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gamma(&self) -> &Series {
        &self.gamma
    }

    /// Labels of the parameters' linear terms (cohomology representatives
    /// for solved elements).
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `γ/h`, of weight ≥ 0 and degree 0.
    pub fn over_hbar(&self) -> Series {
        self.gamma.shift_hbar(-1)
    }

    pub fn render(&self) -> String {
        render_series(&self.ring, &self.gamma)
    }

    /// Per parameter multi-index, per `h`-power: element text.
    pub fn table(&self) -> BTreeMap<String, BTreeMap<i32, String>> {
        let mut grouped: BTreeMap<Vec<u32>, BTreeMap<i32, Series>> = BTreeMap::new();
        for (k, c) in self.gamma.terms() {
            let mut key = k.clone();
            key.params = vec![0; k.params.len()];
            key.hbar = 0;
            grouped
                .entry(k.params.clone())
                .or_default()
                .entry(k.hbar)
                .or_default()
                .add_term(key, c.clone());
        }
        let plain = Ring::plain(self.ring.algebra().clone(), self.ring.truncation())
            .with_params(self.ring.params().to_vec())
            .expect("parameters already validated");
        grouped
            .into_iter()
            .map(|(params, per_h)| {
                let name = params
                    .iter()
                    .zip(self.ring.params())
                    .filter(|(&e, _)| e > 0)
                    .map(|(&e, p)| if e == 1 { p.name.clone() } else { format!("{}^{e}", p.name) })
                    .collect::<Vec<_>>()
                    .join("*");
                let per_h = per_h
                    .into_iter()
                    .map(|(h, s)| (h, render_series(&plain, &s)))
                    .collect();
                (name, per_h)
            })
            .collect()
    }
}

/// Degree handling for [`mc_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// Enforces the MC-element shape and compares both routes.
    Strict,
    /// Accepts any element without constant term; returns the bracket sum.
    Diagnostic,
}

/// `h Δ(e^{γ/h}) e^{−γ/h}`.
pub fn residual_exponential(ring: &Ring, delta: &dyn LinearOp, gamma: &Series) -> Result<Series> {
    let g = gamma.shift_hbar(-1);
    let e = ring.exp(&g)?;
    let e_inv = ring.exp(&-&g)?;
    let d = delta.apply(ring, &e)?;
    Ok(ring.mul(&ring.mul_hbar(&d, 1), &e_inv))
}

/// `h Σ_{i≥1} K_i(γ/h, …, γ/h)/i!`, i.e. `Σ μ_i(γ, …, γ)/i!`.
pub fn residual_brackets(ring: &Ring, delta: &dyn LinearOp, gamma: &Series) -> Result<Series> {
    let g = gamma.shift_hbar(-1);
    let mut out = Series::zero();
    let max_order = ring.truncation().n_param.max(1) as usize;
    for i in 1..=max_order {
        let args = vec![g.clone(); i];
        let k = koszul_bracket_expansion(ring, delta, &args)?;
        out += k.scale(&Q::from_integer(factorial(i as u32)).recip());
    }
    Ok(ring.mul_hbar(&out, 1))
}

/// The MC residual of `γ`, computed by the bracket sum and by the
/// exponential form.
pub fn mc_residual(ring: &Ring, delta: &dyn LinearOp, gamma: &Series, mode: ResidualMode) -> Result<Series> {
    ring.check_shape(gamma)?;
    if !ring.at_u_zero(gamma).is_zero() {
        return Err(Error::Assertion("γ must vanish at u = 0".into()));
    }
    let brackets = residual_brackets(ring, delta, gamma)?;
    if mode == ResidualMode::Diagnostic {
        return Ok(brackets);
    }
    McElement::new(ring.clone(), gamma.clone(), Vec::new())?;
    let exponential = residual_exponential(ring, delta, gamma)?;
    if brackets != exponential {
        return Err(Error::RouteDisagreement {
            what: "MC residual".into(),
            detail: format!(
                "bracket sum {} vs exponential form {}",
                render_series(ring, &brackets),
                render_series(ring, &exponential)
            ),
        });
    }
    Ok(brackets)
}

/// Output of the universal solver.
#[derive(Clone, Debug)]
pub struct McSolution {
    pub element: McElement,
    /// `u`-linear term: `Σ u_i ι_Δ(rep_i)`.
    pub linear: Series,
    /// Correction added at each `u`-order ≥ 2 (zero entries included).
    pub corrections: BTreeMap<u32, Series>,
}

/// Parameter names for a basis of size `n`: `u` alone, else `u1..un`.
pub fn parameter_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["u".into()]
    } else {
        (1..=n).map(|i| format!("u{i}")).collect()
    }
}

/// Solves the MC equation order by order in `u`, starting from the
/// cohomology representatives of `cd`. At order `n` the residual `R_n`
/// must satisfy `π_Δ R_n = 0`; the correction is `−h_Δ R_n`.
pub fn solve_mc_universal(inst: &BvInstance, cd: &ContractionData) -> Result<McSolution> {
    if !cd.algebra().same_generators(&inst.algebra) {
        return Err(Error::GeneratorMismatch("contraction data belongs to another algebra".into()));
    }
    let m = inst.algebra.m();
    let reps = cd.representatives();
    let names = parameter_names(reps.len());
    let params: Vec<ParamSpec> = reps
        .iter()
        .zip(&names)
        .map(|(r, n)| ParamSpec::deformation(n.clone(), (1 - m) - r.degree))
        .collect();
    let ring = Ring::new(inst.algebra.clone(), params, inst.truncation)?;
    let pert = cd.perturbed(&inst.delta);

    let coeffs: Vec<Series> = (0..reps.len()).map(|i| ring.param(i)).collect();
    let linear = pert.iota(&ring, &coeffs)?;
    let mut gamma = linear.clone();
    let mut corrections = BTreeMap::new();
    for n in 2..=ring.truncation().n_param {
        let r = residual_exponential(&ring, &inst.delta, &gamma)?;
        let lower = r.filter(|k| ring.u_degree(k) < n);
        if !lower.is_zero() {
            return Err(Error::Assertion(format!(
                "residual below u-order {n} does not vanish: {}",
                render_series(&ring, &lower)
            )));
        }
        let rn = ring.u_part(&r, n);
        if rn.is_zero() {
            corrections.insert(n, Series::zero());
            continue;
        }
        let obstruction = pert.pi(&ring, &rn)?;
        if obstruction.iter().any(|c| !c.is_zero()) {
            let class = obstruction
                .iter()
                .zip(reps)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, r)| format!("({})*[{}]", render_series(&ring, c), r.label))
                .collect::<Vec<_>>()
                .join(" + ");
            return Err(Error::McObstruction { order: n, class });
        }
        let correction = -pert.h(&ring, &rn)?;
        gamma += &correction;
        corrections.insert(n, correction);
    }
    let residual = mc_residual(&ring, &inst.delta, &gamma, ResidualMode::Strict)?;
    if !residual.is_zero() {
        return Err(Error::Assertion(format!(
            "solved element has residual {}",
            render_series(&ring, &residual)
        )));
    }
    let labels = reps.iter().map(|r| r.label.clone()).collect();
    Ok(McSolution {
        element: McElement::new(ring, gamma, labels)?,
        linear,
        corrections,
    })
}
