use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::{render_series, Ring, Series};
use crate::morphisms::{apply_morphism, cumulant_partition, BvMorphism, UnitalMap};
use crate::operators::{ad_tower, verify_bv_operator, HbarOperator, LinearOp, SweepRange};
use crate::report::{Check, Report};
use crate::scalar::{factorial, Q};

use super::{mc_residual, McElement, ResidualMode};

/// `Δ_γ = Σ_i ad^i_{γ/h}(Δ)/i!` on the ring of `γ`.
#[derive(Clone, Debug)]
pub struct TwistedOperator {
    delta: HbarOperator,
    gamma: McElement,
    g: Series,
}

impl TwistedOperator {
    pub fn gamma(&self) -> &McElement {
        &self.gamma
    }

    pub fn ring(&self) -> &Ring {
        self.gamma.ring()
    }

    /// `e^{−γ/h} Δ(e^{γ/h} s)`.
    pub fn conjugate(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let g = self.gamma.ring().embed_into(ring, &self.g)?;
        let e = ring.exp(&g)?;
        let e_inv = ring.exp(&-&g)?;
        let inner = self.delta.apply(ring, &ring.mul(&e, s))?;
        Ok(ring.mul(&e_inv, &inner))
    }
}

impl LinearOp for TwistedOperator {
    fn degree(&self) -> i64 {
        1
    }

    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let g = self.gamma.ring().embed_into(ring, &self.g)?;
        let mut out = self.delta.apply(ring, s)?;
        let mut args = Vec::new();
        // every ad_{γ/h} raises the u-order by at least one
        for i in 1..=ring.truncation().n_param {
            args.push(g.clone());
            let term = ad_tower(ring, &self.delta, &args, s)?;
            out += term.scale(&Q::from_integer(factorial(i)).recip());
        }
        Ok(out)
    }
}

/// `Δ_γ − Δ_0`, the perturbation of the untwisted contraction.
pub struct TwistPerturbation<'a> {
    tw: &'a TwistedOperator,
}

impl TwistedOperator {
    pub fn perturbation(&self) -> TwistPerturbation<'_> {
        TwistPerturbation { tw: self }
    }
}

impl LinearOp for TwistPerturbation<'_> {
    fn degree(&self) -> i64 {
        1
    }

    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let full = self.tw.apply(ring, s)?;
        Ok(match self.tw.delta.leading() {
            Some(d0) => full - d0.apply(ring, s)?,
            None => full,
        })
    }
}

pub fn twist_operator(delta: &HbarOperator, gamma: &McElement) -> TwistedOperator {
    TwistedOperator {
        delta: delta.clone(),
        gamma: gamma.clone(),
        g: gamma.over_hbar(),
    }
}

/// BCH sum against conjugation on `probes`, pole-freeness on monomials,
/// and the BV∞ axioms of the twisted operator.
pub fn verify_twisted_operator(tw: &TwistedOperator, probes: &[Series], sweep: SweepRange) -> Report {
    let ring = tw.ring().clone();
    let mut rep = Report::new(
        format!("twist:{}", ring.algebra().name()),
        ring.truncation(),
    );
    rep.values.insert("gamma".into(), tw.gamma.render().into());

    let witness = probes.par_iter().find_map_first(|p| {
        match (tw.apply(&ring, p), tw.conjugate(&ring, p)) {
            (Ok(a), Ok(b)) if a == b => None,
            (Ok(a), Ok(b)) => Some(format!(
                "on {}: {} vs {}",
                render_series(&ring, p),
                render_series(&ring, &a),
                render_series(&ring, &b)
            )),
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        }
    });
    rep.push(
        Check::from_witness("bch sum = conjugation", witness)
            .with_range(format!("{} probe elements, u-order <= {}", probes.len(), ring.truncation().n_param)),
    );

    let monos = ring.algebra().monomials_up_to(ring.truncation().n_poly);
    let witness = monos.par_iter().find_map_first(|m| match tw.apply(&ring, &ring.monomial(m)) {
        Ok(v) if v.is_pole_free() => None,
        Ok(v) => Some(format!(
            "{} -> {}",
            render_series(&ring, &ring.monomial(m)),
            render_series(&ring, &v)
        )),
        Err(e) => Some(e.to_string()),
    });
    rep.push(Check::from_witness("pole-free on A[[h]]", witness).with_range(format!(
        "{} monomials of polynomial degree <= {}",
        monos.len(),
        ring.truncation().n_poly
    )));

    for mut c in verify_bv_operator(&ring, tw, sweep) {
        c.name = format!("twisted {}", c.name);
        rep.push(c);
    }
    rep
}

/// `γ_B = h log f(e^{γ_A/h})`, with its consistency checks.
pub fn pushforward_mc(f: &BvMorphism, gamma_a: &McElement) -> Result<McElement> {
    let src = gamma_a.ring();
    let tgt = f.target_ring(src)?;
    let e = src.exp(&gamma_a.over_hbar())?;
    let image = apply_morphism(f, src, &tgt, &e)?;
    let log = tgt.log(&image)?;
    let gamma_b = tgt.mul_hbar(&log, 1);
    if !gamma_b.is_pole_free() {
        return Err(Error::Pole(format!("pushforward {}", render_series(&tgt, &gamma_b))));
    }
    let element = McElement::new(tgt.clone(), gamma_b.clone(), gamma_a.labels().to_vec())?;
    if tgt.exp(&element.over_hbar())? != image {
        return Err(Error::Assertion("e^{γ_B/h} differs from f(e^{γ_A/h})".into()));
    }
    let closed = f.target.delta.apply(&tgt, &image)?;
    if !closed.is_zero() {
        return Err(Error::Assertion(format!(
            "Δ'(f(e^{{γ_A/h}})) = {}",
            render_series(&tgt, &closed)
        )));
    }
    let residual = mc_residual(&tgt, &f.target.delta, &gamma_b, ResidualMode::Strict)?;
    if !residual.is_zero() {
        return Err(Error::Assertion(format!(
            "pushforward has MC residual {}",
            render_series(&tgt, &residual)
        )));
    }
    Ok(element)
}

/// `f_γ(x) = e^{−γ_B/h} f(e^{γ_A/h} x)`.
#[derive(Clone, Debug)]
pub struct TwistedMorphism {
    pub morphism: BvMorphism,
    pub gamma_a: McElement,
    pub gamma_b: McElement,
}

pub fn twist_morphism(f: &BvMorphism, gamma_a: &McElement) -> Result<TwistedMorphism> {
    Ok(TwistedMorphism {
        morphism: f.clone(),
        gamma_a: gamma_a.clone(),
        gamma_b: pushforward_mc(f, gamma_a)?,
    })
}

impl UnitalMap for TwistedMorphism {
    fn apply_map(&self, src: &Ring, tgt: &Ring, s: &Series) -> Result<Series> {
        let ga = self.gamma_a.ring().embed_into(src, &self.gamma_a.over_hbar())?;
        let gb = self.gamma_b.ring().embed_into(tgt, &self.gamma_b.over_hbar())?;
        let inner = src.mul(&src.exp(&ga)?, s);
        let image = apply_morphism(&self.morphism, src, tgt, &inner)?;
        Ok(tgt.mul(&tgt.exp(&-&gb)?, &image))
    }
}

/// `Σ_i κ_{i+n}(f)(γ/h, …, γ/h, α_1, …, α_n)/i!`.
pub fn twisted_cumulant_expansion(tw: &TwistedMorphism, src: &Ring, tgt: &Ring, args: &[Series]) -> Result<Series> {
    let g = tw.gamma_a.ring().embed_into(src, &tw.gamma_a.over_hbar())?;
    let mut out = Series::zero();
    for i in 0..=src.truncation().n_param {
        let mut full = vec![g.clone(); i as usize];
        full.extend_from_slice(args);
        let k = cumulant_partition(&tw.morphism, src, tgt, &full)?;
        out += k.scale(&Q::from_integer(factorial(i)).recip());
    }
    Ok(out)
}

/// Unit, pole-freeness, intertwining `f_γ Δ_{γ_A} = Δ'_{γ_B} f_γ` on
/// monomials, and the cumulant identity on the given tuples.
pub fn verify_twisted_morphism(tw: &TwistedMorphism, tuples: &[Vec<Series>]) -> Report {
    let src = tw.gamma_a.ring().clone();
    let tgt = tw.gamma_b.ring().clone();
    let mut rep = Report::new(
        format!(
            "twisted-morphism:{}->{}",
            tw.morphism.source.name(),
            tw.morphism.target.name()
        ),
        src.truncation(),
    );
    rep.values.insert("gamma_a".into(), tw.gamma_a.render().into());
    rep.values.insert("gamma_b".into(), tw.gamma_b.render().into());

    rep.push(match tw.apply_map(&src, &tgt, &src.one()) {
        Ok(v) if v == tgt.one() => Check::pass("f_gamma(1) = 1"),
        Ok(v) => Check::fail("f_gamma(1) = 1", render_series(&tgt, &v)),
        Err(e) => Check::fail("f_gamma(1) = 1", e.to_string()),
    });

    let da = twist_operator(&tw.morphism.source.delta, &tw.gamma_a);
    let db = twist_operator(&tw.morphism.target.delta, &tw.gamma_b);
    // e^{γ/h} raises the polynomial degree; stay where the rule tables of f
    // are complete
    let gamma_poly = tw.gamma_a.gamma().terms().map(|(k, _)| k.poly_degree()).max().unwrap_or(0);
    let margin = src.truncation().n_param * gamma_poly + 1;
    let max_in = src.truncation().n_poly.saturating_sub(margin);
    let monos = src.algebra().monomials_up_to(max_in);
    let mut pole = None;
    let witness = monos.par_iter().find_map_first(|m| {
        let x = src.monomial(m);
        let run = || -> Result<Option<String>> {
            let fx = tw.apply_map(&src, &tgt, &x)?;
            if !fx.is_pole_free() {
                return Ok(Some(format!("pole: f_gamma({}) = {}", render_series(&src, &x), render_series(&tgt, &fx))));
            }
            let lhs = tw.apply_map(&src, &tgt, &da.apply(&src, &x)?)?;
            let rhs = db.apply(&tgt, &fx)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "on {}: {} vs {}",
                    render_series(&src, &x),
                    render_series(&tgt, &lhs),
                    render_series(&tgt, &rhs)
                )
            }))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    if let Some(w) = &witness {
        if w.starts_with("pole") {
            pole = Some(w.clone());
        }
    }
    let range = format!("{} monomials of polynomial degree <= {max_in}", monos.len());
    rep.push(Check::from_witness("pole-free outputs", pole).with_range(range.clone()));
    rep.push(Check::from_witness("intertwines twisted operators", witness).with_range(range));

    let witness = tuples.par_iter().find_map_first(|args| {
        let run = || -> Result<Option<String>> {
            let lhs = cumulant_partition(tw, &src, &tgt, args)?;
            let rhs = twisted_cumulant_expansion(tw, &src, &tgt, args)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "kappa_{} on {} args: {} vs {}",
                    args.len(),
                    args.len(),
                    render_series(&tgt, &lhs),
                    render_series(&tgt, &rhs)
                )
            }))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    let n_max = tuples.iter().map(Vec::len).max().unwrap_or(0);
    rep.push(
        Check::from_witness("twisted cumulant identity", witness)
            .with_range(format!("{} tuples of arity <= {n_max}", tuples.len())),
    );
    rep
}
