//! Cohomology on windows, the lifting criterion for degeneration,
//! pairings, the flat connection, polarizations and miniversality.

mod connection;
mod pairing;

pub use connection::{miniversality_check, quasi_iso_check, transported_pairing, verify_flatness, FlatConnection};
pub use pairing::{
    check_pairing_compatibility, check_pairing_compatibility_twisted, good_basis_check, polarization_check,
    residue_symplectic, scalar_ring, to_scalar, trace_certificate, trace_pairing, verify_pairing_axioms,
    PairingSpec, PairingTable, PolarizationData, TraceCertificate, TraceRule,
};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{render_series, Ring, Series};
use crate::mc::{ContractionData, Representative};
use crate::operators::{BvInstance, LinearOp};
use crate::report::{Check, Report};

/// Which differential a cohomology computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Delta0,
    Delta,
}

/// Cohomology of a window.
#[derive(Clone, Debug)]
pub struct CohomologySlice {
    pub selector: Selector,
    pub n_poly: u32,
    pub betti: BTreeMap<i64, usize>,
    /// Dimensions of the subcomplex actually used, per degree.
    pub window_dims: BTreeMap<i64, usize>,
    /// Whether the differential maps the polynomial window into itself.
    pub closed: bool,
    pub representatives: Vec<Representative>,
    /// For `Delta`: the lifts `S(rep)`; for `Delta0`: the representatives.
    pub cocycles: Vec<Series>,
}

impl CohomologySlice {
    pub fn rank(&self) -> usize {
        self.representatives.len()
    }
}

/// `H(W, Δ_0)` on the window, or — for `Delta` — its free lift to
/// `H(W[[h]], Δ)`, certified by lifting every representative.
pub fn cohomology(inst: &BvInstance, selector: Selector, n_poly: u32) -> Result<CohomologySlice> {
    let cd = ContractionData::new(inst, n_poly)?;
    let ring = inst.ring();
    let cocycles = match selector {
        Selector::Delta0 => cd.representatives().iter().map(|r| ring.from_plain(&r.element)).collect(),
        Selector::Delta => cd
            .representatives()
            .iter()
            .map(|r| lift_cocycle(inst, &cd, &ring.from_plain(&r.element)))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(CohomologySlice {
        selector,
        n_poly,
        betti: cd.betti(),
        window_dims: cd.window_dims(),
        closed: cd.is_closed(),
        representatives: cd.representatives().to_vec(),
        cocycles,
    })
}

fn apply_leading(inst: &BvInstance, ring: &Ring, s: &Series) -> Result<Series> {
    match inst.delta.leading() {
        Some(d0) => d0.apply(ring, s),
        None => Ok(Series::zero()),
    }
}

/// `S(c) = ι_Δ(π c) + Δ(h c)` for a `Δ_0`-cocycle `c`; a `Δ`-cocycle
/// with `S(c) ≡ c mod h`.
pub fn lift_cocycle(inst: &BvInstance, cd: &ContractionData, c: &Series) -> Result<Series> {
    let ring = inst.ring();
    let d0c = apply_leading(inst, &ring, c)?;
    if !d0c.is_zero() {
        return Err(Error::Assertion(format!(
            "{} is not a cocycle of the h^0 differential: image {}",
            render_series(&ring, c),
            render_series(&ring, &d0c)
        )));
    }
    let pert = cd.perturbed(&inst.delta);
    let alpha = pert.iota(&ring, &cd.pi(&ring, c)?)? + inst.delta.apply(&ring, &cd.h(&ring, c)?)?;
    let check = inst.delta.apply(&ring, &alpha)?;
    if let Some(order) = check.min_hbar() {
        return Err(Error::LiftingObstruction {
            order,
            class: render_series(&ring, &check.hbar_coeff(order)),
        });
    }
    Ok(alpha)
}

/// `T(α)`: the `Δ_0`-class of the `h^0` part of a `Δ`-cocycle.
pub fn class_at_h0(inst: &BvInstance, cd: &ContractionData, alpha: &Series) -> Result<Vec<Series>> {
    let ring = inst.ring();
    cd.pi(&ring, &alpha.filter(|k| k.hbar == 0))
}

/// Coordinates of a `Δ`-cocycle on the representatives, `π_Δ(s)`.
pub fn reduce_mod_image(inst: &BvInstance, cd: &ContractionData, s: &Series) -> Result<Vec<Series>> {
    let ring = inst.ring();
    let ds = inst.delta.apply(&ring, s)?;
    if !ds.is_zero() {
        return Err(Error::Assertion(format!(
            "{} is not a cocycle: image {}",
            render_series(&ring, s),
            render_series(&ring, &ds)
        )));
    }
    cd.perturbed(&inst.delta).pi(&ring, s)
}

/// Every `Δ_0`-cocycle monomial and every representative lifts; `T∘S = id`
/// on the representatives.
pub fn check_degeneration(inst: &BvInstance, n_poly: u32) -> Report {
    let mut rep = Report::new(format!("degeneration:{}", inst.name()), inst.truncation);
    let cd = match ContractionData::new(inst, n_poly) {
        Ok(cd) => cd,
        Err(e) => {
            rep.push(Check::fail("contraction", e.to_string()));
            return rep;
        }
    };
    rep.push(cd.check_identities());
    let ring = inst.ring();
    let h_range = format!("h-orders <= {}", ring.cap());

    let reps = cd.representatives();
    let mut witness = None;
    for (j, r) in reps.iter().enumerate() {
        let c = ring.from_plain(&r.element);
        let run = || -> Result<Option<String>> {
            let lift = lift_cocycle(inst, &cd, &c)?;
            let t = class_at_h0(inst, &cd, &lift)?;
            let ok = t.iter().enumerate().all(|(i, x)| if i == j { *x == ring.one() } else { x.is_zero() });
            Ok((!ok).then(|| format!("T(S([{}])) is not [{}]", r.label, r.label)))
        };
        if let Some(w) = run().unwrap_or_else(|e| Some(format!("[{}]: {e}", r.label))) {
            witness = Some(w);
            break;
        }
    }
    rep.push(
        Check::from_witness("T o S = id", witness)
            .with_range(format!("{} representatives, {h_range}", reps.len())),
    );

    // monomials that are cocycles of Δ_0 inside the subcomplex
    let monos = inst.algebra.monomials_up_to(n_poly);
    let candidates: Vec<Series> = monos
        .iter()
        .map(|m| ring.monomial(m))
        .filter(|x| matches!(apply_leading(inst, &ring, x), Ok(v) if v.is_zero()))
        .collect();
    let witness = candidates.par_iter().find_map_first(|c| match lift_cocycle(inst, &cd, c) {
        Ok(_) => None,
        Err(Error::OutsideWindow(_)) => None,
        Err(e) => Some(format!("{}: {e}", render_series(&ring, c))),
    });
    rep.push(Check::from_witness("cocycles lift", witness).with_range(format!(
        "{} cocycle monomials of polynomial degree <= {n_poly}, {h_range}",
        candidates.len()
    )));
    rep.values.insert(
        "betti".into(),
        serde_json::to_value(cd.betti().into_iter().map(|(d, b)| (d.to_string(), b)).collect::<BTreeMap<_, _>>())
            .unwrap_or_default(),
    );
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_a1, build_a2, build_b};
    use crate::graded::{parse_series, Truncation};

    fn trunc() -> Truncation {
        Truncation::new(10, 6, 0)
    }

    #[test]
    fn cohomology_examples() {
        let a1 = build_a1(trunc());
        let s = cohomology(&a1, Selector::Delta0, 10).unwrap();
        assert_eq!(s.betti, BTreeMap::from([(-1, 0), (0, 1)]));
        let s = cohomology(&a1, Selector::Delta, 10).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.cocycles[0], a1.ring().one());
        let a2 = build_a2(trunc());
        let s = cohomology(&a2, Selector::Delta0, 10).unwrap();
        assert_eq!(s.betti[&0], 2);
    }

    #[test]
    fn lifting_examples() {
        let a1 = build_a1(trunc());
        let cd = ContractionData::new(&a1, 10).unwrap();
        let r = a1.ring();
        let p = |s: &str| parse_series(&r, s).unwrap();
        assert_eq!(lift_cocycle(&a1, &cd, &r.one()).unwrap(), r.one());
        assert_eq!(lift_cocycle(&a1, &cd, &p("t^2")).unwrap(), p("t^2 + h"));
        assert!(lift_cocycle(&a1, &cd, &p("t*dt")).is_err());
        let a2 = build_a2(trunc());
        let cd2 = ContractionData::new(&a2, 10).unwrap();
        let r2 = a2.ring();
        let t = parse_series(&r2, "t").unwrap();
        assert_eq!(lift_cocycle(&a2, &cd2, &t).unwrap(), t);
    }

    #[test]
    fn reduction_examples() {
        let a1 = build_a1(trunc());
        let cd = ContractionData::new(&a1, 10).unwrap();
        let r = a1.ring();
        let p = |s: &str| parse_series(&r, s).unwrap();
        assert_eq!(reduce_mod_image(&a1, &cd, &p("t^2")).unwrap(), vec![p("-h")]);
        assert_eq!(reduce_mod_image(&a1, &cd, &p("t^4")).unwrap(), vec![p("3*h^2")]);
        assert!(reduce_mod_image(&a1, &cd, &p("t^3")).unwrap()[0].is_zero());
        assert!(reduce_mod_image(&a1, &cd, &p("dt")).is_err());
    }

    #[test]
    fn degeneration_on_fixtures() {
        for inst in [build_a1(trunc()), build_a2(trunc()), build_b(trunc())] {
            let n = if inst.algebra.generators().is_empty() { 0 } else { 10 };
            let rep = check_degeneration(&inst, n);
            assert!(rep.passed(), "{}", rep.render_text());
        }
    }
}
