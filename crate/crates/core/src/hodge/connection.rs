use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::{render_series, Ring, Series};
use crate::linalg::Matrix;
use crate::mc::{ContractionData, McElement};
use crate::morphisms::BvMorphism;
use crate::operators::BvInstance;
use crate::report::{Check, Report};
use crate::scalar::render_q;

use super::pairing::{scalar_ring, to_scalar, PairingTable};

/// `∇_i = ∂/∂u_i + h^{−1}(∂γ/∂u_i)·` on the ring of `γ`.
#[derive(Clone, Debug)]
pub struct FlatConnection {
    gamma: McElement,
}

impl FlatConnection {
    pub fn new(gamma: McElement) -> Self {
        Self { gamma }
    }

    pub fn gamma(&self) -> &McElement {
        &self.gamma
    }

    pub fn ring(&self) -> &Ring {
        self.gamma.ring()
    }

    pub fn dimension(&self) -> usize {
        self.ring().n_params()
    }

    /// `∇_i α`. Lowers the truncation weight by one.
    pub fn covariant(&self, i: usize, alpha: &Series) -> Series {
        let ring = self.ring();
        let dg = ring.derivative_param(i, self.gamma.gamma()).shift_hbar(-1);
        ring.derivative_param(i, alpha) + ring.mul(&dg, alpha)
    }

    /// `[∇_i, ∇_j] = 0` on `probes`, compared at weight `<= cap − 2`.
    pub fn curvature_check(&self, probes: &[Series]) -> Check {
        let ring = self.ring();
        let exact = ring.with_cap(ring.cap() - 2);
        let n = self.dimension();
        for p in probes {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = self.covariant(i, &self.covariant(j, p));
                    let b = self.covariant(j, &self.covariant(i, p));
                    let diff = exact.truncate(&(a - b));
                    if !diff.is_zero() {
                        return Check::fail(
                            "curvature",
                            format!(
                                "[nabla_{i}, nabla_{j}] {} = {}",
                                render_series(ring, p),
                                render_series(ring, &diff)
                            ),
                        );
                    }
                }
            }
        }
        Check::pass("curvature").with_range(format!(
            "{} probes, weight <= {}",
            probes.len(),
            exact.cap()
        ))
    }
}

/// `(α, β)_u = (e^{γ/h}α, e^{γ/h}β)` with the untwisted reduction and the
/// constant table; the result lives in the scalar ring with `γ`'s
/// parameters.
pub fn transported_pairing(
    inst: &BvInstance,
    cd: &ContractionData,
    table: &PairingTable,
    gamma: &McElement,
    a: &Series,
    b: &Series,
) -> Result<Series> {
    let ring = gamma.ring();
    let scalars = scalar_ring(ring.truncation(), ring.params().to_vec())?.with_cap(ring.cap());
    let e = ring.exp(&gamma.over_hbar())?;
    let pert = cd.perturbed(&inst.delta);
    let coords = |s: &Series| -> Result<Vec<Series>> {
        pert.pi(ring, &ring.mul(&e, s))?
            .iter()
            .map(|c| to_scalar(&scalars, c))
            .collect()
    };
    table.pair_in(&scalars, &coords(a)?, &coords(b)?)
}

/// `∂_i(α, β)_u = (∇_i α, β)_u + (α, ∇_i β)_u` on all pairs of `sections`,
/// compared at weight `<= cap − 1`. The `h^{−1}∂_iγ` term in the right slot
/// is conjugated with the rest of the slot (`h ↦ −h`).
pub fn verify_flatness(
    inst: &BvInstance,
    cd: &ContractionData,
    table: &PairingTable,
    conn: &FlatConnection,
    sections: &[Series],
) -> Report {
    let ring = conn.ring().clone();
    let mut rep = Report::new(format!("flatness:{}", inst.name()), ring.truncation());
    rep.value("gamma", conn.gamma().render());
    rep.push(conn.curvature_check(sections));
    let run = || -> Result<Option<String>> {
        let scalars = scalar_ring(ring.truncation(), ring.params().to_vec())?;
        let exact = scalars.with_cap(ring.cap() - 1);
        let pairing = |a: &Series, b: &Series| transported_pairing(inst, cd, table, conn.gamma(), a, b);
        for a in sections {
            for b in sections {
                let value = pairing(a, b)?;
                for i in 0..conn.dimension() {
                    let lhs = exact.truncate(&scalars.derivative_param(i, &value));
                    let rhs = pairing(&conn.covariant(i, a), b)? + pairing(a, &conn.covariant(i, b))?;
                    let rhs = exact.truncate(&rhs);
                    if lhs != rhs {
                        return Ok(Some(format!(
                            "d/du_{i} ({}, {}) = {} but the connection gives {}",
                            render_series(&ring, a),
                            render_series(&ring, b),
                            render_series(&scalars, &lhs),
                            render_series(&scalars, &rhs)
                        )));
                    }
                }
            }
        }
        Ok(None)
    };
    let witness = run().unwrap_or_else(|e| Some(e.to_string()));
    rep.push(Check::from_witness("pairing is flat", witness).with_range(format!(
        "{} sections, weight <= {}",
        sections.len(),
        ring.cap() - 1
    )));
    rep
}

/// The matrix of `X ↦ h∇_X 1 = ∂_X γ` modulo `h` at `u = 0`, in the
/// representative basis, must be the identity.
pub fn miniversality_check(inst: &BvInstance, cd: &ContractionData, gamma: &McElement) -> Report {
    let ring = gamma.ring();
    let mut rep = Report::new(format!("miniversality:{}", inst.name()), ring.truncation());
    let n = ring.n_params();
    let run = || -> Result<Matrix> {
        if n != cd.rank() {
            return Err(Error::RankDeficient(format!(
                "{n} parameters for a cohomology of rank {}",
                cd.rank()
            )));
        }
        let mut m = Matrix::zeros(cd.rank(), n);
        for i in 0..n {
            let d = ring.at_u_zero(&ring.derivative_param(i, gamma.gamma()));
            let coords = cd.pi(ring, &d.filter(|k| k.hbar == 0))?;
            for (j, c) in coords.iter().enumerate() {
                m.data[j][i] = c.constant_term();
            }
        }
        Ok(m)
    };
    match run() {
        Ok(m) => {
            let rendered: Vec<Vec<String>> = m.data.iter().map(|r| r.iter().map(render_q).collect()).collect();
            rep.value("matrix", serde_json::to_value(&rendered).unwrap_or_default());
            rep.push(if m.is_identity() {
                Check::pass("miniversal")
            } else {
                Check::fail("miniversal", format!("matrix {rendered:?} is not the identity"))
            }
            .with_range(format!("rank {}", cd.rank())));
        }
        Err(e) => rep.push(Check::fail("miniversal", e.to_string())),
    }
    rep
}

/// `f_0` induces a bijection between the `Δ_0`-cohomologies of the windows.
pub fn quasi_iso_check(f: &BvMorphism, n_poly_a: u32, n_poly_b: u32) -> Report {
    let src = f.source.ring();
    let mut rep = Report::new(
        format!("quasi-iso:{}->{}", f.source.name(), f.target.name()),
        src.truncation(),
    );
    let run = || -> Result<(Matrix, usize, usize)> {
        let cd_a = ContractionData::new(&f.source, n_poly_a)?;
        let cd_b = ContractionData::new(&f.target, n_poly_b)?;
        let tgt = f.target_ring(&src)?;
        let mut m = Matrix::zeros(cd_b.rank(), cd_a.rank());
        for (j, r) in cd_a.representatives().iter().enumerate() {
            let image = f.apply_component(0, &src, &tgt, &src.from_plain(&r.element))?;
            for (i, c) in cd_b.pi(&tgt, &image)?.iter().enumerate() {
                m.data[i][j] = c.constant_term();
            }
        }
        Ok((m, cd_a.rank(), cd_b.rank()))
    };
    match run() {
        Ok((m, ra, rb)) => {
            rep.value("rank_source", ra);
            rep.value("rank_target", rb);
            let ok = ra == rb && (ra == 0 || !m.det().is_zero());
            let c = if ok {
                Check::pass("f_0 bijective on cohomology")
            } else {
                Check::fail(
                    "f_0 bijective on cohomology",
                    format!("rank {ra} -> rank {rb}, induced map of rank {}", m.rank()),
                )
            };
            rep.push(c.with_range(format!("windows of polynomial degree <= {n_poly_a} and <= {n_poly_b}")));
        }
        Err(e) => rep.push(Check::fail("f_0 bijective on cohomology", e.to_string())),
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{a1_bundle, build_a1, build_a2, build_b};
    use crate::graded::{parse_series, ParamSpec, Truncation};
    use crate::hodge::PairingSpec;
    use crate::mc::solve_mc_universal;

    fn unit_table(trunc: Truncation) -> PairingTable {
        PairingTable::from_spec(
            &PairingSpec {
                labels: vec!["1".into()],
                degrees: vec![0],
                entries: vec![vec!["1".into()]],
            },
            trunc,
        )
        .unwrap()
    }

    #[test]
    fn a1_connection_on_unit_section() {
        let trunc = Truncation::new(10, 4, 2);
        let a1 = build_a1(trunc);
        let cd = ContractionData::new(&a1, 10).unwrap();
        let ring = a1.ring().with_params(vec![ParamSpec::deformation("u", 0)]).unwrap();
        let gamma = McElement::new(ring.clone(), ring.param(0), vec!["1".into()]).unwrap();
        let conn = FlatConnection::new(gamma.clone());
        assert_eq!(conn.covariant(0, &ring.one()), ring.hbar_pow(-1));
        let table = unit_table(trunc);
        let v = transported_pairing(&a1, &cd, &table, &gamma, &ring.one(), &ring.one()).unwrap();
        assert_eq!(v, ring.one().map_keys(|k| crate::graded::Key { mono: Vec::new(), ..k.clone() }));
        let sections: Vec<Series> = ["1", "t", "t^2", "u*t^2 + t"]
            .iter()
            .map(|s| parse_series(&ring, s).unwrap())
            .collect();
        let rep = verify_flatness(&a1, &cd, &table, &conn, &sections);
        assert!(rep.passed(), "{}", rep.render_text());
    }

    #[test]
    fn flatness_with_two_parameters() {
        let trunc = Truncation::new(10, 3, 3);
        let a2 = build_a2(trunc);
        let cd = ContractionData::new(&a2, 10).unwrap();
        let sol = solve_mc_universal(&a2, &cd).unwrap();
        let conn = FlatConnection::new(sol.element.clone());
        let ring = sol.element.ring();
        let probes: Vec<Series> = ["1", "t", "u1*t + u2"].iter().map(|s| parse_series(ring, s).unwrap()).collect();
        assert!(conn.curvature_check(&probes).passed());
    }

    #[test]
    fn miniversality_on_fixtures() {
        let trunc = Truncation::new(8, 3, 3);
        for (inst, n) in [(build_a1(trunc), 8), (build_a2(trunc), 8), (build_b(trunc), 0)] {
            let cd = ContractionData::new(&inst, n).unwrap();
            let sol = solve_mc_universal(&inst, &cd).unwrap();
            let rep = miniversality_check(&inst, &cd, &sol.element);
            assert!(rep.passed(), "{}", rep.render_text());
        }
    }

    #[test]
    fn quasi_isomorphisms() {
        let trunc = Truncation::new(8, 4, 0);
        let bundle = a1_bundle(trunc);
        assert!(quasi_iso_check(&bundle.morphism, 8, 0).passed());
        let id = BvMorphism::identity(&bundle.source);
        assert!(quasi_iso_check(&id, 8, 8).passed());
    }
}
