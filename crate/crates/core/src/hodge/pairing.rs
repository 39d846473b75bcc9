use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{parse_series, render_series, Algebra, Key, ParamSpec, Ring, Series, Truncation};
use crate::linalg::{dot, Matrix, Solve};
use crate::mc::{twist_morphism, ContractionData, McElement};
use crate::morphisms::{apply_morphism, BvMorphism};
use crate::operators::{BvInstance, LinearOp};
use crate::report::{Check, Report};
use crate::scalar::{render_q, Q};

/// `K[[h]]`, optionally with parameters.
pub fn scalar_ring(trunc: Truncation, params: Vec<ParamSpec>) -> Result<Ring> {
    let k = Arc::new(Algebra::new("K", Vec::new(), 1)?);
    Ring::new(k, params, trunc)
}

/// Reads a generator-free series of any ring as an element of the scalar
/// ring `target` (parameter lists must agree in length).
pub fn to_scalar(target: &Ring, s: &Series) -> Result<Series> {
    if !s.is_scalar() {
        return Err(Error::Assertion("expected a scalar series".into()));
    }
    if s.terms().any(|(k, _)| k.params.len() != target.n_params()) {
        return Err(Error::GeneratorMismatch("parameter count differs from the scalar ring".into()));
    }
    Ok(target.truncate(&s.map_keys(|k| Key {
        params: k.params.clone(),
        hbar: k.hbar,
        mono: Vec::new(),
    })))
}

/// The pairing on a cohomology basis, extended by `(aα, bβ) = a(h)·b(−h)·(α, β)`.
#[derive(Clone, Debug)]
pub struct PairingTable {
    ring: Ring,
    labels: Vec<String>,
    degrees: Vec<i64>,
    entries: Vec<Vec<Series>>,
}

/// Text form: labels, degrees and entries as `h`-polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingSpec {
    pub labels: Vec<String>,
    #[serde(default)]
    pub degrees: Vec<i64>,
    pub entries: Vec<Vec<String>>,
}

impl PairingTable {
    pub fn new(ring: Ring, labels: Vec<String>, degrees: Vec<i64>, entries: Vec<Vec<Series>>) -> Result<Self> {
        let n = labels.len();
        if degrees.len() != n || entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!(
                "pairing table over {n} labels needs {n} degrees and an {n}x{n} matrix"
            )));
        }
        if ring.n_gens() != 0 {
            return Err(Error::Config("pairing tables live over the scalar ring".into()));
        }
        for e in entries.iter().flatten() {
            ring.check_shape(e)?;
        }
        Ok(Self {
            ring,
            labels,
            degrees,
            entries,
        })
    }

    /// Parses entries in the scalar ring (only `h` is available; degrees
    /// default to 0).
    pub fn from_spec(spec: &PairingSpec, trunc: Truncation) -> Result<Self> {
        let ring = scalar_ring(trunc, Vec::new())?;
        let degrees = if spec.degrees.is_empty() {
            vec![0; spec.labels.len()]
        } else {
            spec.degrees.clone()
        };
        let entries = spec
            .entries
            .iter()
            .map(|row| row.iter().map(|e| parse_series(&ring, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, spec.labels.clone(), degrees, entries)
    }

    pub fn to_spec(&self) -> PairingSpec {
        PairingSpec {
            labels: self.labels.clone(),
            degrees: self.degrees.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| render_series(&self.ring, e)).collect())
                .collect(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Series {
        &self.entries[i][j]
    }

    /// `Σ a_i(h)·b_j(−h)·T_ij` in the table's ring.
    pub fn pair(&self, a: &[Series], b: &[Series]) -> Result<Series> {
        self.pair_in(&self.ring, a, b)
    }

    /// As [`Self::pair`], in a scalar ring whose parameter list ends with
    /// the table's.
    pub fn pair_in(&self, ring: &Ring, a: &[Series], b: &[Series]) -> Result<Series> {
        let n = self.rank();
        if a.len() != n || b.len() != n {
            return Err(Error::Config(format!(
                "pairing of rank {n} applied to {} and {} coordinates",
                a.len(),
                b.len()
            )));
        }
        let mut out = Series::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let t = &self.entries[i][j];
                if bj.is_zero() || t.is_zero() {
                    continue;
                }
                let t = self.ring.embed_into(ring, t)?;
                out += ring.mul(&ring.mul(ai, &bj.hbar_conjugate()), &t);
            }
        }
        Ok(out)
    }

    /// The `(i, j)` entry as a map `h`-power → coefficient, at `u = 0`.
    fn constant_coefficients(&self, i: usize, j: usize) -> BTreeMap<i32, Q> {
        let mut out = BTreeMap::new();
        for (k, c) in self.ring.at_u_zero(&self.entries[i][j]).terms() {
            *out.entry(k.hbar).or_insert_with(Q::zero) += c;
        }
        out
    }

    /// `h^0` matrix at `u = 0`.
    pub fn leading_matrix(&self) -> Matrix {
        let n = self.rank();
        Matrix::from_rows(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| self.constant_coefficients(i, j).remove(&0).unwrap_or_else(Q::zero))
                        .collect()
                })
                .collect(),
        )
    }
}

fn coordinate(ring: &Ring, n: usize, i: usize, c: Series) -> Vec<Series> {
    let mut v = vec![ring.zero(); n];
    v[i] = c;
    v
}

/// Parity, hermitian symmetry, sesquilinearity and nondegeneracy mod `h`.
///
/// Parity: the `h^k` coefficient of `T_ij` vanishes unless `|i||j| + k` is
/// even. Symmetry: `T_ij(h) = (−1)^{|i||j|} T_ji(−h)`.
pub fn verify_pairing_axioms(p: &PairingTable) -> Report {
    let ring = p.ring();
    let mut rep = Report::new("pairing-axioms", ring.truncation());
    let n = p.rank();
    let sign = |i: usize, j: usize| (p.degrees[i] * p.degrees[j]).rem_euclid(2) == 1;

    let mut parity = None;
    let mut symmetry = None;
    let mut poles = None;
    for i in 0..n {
        for j in 0..n {
            let t = p.entry(i, j);
            if !t.is_pole_free() && poles.is_none() {
                poles = Some(format!("({},{}) = {}", p.labels[i], p.labels[j], render_series(ring, t)));
            }
            let odd = sign(i, j);
            if parity.is_none() {
                if let Some((k, _)) = t.terms().find(|(k, _)| (k.hbar.rem_euclid(2) == 1) != odd) {
                    parity = Some(format!(
                        "({},{}) has an h^{} term: {}",
                        p.labels[i],
                        p.labels[j],
                        k.hbar,
                        render_series(ring, t)
                    ));
                }
            }
            let mirrored = p.entry(j, i).hbar_conjugate();
            let mirrored = if odd { -mirrored } else { mirrored };
            if symmetry.is_none() && *t != mirrored {
                symmetry = Some(format!(
                    "({a},{b}) = {} but ({b},{a})(-h) = {}",
                    render_series(ring, t),
                    render_series(ring, p.entry(j, i)),
                    a = p.labels[i],
                    b = p.labels[j],
                ));
            }
        }
    }
    let range = format!("{n}x{n} table");
    rep.push(Check::from_witness("values in K[[h]]", poles).with_range(range.clone()));
    rep.push(Check::from_witness("parity", parity).with_range(range.clone()));
    rep.push(Check::from_witness("hermitian symmetry", symmetry).with_range(range.clone()));

    // (a e_i, b e_j) = a(h) b(−h) T_ij on sample scalars
    let samples: Vec<Series> = ["1", "h", "1 + h", "2*h^2 - h", "-3 + h^3"]
        .iter()
        .filter_map(|s| parse_series(&scalar_ring(ring.truncation(), Vec::new()).ok()?, s).ok())
        .filter_map(|s| to_scalar(ring, &ring.from_plain(&s)).ok())
        .collect();
    let mut sesqui = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for a in &samples {
                for b in &samples {
                    let got = p.pair(&coordinate(ring, n, i, a.clone()), &coordinate(ring, n, j, b.clone()));
                    let want = ring.mul(&ring.mul(a, &b.hbar_conjugate()), p.entry(i, j));
                    let ok = matches!(&got, Ok(g) if *g == want);
                    if !ok {
                        sesqui = Some(format!(
                            "({}*[{}], {}*[{}])",
                            render_series(ring, a),
                            p.labels[i],
                            render_series(ring, b),
                            p.labels[j]
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    rep.push(
        Check::from_witness("sesquilinearity", sesqui)
            .with_range(format!("{} scalar multiples per entry", samples.len() * samples.len())),
    );

    let det = p.leading_matrix().det();
    let c = if det.is_zero() {
        Check::fail("nondegenerate mod h", "determinant of the h^0 matrix is 0")
    } else {
        Check::pass("nondegenerate mod h")
    };
    rep.push(c.with_detail(format!("det = {}", render_q(&det))));
    rep
}

/// A linear functional `Tr: A → K`, given on monomials (others map to 0).
#[derive(Clone, Debug, Default)]
pub struct TraceRule {
    pub values: BTreeMap<Vec<u32>, Q>,
}

impl TraceRule {
    /// `Tr(1) = 1` on an algebra with `n_gens` generators.
    pub fn unit(n_gens: usize) -> Self {
        Self {
            values: BTreeMap::from([(vec![0; n_gens], Q::from_integer(1.into()))]),
        }
    }

    /// Applies `Tr` coefficientwise; the result lives in `target`.
    pub fn apply(&self, target: &Ring, s: &Series) -> Series {
        let mut out = Series::zero();
        for (k, c) in s.terms() {
            if let Some(v) = self.values.get(&k.mono) {
                out.add_term(
                    Key {
                        params: k.params.clone(),
                        hbar: k.hbar,
                        mono: Vec::new(),
                    },
                    c * v,
                );
            }
        }
        target.truncate(&out)
    }

    /// `Tr(e^{(γ(h) − γ(−h))/h} α(h) β(−h))` for elements of `ring`.
    pub fn pair(&self, ring: &Ring, gamma: Option<&Series>, a: &Series, b: &Series) -> Result<Series> {
        let target = scalar_ring(ring.truncation(), ring.params().to_vec())?.with_cap(ring.cap());
        let mut prod = ring.mul(a, &b.hbar_conjugate());
        if let Some(g) = gamma {
            let x = (g - &g.hbar_conjugate()).shift_hbar(-1);
            if !x.is_pole_free() {
                return Err(Error::Pole(format!("trace exponent {}", render_series(ring, &x))));
            }
            prod = ring.mul(&ring.exp(&x)?, &prod);
        }
        let v = self.apply(&target, &prod);
        if !v.is_pole_free() {
            return Err(Error::Pole(format!("trace pairing value {}", render_series(&target, &v))));
        }
        Ok(v)
    }
}

/// The trace pairing on the cohomology representatives of `cd`, in the
/// ring of `gamma` (or the plain ring when `gamma` is `None`).
pub fn trace_pairing(
    inst: &BvInstance,
    cd: &ContractionData,
    rule: &TraceRule,
    gamma: Option<&McElement>,
) -> Result<PairingTable> {
    let ring = gamma.map_or_else(|| inst.ring(), |g| g.ring().clone());
    let target = scalar_ring(ring.truncation(), ring.params().to_vec())?.with_cap(ring.cap());
    let reps: Vec<Series> = cd.representatives().iter().map(|r| ring.from_plain(&r.element)).collect();
    let g = gamma.map(McElement::gamma);
    let entries = reps
        .iter()
        .map(|a| reps.iter().map(|b| rule.pair(&ring, g, a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    PairingTable::new(
        target,
        cd.representatives().iter().map(|r| r.label.clone()).collect(),
        cd.representatives().iter().map(|r| r.degree).collect(),
        entries,
    )
}

/// Coordinates of a `Δ`-cocycle of `inst`, as scalars of `target`.
fn coordinates(inst: &BvInstance, cd: &ContractionData, ring: &Ring, target: &Ring, s: &Series) -> Result<Vec<Series>> {
    cd.perturbed(&inst.delta)
        .pi(ring, s)?
        .iter()
        .map(|c| to_scalar(target, c))
        .collect()
}

/// A witness that no `K[[h]]`-linear `Tr` reproduces the table on the
/// given cocycles as `Tr(α β̄)`.
#[derive(Clone, Debug)]
pub struct TraceCertificate {
    /// One line per equation: `Tr(product)` at an `h`-power = table value.
    pub equations: Vec<String>,
    /// Multipliers `y` with `yᵀA = 0`, `yᵀb ≠ 0`.
    pub multipliers: Vec<Q>,
    /// `yᵀb`.
    pub contradiction: Q,
}

impl TraceCertificate {
    /// The nonzero-weight equations, one per line.
    pub fn render(&self) -> String {
        let mut lines: Vec<String> = self
            .equations
            .iter()
            .zip(&self.multipliers)
            .filter(|(_, y)| !y.is_zero())
            .map(|(e, y)| format!("{} x [{e}]", render_q(y)))
            .collect();
        lines.push(format!("sum: 0 = {}", render_q(&self.contradiction)));
        lines.join("\n")
    }
}

/// Sets up `Tr(x^a · x^b(−h)) = (x^a, x^b)` for all `Δ`-cocycle monomials
/// of polynomial degree `<= n_poly`, with the pairing computed through the
/// table, and returns an inconsistency certificate if there is one.
pub fn trace_certificate(
    inst: &BvInstance,
    cd: &ContractionData,
    table: &PairingTable,
    n_poly: u32,
) -> Result<Option<TraceCertificate>> {
    let ring = inst.ring();
    let target = table.ring().clone();
    let cap = ring.cap() as i32;
    let mut cocycles = Vec::new();
    for m in inst.algebra.monomials_up_to(n_poly) {
        let x = ring.monomial(&m);
        if inst.delta.apply(&ring, &x)?.is_zero() {
            cocycles.push((m, x));
        }
    }
    // unknowns: the h^k coefficient of Tr(x^M)
    let mut unknowns: BTreeMap<(Vec<u32>, i32), usize> = BTreeMap::new();
    let mut rows: Vec<BTreeMap<usize, Q>> = Vec::new();
    let mut rhs = Vec::new();
    let mut equations = Vec::new();
    for (ma, a) in &cocycles {
        let ca = coordinates(inst, cd, &ring, &target, a)?;
        for (mb, b) in &cocycles {
            let cb = coordinates(inst, cd, &ring, &target, b)?;
            let value = table.pair(&ca, &cb)?;
            let prod = ring.mul(a, &b.hbar_conjugate());
            let name = format!(
                "Tr({} * {}(-h))",
                render_series(&ring, &ring.monomial(ma)),
                render_series(&ring, &ring.monomial(mb))
            );
            for k in 0..=cap {
                let mut row = BTreeMap::new();
                for (key, c) in prod.terms() {
                    let shifted = k - key.hbar;
                    if shifted < 0 {
                        continue;
                    }
                    let next = unknowns.len();
                    let col = *unknowns.entry((key.mono.clone(), shifted)).or_insert(next);
                    *row.entry(col).or_insert_with(Q::zero) += c;
                }
                let want = value.hbar_coeff(k).constant_term();
                if row.is_empty() && want.is_zero() {
                    continue;
                }
                rows.push(row);
                rhs.push(want);
                equations.push(format!("{name} at h^{k}"));
            }
        }
    }
    let mut a = Matrix::zeros(rows.len(), unknowns.len());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, c) in row {
            a.data[i][j] = c;
        }
    }
    match a.solve(&rhs) {
        Solve::Solution(_) => Ok(None),
        Solve::Inconsistent(y) => {
            let contradiction = dot(&y, &rhs);
            if a.transpose().mul_vec(&y).iter().any(|v| !v.is_zero()) || contradiction.is_zero() {
                return Err(Error::Assertion("inconsistency certificate does not verify".into()));
            }
            Ok(Some(TraceCertificate {
                equations,
                multipliers: y,
                contradiction,
            }))
        }
    }
}

/// All entries are `h`-independent.
pub fn good_basis_check(p: &PairingTable) -> Check {
    let mut witness = None;
    for i in 0..p.rank() {
        for j in 0..p.rank() {
            if p.entry(i, j).terms().any(|(k, _)| k.hbar != 0) {
                witness = Some(format!(
                    "({},{}) = {}",
                    p.labels[i],
                    p.labels[j],
                    render_series(p.ring(), p.entry(i, j))
                ));
            }
        }
    }
    Check::from_witness("good basis", witness).with_range(format!("{} basis elements", p.rank()))
}

/// `ω(a, b)`: the `h^{−1}` coefficient of `(a, b)`.
pub fn residue_symplectic(p: &PairingTable, a: &[Series], b: &[Series]) -> Result<Series> {
    Ok(p.pair(a, b)?.hbar_coeff(-1))
}

/// A polarization candidate: `ℰ_0 = span{h^k e_i : 0 <= k < P}` and
/// `ℒ = span{h^{−k} e_i : 1 <= k <= P}` on the Laurent window of pole
/// order `P`.
#[derive(Clone, Debug)]
pub struct PolarizationData {
    pub labels: Vec<String>,
    pub pole_window: u32,
}

impl PolarizationData {
    pub fn new(p: &PairingTable, pole_window: u32) -> Self {
        Self {
            labels: p.labels().to_vec(),
            pole_window,
        }
    }
}

/// Good basis, isotropy of `ℰ_0` and `ℒ`, complementarity,
/// antisymmetry of `ω` across them and nondegeneracy of `ω(ℒ, ℰ_0)`.
pub fn polarization_check(p: &PairingTable, pol: &PolarizationData) -> Report {
    // pairing values reach h^{2P}
    let ring = p.ring().with_cap(p.ring().cap().max(2 * pol.pole_window as i64 + 2));
    let mut rep = Report::new("polarization", ring.truncation());
    rep.push(good_basis_check(p));
    if pol.labels != p.labels() {
        rep.push(Check::fail("basis labels", format!("{:?} vs {:?}", pol.labels, p.labels())));
        return rep;
    }
    let n = p.rank();
    let pw = pol.pole_window as i32;
    let vec_at = |i: usize, k: i32| coordinate(&ring, n, i, ring.hbar_pow(k));
    let e0: Vec<Vec<Series>> = (0..pw).flat_map(|k| (0..n).map(move |i| (i, k))).map(|(i, k)| vec_at(i, k)).collect();
    let l: Vec<Vec<Series>> = (1..=pw).flat_map(|k| (0..n).map(move |i| (i, -k))).map(|(i, k)| vec_at(i, k)).collect();
    let omega = |a: &[Series], b: &[Series]| -> Result<Q> {
        Ok(p.pair_in(&ring, a, b)?.hbar_coeff(-1).constant_term())
    };
    let isotropic = |name: &str, span: &[Vec<Series>]| -> Check {
        for a in span {
            for b in span {
                match omega(a, b) {
                    Ok(v) if v.is_zero() => {}
                    Ok(v) => {
                        return Check::fail(
                            format!("{name} isotropic"),
                            format!("omega = {} on a basis pair", render_q(&v)),
                        )
                    }
                    Err(e) => return Check::fail(format!("{name} isotropic"), e.to_string()),
                }
            }
        }
        Check::pass(format!("{name} isotropic"))
    };
    let range = format!("pole order <= {}", pol.pole_window);
    rep.push(isotropic("E0", &e0).with_range(range.clone()));
    rep.push(isotropic("L", &l).with_range(range.clone()));

    // both spans together, as coordinate vectors on the Laurent window
    let index = |i: usize, k: i32| (k + pw) as usize * n + i;
    let dim = 2 * pw as usize * n;
    let as_vec = |v: &[Series]| {
        let mut out = vec![Q::zero(); dim];
        for (i, c) in v.iter().enumerate() {
            for (key, x) in c.terms() {
                out[index(i, key.hbar)] += x;
            }
        }
        out
    };
    let all: Vec<Vec<Q>> = e0.iter().chain(&l).map(|v| as_vec(v)).collect();
    let rank = Matrix::from_cols(dim, &all).rank();
    rep.push(
        if rank == dim {
            Check::pass("complementary")
        } else {
            Check::fail("complementary", format!("rank {rank} of {dim}"))
        }
        .with_range(range.clone()),
    );

    let mut anti = None;
    let mut m = Matrix::zeros(l.len(), e0.len());
    for (r, a) in l.iter().enumerate() {
        for (c, b) in e0.iter().enumerate() {
            match (omega(a, b), omega(b, a)) {
                (Ok(x), Ok(y)) => {
                    if x != -y.clone() && anti.is_none() {
                        anti = Some(format!("omega = {} and {} on a basis pair", render_q(&x), render_q(&y)));
                    }
                    m.data[r][c] = x;
                }
                (Err(e), _) | (_, Err(e)) => anti = Some(e.to_string()),
            }
        }
    }
    rep.push(Check::from_witness("omega antisymmetric on L x E0", anti).with_range(range.clone()));
    let det = m.det();
    rep.push(
        if det.is_zero() {
            Check::fail("omega(L, E0) nondegenerate", "determinant 0")
        } else {
            Check::pass("omega(L, E0) nondegenerate")
        }
        .with_range(range)
        .with_detail(format!("det = {}", render_q(&det))),
    );
    rep
}

fn monomial_label(ring: &Ring, m: &[u32]) -> String {
    render_series(ring, &ring.monomial(m))
}

/// `(f(α), f(β))_B = (α, β)_A` over all pairs of `Δ`-cocycle monomials of
/// polynomial degree `<= n_poly`. Values are recorded as `(α,β)`.
pub fn check_pairing_compatibility(
    f: &BvMorphism,
    cd_a: &ContractionData,
    cd_b: &ContractionData,
    pa: &PairingTable,
    pb: &PairingTable,
    n_poly: u32,
) -> Report {
    let src = f.source.ring();
    let mut rep = Report::new(
        format!("pairing-compatibility:{}->{}", f.source.name(), f.target.name()),
        src.truncation(),
    );
    let run = |rep: &mut Report| -> Result<()> {
        let tgt = f.target_ring(&src)?;
        let scalars = pa.ring().clone();
        let mut cocycles = Vec::new();
        for m in f.source.algebra.monomials_up_to(n_poly) {
            let x = src.monomial(&m);
            if f.source.delta.apply(&src, &x)?.is_zero() {
                cocycles.push((monomial_label(&src, &m), x));
            }
        }
        let mut coords = Vec::new();
        for (label, x) in &cocycles {
            let ca = coordinates(&f.source, cd_a, &src, &scalars, x)?;
            let fx = apply_morphism(f, &src, &tgt, x)?;
            let cb = coordinates(&f.target, cd_b, &tgt, pb.ring(), &fx)?;
            coords.push((label.clone(), ca, cb));
        }
        let mut witness = None;
        for (la, aa, ab) in &coords {
            for (lb, ba, bb) in &coords {
                let lhs = pb.pair(ab, bb)?;
                let rhs = pa.pair(aa, ba)?;
                let lhs_text = render_series(pb.ring(), &lhs);
                let rhs_text = render_series(pa.ring(), &rhs);
                if lhs_text != rhs_text && witness.is_none() {
                    witness = Some(format!("(f({la}), f({lb})) = {lhs_text} but ({la},{lb}) = {rhs_text}"));
                }
                rep.value(format!("({la},{lb})"), rhs_text);
            }
        }
        rep.push(Check::from_witness("(f a, f b) = (a, b)", witness).with_range(format!(
            "{} cocycle monomials of polynomial degree <= {n_poly}, h-orders <= {}",
            coords.len(),
            src.cap()
        )));
        Ok(())
    };
    if let Err(e) = run(&mut rep) {
        rep.push(Check::fail("(f a, f b) = (a, b)", e.to_string()));
    }
    rep
}

/// The twisted form: with `(α, β)_u = (e^{γ/h}α, e^{γ/h}β)` on both sides,
/// `(f_γ α, f_γ β)_u = (α, β)_u` over `Δ`-cocycle monomials, checked
/// through `e^{γ_B/h} f_γ(α) = f(e^{γ_A/h} α)`.
pub fn check_pairing_compatibility_twisted(
    f: &BvMorphism,
    gamma_a: &McElement,
    cd_a: &ContractionData,
    cd_b: &ContractionData,
    pa: &PairingTable,
    pb: &PairingTable,
    n_poly: u32,
) -> Report {
    let src = gamma_a.ring().clone();
    let mut rep = Report::new(
        format!("twisted-pairing-compatibility:{}->{}", f.source.name(), f.target.name()),
        src.truncation(),
    );
    rep.value("gamma_a", gamma_a.render());
    let run = |rep: &mut Report| -> Result<()> {
        let tw = twist_morphism(f, gamma_a)?;
        rep.value("gamma_b", tw.gamma_b.render());
        let tgt = tw.gamma_b.ring().clone();
        let scalars = scalar_ring(src.truncation(), src.params().to_vec())?.with_cap(src.cap());
        let ea = src.exp(&gamma_a.over_hbar())?;
        let eb = tgt.exp(&tw.gamma_b.over_hbar())?;
        let mut items = Vec::new();
        let mut chain = None;
        for m in f.source.algebra.monomials_up_to(n_poly) {
            let x = src.monomial(&m);
            if !f.source.delta.apply(&src, &x)?.is_zero() {
                continue;
            }
            let label = monomial_label(&src, &m);
            let transported = src.mul(&ea, &x);
            let direct = apply_morphism(f, &src, &tgt, &transported)?;
            let via_twist = tgt.mul(&eb, &crate::morphisms::UnitalMap::apply_map(&tw, &src, &tgt, &x)?);
            if direct != via_twist && chain.is_none() {
                chain = Some(format!("e^(gamma_B/h) f_gamma({label}) != f(e^(gamma_A/h) {label})"));
            }
            let ca = coordinates(&f.source, cd_a, &src, &scalars, &transported)?;
            let cb = coordinates(&f.target, cd_b, &tgt, &scalars, &via_twist)?;
            items.push((label, ca, cb));
        }
        let range = format!(
            "{} cocycle monomials of polynomial degree <= {n_poly}, u-order <= {}",
            items.len(),
            src.truncation().n_param
        );
        rep.push(Check::from_witness("transport intertwines f_gamma", chain).with_range(range.clone()));
        let mut witness = None;
        for (la, aa, ab) in &items {
            for (lb, ba, bb) in &items {
                let lhs = pb.pair_in(&scalars, ab, bb)?;
                let rhs = pa.pair_in(&scalars, aa, ba)?;
                if lhs != rhs && witness.is_none() {
                    witness = Some(format!(
                        "(f_gamma({la}), f_gamma({lb}))_u = {} but ({la},{lb})_u = {}",
                        render_series(&scalars, &lhs),
                        render_series(&scalars, &rhs)
                    ));
                }
            }
        }
        rep.push(Check::from_witness("(f_gamma a, f_gamma b)_u = (a, b)_u", witness).with_range(range));
        Ok(())
    };
    if let Err(e) = run(&mut rep) {
        rep.push(Check::fail("(f_gamma a, f_gamma b)_u = (a, b)_u", e.to_string()));
    }
    rep
}
