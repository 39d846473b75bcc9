//! Contraction of `(V, Δ_0)` onto its cohomology on a polynomial window,
//! and its perturbation to the full operator `Δ`.
//!
//! The window `V` is spanned by monomials of polynomial degree at most
//! `n_poly`; `W ⊂ V` is the largest subcomplex, `{x : Δ_0 x ∈ V}`. On `W`
//! we fix `W = B ⊕ H ⊕ L` (coboundaries, representatives, a complement of
//! the cocycles) by row reduction and read off `h`, `π`, `ι` with
//! `Δ_0 h + h Δ_0 = 1 − ιπ`, `πι = 1`, `h² = 0`, `hι = 0`, `πh = 0`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::{render_series, Algebra, Key, Ring, Series, Truncation};
use crate::linalg::{Matrix, Solve};
use crate::operators::{BvInstance, Component, HbarOperator, LinearOp};
use crate::report::Check;
use crate::scalar::Q;

/// A chosen cohomology representative.
#[derive(Clone, Debug)]
pub struct Representative {
    pub degree: i64,
    /// Parameter-free element of the plain ring.
    pub element: Series,
    pub label: String,
}

#[derive(Clone, Debug)]
struct Block {
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// `x ∈ W` iff `outside · x = 0`.
    outside: Matrix,
    /// Basis of `W` (columns, in `V` coordinates).
    w_basis: Vec<Vec<Q>>,
    /// `Δ_0` from this degree into the next, inside part.
    d: Matrix,
    pi: Matrix,
    h: Matrix,
    rep_offset: usize,
    n_reps: usize,
}

/// Homotopy data for `Δ_0` on a window.
#[derive(Clone, Debug)]
pub struct ContractionData {
    algebra: Arc<Algebra>,
    n_poly: u32,
    blocks: BTreeMap<i64, Block>,
    reps: Vec<Representative>,
    closed: bool,
}

fn reversed(v: &[Q]) -> Vec<Q> {
    v.iter().rev().cloned().collect()
}

/// Echelon basis of `span(vectors)` with pivots on the largest monomials
/// (coordinates are in ascending graded-lex order).
fn top_echelon(n: usize, vectors: &[Vec<Q>]) -> Vec<(usize, Vec<Q>)> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.iter().map(|v| reversed(v)).collect());
    let r = m.rref();
    r.pivots
        .iter()
        .enumerate()
        .map(|(i, &p)| (n - 1 - p, reversed(&r.matrix.data[i])))
        .collect()
}

/// Reduces `v` modulo an echelon basis from [`top_echelon`].
fn normal_form(rows: &[(usize, Vec<Q>)], mut v: Vec<Q>) -> Vec<Q> {
    for (p, row) in rows {
        if v[*p].is_zero() {
            continue;
        }
        let f = v[*p].clone();
        for (x, r) in v.iter_mut().zip(row) {
            if !r.is_zero() {
                *x -= &f * r;
            }
        }
    }
    v
}

/// Short display form: a bare monomial when the coefficient is 1.
fn label(ring: &Ring, el: &Series) -> String {
    let text = render_series(ring, el);
    match text.strip_prefix("1*") {
        Some(rest) if el.len() == 1 => rest.to_string(),
        _ => text,
    }
}

fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn lin_comb(basis: &[Vec<Q>], coeffs: &[Q], n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Preimage data for `Δ_0` restricted to a complement of the cocycles.
struct Complement {
    basis: Vec<Vec<Q>>,
    image: Matrix,
}

impl Complement {
    fn preimage(&self, b: &[Q], n: usize) -> Result<Vec<Q>> {
        if self.basis.is_empty() {
            if is_zero_vec(b) {
                return Ok(vec![Q::zero(); n]);
            }
            return Err(Error::Assertion("coboundary without a preimage".into()));
        }
        match self.image.solve(b) {
            Solve::Solution(c) => Ok(lin_comb(&self.basis, &c, n)),
            Solve::Inconsistent(_) => Err(Error::Assertion("coboundary without a preimage".into())),
        }
    }
}

impl ContractionData {
    /// Builds the contraction of `Δ_0` of `inst` on monomials of polynomial
    /// degree at most `n_poly`.
    pub fn new(inst: &BvInstance, n_poly: u32) -> Result<Self> {
        let algebra = inst.algebra.clone();
        let ring = Ring::plain(algebra.clone(), Truncation::new(n_poly, 0, 0));
        let zero = Component::Poly(crate::operators::PolyDiffOperator::zero(1));
        let d0 = inst.delta.leading().unwrap_or(&zero);

        let all = algebra.monomials_up_to(n_poly);
        let mut by_degree: BTreeMap<i64, Vec<Vec<u32>>> = BTreeMap::new();
        for m in &all {
            by_degree.entry(algebra.monomial_degree(m)).or_default().push(m.clone());
        }

        // images of every monomial, and the largest polynomial-degree shift
        let mut images: HashMap<Vec<u32>, Series> = HashMap::new();
        let mut shift = 0i64;
        for m in &all {
            let img = d0.apply(&ring, &ring.monomial(m))?;
            for (k, _) in img.terms() {
                if k.hbar != 0 {
                    return Err(Error::Config(
                        "the h^0 component must not produce powers of h".into(),
                    ));
                }
                shift = shift.max(k.poly_degree() as i64 - m.iter().sum::<u32>() as i64);
            }
            images.insert(m.clone(), img);
        }
        if (n_poly as i64) < shift {
            return Err(Error::WindowTooSmall(format!(
                "polynomial window {n_poly} cannot contain the shift {shift} of the differential"
            )));
        }

        // raw per-degree data
        struct Raw {
            monos: Vec<Vec<u32>>,
            index: HashMap<Vec<u32>, usize>,
            outside: Matrix,
            d: Matrix,
            w_basis: Vec<Vec<Q>>,
        }
        let mut raw: BTreeMap<i64, Raw> = BTreeMap::new();
        for (&deg, monos) in &by_degree {
            let index: HashMap<_, _> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let empty = Vec::new();
            let next = by_degree.get(&(deg + 1)).unwrap_or(&empty);
            let next_index: HashMap<_, _> = next.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut d = Matrix::zeros(next.len(), monos.len());
            let mut outside_rows: BTreeMap<Vec<u32>, Vec<Q>> = BTreeMap::new();
            for (j, m) in monos.iter().enumerate() {
                for (k, c) in images[m].terms() {
                    match next_index.get(&k.mono) {
                        Some(&i) => d.data[i][j] += c,
                        None => {
                            outside_rows
                                .entry(k.mono.clone())
                                .or_insert_with(|| vec![Q::zero(); monos.len()])[j] += c;
                        }
                    }
                }
            }
            let outside = if outside_rows.is_empty() {
                Matrix::zeros(0, monos.len())
            } else {
                Matrix::from_rows(outside_rows.into_values().collect())
            };
            let w_basis = outside.kernel();
            raw.insert(
                deg,
                Raw {
                    monos: monos.clone(),
                    index,
                    outside,
                    d,
                    w_basis,
                },
            );
        }

        // complements L^d: W-basis vectors at the pivot columns of Δ_0|W
        let mut complements: BTreeMap<i64, Complement> = BTreeMap::new();
        let mut cocycles: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
        for (&deg, r) in &raw {
            let n = r.monos.len();
            let cols: Vec<Vec<Q>> = r.w_basis.iter().map(|w| r.d.mul_vec(w)).collect();
            let dw = Matrix::from_cols(r.d.rows, &cols);
            let kernel = if r.w_basis.is_empty() {
                Vec::new()
            } else {
                dw.kernel()
            };
            cocycles.insert(
                deg,
                kernel.iter().map(|c| lin_comb(&r.w_basis, c, n)).collect(),
            );
            let pivots = if r.w_basis.is_empty() { Vec::new() } else { dw.rref().pivots };
            let basis: Vec<Vec<Q>> = pivots.iter().map(|&p| r.w_basis[p].clone()).collect();
            let image_cols: Vec<Vec<Q>> = pivots.iter().map(|&p| cols[p].clone()).collect();
            complements.insert(
                deg,
                Complement {
                    basis,
                    image: Matrix::from_cols(r.d.rows, &image_cols),
                },
            );
        }

        let mut blocks = BTreeMap::new();
        let mut reps = Vec::new();
        for (&deg, r) in &raw {
            let n = r.monos.len();
            // coboundaries B^d = Δ_0(W^{d−1})
            let b_vectors: Vec<Vec<Q>> = match raw.get(&(deg - 1)) {
                Some(prev) => prev.w_basis.iter().map(|w| prev.d.mul_vec(w)).collect(),
                None => Vec::new(),
            };
            let b_rows = top_echelon(n, &b_vectors);
            let reduced: Vec<Vec<Q>> = cocycles[&deg]
                .iter()
                .map(|z| normal_form(&b_rows, z.clone()))
                .filter(|v| !is_zero_vec(v))
                .collect();
            let mut h_rows = top_echelon(n, &reduced);
            // list representatives smallest monomial first
            h_rows.reverse();
            let rep_offset = reps.len();
            for (_, v) in &h_rows {
                let mut el = Series::zero();
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        el.add_term(
                            Key {
                                params: Vec::new(),
                                hbar: 0,
                                mono: r.monos[i].clone(),
                            },
                            c.clone(),
                        );
                    }
                }
                reps.push(Representative {
                    degree: deg,
                    label: label(&ring, &el),
                    element: el,
                });
            }

            // π and h on the W-basis
            let comp = &complements[&deg];
            let prev_comp = complements.get(&(deg - 1));
            let prev_n = raw.get(&(deg - 1)).map_or(0, |p| p.monos.len());
            let mut pi_cols = Vec::new();
            let mut h_cols = Vec::new();
            for w in &r.w_basis {
                let l = comp.preimage(&r.d.mul_vec(w), n)?;
                let z: Vec<Q> = w.iter().zip(&l).map(|(a, b)| a - b).collect();
                let nf = normal_form(&b_rows, z.clone());
                pi_cols.push(h_rows.iter().map(|(p, _)| nf[*p].clone()).collect::<Vec<Q>>());
                let b: Vec<Q> = z.iter().zip(&nf).map(|(a, b)| a - b).collect();
                h_cols.push(match prev_comp {
                    Some(pc) => pc.preimage(&b, prev_n)?,
                    None if is_zero_vec(&b) => Vec::new(),
                    None => return Err(Error::Assertion("coboundary in the lowest degree".into())),
                });
            }

            // extend by zero on a complement of W spanned by unit vectors
            let extra: Vec<usize> = if r.outside.rows == 0 {
                Vec::new()
            } else {
                r.outside.rref().pivots
            };
            let mut frame = r.w_basis.clone();
            for &e in &extra {
                let mut v = vec![Q::zero(); n];
                v[e] = Q::one();
                frame.push(v);
                pi_cols.push(vec![Q::zero(); h_rows.len()]);
                h_cols.push(vec![Q::zero(); prev_n]);
            }
            let inv = Matrix::from_cols(n, &frame)
                .inverse()
                .ok_or_else(|| Error::Assertion("window frame is singular".into()))?;
            let pi = Matrix::from_cols(h_rows.len(), &pi_cols).mul(&inv);
            let h = Matrix::from_cols(prev_n, &h_cols).mul(&inv);
            blocks.insert(
                deg,
                Block {
                    monos: r.monos.clone(),
                    index: r.index.clone(),
                    outside: r.outside.clone(),
                    w_basis: r.w_basis.clone(),
                    d: r.d.clone(),
                    pi,
                    h,
                    rep_offset,
                    n_reps: h_rows.len(),
                },
            );
        }
        let closed = blocks.values().all(|b| b.outside.rows == 0);
        Ok(Self {
            algebra,
            n_poly,
            blocks,
            reps,
            closed,
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn n_poly(&self) -> u32 {
        self.n_poly
    }

    /// Whether `Δ_0` maps the whole polynomial window into itself.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn representatives(&self) -> &[Representative] {
        &self.reps
    }

    /// `dim H(W, Δ_0)`.
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Betti number per degree present in the window.
    pub fn betti(&self) -> BTreeMap<i64, usize> {
        self.blocks.iter().map(|(&d, b)| (d, b.n_reps)).collect()
    }

    /// Dimensions of `W^d`.
    pub fn window_dims(&self) -> BTreeMap<i64, usize> {
        self.blocks.iter().map(|(&d, b)| (d, b.w_basis.len())).collect()
    }

    /// Splits `s` into coordinate vectors per (parameters, h-power, degree).
    fn split(&self, ring: &Ring, s: &Series) -> Result<BTreeMap<(Vec<u32>, i32, i64), Vec<Q>>> {
        ring.check_shape(s)?;
        let mut out: BTreeMap<(Vec<u32>, i32, i64), Vec<Q>> = BTreeMap::new();
        for (k, c) in s.terms() {
            let deg = self.algebra.monomial_degree(&k.mono);
            let outside = || {
                Error::OutsideWindow(render_series(ring, &Series::from_term(k.clone(), c.clone())))
            };
            let block = self.blocks.get(&deg).ok_or_else(outside)?;
            let &i = block.index.get(&k.mono).ok_or_else(outside)?;
            out.entry((k.params.clone(), k.hbar, deg))
                .or_insert_with(|| vec![Q::zero(); block.monos.len()])[i] = c.clone();
        }
        for ((_, _, deg), v) in &out {
            let block = &self.blocks[deg];
            if !is_zero_vec(&block.outside.mul_vec(v)) {
                let mut el = Series::zero();
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        el.add_term(
                            Key {
                                params: vec![0; ring.n_params()],
                                hbar: 0,
                                mono: block.monos[i].clone(),
                            },
                            c.clone(),
                        );
                    }
                }
                return Err(Error::OutsideWindow(format!(
                    "{} leaves the window under the differential",
                    render_series(ring, &el)
                )));
            }
        }
        Ok(out)
    }

    /// The homotopy `h` (degree −1).
    pub fn h(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let mut out = Series::zero();
        for ((params, hbar, deg), v) in self.split(ring, s)? {
            let block = &self.blocks[&deg];
            let Some(prev) = self.blocks.get(&(deg - 1)) else {
                continue;
            };
            let y = block.h.mul_vec(&v);
            let neg = ring.parity_params(&params);
            for (i, c) in y.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let key = Key {
                    params: params.clone(),
                    hbar,
                    mono: prev.monos[i].clone(),
                };
                out.add_term(key, if neg { -c } else { c });
            }
        }
        Ok(out)
    }

    /// Coordinates on the representatives; each entry is a scalar series
    /// (no algebra generators).
    pub fn pi(&self, ring: &Ring, s: &Series) -> Result<Vec<Series>> {
        let mut out = vec![Series::zero(); self.reps.len()];
        for ((params, hbar, deg), v) in self.split(ring, s)? {
            let block = &self.blocks[&deg];
            for (j, c) in block.pi.mul_vec(&v).into_iter().enumerate() {
                if !c.is_zero() {
                    out[block.rep_offset + j].add_term(
                        Key {
                            params: params.clone(),
                            hbar,
                            mono: vec![0; ring.n_gens()],
                        },
                        c,
                    );
                }
            }
        }
        Ok(out)
    }

    /// `Σ_j c_j · rep_j`.
    pub fn iota(&self, ring: &Ring, coeffs: &[Series]) -> Result<Series> {
        if coeffs.len() != self.reps.len() {
            return Err(Error::Assertion(format!(
                "expected {} coordinates, got {}",
                self.reps.len(),
                coeffs.len()
            )));
        }
        let mut out = Series::zero();
        for (c, r) in coeffs.iter().zip(&self.reps) {
            out += ring.mul(c, &ring.from_plain(&r.element));
        }
        Ok(out)
    }

    /// Checks the contraction identities on every basis vector of `W`.
    pub fn check_identities(&self) -> Check {
        let mut failures = Vec::new();
        for (&deg, block) in &self.blocks {
            let n = block.monos.len();
            let prev = self.blocks.get(&(deg - 1));
            let next = self.blocks.get(&(deg + 1));
            for (wi, w) in block.w_basis.iter().enumerate() {
                // Δ_0 h w + h Δ_0 w + ι π w = w
                let hw = block.h.mul_vec(w);
                let mut lhs = vec![Q::zero(); n];
                if let Some(p) = prev {
                    lhs = p.d.mul_vec(&hw);
                    if !is_zero_vec(&p.h.mul_vec(&hw)) {
                        failures.push(format!("h^2 != 0 in degree {deg} on basis vector {wi}"));
                    }
                    if !is_zero_vec(&p.pi.mul_vec(&hw)) {
                        failures.push(format!("pi h != 0 in degree {deg} on basis vector {wi}"));
                    }
                }
                if let Some(nx) = next {
                    let hdw = nx.h.mul_vec(&block.d.mul_vec(w));
                    for (a, b) in lhs.iter_mut().zip(hdw) {
                        *a += b;
                    }
                }
                let coords = block.pi.mul_vec(w);
                for (j, c) in coords.iter().enumerate() {
                    let rep = &self.reps[block.rep_offset + j].element;
                    for (k, v) in rep.terms() {
                        lhs[block.index[&k.mono]] += c * v;
                    }
                }
                if &lhs != w {
                    failures.push(format!("homotopy identity fails in degree {deg} on basis vector {wi}"));
                }
            }
            for j in 0..block.n_reps {
                let mut v = vec![Q::zero(); n];
                for (k, c) in self.reps[block.rep_offset + j].element.terms() {
                    v[block.index[&k.mono]] = c.clone();
                }
                let mut e = vec![Q::zero(); block.n_reps];
                e[j] = Q::one();
                if block.pi.mul_vec(&v) != e {
                    failures.push(format!("pi iota != 1 in degree {deg}"));
                }
                if !is_zero_vec(&block.h.mul_vec(&v)) {
                    failures.push(format!("h iota != 0 in degree {deg}"));
                }
            }
        }
        let range = format!("polynomial degree <= {}", self.n_poly);
        match failures.first() {
            None => Check::pass("contraction identities").with_range(range),
            Some(f) => Check::fail("contraction identities", f.clone()).with_range(range),
        }
    }

    /// The perturbed data for `Δ = Δ_0 + δ`.
    pub fn perturbed(&self, delta: &HbarOperator) -> Perturbed<'_> {
        Perturbed {
            cd: self,
            delta: Box::new(delta.tail(1)),
        }
    }

    /// Perturbation by an arbitrary `δ`, which must raise the truncation
    /// weight by at least one.
    pub fn perturbed_by<'a>(&'a self, delta: Box<dyn LinearOp + 'a>) -> Perturbed<'a> {
        Perturbed { cd: self, delta }
    }
}

/// Perturbation of a contraction by `δ = Σ_{k≥1} h^k Δ_k`:
/// `h_Δ = h Σ(−δh)^j`, `π_Δ = π Σ(−δh)^j`, `ι_Δ = Σ(−hδ)^j ι`.
pub struct Perturbed<'a> {
    cd: &'a ContractionData,
    delta: Box<dyn LinearOp + 'a>,
}

impl Perturbed<'_> {
    fn iteration_limit(ring: &Ring) -> i64 {
        ring.cap() + 2
    }

    /// Applies `Σ_j (−δh)^j` lazily, feeding every stage to `sink`.
    fn geometric(&self, ring: &Ring, s: &Series, mut sink: impl FnMut(&Series) -> Result<()>) -> Result<()> {
        let mut v = s.clone();
        for _ in 0..=Self::iteration_limit(ring) {
            if v.is_zero() {
                return Ok(());
            }
            sink(&v)?;
            let hv = self.cd.h(ring, &v)?;
            v = -self.delta.apply(ring, &hv)?;
        }
        Err(Error::Assertion("perturbation series did not terminate".into()))
    }

    pub fn h(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let mut acc = Series::zero();
        self.geometric(ring, s, |v| {
            acc += self.cd.h(ring, v)?;
            Ok(())
        })?;
        Ok(acc)
    }

    pub fn pi(&self, ring: &Ring, s: &Series) -> Result<Vec<Series>> {
        let mut acc = vec![Series::zero(); self.cd.rank()];
        self.geometric(ring, s, |v| {
            for (a, c) in acc.iter_mut().zip(self.cd.pi(ring, v)?) {
                *a += c;
            }
            Ok(())
        })?;
        Ok(acc)
    }

    pub fn iota(&self, ring: &Ring, coeffs: &[Series]) -> Result<Series> {
        let mut v = self.cd.iota(ring, coeffs)?;
        let mut acc = Series::zero();
        for _ in 0..=Self::iteration_limit(ring) {
            if v.is_zero() {
                return Ok(acc);
            }
            acc += &v;
            v = -self.cd.h(ring, &self.delta.apply(ring, &v)?)?;
        }
        Err(Error::Assertion("perturbation series did not terminate".into()))
    }

    /// `ι_Δ` of the `j`-th representative.
    pub fn lifted_representative(&self, ring: &Ring, j: usize) -> Result<Series> {
        let mut coeffs = vec![Series::zero(); self.cd.rank()];
        coeffs[j] = ring.one();
        self.iota(ring, &coeffs)
    }

    pub fn contraction(&self) -> &ContractionData {
        self.cd
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_a1, build_a2, build_b};
    use crate::graded::parse_series;
    use crate::scalar::{double_factorial_odd, q};

    fn trunc() -> Truncation {
        Truncation::new(10, 6, 0)
    }

    #[test]
    fn a1_cohomology_and_identities() {
        let inst = build_a1(trunc());
        let cd = ContractionData::new(&inst, 10).unwrap();
        assert!(cd.is_closed());
        assert_eq!(cd.betti(), BTreeMap::from([(-1, 0), (0, 1)]));
        assert_eq!(cd.representatives()[0].label, "1");
        assert!(cd.check_identities().passed());
    }

    #[test]
    fn a2_window_is_a_proper_subcomplex() {
        let inst = build_a2(trunc());
        let cd = ContractionData::new(&inst, 10).unwrap();
        assert!(!cd.is_closed());
        assert_eq!(cd.betti(), BTreeMap::from([(-1, 0), (0, 2)]));
        let labels: Vec<_> = cd.representatives().iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["1", "t"]);
        assert!(cd.check_identities().passed());
        let r = inst.ring();
        let top = parse_series(&r, "t^9*dt").unwrap();
        assert!(matches!(cd.h(&r, &top), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn b_is_rank_one() {
        let cd = ContractionData::new(&build_b(trunc()), 4).unwrap();
        assert_eq!(cd.betti(), BTreeMap::from([(0, 1)]));
        assert!(cd.check_identities().passed());
    }

    #[test]
    fn reduction_of_even_powers() {
        let inst = build_a1(trunc());
        let cd = ContractionData::new(&inst, 10).unwrap();
        let r = inst.ring();
        let p = cd.perturbed(&inst.delta);
        for k in 0..=5u32 {
            let even = p.pi(&r, &r.monomial(&[2 * k, 0])).unwrap();
            let sign = if k % 2 == 1 { -1 } else { 1 };
            let expect = r.hbar_pow(k as i32).scale(&(q(sign) * Q::from_integer(double_factorial_odd(k))));
            assert_eq!(even[0], expect, "t^{}", 2 * k);
            if 2 * k + 1 <= 10 {
                assert!(p.pi(&r, &r.monomial(&[2 * k + 1, 0])).unwrap()[0].is_zero());
            }
        }
    }
}
