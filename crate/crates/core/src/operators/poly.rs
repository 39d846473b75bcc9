use std::collections::BTreeMap;
use std::sync::Arc;

use super::LinearOp;
use crate::error::{Error, Result};
use crate::graded::{parse_operator, render_series, Algebra, Key, OpLetter, OpWord, Ring, Series};

/// Sum of words `c * a_1 ∂_{x_1} a_2 ...` acting right to left.
#[derive(Clone, Debug)]
pub struct PolyDiffOperator {
    words: Vec<OpWord>,
    degree: i64,
    text: String,
}

fn word_degree(ring: &Ring, w: &OpWord) -> Result<i64> {
    let mut d = 0;
    for l in &w.letters {
        d += match l {
            OpLetter::Mul(a) => ring.degree_or(a, 0)?,
            OpLetter::Deriv(g) => -ring.algebra().generators()[*g].degree,
        };
    }
    Ok(d)
}

impl PolyDiffOperator {
    /// Parses operator text over the plain ring of an algebra. A zero
    /// operator takes `degree` (required in that case); otherwise every word
    /// must have the same degree, which must match `degree` if given.
    pub fn parse(ring: &Ring, text: &str, degree: Option<i64>) -> Result<Self> {
        if ring.n_params() != 0 {
            return Err(Error::Config("operators are parsed over the plain ring".into()));
        }
        let words = parse_operator(ring, text)?;
        let mut deg = None;
        for w in &words {
            let d = word_degree(ring, w)?;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(Error::DegreeMismatch(format!(
                        "operator {text:?} mixes degrees {e} and {d}"
                    )))
                }
                _ => {}
            }
        }
        let degree = match (deg, degree) {
            (Some(d), Some(e)) if d != e => {
                return Err(Error::DegreeMismatch(format!(
                    "operator {text:?} has degree {d}, expected {e}"
                )))
            }
            (Some(d), _) | (None, Some(d)) => d,
            (None, None) => {
                return Err(Error::DegreeMismatch(format!(
                    "degree of zero operator {text:?} must be given"
                )))
            }
        };
        Ok(Self {
            words,
            degree,
            text: text.trim().to_string(),
        })
    }

    pub fn zero(degree: i64) -> Self {
        Self {
            words: Vec::new(),
            degree,
            text: "0".into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl LinearOp for PolyDiffOperator {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        ring.check_shape(s)?;
        let mut out = Series::zero();
        for w in &self.words {
            let mut cur = s.clone();
            for l in w.letters.iter().rev() {
                cur = match l {
                    OpLetter::Deriv(g) => ring.derivative_gen(*g, &cur),
                    OpLetter::Mul(a) => ring.mul(&ring.from_plain(a), &cur),
                };
                if cur.is_zero() {
                    break;
                }
            }
            out += cur.scale(&w.coeff);
        }
        Ok(out)
    }
}

/// Operator given by its values on monomials; unlisted monomials map to 0.
#[derive(Clone, Debug)]
pub struct RuleTable {
    degree: i64,
    rules: BTreeMap<Vec<u32>, Series>,
}

impl RuleTable {
    /// `rules` are parameter-free series; each nonzero value must have degree
    /// `deg(monomial) + degree` (values may carry powers of `h`).
    pub fn new(ring: &Ring, degree: i64, rules: BTreeMap<Vec<u32>, Series>) -> Result<Self> {
        for (m, v) in &rules {
            if let Some(d) = ring.degree(v)? {
                let expect = ring.algebra().monomial_degree(m) + degree;
                if d != expect {
                    return Err(Error::DegreeMismatch(format!(
                        "rule for {} has value {} of degree {d}, expected {expect}",
                        render_series(ring, &ring.monomial(m)),
                        render_series(ring, v)
                    )));
                }
            }
        }
        Ok(Self { degree, rules })
    }

    /// Tabulates `op` on all monomials up to `max_poly` (plain ring).
    pub fn tabulate(ring: &Ring, op: &dyn LinearOp, max_poly: u32) -> Result<Self> {
        let mut rules = BTreeMap::new();
        for m in ring.algebra().monomials_up_to(max_poly) {
            rules.insert(m.clone(), op.apply(ring, &ring.monomial(&m))?);
        }
        Ok(Self {
            degree: op.degree(),
            rules,
        })
    }

    pub fn rules(&self) -> &BTreeMap<Vec<u32>, Series> {
        &self.rules
    }

    pub fn has_rule(&self, mono: &[u32]) -> bool {
        self.rules.contains_key(mono)
    }

    /// Monomials among `monos` with no explicit rule.
    pub fn missing<'a>(&self, monos: impl IntoIterator<Item = &'a Vec<u32>>) -> Vec<Vec<u32>> {
        monos
            .into_iter()
            .filter(|m| !self.rules.contains_key(*m))
            .cloned()
            .collect()
    }
}

impl LinearOp for RuleTable {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        ring.check_shape(s)?;
        let op_odd = self.degree.rem_euclid(2) == 1;
        let mut out = Series::zero();
        for (k, c) in s.terms() {
            let Some(v) = self.rules.get(&k.mono) else {
                continue;
            };
            let prefix_key = Key {
                params: k.params.clone(),
                hbar: k.hbar,
                mono: vec![0; k.mono.len()],
            };
            let neg = op_odd && ring.key_is_odd(&prefix_key);
            let prefix = Series::from_term(prefix_key, if neg { -c.clone() } else { c.clone() });
            out += ring.mul(&prefix, &ring.from_plain(v));
        }
        Ok(out)
    }
}

/// One `h`-component of a BV operator.
#[derive(Clone, Debug)]
pub enum Component {
    Poly(PolyDiffOperator),
    Table(RuleTable),
}

impl Component {
    pub fn is_zero(&self) -> bool {
        match self {
            Component::Poly(p) => p.is_zero(),
            Component::Table(t) => t.rules.values().all(Series::is_zero),
        }
    }
}

impl LinearOp for Component {
    fn degree(&self) -> i64 {
        match self {
            Component::Poly(p) => p.degree(),
            Component::Table(t) => t.degree(),
        }
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        match self {
            Component::Poly(p) => p.apply(ring, s),
            Component::Table(t) => t.apply(ring, s),
        }
    }
}

/// `Δ = Σ_k Δ_k h^k`, of total degree 1.
#[derive(Clone, Debug)]
pub struct HbarOperator {
    components: Arc<Vec<Component>>,
    /// Components with index below this are treated as zero.
    from: usize,
}

impl HbarOperator {
    pub fn new(algebra: &Algebra, components: Vec<Component>) -> Result<Self> {
        for (k, c) in components.iter().enumerate() {
            let expect = Self::component_degree(algebra, k);
            if c.degree() != expect {
                return Err(Error::DegreeMismatch(format!(
                    "component {k} has degree {}, expected {expect}",
                    c.degree()
                )));
            }
        }
        Ok(Self {
            components: Arc::new(components),
            from: 0,
        })
    }

    pub fn zero() -> Self {
        Self {
            components: Arc::new(Vec::new()),
            from: 0,
        }
    }

    /// Required degree `1 + k(m − 1)` of the `h^k` component.
    pub fn component_degree(algebra: &Algebra, k: usize) -> i64 {
        1 + k as i64 * (algebra.m() - 1)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Σ_{k >= from} Δ_k h^k`.
    pub fn tail(&self, from: usize) -> Self {
        Self {
            components: self.components.clone(),
            from: from.max(self.from),
        }
    }

    /// Only the `h^0` part, `Δ_0`.
    pub fn leading(&self) -> Option<&Component> {
        if self.from == 0 {
            self.components.first()
        } else {
            None
        }
    }
}

impl LinearOp for HbarOperator {
    fn degree(&self) -> i64 {
        1
    }

    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        ring.check_shape(s)?;
        let mut out = Series::zero();
        for (k, c) in self.components.iter().enumerate().skip(self.from) {
            let cap = ring.cap() - k as i64;
            // terms whose weight already exceeds what survives after h^k
            let part = s.filter(|key| ring.weight(key) <= cap);
            if part.is_zero() {
                continue;
            }
            out += ring.mul_hbar(&c.apply(ring, &part)?, k as i32);
        }
        Ok(out)
    }
}
