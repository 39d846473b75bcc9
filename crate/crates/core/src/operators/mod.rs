//! Linear operators on truncated series: polynomial differential operators,
//! tabulated operators, `h`-families, graded commutators, Koszul brackets and
//! the induced L∞[1] brackets.

mod bracket;
mod poly;

pub(crate) mod bracket_support {
    pub(crate) use super::bracket::{degrees, monomial_tuples, product, render_tuple};
}

pub use bracket::{
    check_l_infinity, check_order, koszul_bracket, koszul_bracket_commutator,
    koszul_bracket_expansion, l_n, mu_n, verify_bv, verify_bv_operator, BvInstance, SweepRange,
};
pub use poly::{Component, HbarOperator, PolyDiffOperator, RuleTable};

use std::sync::Arc;

use crate::error::Result;
use crate::graded::{Ring, Series};

/// A homogeneous linear operator. Application is linear over the rationals,
/// commutes with `h`, and passes parameters with the Koszul sign.
pub trait LinearOp: Send + Sync {
    fn degree(&self) -> i64;
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series>;
}

impl<T: LinearOp + ?Sized> LinearOp for Arc<T> {
    fn degree(&self) -> i64 {
        (**self).degree()
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        (**self).apply(ring, s)
    }
}

impl<T: LinearOp + ?Sized> LinearOp for &T {
    fn degree(&self) -> i64 {
        (**self).degree()
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        (**self).apply(ring, s)
    }
}

/// Left multiplication by a fixed element.
pub struct MulOp {
    pub element: Series,
    pub degree: i64,
}

impl MulOp {
    pub fn new(ring: &Ring, element: Series) -> Result<Self> {
        let degree = ring.degree_or(&element, 0)?;
        Ok(Self { element, degree })
    }
}

impl LinearOp for MulOp {
    fn degree(&self) -> i64 {
        self.degree
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        ring.try_mul(&self.element, s)
    }
}

/// `ad_a(D) = D∘a − (−1)^{|D||a|} a∘D`.
pub struct Ad<'a> {
    inner: &'a dyn LinearOp,
    alpha: Series,
    alpha_deg: i64,
}

impl<'a> Ad<'a> {
    pub fn new(ring: &Ring, inner: &'a dyn LinearOp, alpha: Series) -> Result<Self> {
        let alpha_deg = ring.degree_or(&alpha, 0)?;
        Ok(Self {
            inner,
            alpha,
            alpha_deg,
        })
    }
}

impl LinearOp for Ad<'_> {
    fn degree(&self) -> i64 {
        self.inner.degree() + self.alpha_deg
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let a = self.inner.apply(ring, &ring.mul(&self.alpha, s))?;
        let b = ring.mul(&self.alpha, &self.inner.apply(ring, s)?);
        Ok(if (self.inner.degree() * self.alpha_deg).rem_euclid(2) == 1 {
            a + b
        } else {
            a - b
        })
    }
}

/// `ad_{a_n} ⋯ ad_{a_1}(op)` applied to `s`.
pub fn ad_tower(ring: &Ring, op: &dyn LinearOp, args: &[Series], s: &Series) -> Result<Series> {
    match args.split_last() {
        None => op.apply(ring, s),
        Some((last, rest)) => {
            let mut degree = op.degree();
            for a in rest {
                degree += ring.degree_or(a, 0)?;
            }
            let inner = AdTower {
                op,
                args: rest,
                degree,
            };
            Ad::new(ring, &inner, last.clone())?.apply(ring, s)
        }
    }
}

struct AdTower<'a> {
    op: &'a dyn LinearOp,
    args: &'a [Series],
    degree: i64,
}

impl LinearOp for AdTower<'_> {
    fn degree(&self) -> i64 {
        self.degree
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        ad_tower(ring, self.op, self.args, s)
    }
}

/// Sum of operators of a common degree.
pub struct SumOp<'a> {
    pub degree: i64,
    pub terms: Vec<(crate::scalar::Q, &'a dyn LinearOp)>,
}

impl LinearOp for SumOp<'_> {
    fn degree(&self) -> i64 {
        self.degree
    }
    fn apply(&self, ring: &Ring, s: &Series) -> Result<Series> {
        let mut out = Series::zero();
        for (c, op) in &self.terms {
            out += op.apply(ring, s)?.scale(c);
        }
        Ok(out)
    }
}
