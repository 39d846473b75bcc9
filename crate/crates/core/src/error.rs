use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("length mismatch: permutation has {perm} entries, degree list has {degrees}")]
    LengthMismatch { perm: usize, degrees: usize },

    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),

    #[error("generator-set mismatch: {0}")]
    GeneratorMismatch(String),

    #[error("element is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("exponential undefined: term {0} is not nilpotent under the truncation")]
    NonNilpotent(String),

    #[error("logarithm undefined: constant term must be exactly 1, found {0}")]
    NonUnitConstant(String),

    #[error("term {0} has negative weight; truncation would not be exact")]
    NegativeWeight(String),

    #[error("pole detected: {0}")]
    Pole(String),

    #[error("divisibility by h^{power} fails: {detail}")]
    Divisibility { power: u32, detail: String },

    #[error("two-route disagreement in {what}: {detail}")]
    RouteDisagreement { what: String, detail: String },

    #[error("arity must be at least 1")]
    ZeroArity,

    #[error("map is not unital: f(1) = {0}")]
    NotUnital(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("element lies outside the contraction window: {0}")]
    OutsideWindow(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("lifting obstruction at h^{order}: {class}")]
    LiftingObstruction { order: i32, class: String },

    #[error("Maurer-Cartan obstruction at u-order {order}: {class}")]
    McObstruction { order: u32, class: String },

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
