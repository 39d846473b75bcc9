//! Maurer–Cartan elements: contraction data, residuals, the universal
//! solver, twisting and pushforward.

mod contraction;

pub use contraction::{ContractionData, Perturbed, Representative};
mod element;

pub use element::{
    mc_residual, parameter_names, residual_brackets, residual_exponential, solve_mc_universal, McElement,
    McSolution, ResidualMode,
};
mod twist;

pub use twist::{
    pushforward_mc, twist_morphism, twist_operator, twisted_cumulant_expansion, verify_twisted_morphism,
    verify_twisted_operator, TwistPerturbation, TwistedMorphism, TwistedOperator,
};
