//! Numerical laboratory for twisted mixed moments of the Riemann zeta function.
//!
//! The crate evaluates
//!
//! ```text
//! M(T)  = ∫_0^T D_θ(1/2 + iat) ζ(1/2 − ibt) ζ(1/2 − ict) dt
//! M2(T) = ∫_0^T |D_θ(1/2 + iat)|² ζ(1/2 − ibt) ζ(1/2 − ict) dt
//! ```
//!
//! by quadrature, together with the closed-form main and secondary terms of
//! their asymptotic expansions and the diagonal lattice sums behind them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod arith;
mod kernel;
pub mod constants;
pub mod dirichlet;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lattice;
pub mod moment;
pub mod quadrature;
pub mod special_functions;

pub use error::{Error, Result};
