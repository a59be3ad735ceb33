//! Sharp Bellman functions for tree and dyadic maximal operators under
//! Lorentz-norm constraints, with the numerical machinery used to check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
pub mod cli;
pub mod error;
pub mod hardy;
pub mod measure_fn;
pub mod quadrature;
pub mod sampling;
pub mod special;
pub mod tree_sim;
pub mod verify;

pub use bellman::{
    bellman_i5, bellman_thm2, bellman_thm3, bellman_thm4, BellmanQuery, BellmanResult, Branch, QueryKind,
    WeakConstraint,
};
pub use error::{Error, Result};
pub use hardy::{delta_functional, functional, FunctionalSpec, OuterFn};
pub use measure_fn::{lower_envelope, rearrange, Density, PiecewisePower, StepFunction};
pub use special::{omega_q, solve_alpha, solve_sigma};
pub use tree_sim::{dyadic_maximal, maximal_rearranged, ExtremizerSpec, LeafVector};
