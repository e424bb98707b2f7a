//! Discrete multi-parameter maximal operators on isotropic dyadic grids.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`dyadic`] and [`sat`] hold sampled functions, dyadic
//!   rectangles and summed-area tables (counting measure throughout);
//! * [`maximal`] evaluates the complexity-`c` maximal operator `M_c` over the
//!   dyadic basis, together with a brute-force oracle and composed weights;
//! * [`covering`] implements the two greedy rectangle selections (the
//!   half-overlap rule and the exponential-overlap rule) and verifiers for
//!   the covering statements they support;
//! * [`lab`] measures empirical constants of the weighted inequalities and
//!   evaluates the scalar inequalities used alongside them.

// Argument checks are written as `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod dyadic;
pub mod error;
pub mod grid;
pub mod lab;
pub mod maximal;
pub mod sat;

pub use covering::{
    audit_selection, check_covering_exp, check_covering_half, overlap_integral, partition_by_order, select_exp,
    select_half, sparseness_report, AxisOrder, CoveringCheck, Procedure, RectFamily,
    SelectionResult,
};
pub use dyadic::{enumerate_shapes, DyadicInterval, DyadicRect, Shape};
pub use error::{Error, Result};
pub use grid::{lp_norm, superlevel_measure, Grid};
pub use maximal::{compose, compose_strong_over_cube_2d, maximal, maximal_bruteforce, Basis};
pub use sat::SummedAreaTable;
