//! Numerical laboratory for minimum-error-entropy estimation.
//!
//! The estimation problem: an unknown `X` with conditional density `p(x|y)` is
//! estimated from a discrete observation `Y` by choosing one shift per
//! observation value. The error density is then a weighted mixture of shifted
//! conditionals, and a risk functional of that mixture scores the estimator.
//!
//! This crate provides the pieces end to end:
//!
//! * [`grid`] — uniform grids, trapezoidal quadrature, power integrals;
//! * [`densities`] — symmetric-unimodal conditional families and their error
//!   mixtures;
//! * [`risks`] — MSE, MAD, 0-1 loss, Shannon and Renyi error entropy, and the
//!   information potential;
//! * [`rearrange`] — decreasing rearrangements with equimeasurability,
//!   majorization, and mixed-power inequality checks;
//! * [`estimate`] — the median shift assignment, extremality gap reports, and
//!   shift optimizers for every risk;
//! * [`approx`] — the window-averaged truncation sequence that approximates a
//!   density from below, with convergence reports;
//! * [`io`] — CSV/JSON formats shared with the command-line runner;
//! * [`corpus`] / [`selftest`] — the built-in family corpus and the criterion
//!   suite the runner exposes as `self-test`.
//!
//! Sweeps and searches are data-parallel via rayon when the `parallel`
//! feature (default) is enabled; results are ordered deterministically, so
//! output is identical to a sequential run.

pub mod approx;
pub mod corpus;
pub mod densities;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod grid;
pub mod io;
pub mod rearrange;
pub mod risks;
pub mod selftest;

pub use densities::{Component, ComponentShape, CsumFamily, CsumShape, ShapeKind, ShiftAssignment, TabulatedShape};
pub use error::{Error, Result};
pub use estimate::{median_assignment, optimize_shifts, theorem_gap, verify_theorem};
pub use estimate::{OptimizeResult, SearchConfig, TheoremReport, Verdict};
pub use grid::{Grid, GridFunction};
pub use rearrange::{decreasing_rearrangement, Rearranged};
pub use risks::RiskSpec;
