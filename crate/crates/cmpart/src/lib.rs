//! Partition numbers as CM traces on X0(6), with exact class-polynomial
//! reconstruction and independent supersingular / Brandt-module verification
//! of p(n) mod l.
//!
//! The crate is organized around the pipeline:
//!
//! - [`heegner`]: discriminants D_n = 1 - 24n, Heegner form classes, CM points
//! - [`qseries`]: exact q-expansions (eta, E2, E4, E6, F, j, t6) and
//!   certified complex evaluation
//! - [`cm_trace`]: traces of the Maass value P at CM points, integer
//!   recognition, class polynomials H_n
//! - [`modpoly`]: classical modular polynomials, the CM-tangent identity,
//!   level-6 modular equations and U_l
//! - [`brandt`]: quaternion orders, right ideal classes, Brandt matrices,
//!   optimal-embedding counts
//! - [`ss_reduce`]: supersingular points of X0(6) mod l, reduction of class
//!   polynomials, congruence verdicts
//! - [`partition`]: the Euler-recurrence oracle and congruence sweeps

pub mod arith;
pub mod brandt;
pub mod cm_trace;
pub mod error;
pub mod heegner;
pub mod modpoly;
pub mod parallel;
pub mod partition;
pub mod qseries;
pub mod ss_reduce;

pub use error::{Error, Result};
