// SPDX-License-Identifier: Apache-2.0

//! Toric correlation coefficients of irreducible representations of
//! `PGL_2(F_q)` and their congruences with Legendre polynomials.
//!
//! The crate computes `c(π; H, K_{α,u})` modulo `p` along two independent
//! routes: the character double sum over `H × K` ([`chars`]) and the scalars
//! of the averaging operators on the mod-`p` symmetric-power models
//! ([`brauer`]). Both are compared against `P_r(u/√α)^2` computed from exact
//! Legendre polynomials ([`legendre`]). [`analysis`] hosts the simultaneous
//! nonvanishing search and the identity suite.

pub mod analysis;
pub mod arith;
pub mod brauer;
pub mod chars;
pub mod fields;
pub mod group;
pub mod legendre;
pub mod polyx;
pub mod report;

pub use fields::{FieldCtx, FieldElem, FieldError, FieldLevel};
pub use polyx::{Dyadic, DyadicPoly, FqPoly};
