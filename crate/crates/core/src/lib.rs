//! Numerical toolkit for the Gelfand-Zeitlin integrable system on `n x n`
//! complex matrices.
//!
//! The conserved quantities are the eigenvalues of the leading principal
//! minors ([`ladder`]). Their Hamiltonian flows integrate exactly to
//! conjugation by spectral-projector exponentials ([`flows`]), and together
//! they generate a torus action that is simply transitive on generic level
//! sets. Choosing the unit-subdiagonal Hessenberg matrices as a section
//! ([`hessenberg`]) yields dual coordinates `s_j` with
//! `{r_i, s_j} = delta_ij s_j` ([`chart`]). The Poisson structure and its
//! finite-difference oracles live in [`poisson`].

// Negated comparisons are deliberate throughout: a NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod error;
pub mod flows;
pub mod hessenberg;
pub mod ladder;
pub mod numerics;
pub mod orthopoly;
pub mod poisson;
pub mod sampling;
pub mod verify;

pub use chart::{chart, compute_s, r_over_s, unchart, ChartPoint};
pub use error::{GzError, Result};
pub use flows::{one_param_flow, spectral_projector, torus_apply, TorusElement};
pub use hessenberg::{is_hessenberg, reconstruct, HessenbergForm};
pub use ladder::{
    d, deck_apply, extract_ladder, in_e_omega, in_m_omega, ladder_to_charpolys, power_sum, r,
    split_index, CoveredPoint, DeckElement, Ladder,
};
pub use numerics::{charpoly, eigenvalues, polyroots, principal_minor, ComplexMatrix, MonicPoly};
pub use poisson::{bracket, grad_fd, grad_r, hamiltonian_field, trace_form, MatrixFunction};
