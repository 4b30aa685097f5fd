//! Mild solutions of the space-time fractional nonlinear Schrödinger equation
//!
//! ```text
//! i ∂_t^α u = (-Δ)^β u - F(u),   u(0) = u0,
//! ```
//!
//! written as `u(t) = S_t u0 + i ∫_0^t P_{t-τ} F(u(τ)) dτ` with Fourier symbols
//! `a_t(ξ) = E_{α,1}(-i|ξ|^{2β} t^α)` and `b_t(ξ) = t^{α-1} E_{α,α}(-i|ξ|^{2β} t^α)`.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected; reference
// constants keep all published digits
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::excessive_precision
)]

pub mod cli;
pub mod error;
pub mod estimates;
pub mod evolution;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
