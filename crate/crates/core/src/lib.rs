//! Core algorithms for mass-action reaction-diffusion systems with
//! nonlinear (porous-medium / fast) diffusion on a 1D interval.
//!
//! The crate is organised around the computable structures of such systems:
//!
//! * [`network`] — reaction networks: a small text format, stoichiometry,
//!   mass-action rates and their regularised variant, entropy inequality.
//! * [`equilibrium`] — exact rational conservation laws, the strictly
//!   positive complex-balanced equilibrium of a compatibility class, and
//!   brute-force detection of boundary equilibria.
//! * [`solver`] — a finite-volume IMEX / explicit integrator with zero-flux
//!   boundaries that preserves non-negativity and the discrete masses.
//! * [`truncation`] — the weighted truncations `omega_i^E` with closed-form
//!   derivatives, plus numerical scans of their uniform estimates.
//! * [`diagnostics`] — relative entropy, entropy dissipation, the pointwise
//!   and functional inequalities behind exponential decay, decay-rate fits,
//!   and the renormalised weak-form residual.
//!
//! Everything here is `no_std` (alloc only) and pure: no IO, no globals, no
//! interior mutability, so all operations are safe to call concurrently.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod equilibrium;
mod math;
pub mod network;
pub mod solver;
pub mod truncation;

pub use network::ReactionNetwork;
