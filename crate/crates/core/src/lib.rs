//! Computable objects around ergodic averages along Hardy-field floor orbits.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure and
//! deterministic: randomized routines take an explicit seed.
//!
//! * [`hardy`] — monomial Hardy functions `a·t^c·(log₂ t)^b`, calculus, floor orbits.
//! * [`expsum`] — the discrete and continuous multipliers, Van der Corput bounds,
//!   the sawtooth expansion and the correlation function.
//! * [`variation`] — r-variation norms, jump counts and lacunary scale sets.
//! * [`ergodic`] — torus rotations, lattice shifts and convergence experiments.
//! * [`arcs`] — smooth cutoffs, major/minor arc projections and the
//!   Littlewood–Paley square function.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arcs;
mod dd;
pub mod ergodic;
mod error;
pub mod expsum;
pub mod fft;
pub mod hardy;
pub mod lattice;
pub mod math;
pub mod quadrature;
pub mod variation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
