//! Continuous-variable phase-space toolkit.
//!
//! Two-mode squeezed states of cosmological perturbations, their Wigner and
//! Weyl descriptions, quantum discord, and CHSH tests for wavepacket
//! constructions and pseudo-spin operators.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod infotheory;
pub mod wavepacket_chsh;
pub mod weyl;
pub mod numerics;
pub mod pseudospin;

pub use error::{Error, Result};
