//! Ground-state decoherence of a massive particle superposed near a spin chain.
//!
//! A mass near an open XXZ chain redshifts each local term of the chain
//! Hamiltonian. Placing the mass in a superposition of two positions
//! entangles it with the chain's ground state, and the overlap of the two
//! conditional ground states is the interferometric visibility.
//!
//! * [`model`] turns the chain, mass and placement into redshift factors.
//! * [`hilbert`] enumerates fixed-`S^z` sectors.
//! * [`hamiltonian`] applies the redshifted Hamiltonian matrix-free.
//! * [`eigensolve`] finds ground states (thick-restart Lanczos or dense).
//! * [`freefermion`] solves the XX chain exactly via Jordan-Wigner.
//! * [`analysis`] computes visibilities and the bound on independent systems.
//! * [`harness`] runs parameter sweeps and the command line interface.

pub mod analysis;
pub mod eigensolve;
pub mod error;
pub mod freefermion;
pub mod hamiltonian;
pub mod harness;
pub mod hilbert;
pub mod model;

pub use error::{Error, Result};
