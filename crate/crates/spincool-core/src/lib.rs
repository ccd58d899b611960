//! Heat-bath cooling and algorithmic cooling of small nuclear-spin systems.
//!
//! The crate models a molecule as a handful of spin-half nuclei, each with an
//! equilibrium polarization bias and a spin-lattice relaxation time. Biases are
//! carried in *normalized* units: the reference spin's equilibrium bias is 1, and
//! the absolute scale `ε₀` lives on [`SpinSystem`]. Two state representations
//! are available:
//!
//! - [`BiasVector`]: per-spin marginal biases. Cheap, and exact for product states.
//! - [`DiagonalState`]: the full probability distribution over the `2^n` classical
//!   basis states, which also tracks the classical correlations created by
//!   polarization transfer and compression.
//!
//! On top of these sit the reversible gate engine ([`gates`]), the T1
//! thermalization channel ([`relaxation`]), the named cooling protocols
//! ([`algorithms`]) and the delay-space grid optimizer ([`optimizer`]).
//!
//! Information content is reported two ways: the leading-order sum of squared
//! normalized biases (units of `ε₀²/ln 4`) and the exact Shannon deficit
//! `n − H` in bits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algorithms;
pub mod entropy;
mod error;
pub mod gates;
pub mod optimizer;
pub mod physics;
pub mod relaxation;
pub mod report;
pub mod sequence;
pub mod state;
pub mod system;
pub mod uncertainty;

pub use entropy::{binary_entropy, ic_exact, ic_leading, sqrt_n_limit};
pub use error::{Error, Result};
pub use gates::{GateKind, GateSpec};
pub use report::ICReport;
pub use state::{BiasVector, DiagonalState};
pub use system::{Role, SpinDef, SpinSystem, T1};

/// Largest spin count accepted by [`DiagonalState`].
pub const MAX_SPINS: usize = 20;
