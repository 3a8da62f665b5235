//! Lattice coding toolkit for fading and MIMO wiretap channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] — lattices as generator matrices, LLL, enumeration and geometric invariants
//!   (minimum distance, Hermite invariant, product distance, product determinant);
//! * [`gauss`] — lattice Gaussian measures: flatness factor, smoothing parameter,
//!   Banaszczyk tail bounds, exact discrete Gaussian sampling and executable lemma checks;
//! * [`algebra`] — number fields, ideal lattices, codifferents and cyclic division algebras;
//! * [`wiretap`] — nested-lattice wiretap codes, rate formulas and secrecy conditions;
//! * [`channel`] — fading channel laws, MMSE-GDFE decoding and Monte Carlo experiments;
//! * [`verify`] — named property suites used by the command-line `verify` subcommand;
//! * [`report`] — experiment configurations and their fixed-header CSV rows.

pub mod algebra;
pub mod channel;
pub mod error;
pub mod gauss;
pub mod lattice;
pub mod linalg;
pub mod montecarlo;
pub mod report;
pub mod stats;
pub mod verify;
pub mod wiretap;

pub use error::{Error, Result};
