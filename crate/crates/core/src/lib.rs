//! Photon-number states at lossless beam splitters.
//!
//! The crate evolves two-mode Fock inputs `|s1, s2>` through a beam splitter,
//! measures the mode entanglement of the output, and models a waveguide
//! coupler whose reflectance depends on the photon frequencies. The `hom`
//! module builds two-photon interference dips on top of that coupler.
//!
//! ```
//! use qbs_core::beam_splitter::{output_distribution, BsParams, FockPair};
//!
//! let pair = FockPair::new(1, 1).unwrap();
//! let dist = output_distribution(pair, &BsParams::balanced());
//! assert!((dist.probs[0] - 0.5).abs() < 1e-12);
//! assert!(dist.probs[1].abs() < 1e-12);
//! ```

pub mod beam_splitter;
pub mod cli;
pub mod entanglement;
pub mod hom;
pub mod numerics;
pub mod waveguide;

mod error;

pub use error::{Error, Result};
