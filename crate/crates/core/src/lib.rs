//! Almost cover-free `(s, l)`-codes and designs.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`] and [`code`]: bit-packed vectors and column-major binary codes with
//!   the disjunction / conjunction / cover algebra.
//! * [`cover`]: classification of `s`-subsets as `(s, l)`-bad or good, error
//!   fractions, and the column-deletion shrinking step.
//! * [`design`]: strict and relaxed superset families, outcome vectors and
//!   collision analysis.
//! * [`decoder`]: the minimal-acceptable-set decoder and an exhaustive oracle.
//! * [`ensemble`]: the constant-weight random code ensemble, exact finite-length
//!   probabilities and seeded Monte Carlo.
//! * [`bounds`]: capacity and error-exponent evaluation.
//! * [`cli`]: the `cfcodes` command-line front end.

pub mod bits;
pub mod bounds;
pub mod cli;
pub mod code;
pub mod combin;
pub mod cover;
pub mod decoder;
pub mod design;
pub mod ensemble;
pub mod error;
pub mod golden;
pub mod ratio;

pub use bits::BitVector;
pub use code::{BinaryCode, IndexSet};
pub use error::{Error, Result};
