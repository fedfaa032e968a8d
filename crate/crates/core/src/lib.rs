//! Sidon sets for integer linear forms: exhaustive verification, greedy
//! construction as polynomial or bounded perturbations of arbitrary input
//! sequences, and exact counting certificates refuting bounded perturbations
//! of dense sequences.
//!
//! All arithmetic is arbitrary precision and exact; every exponential
//! enumeration runs under an explicit budget and refuses loudly when it
//! would blow past it.

pub mod bounds;
pub mod constructor;
pub mod error;
pub mod linear_form;
pub mod sequence;
pub mod serde_util;
pub mod sidon;

pub use error::{Error, Result};
pub use linear_form::{IndexSet, LinearForm, NWitness, PropertyN};
pub use sidon::{CollisionWitness, ExtendVerdict, FiniteSet, SidonVerdict};
