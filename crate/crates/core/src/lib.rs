//! Checks and bounds for factorizing two-particle S-matrices of integrable
//! models in two spacetime dimensions.
//!
//! Every Rust API takes 0-based particle indices. JSON configs and reports
//! use the 1-based labels `1..=dim_k`; the translation happens in
//! [`spectrum::SpectrumDescriptor`] and the report writers.

pub mod config;
pub mod diagrams;
pub mod error;
pub mod fock;
pub mod intertwiner;
pub mod linalg;
pub mod nuclearity;
pub mod report;
pub mod run;
pub mod smatrix;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
