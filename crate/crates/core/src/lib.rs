//! Stabilizer quantum error correction toolkit.
//!
//! The crate covers the full path from a code definition to Monte Carlo error
//! rates:
//!
//! - [`pauli`]: phase-tracked Pauli algebra over packed bit vectors;
//! - [`code`] and [`standard_form`]: code validation, syndromes, group
//!   membership, distance search and check-matrix standard form;
//! - [`circuit`] and [`synthesis`]: Clifford circuits, encoder synthesis for
//!   CSS and non-CSS codes, bare-ancilla syndrome extraction circuits;
//! - [`tableau`]: stabilizer tableau simulator with Pauli fault injection;
//! - [`ft`]: hook-error propagation, lookup-table decoding, fault-tolerance
//!   checks and schedule search;
//! - [`noise`], [`trial`], [`rates`], [`fit`]: noise sampling, the error
//!   correction trial pipeline, rate estimation and threshold fitting;
//! - [`codefile`] and [`export`]: text code definitions, JSON tables and CSV
//!   results.

pub mod circuit;
pub mod code;
pub mod codefile;
pub mod error;
pub mod export;
pub mod fit;
pub mod ft;
pub mod noise;
pub mod pauli;
pub mod rates;
pub mod standard_form;
pub mod synthesis;
pub mod tableau;
pub mod trial;

pub use circuit::{CliffordCircuit, Gate, Instruction};
pub use code::{validate, DistanceVerdict, LogicalClass, StabilizerCode, Syndrome, ValidationReport};
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliOperator};
pub use standard_form::{derive_logicals, standard_form, ExtendedCheckMatrix, StandardForm};
pub use synthesis::{build_detector, build_encoder, DetectorSchedule};
pub use tableau::{FaultEvent, FaultKind, Observable, StabilizerTableau};
