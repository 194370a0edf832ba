//! Simulation and verification of postselected two-photon gates in staged
//! multiport beam-splitter networks.
//!
//! Eight optical modes are mixed by twelve real beam splitters in three
//! stages. Two photons injected into the first four modes encode a pair of
//! dual-rail qubits; discarding every run in which a photon exits through
//! the last four modes leaves an effective non-orthogonal 4×4 action — the
//! upper-left block of the 8×8 transfer matrix — that can be steered onto
//! two-qubit gate targets by choosing the splitter angles.
//!
//! The crate covers the full loop:
//!
//! - [`bsnet`] builds the staged network, composes the orthogonal transfer
//!   matrix and cross-checks it against the per-entry closed form;
//! - [`occsim`] implements the signed occupation-vector semantics of the
//!   gates and the reference truth tables;
//! - [`focksim`] evolves one- and two-photon Fock states under full bosonic
//!   semantics, with a brute-force operator-expansion oracle;
//! - [`postselect`] applies the postselection rule and assembles gate
//!   reports under either semantics;
//! - [`anglesolve`] enumerates the 50:50 sign assignments realizing a
//!   target block and runs a continuous multi-start search for everything
//!   else;
//! - [`config`] and [`report`] back the `multiport` command-line driver
//!   with a JSON run configuration and byte-stable report documents.

pub mod anglesolve;
pub mod bsnet;
pub mod config;
pub mod error;
pub mod focksim;
pub mod occsim;
pub mod postselect;
pub mod report;

pub use error::{Error, Result};
