//! Deterministic number-on-the-forehead (NOF) protocol workbench.
//!
//! The crate models three communication settings:
//!
//! * the classic NOF model with a shared board, where party `i` sees every
//!   input except its own;
//! * the restricted `NOF_G` model, where a directed graph `G` decides who
//!   sees whose input and messages travel over point-to-point channels;
//! * the myopic one-way model, where parties speak in a chain order and see
//!   only their predecessors and their immediate successor.
//!
//! On top of the models sit the XOR multiplexing compilers
//! ([`compiler`]), which combine `ell` single-instance protocols into one
//! board protocol for `ell` instances and save communication whenever a
//! combinatorial certificate ([`combinatorics`]) allows it. Every protocol
//! can be checked by exhaustive simulation against a truth-table oracle
//! ([`verifier`]).
//!
//! Party and instance indices are 1-based everywhere.

pub mod bits;
pub mod combinatorics;
pub mod compiler;
pub mod demo;
pub mod error;
pub mod io;
pub mod model;
pub mod protocols;
pub mod verifier;

pub use bits::BitString;
pub use error::{Error, Result};
