//! Finite-depth adele rings of cyclotomic towers.

pub mod adele;
pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod local;
pub mod place;
pub mod transition;
pub mod verify;

pub use cyclotomic::{CycloElement, GaloisElement, Tower};
pub use error::{Error, Result};
