pub mod arith;
pub mod cli;
pub mod conic;
pub mod construct;
pub mod dihedral;
pub mod error;
pub mod factorizations;
pub mod field;
pub mod infinity;
pub mod primary;
pub mod report;
pub mod serial;
pub mod symbols;
pub mod table;

pub use error::{Error, Place, Result};
