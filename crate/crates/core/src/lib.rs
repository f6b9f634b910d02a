//! A workbench for finite pointed algebras and their split extensions.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod files;
pub mod points;
pub mod report;
pub mod schreier;
pub mod special;
pub mod sweep;
pub mod terms;

pub use error::{Error, Result};
