//! Integration of uncertain data from two sources, in the possible-worlds
//! model and in probabilistic relations with event constraints, with exact
//! rational probabilities.

pub mod decompose;
pub mod document;
pub mod error;
pub mod gen;
pub mod golden;
pub mod logic;
pub mod prdb;
pub mod probcalc;
pub mod pwdb;
pub mod rational;
mod union_find;

pub use error::{Error, ParseError, Result};
