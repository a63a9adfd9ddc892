//! Actual causation, abduction and delete propagation for Datalog queries.

pub mod abduction;
pub mod bits;
pub mod causality;
pub mod crosscheck;
pub mod datalog;
pub mod delprop;
pub mod error;
pub mod fixtures;
pub mod flownet;
pub mod hitting;
pub mod oracle;
mod provenance;
pub mod relmodel;
mod syntax;
pub mod treewidth;

pub use error::{Error, Result};
pub use relmodel::{Atom, Constant, Instance, Predicate, Section};
