//! Desk-scale laboratory for VCL trees, the online and forbidden-pattern games,
//! one-inclusion prediction and distribution-dependent learning curves.

pub mod classes;
pub mod domain;
pub mod error;
pub mod games;
pub mod harness;
pub mod learners;
pub mod lowerbound;
pub mod seeding;
pub mod trees;

pub use error::{Error, Result};
