//! Finite-model categorical logic: regular doctrines and triposes over
//! computable base categories, the four free completions, and extraction of
//! elementary-topos structure, with every axiom checked by exhaustive
//! enumeration.

pub mod category;
pub mod completeness;
pub mod completions;
pub mod controls;
pub mod doctrine;
pub mod error;
pub mod export;
pub mod format;
pub mod lattice;
pub mod models;
pub mod morphism;
pub mod per;
pub mod registry;
pub mod report;
pub mod subobject;
pub mod topos;

pub use error::{Error, Result};
