//! Exact formal group law calculus.
//!
//! The crate is layered: [`scalars`] supplies exact coefficient rings and
//! integer lattices, [`series`] truncated power series on top of them, and
//! [`fgl`], [`lazard`], [`cobordism`] and [`operations`] the algebra of
//! formal group laws and the cohomology operations built from them.

pub mod error;
pub mod scalars;
pub mod series;
pub mod fgl;
pub mod lazard;
pub mod cobordism;
pub mod operations;
pub mod json;

pub use error::{Error, Result};
