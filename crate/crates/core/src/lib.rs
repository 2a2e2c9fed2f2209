//! Exact-arithmetic toolkit for p-adic Arakelov theory.

pub mod coleman;
pub mod cube;
pub mod curvature;
pub mod error;
pub mod forms;
pub mod green;
pub mod laurent;
pub mod ledger;
pub mod padic;
pub mod qpoly;

pub use error::{Error, Result};
