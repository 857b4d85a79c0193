//! Catalog-driven verification of isomonodromic deformations of second-order
//! linear equations and their degenerations.

pub mod catalog;
pub mod degeneration;
pub mod hamilton;
pub mod lincheck;
pub mod matrixlab;
pub mod numint;

pub use catalog::{Catalog, CatalogError};
