//! Exact verification of left-symmetric algebras, Lie algebroids and
//! pre-symplectic algebroids on a single coordinate chart.

pub mod algebroid;
pub mod cohomology;
pub mod defs;
pub mod error;
pub mod exact;
pub mod expr;
pub mod fixtures;
pub mod linalg;
pub mod lsa;
pub mod parakahler;
pub mod pipeline;
pub mod presym;
pub mod report;

pub use error::{Error, Result};
pub use expr::{ChartContext, DiffExpr, Poly};
pub use linalg::{ExprMatrix, QMatrix};
pub use report::{Check, CheckReport, Status, Witness};
