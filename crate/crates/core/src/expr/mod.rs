//! Exact coefficient ring: rational functions in chart coordinates, formal
//! function symbols and their formal partial derivatives.

mod context;
mod diffexpr;
mod parser;
pub mod poly;

pub use context::{ChartContext, Var, DEFAULT_MAX_ORDER};
pub use diffexpr::DiffExpr;
pub use poly::{Monomial, Poly};
