//! Exact rational-function arithmetic over ℚ with adjoined algebraic constants,
//! plus a small plain-text expression language.
//!
//! ```
//! use painleve_algebra::{parse_expr, Scope};
//!
//! let scope = Scope::with_symbols(["x", "y"]);
//! let f = parse_expr("(x^2 - y^2)/(x - y)", &scope).unwrap();
//! assert_eq!(f.render(), "x + y");
//! ```

pub mod expr;
pub mod exprlang;
pub mod gcd;
pub mod modular;
pub mod poly;
pub mod rational;
pub mod series;
pub mod symbol;

pub use expr::{EpsOrder, RationalExpr, Subst};
pub use exprlang::{parse, parse_expr, render, Ast, Scope, SyntaxError};
pub use poly::Poly;
pub use rational::{q, q_frac, Q};
pub use symbol::{ConstantTower, Relation, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid constant tower: {0}")]
    InvalidTower(String),
    #[error("expression `{0}` does not evaluate to a number")]
    NotNumeric(String),
}
