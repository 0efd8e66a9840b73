//! Symbolic higher-order variational calculus on jet spaces.
//!
//! The crate computes Euler-Lagrange forms of Lagrangians, decides whether a
//! system of PDEs is variational through the generalized Helmholtz
//! conditions, reconstructs Tonti Lagrangians, builds generalized
//! Poincare-Cartan forms, and checks the results against an independent
//! numeric layer. All coefficient arithmetic is exact.
//!
//! Modules, bottom-up:
//! - [`expr`]: canonical expressions with exact rational coefficients
//! - [`jet`]: multi-indices, jet coordinates, total derivatives, sections
//! - [`forms`]: wedge algebra, `d`, horizontalization, contact decomposition,
//!   Poincare-Cartan forms, pullbacks under fibered isomorphisms
//! - [`variational`]: Euler-Lagrange operator, Helmholtz conditions, Tonti
//!   Lagrangians, null Lagrangians, multipliers
//! - [`numeric`]: quadrature and finite-difference oracles
//! - [`parse`], [`problem`], [`cli`]: the expression DSL, problem files and
//!   the `jetvar` command-line front end

pub mod cli;
pub mod expr;
pub mod forms;
pub mod jet;
pub mod numeric;
pub mod parse;
pub mod problem;
pub mod variational;

pub use expr::{Bindings, Expr, ExprError, Func, Rational};
pub use forms::{DiffForm, FiberedIso, FormsError};
pub use jet::{Coord, JetContext, JetError, MultiIndex, SectionSpec};
pub use variational::{HelmholtzReport, Lagrangian, SourceForm, VariationalError, Verdict};

use thiserror::Error;

/// Crate-level error aggregating the module errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error(transparent)]
    Numeric(#[from] numeric::NumericError),
    #[error(transparent)]
    Parse(#[from] parse::ParseError),
    #[error(transparent)]
    Problem(#[from] problem::ProblemError),
}
