//! Classification toolkit for structured nonsmooth optimization (SNO).
//!
//! An SNO instance minimizes a smooth objective subject to constraints of the
//! form `(F1_i(x), F2_i(x)) ∈ K`, where `K` is one of five nonconvex planar
//! cones: complementarity, vanishing, orthogonality-type, switching, or
//! disjunctive. This crate provides:
//!
//! * a small symbolic expression language with exact differentiation
//!   ([`expr`]),
//! * cone membership, projection, and active-structure analysis ([`problem`]),
//! * multiplier solves and the stationarity taxonomy — W, Fréchet, limiting,
//!   Clarke, and the topologically relevant T notion, together with
//!   first-order saddle classification ([`stationarity`]),
//! * quadratic/biactive/T-indices, nondegeneracy checks, and a stratified
//!   stationary-point scan ([`morse`]),
//! * a regularization path follower for complementarity constraints
//!   ([`regularization`]),
//! * connected-component profiles of lower level sets on 2-D instances
//!   ([`levelset`]).
//!
//! All public types are immutable after construction and the operations are
//! pure functions, so everything here is safe to call from multiple threads.

pub mod error;
pub mod expr;
pub mod gallery;
pub mod levelset;
pub mod linalg;
pub mod morse;
pub mod newton;
pub mod problem;
pub mod regularization;
pub mod report;
pub mod stationarity;
pub mod tol;

pub use error::Error;
pub use expr::Expr;
pub use problem::{ActivePattern, ConeKind, SnoProblem};
pub use report::StationarityReport;
pub use tol::Tolerances;
