//! Symbolic graph calculus for Nambu-Poisson structures on `R^d`.
//!
//! Kontsevich graphs, Leibniz graphs and micro-graphs are evaluated into
//! multivector fields whose coefficients are exact-rational differential
//! polynomials. On top of that sit the ansatz generator for trivializing
//! vector fields and an exact sparse linear solver for the coboundary
//! equation `Q = [[P, X]]`.

pub mod ansatz;
pub mod cohomology;
pub mod error;
pub mod eval;
pub mod graph;
pub mod jet;
pub mod linsys;
pub mod multivector;
pub mod reference;

pub use error::{Error, Result};
