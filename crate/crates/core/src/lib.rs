//! Numerical tensor calculus for almost contact metric manifolds.
//!
//! The engine builds a structure `(phi, xi, eta, g)` on a coordinate chart or
//! a Lie group, computes its Levi-Civita curvature, classifies it in the
//! almost alpha-cosymplectic family, extracts `(kappa, mu, nu)` from
//! `R(X,Y)xi`, and fits the curvature tensor against the standard basis
//! `R1 .. R8` (with `R5` optionally split into `R5,1 - R5,2`).

pub mod catalog;
pub mod check;
pub mod curvature;
pub mod decomp;
pub mod deform;
pub mod error;
pub mod geometry;
pub mod kmn;
pub mod lstsq;
pub mod structure;

pub use check::Check;
pub use error::{GeomError, Result};
