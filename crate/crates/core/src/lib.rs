//! Finsler geometry of positive-definite matrices under Schatten p-norms.
//!
//! The crate provides weighted geometric means, the geodesic distance
//! `delta_p(A, B) = ||log(A^{-1/2} B A^{-1/2})||_p`, (log-)majorization utilities, and
//! checkers that evaluate the uniform convexity inequalities of this geometry on concrete
//! matrices. The [`experiments`] module draws reproducible random ensembles and runs
//! verification campaigns; [`cli`] exposes them on the command line.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod geodesic;
pub mod inequalities;
pub mod matcore;
pub mod schatten;

pub use error::{Error, Result};
pub use geodesic::{delta_p, geometric_mean, log_euclidean_dist, weighted_mean, GeodesicCurve};
pub use inequalities::{Inequality, InequalityReport};
pub use matcore::{CMatrix, HermitianMatrix, SpdMatrix};
