//! Stabilized solution of backward parabolic problems under a
//! slow-evolution (SECB) constraint.
//!
//! The backward problem `u_t + A u = 0` on (0, T) is exponentially
//! ill-posed. Requiring the solution to evolve slowly near the continuation
//! boundary, `||u(T) - u(s)|| <= K*delta`, restores stability with the
//! amplification constant `Lambda` solving `x = K + x^{s/T}`:
//! `||u1(t) - u2(t)|| <= 2 Lambda^{t/T} delta` up to `t = T`.
//!
//! The crate computes the constraint constants ([`constraints`]), builds
//! regularized solutions constructively by contour quadrature of resolvent
//! solves ([`contour`], [`fem`], [`regularizer`]), verifies them against the
//! closed-form spectral solution ([`spectral`]), and reproduces the bundled
//! tent benchmark tables and figures ([`experiments`]).

pub mod constraints;
pub mod contour;
mod error;
pub mod experiments;
pub mod fem;
pub mod regularizer;
pub mod spectral;

pub use constraints::{LambdaRoot, SRegime, SecbParams};
pub use contour::{Contour, ContourQuadrature};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, FigureData, TableRow, TableRun};
pub use fem::{Coefficient, ComplexGridFunction, GridFunction, Mesh, Tridiagonal};
pub use regularizer::{ClassMembership, EvalMode, RegularizedSolver, SolverSettings};
pub use spectral::{SpectralBasis, SpectralExpansion};
