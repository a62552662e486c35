//! Galerkin optimal auxiliary function method (OAFM) for time-dependent
//! nonlinear parabolic PDEs.
//!
//! The solution is approximated by the first-order ansatz
//! `M̃(x, t) = M0(x) + t·Σ C_j φ_j(x)`. At each time level the
//! convergence-control coefficients `C_j` are fixed by requiring the PDE
//! residual to be orthogonal to every coordinate function `φ_i` over the
//! spatial domain.
//!
//! ```
//! use galerkin_oafm::{problems, evaluation, SolveConfig};
//!
//! let fisher = problems::fisher();
//! let xs = problems::default_x_grid("fisher");
//! let mae = evaluation::max_absolute_error(&fisher, 0.001, &xs, &SolveConfig::default())?;
//! assert!(mae < 3e-6);
//! # Ok::<(), galerkin_oafm::OafmError>(())
//! ```

pub mod assembly;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod pde_core;
pub mod problems;
pub mod quadrature;
pub mod solver;

pub use error::{OafmError, Result};
pub use pde_core::{
    AnsatzEval, CoefficientVector, ExactSolution, JacobianKind, Matrix, ProblemSpec,
    QuadratureRule, SmoothFn, SolveConfig, SolveReport, SpaceDomain,
};
