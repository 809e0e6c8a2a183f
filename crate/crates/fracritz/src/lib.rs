//! Spectral Rayleigh-Ritz approximation of the Dirichlet eigenproblem
//! `-u'' = lambda rho(x) u` on `[a, b]` with a smooth, strictly positive
//! density `rho`, using a Fourier sine trial basis.
//!
//! Three Rayleigh-quotient schemes are provided, indexed by a fractional
//! exponent `tau` of the underlying operator:
//!
//! * `tau = 1/2` — regular Rayleigh-Ritz, pencil (stiffness, mass);
//! * `tau = 1`   — harmonic Ritz, pencil (bi-Laplacian form, stiffness);
//! * `tau = 0`   — dual harmonic Ritz, pencil (mass, Green-kernel form).
//!
//! All three produce upper bounds converging monotonically to the exact
//! eigenvalues. Eigenvector error is measured in a scale of fractional
//! norms built from the sine-basis spectrum, and the crate computes the
//! first- and second-order bifurcation coefficients of the nonlinear
//! rotating-string family attached to the linearized problem.
//!
//! Entry points:
//!
//! * [`expr`] — parse and validate density expressions;
//! * [`assembly::assemble`] — build the pencil matrices;
//! * [`ritz::solve`] — solve a scheme's pencil;
//! * [`bifurcation`] — bifurcation coefficients and the exact Euler
//!   reference data;
//! * [`harness`] — convergence sweeps, slope fits, file emission, and the
//!   built-in verification suite.
//!
//! The `examples/` directory has one runnable example per capability; the
//! `fracritz` binary exposes the same flows as `solve`, `bifurcate`,
//! `sweep`, and `verify` subcommands.

pub mod assembly;
pub mod basis;
pub mod bifurcation;
pub mod expr;
pub mod harness;
pub mod linalg;
pub mod quadrature;
pub mod ritz;

pub use assembly::{assemble, GramSet, GreenKernel};
pub use basis::{m_norm, sine_coeffs, synth, CoeffVector, SineBasis};
pub use bifurcation::{BifurcationResult, BifurcationSpec, EulerReference};
pub use expr::DensitySpec;
pub use quadrature::{gauss_legendre, integrate, integrate_split, PanelScheme};
pub use ritz::{RitzSolution, TauScheme};
