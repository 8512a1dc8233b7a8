//! Numerical toolkit for small-amplitude periodic wave trains bifurcating from
//! fold-Hopf equilibria of a reaction-diffusion/ODE pair
//!
//! ```text
//! u_t = d u_xx + f(u, w, alpha)
//! w_t = g(u, w, alpha)
//! ```
//!
//! In the co-moving frame a wave profile solves a three-dimensional ODE system.
//! At a fold-Hopf equilibrium (eigenvalues {0, ±i mu0}) the crate:
//!
//! - locates and classifies the equilibria ([`equilibria`]),
//! - constructs the bifurcating wave family by first-order averaging plus
//!   Newton shooting ([`averaging`], [`orbits`]),
//! - certifies spectral instability by Evans-function root tracking
//!   ([`spectrum`]) and explicit relative-bound constants ([`bounds`]),
//! - cross-validates the predicted growth rate by direct time integration of
//!   the co-moving PDE ([`pdesim`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature (default)
//! is only needed by the test suite.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod averaging;
pub mod bounds;
pub mod equilibria;
pub mod hill;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod orbits;
pub mod pdesim;
pub mod rat;
pub mod rng;
pub mod spectrum;

use core::fmt;

/// Errors surfaced by the numerical kernels.
///
/// Every failure carries enough context to name the offending stage on a
/// diagnostic stream without a backtrace.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Diffusion constant must be positive to rescale to the canonical form.
    NonpositiveDiffusion(f64),
    /// The 3D traveling-wave system divides by the wave speed.
    ZeroWaveSpeed,
    /// Eigenvector transform is numerically singular (|det Q| below cutoff).
    SingularTransform { det: f64 },
    /// A named precondition was violated.
    Precondition(&'static str),
    /// Newton iteration failed to converge.
    NewtonStagnation { iterations: usize, residual: f64 },
    /// Shooting produced a period below the collapse threshold.
    PeriodCollapse { period: f64 },
    /// ODE integration produced a non-finite state.
    IntegrationBlowup { at: f64 },
    /// Quadrature self-check detected a non-smooth integrand.
    QuadratureNonSmooth { delta: f64 },
    /// Richardson extrapolation step sizes disagree beyond tolerance.
    ExtrapolationDisagreement { delta: f64 },
    /// Averaged Jacobian determinant below the nondegeneracy cutoff.
    DegenerateJacobian { det: f64 },
    /// Constant term of the expansion is too large for averaging to apply.
    SolvabilityResidual { value: f64 },
    /// Contour passes too close to a zero of the Evans function.
    ContourThroughZero { modulus: f64 },
    /// Accumulated winding is not an integer within tolerance.
    NonIntegerWinding { value: f64 },
    /// Contour winding differs from the expected count.
    UnexpectedWinding { found: i32, expected: i32 },
    /// Time step violates the CFL-type constraint.
    CflViolation { dt: f64, dt_max: f64 },
    /// Integer parameter out of admissible range.
    BadParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonpositiveDiffusion(d) => write!(f, "diffusion constant must be positive, got {d}"),
            Error::ZeroWaveSpeed => write!(f, "wave speed must be nonzero"),
            Error::SingularTransform { det } => write!(f, "eigenvector transform is singular (det = {det:e})"),
            Error::Precondition(name) => write!(f, "precondition failed: {name}"),
            Error::NewtonStagnation { iterations, residual } => {
                write!(f, "Newton stagnated after {iterations} iterations (residual {residual:e})")
            }
            Error::PeriodCollapse { period } => write!(f, "period collapsed to {period:e}"),
            Error::IntegrationBlowup { at } => write!(f, "integration blew up at t = {at}"),
            Error::QuadratureNonSmooth { delta } => {
                write!(f, "quadrature self-check failed (node doubling changed result by {delta:e})")
            }
            Error::ExtrapolationDisagreement { delta } => {
                write!(f, "extrapolation step sizes disagree by {delta:e}; model may lack smoothness")
            }
            Error::DegenerateJacobian { det } => write!(f, "averaged Jacobian is degenerate (det = {det:e})"),
            Error::SolvabilityResidual { value } => {
                write!(f, "constant expansion term {value:e} exceeds the solvability tolerance")
            }
            Error::ContourThroughZero { modulus } => {
                write!(f, "contour node too close to a zero (|E| = {modulus:e})")
            }
            Error::NonIntegerWinding { value } => write!(f, "accumulated winding {value} is not an integer"),
            Error::UnexpectedWinding { found, expected } => {
                write!(f, "winding number {found}, expected {expected}")
            }
            Error::CflViolation { dt, dt_max } => write!(f, "dt = {dt:e} violates the CFL bound {dt_max:e}"),
            Error::BadParameter(name) => write!(f, "bad parameter: {name}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
