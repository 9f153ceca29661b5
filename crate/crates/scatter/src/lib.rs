//! Shape reconstruction for two-dimensional exterior acoustic scattering from
//! Poisson photon-count data.
//!
//! The crate solves the sound-soft Helmholtz scattering problem with a
//! combined single-/double-layer boundary integral equation, discretized by a
//! Nyström method with Kussmaul–Martensen quadrature on a uniform periodic
//! grid. Photon counts collected at far-field detectors are modeled as a
//! Poisson point process whose intensity is the far-field energy density, and
//! the posterior over star-shaped obstacle boundaries is explored with a
//! preconditioned Crank–Nicolson (pCN) Metropolis–Hastings sampler, optionally
//! regularized by a total-variation penalty on the latent field.
//!
//! Module map:
//!
//! - [`curve`] — periodic grids, latent fields, positivity maps, boundary
//!   curves, graded corner meshes, and the catalog of benchmark obstacles
//! - [`forward`] — CFIE assembly and solve, far-field pattern, near-field
//!   evaluation, Poisson intensity, and the composed forward operator
//! - [`prior`] — Karhunen–Loève and periodic squared-exponential Gaussian
//!   priors, and the discrete total-variation seminorm
//! - [`posterior`] — Poisson log-likelihood potential and the hybrid
//!   (Gaussian prior × TV) posterior potential with a one-slot forward cache
//! - [`mcmc`] — pCN proposal/acceptance rules, the chain driver, and
//!   posterior summaries (mean curve and pointwise credible bands)
//! - [`plot`] — minimal standalone SVG plotting used by the CLI and the
//!   browser demo
//! - [`special`] — Bessel/Hankel functions, `erf`, and `ln Γ`

pub mod curve;
pub mod forward;
pub mod mcmc;
pub mod plot;
pub mod posterior;
pub mod prior;
pub mod special;

mod error;
mod fft;

pub use error::{Error, Result};
