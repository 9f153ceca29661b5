//! Gaussian priors over latent boundary fields and the total-variation
//! seminorm.
//!
//! Two priors are supported:
//!
//! - A truncated Karhunen–Loève expansion whose coefficients decay like
//!   `n^{-(s+2)}`: the classic "integrate a rough field twice" construction,
//!   drawing `r(t) = σ₀a₀ + Σ_{n=1}^{M} n^{-(s+2)} π^{-1/2} (aₙ cos nt + bₙ sin nt)`
//!   with iid standard-normal coefficients. The constant mode (std `σ₀`)
//!   keeps the overall obstacle scale adjustable.
//! - A stationary periodic squared-exponential field with covariance
//!   `C(s,t) = exp(-2 sin²((t-s)/2)/ℓ²)`, sampled exactly on the uniform grid
//!   through the circulant (FFT) embedding of its covariance matrix.
//!
//! Draw order is fixed and documented for each sampler, so a seeded RNG
//! reproduces fields bit-for-bit.

use crate::curve::{LatentField, PeriodicGrid};
use crate::fft;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Karhunen–Loève prior
// ---------------------------------------------------------------------------

/// Parameters of the truncated KL prior.
#[derive(Debug, Clone, PartialEq)]
pub struct KLPriorSpec {
    /// Smoothness exponent `s > 1/2`; coefficients decay like `n^{-(s+2)}`.
    pub s: f64,
    /// Number of Fourier mode pairs retained (`≥ 1`).
    pub n_modes: usize,
    /// Standard deviation `σ₀` of the constant mode.
    pub mean_mode_std: f64,
}

impl KLPriorSpec {
    pub fn new(s: f64, n_modes: usize, mean_mode_std: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.5) {
            return Err(Error::Config(format!(
                "smoothness exponent s must exceed 1/2 (draws must land in the \
                 Hölder space the forward map needs), got {s}"
            )));
        }
        if n_modes < 1 {
            return Err(Error::Config(
                "the KL expansion needs at least one mode".into(),
            ));
        }
        if !(mean_mode_std.is_finite() && mean_mode_std >= 0.0) {
            return Err(Error::Config(format!(
                "constant-mode standard deviation must be non-negative, got {mean_mode_std}"
            )));
        }
        Ok(Self {
            s,
            n_modes,
            mean_mode_std,
        })
    }
}

/// Evaluates the KL expansion for given coefficients: `a0` scales the
/// constant mode, `pairs[n-1] = (aₙ, bₙ)` the degree-`n` trig pair. The grid
/// must resolve every retained mode (`n_modes < N/2`).
pub fn kl_expand(
    spec: &KLPriorSpec,
    grid: &PeriodicGrid,
    a0: f64,
    pairs: &[(f64, f64)],
) -> Result<LatentField> {
    if pairs.len() != spec.n_modes {
        return Err(Error::Config(format!(
            "expected {} coefficient pairs, got {}",
            spec.n_modes,
            pairs.len()
        )));
    }
    if spec.n_modes >= grid.n_points() / 2 {
        return Err(Error::Config(format!(
            "{} KL modes cannot be resolved on a grid of {} nodes \
             (need n_modes < N/2)",
            spec.n_modes,
            grid.n_points()
        )));
    }
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    let mut values = vec![spec.mean_mode_std * a0; grid.n_points()];
    for (idx, &(an, bn)) in pairs.iter().enumerate() {
        let n = (idx + 1) as f64;
        let weight = n.powf(-(spec.s + 2.0)) * inv_sqrt_pi;
        for (i, v) in values.iter_mut().enumerate() {
            let nt = n * grid.node(i);
            *v += weight * (an * nt.cos() + bn * nt.sin());
        }
    }
    LatentField::new(grid.clone(), values)
}

/// Draws a KL prior sample. Coefficient order: `a₀`, then `(aₙ, bₙ)` for
/// `n = 1..=n_modes`, all iid standard normal.
pub fn sample_kl<R: Rng + ?Sized>(
    spec: &KLPriorSpec,
    grid: &PeriodicGrid,
    rng: &mut R,
) -> Result<LatentField> {
    let a0: f64 = rng.sample(StandardNormal);
    let pairs: Vec<(f64, f64)> = (0..spec.n_modes)
        .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    kl_expand(spec, grid, a0, &pairs)
}

// ---------------------------------------------------------------------------
// squared-exponential prior
// ---------------------------------------------------------------------------

/// Parameters of the periodic squared-exponential prior, tied to the grid it
/// is sampled on (the covariance is embedded as an `N × N` circulant).
#[derive(Debug, Clone, PartialEq)]
pub struct SEPriorSpec {
    /// Characteristic length scale `ℓ > 0`.
    pub length_scale: f64,
    pub grid: PeriodicGrid,
}

impl SEPriorSpec {
    pub fn new(length_scale: f64, grid: PeriodicGrid) -> Result<Self> {
        if !(length_scale.is_finite() && length_scale > 0.0) {
            return Err(Error::Config(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        Ok(Self { length_scale, grid })
    }

    /// First row of the covariance circulant:
    /// `c_j = exp(-2 sin²(πj/N)/ℓ²)`.
    pub fn covariance_row(&self) -> Vec<f64> {
        let n = self.grid.n_points();
        let inv_l2 = 1.0 / (self.length_scale * self.length_scale);
        (0..n)
            .map(|j| {
                let s = (PI * j as f64 / n as f64).sin();
                (-2.0 * s * s * inv_l2).exp()
            })
            .collect()
    }
}

/// Largest negative covariance eigenvalue tolerated as FFT roundoff before
/// the sampler refuses (the true circulant spectrum is non-negative).
const SE_EIGEN_TOL: f64 = -1e-8;

/// Draws an exact sample of the periodic squared-exponential field on its
/// grid via circulant embedding: the covariance eigenvalues are the DFT of
/// its first row, and a Hermitian-symmetric white-noise spectrum is colored
/// by their square roots.
///
/// Draw order: `g₀`, then `(aₘ, bₘ)` for `m = 1..N/2-1`, then `g_{N/2}`,
/// all iid standard normal.
pub fn sample_se<R: Rng + ?Sized>(spec: &SEPriorSpec, rng: &mut R) -> Result<LatentField> {
    let n = spec.grid.n_points();
    let mut eigs: Vec<Complex64> = spec
        .covariance_row()
        .iter()
        .map(|&c| Complex64::new(c, 0.0))
        .collect();
    fft::forward(&mut eigs);
    let mut lambda = Vec::with_capacity(n);
    for (m, e) in eigs.iter().enumerate() {
        // The row is real and even, so the spectrum is real; allow roundoff.
        if e.im.abs() > 1e-8 || e.re < SE_EIGEN_TOL {
            return Err(Error::Numerical(format!(
                "covariance eigenvalue {m} is {e}; the circulant embedding of the \
                 squared-exponential kernel must have a non-negative real spectrum"
            )));
        }
        lambda.push(e.re.max(0.0));
    }

    let half = n / 2;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let g0: f64 = rng.sample(StandardNormal);
    spectrum[0] = Complex64::new(lambda[0].sqrt() * g0, 0.0);
    for m in 1..half {
        let am: f64 = rng.sample(StandardNormal);
        let bm: f64 = rng.sample(StandardNormal);
        let scale = (lambda[m] / 2.0).sqrt();
        spectrum[m] = Complex64::new(scale * am, scale * bm);
        spectrum[n - m] = spectrum[m].conj();
    }
    let g_half: f64 = rng.sample(StandardNormal);
    spectrum[half] = Complex64::new(lambda[half].sqrt() * g_half, 0.0);

    fft::inverse(&mut spectrum);
    let scale = 1.0 / (n as f64).sqrt();
    let values = spectrum.iter().map(|z| z.re * scale).collect();
    LatentField::new(spec.grid.clone(), values)
}

// ---------------------------------------------------------------------------
// prior selection
// ---------------------------------------------------------------------------

/// The prior driving a chain: KL expansion or squared-exponential field.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    Kl(KLPriorSpec),
    Se(SEPriorSpec),
}

impl PriorSpec {
    /// Draws one prior sample on the given grid.
    pub fn sample<R: Rng + ?Sized>(&self, grid: &PeriodicGrid, rng: &mut R) -> Result<LatentField> {
        match self {
            PriorSpec::Kl(spec) => sample_kl(spec, grid, rng),
            PriorSpec::Se(spec) => {
                if spec.grid != *grid {
                    return Err(Error::Config(
                        "squared-exponential prior was specified on a different grid".into(),
                    ));
                }
                sample_se(spec, rng)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// total variation
// ---------------------------------------------------------------------------

/// Total-variation penalty strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TVSpec {
    pub zeta: f64,
}

impl TVSpec {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta >= 0.0) {
            return Err(Error::Config(format!(
                "TV strength zeta must be non-negative, got {zeta}"
            )));
        }
        Ok(Self { zeta })
    }

    /// `ζ = 0` switches the penalty off.
    pub fn off() -> Self {
        Self { zeta: 0.0 }
    }
}

/// Discrete total-variation seminorm `R(r) = ζ ∫|r'(t)| dt`, with the
/// derivative spectral and the integral by the trapezoid rule:
/// `ζ · (2π/N) · Σ |r'(t_i)|`.
pub fn tv_seminorm(r: &LatentField, spec: &TVSpec) -> f64 {
    if spec.zeta == 0.0 {
        return 0.0;
    }
    let d = spectral_derivative_of(r);
    spec.zeta * r.grid.spacing() * d.iter().map(|v| v.abs()).sum::<f64>()
}

fn spectral_derivative_of(r: &LatentField) -> Vec<f64> {
    crate::curve::spectral_derivative(&r.values).expect("grid size is even")
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
