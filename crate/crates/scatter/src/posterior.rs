//! Poisson likelihood potential and the hybrid posterior target.
//!
//! Photon counts `y_j` are independent Poisson draws with intensities
//! `λ_j = τ|u∞(x̂_j; d_l)|² + e_j`. Up to the `y_j!` terms (constant in the
//! unknown shape) the negative log-likelihood is
//!
//! `Λ(λ, y) = Σ_j λ_j − y_j ln λ_j`,
//!
//! with the conventions `0·ln 0 = 0` and `Λ = +∞` when some `λ_j = 0` while
//! `y_j > 0` (the sampler then rejects instead of crashing). The chain
//! targets the hybrid potential `Ψ = Λ + R`, where `R` is the
//! total-variation penalty; `ζ = 0` recovers the pure Gaussian-prior
//! posterior.
//!
//! [`PosteriorPotential`] is the stateful evaluator handed to the sampler:
//! it owns the forward map and caches the last evaluation so re-scoring the
//! chain's current state never repeats the boundary-integral solve.

use crate::curve::{LatentField, PositivityMap};
use crate::forward::{check_unit_dirs, forward_operator, FarFieldMap, IntensityVector};
use crate::prior::{tv_seminorm, TVSpec};
use crate::{Error, Result};
use rand::Rng;

// ---------------------------------------------------------------------------
// observations
// ---------------------------------------------------------------------------

/// A vector of photon counts together with the geometry that produced it,
/// flattened detectors-fastest to match [`IntensityVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonObservation {
    pub y: Vec<u64>,
    pub obs_dirs: Vec<[f64; 2]>,
    pub incident_dirs: Vec<[f64; 2]>,
    /// Exposure time τ used when the counts were generated.
    pub tau: f64,
}

impl PoissonObservation {
    pub fn new(
        y: Vec<u64>,
        obs_dirs: Vec<[f64; 2]>,
        incident_dirs: Vec<[f64; 2]>,
        tau: f64,
    ) -> Result<Self> {
        check_unit_dirs(&obs_dirs, "observation")?;
        check_unit_dirs(&incident_dirs, "incident")?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Config(format!(
                "exposure time tau must be positive, got {tau}"
            )));
        }
        let expected = obs_dirs.len() * incident_dirs.len();
        if y.len() != expected {
            return Err(Error::Config(format!(
                "{} counts for {} detectors x {} incident directions (need {expected})",
                y.len(),
                obs_dirs.len(),
                incident_dirs.len()
            )));
        }
        Ok(Self {
            y,
            obs_dirs,
            incident_dirs,
            tau,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Checks that a forward map reproduces this observation's geometry, so
    /// predicted intensities line up entry-for-entry with the counts.
    pub fn consistent_with(&self, map: &FarFieldMap) -> Result<()> {
        let dirs_match = |a: &[[f64; 2]], b: &[[f64; 2]]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(p, q)| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12)
        };
        if !dirs_match(&self.obs_dirs, map.obs_dirs()) {
            return Err(Error::Config(
                "observation and forward map disagree about the detector directions".into(),
            ));
        }
        if !dirs_match(&self.incident_dirs, map.incident_dirs()) {
            return Err(Error::Config(
                "observation and forward map disagree about the incident directions".into(),
            ));
        }
        if (self.tau - map.tau()).abs() > 1e-12 * self.tau.max(1.0) {
            return Err(Error::Config(format!(
                "observation was generated with tau = {} but the forward map has tau = {}",
                self.tau,
                map.tau()
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// potentials
// ---------------------------------------------------------------------------

/// One evaluation of the hybrid potential `Ψ = Λ + R`, with the intensities
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialValue {
    /// Intensities the likelihood was scored against.
    pub lambda: IntensityVector,
    /// Negative log-likelihood `Λ` (may be `+∞`).
    pub log_likelihood_potential: f64,
    /// Total-variation penalty `R`.
    pub tv_penalty: f64,
    /// `Ψ = Λ + R`.
    pub total: f64,
}

/// Negative Poisson log-likelihood `Λ = Σ_j λ_j − y_j ln λ_j`, dropping the
/// `ln y_j!` terms. `0·ln 0 = 0`; a zero intensity facing a positive count
/// yields `+∞` (a value, not an error).
pub fn poisson_potential(lambda: &IntensityVector, y: &PoissonObservation) -> Result<f64> {
    if lambda.len() != y.len() {
        return Err(Error::Config(format!(
            "{} intensities scored against {} counts",
            lambda.len(),
            y.len()
        )));
    }
    let mut total = 0.0;
    for (&l, &count) in lambda.values.iter().zip(&y.y) {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::Domain(format!(
                "intensity {l} is negative or non-finite; the forward model must produce \
                 valid Poisson rates"
            )));
        }
        if l == 0.0 {
            if count > 0 {
                return Ok(f64::INFINITY);
            }
            continue; // λ = 0, y = 0 contributes 0 − 0·ln 0 = 0.
        }
        total += l - count as f64 * l.ln();
    }
    Ok(total)
}

/// Scores a latent field: runs the forward model, evaluates `Λ` against the
/// counts, adds the TV penalty `R`, and returns `Ψ = Λ + R`.
pub fn hybrid_potential(
    r: &LatentField,
    y: &PoissonObservation,
    map: &FarFieldMap,
    positivity: &PositivityMap,
    tv: &TVSpec,
) -> Result<PotentialValue> {
    let lambda = forward_operator(r, map, positivity)?;
    let log_likelihood_potential = poisson_potential(&lambda, y)?;
    let tv_penalty = tv_seminorm(r, tv);
    Ok(PotentialValue {
        lambda,
        log_likelihood_potential,
        tv_penalty,
        total: log_likelihood_potential + tv_penalty,
    })
}

/// The posterior target handed to the sampler. Owns the observation and the
/// forward map, and keeps a one-slot cache of the last evaluation so the
/// chain's current state is never re-solved.
#[derive(Debug, Clone)]
pub struct PosteriorPotential {
    map: FarFieldMap,
    positivity: PositivityMap,
    tv: TVSpec,
    y: PoissonObservation,
    cache: Option<(Vec<f64>, PotentialValue)>,
    forward_evals: usize,
}

impl PosteriorPotential {
    pub fn new(
        y: PoissonObservation,
        map: FarFieldMap,
        positivity: PositivityMap,
        tv: TVSpec,
    ) -> Result<Self> {
        y.consistent_with(&map)?;
        Ok(Self {
            map,
            positivity,
            tv,
            y,
            cache: None,
            forward_evals: 0,
        })
    }

    /// Number of boundary-integral solves performed so far (cache misses).
    pub fn forward_evals(&self) -> usize {
        self.forward_evals
    }

    pub fn observation(&self) -> &PoissonObservation {
        &self.y
    }

    pub fn map(&self) -> &FarFieldMap {
        &self.map
    }

    /// Evaluates `Ψ(r)`, reusing the cached value when `r` matches the last
    /// scored state exactly.
    pub fn evaluate(&mut self, r: &LatentField) -> Result<PotentialValue> {
        if let Some((cached_r, cached_value)) = &self.cache {
            if cached_r == &r.values {
                return Ok(cached_value.clone());
            }
        }
        let value = hybrid_potential(r, &self.y, &self.map, &self.positivity, &self.tv)?;
        self.forward_evals += 1;
        self.cache = Some((r.values.clone(), value.clone()));
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Poisson sampling
// ---------------------------------------------------------------------------

/// Rate above which the sampler switches from sequential inversion to the
/// transformed-rejection method.
const POISSON_REJECTION_THRESHOLD: f64 = 30.0;

/// Draws one Poisson variate with rate `lambda`.
///
/// Small rates use inversion by sequential search (one uniform per draw);
/// large rates use Hörmann's transformed rejection with squeeze (PTRS, two
/// uniforms per attempt). Both consume the generator in a fixed documented
/// order, so seeded streams reproduce counts exactly.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Domain(format!(
            "Poisson rate must be finite and non-negative, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda < POISSON_REJECTION_THRESHOLD {
        return poisson_inversion(rng, lambda);
    }
    Ok(poisson_ptrs(rng, lambda))
}

fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u64> {
    let u: f64 = rng.random();
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut k = 0u64;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if k >= 10_000 {
            return Err(Error::Numerical(format!(
                "Poisson inversion did not terminate for rate {lambda}"
            )));
        }
    }
    Ok(k)
}

/// Transformed rejection with squeeze (Hörmann's PTRS), valid for rates
/// ≥ 10 and used here from 30 up.
fn poisson_ptrs<R: Rng + ?Sized>(rng: &mut R, mu: f64) -> u64 {
    let b = 0.931 + 2.53 * mu.sqrt();
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_mu = mu.ln();
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let kf = ((2.0 * a / us + b) * u + mu + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return kf as u64;
        }
        if kf < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let k = kf;
        let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
        let rhs = -mu + k * ln_mu - crate::special::ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
