//! Preconditioned Crank–Nicolson Metropolis–Hastings over the latent field.
//!
//! The chain moves through proposals `r̂ = √(1−β²)·r + β·ξ` with `ξ` a fresh
//! prior draw, accepted with probability `min{1, exp(Ψ(r) − Ψ(r̂))}`. Because
//! the proposal is reversible with respect to the Gaussian prior, the
//! likelihood-plus-TV potential `Ψ` is all that enters the ratio, and with
//! `Ψ ≡ 0` the chain leaves the prior exactly invariant — the property the
//! tests lean on.
//!
//! The RNG stream order is fixed and documented: per iteration, first the
//! proposal noise `ξ`, then the acceptance uniform `υ` (drawn every
//! iteration, accepted or not), so seeded chains reproduce bit-for-bit.
//! Forward-solver failures at a proposal count as rejections; a chain whose
//! proposals mostly fail aborts with a diagnostic.

use crate::curve::{LatentField, PeriodicGrid, PositivityMap, RadialCurve};
use crate::forward::{FarFieldMap, IntensityVector};
use crate::posterior::{PoissonObservation, PosteriorPotential, PotentialValue};
use crate::prior::{PriorSpec, TVSpec};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// potentials as seen by the chain
// ---------------------------------------------------------------------------

/// Anything the chain can score a state against. Implementations may cache
/// internally (the evaluator is handed to one chain and mutated by it alone).
pub trait Potential {
    fn evaluate(&mut self, r: &LatentField) -> Result<PotentialValue>;
}

impl Potential for PosteriorPotential {
    fn evaluate(&mut self, r: &LatentField) -> Result<PotentialValue> {
        PosteriorPotential::evaluate(self, r)
    }
}

/// `Ψ ≡ 0`: every proposal is accepted, so the chain samples its prior.
/// Used by the prior-preservation tests and as a cheap smoke target.
#[derive(Debug, Clone, Default)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn evaluate(&mut self, _r: &LatentField) -> Result<PotentialValue> {
        Ok(PotentialValue {
            lambda: IntensityVector::new(Vec::new()).expect("empty intensities are valid"),
            log_likelihood_potential: 0.0,
            tv_penalty: 0.0,
            total: 0.0,
        })
    }
}

// ---------------------------------------------------------------------------
// pCN kernel pieces
// ---------------------------------------------------------------------------

/// The pCN proposal `r̂ = √(1−β²)·r + β·ξ`, elementwise.
pub fn pcn_propose(r: &LatentField, beta: f64, xi: &LatentField) -> LatentField {
    assert_eq!(
        r.grid, xi.grid,
        "proposal noise must live on the chain's grid"
    );
    let damp = (1.0 - beta * beta).sqrt();
    let values = r
        .values
        .iter()
        .zip(&xi.values)
        .map(|(&cur, &noise)| damp * cur + beta * noise)
        .collect();
    LatentField::new(r.grid.clone(), values)
        .expect("a finite combination of finite fields is finite")
}

/// Metropolis acceptance probability `α = min{1, exp(Ψ_cur − Ψ_prop)}`.
///
/// An infinite proposed potential is never accepted (α = 0, and this takes
/// precedence when both are infinite); an infinite current potential with a
/// finite proposal is always accepted (α = 1). NaN potentials are screened
/// by the chain driver before this is called.
pub fn accept_probability(psi_current: f64, psi_proposed: f64) -> f64 {
    if psi_proposed == f64::INFINITY {
        return 0.0;
    }
    if psi_current == f64::INFINITY {
        return 1.0;
    }
    (psi_current - psi_proposed).exp().min(1.0)
}

// ---------------------------------------------------------------------------
// chain configuration and results
// ---------------------------------------------------------------------------

/// Everything that determines a chain run. Two runs with equal configs
/// produce identical results.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    /// pCN step size `β ∈ (0, 1]`.
    pub beta: f64,
    pub n_iters: usize,
    /// Iterations discarded before retention starts (`< n_iters`).
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in state (`≥ 1`).
    pub thin: usize,
    pub seed: u64,
    pub grid: PeriodicGrid,
    pub prior: PriorSpec,
    pub positivity: PositivityMap,
    pub tv: TVSpec,
}

/// Retained samples needed for a meaningful posterior summary.
pub const MIN_RETAINED: usize = 100;

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Config(format!(
                "pCN step size beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if self.burn_in >= self.n_iters {
            return Err(Error::Config(format!(
                "burn-in {} must be smaller than the iteration count {}",
                self.burn_in, self.n_iters
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thinning stride must be at least 1".into()));
        }
        let retained = self.retained_count();
        if retained < MIN_RETAINED {
            return Err(Error::Config(format!(
                "chain would retain only {retained} samples; the posterior summary needs \
                 at least {MIN_RETAINED} (lengthen the chain or reduce thinning)"
            )));
        }
        if let PriorSpec::Se(se) = &self.prior {
            if se.grid != self.grid {
                return Err(Error::Config(
                    "squared-exponential prior was specified on a different grid than the chain"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    /// Exactly `floor((n_iters − burn_in)/thin)` samples are retained.
    pub fn retained_count(&self) -> usize {
        (self.n_iters - self.burn_in) / self.thin
    }
}

/// What one iteration looked like; streamed to the sink for progress
/// reporting; formats are the caller's business.
#[derive(Debug, Clone)]
pub struct ProgressRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Potential of the current state after this iteration's accept/reject.
    pub psi: f64,
    /// Running acceptance rate (accepted / iterations so far).
    pub acceptance_rate: f64,
    /// Diagnostic when the forward solve failed at this iteration's proposal.
    pub failure: Option<String>,
}

/// A completed chain with its posterior summary.
#[derive(Debug, Clone)]
pub struct ChainResult {
    /// Retained latent states, oldest first.
    pub samples: Vec<LatentField>,
    /// accepted / n_iters.
    pub acceptance_rate: f64,
    pub accepted: usize,
    /// Proposals whose forward solve failed (counted as rejections).
    pub forward_failures: usize,
    /// `Ψ` of the current state at every iteration.
    pub potential_trace: Vec<f64>,
    /// Pointwise posterior mean radius.
    pub mean_curve: RadialCurve,
    /// Pointwise 2.5% radius quantile.
    pub band_lo: Vec<f64>,
    /// Pointwise 97.5% radius quantile.
    pub band_hi: Vec<f64>,
}

// ---------------------------------------------------------------------------
// the chain driver
// ---------------------------------------------------------------------------

/// Iterations after which the failure-rate abort check engages.
const FAILURE_CHECK_MIN_ITERS: usize = 100;
/// Attempts at drawing a usable initial state.
const INIT_RETRIES: usize = 10;

/// Runs a pCN chain against an arbitrary potential, streaming one progress
/// record per iteration into `sink`.
pub fn run_chain_with<P: Potential>(
    cfg: &ChainConfig,
    potential: &mut P,
    mut sink: impl FnMut(&ProgressRecord),
) -> Result<ChainResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Initial state: a fresh prior draw; on forward failure, redraw.
    let mut current = None;
    let mut psi_current = f64::INFINITY;
    for attempt in 0..INIT_RETRIES {
        let r0 = cfg.prior.sample(&cfg.grid, &mut rng)?;
        match potential.evaluate(&r0) {
            Ok(value) => {
                check_not_nan(value.total)?;
                psi_current = value.total;
                current = Some(r0);
                break;
            }
            Err(Error::Config(msg)) => return Err(Error::Config(msg)),
            Err(err) => {
                if attempt + 1 == INIT_RETRIES {
                    return Err(Error::Numerical(format!(
                        "could not score any of {INIT_RETRIES} initial prior draws; last error: {err}"
                    )));
                }
            }
        }
    }
    let mut current = current.expect("loop either set a state or returned");

    let mut accepted = 0usize;
    let mut forward_failures = 0usize;
    let mut samples = Vec::with_capacity(cfg.retained_count());
    let mut potential_trace = Vec::with_capacity(cfg.n_iters);

    for i in 1..=cfg.n_iters {
        // Fixed stream order: proposal noise first, then the acceptance
        // uniform — drawn even when the proposal cannot be scored.
        let xi = cfg.prior.sample(&cfg.grid, &mut rng)?;
        let upsilon: f64 = rng.random();
        let proposal = pcn_propose(&current, cfg.beta, &xi);

        let mut failure = None;
        match potential.evaluate(&proposal) {
            Ok(value) => {
                check_not_nan(value.total)?;
                let alpha = accept_probability(psi_current, value.total);
                if upsilon <= alpha {
                    current = proposal;
                    psi_current = value.total;
                    accepted += 1;
                }
            }
            // Config errors mean the chain is wired wrong, not that the
            // proposal was bad; abort immediately.
            Err(Error::Config(msg)) => return Err(Error::Config(msg)),
            Err(err) => {
                forward_failures += 1;
                failure = Some(err.to_string());
            }
        }

        potential_trace.push(psi_current);
        if i > cfg.burn_in && (i - cfg.burn_in) % cfg.thin == 0 {
            samples.push(current.clone());
        }
        sink(&ProgressRecord {
            iteration: i,
            psi: psi_current,
            acceptance_rate: accepted as f64 / i as f64,
            failure,
        });
        if i >= FAILURE_CHECK_MIN_ITERS && 2 * forward_failures > i {
            return Err(Error::Numerical(format!(
                "{forward_failures} of {i} proposals failed the forward solve; \
                 the chain has wandered somewhere the model cannot evaluate"
            )));
        }
    }

    let (mean_curve, band_lo, band_hi) = summarize(&samples, &cfg.positivity)?;
    Ok(ChainResult {
        samples,
        acceptance_rate: accepted as f64 / cfg.n_iters as f64,
        accepted,
        forward_failures,
        potential_trace,
        mean_curve,
        band_lo,
        band_hi,
    })
}

fn check_not_nan(psi: f64) -> Result<()> {
    if psi.is_nan() {
        return Err(Error::Numerical(
            "potential evaluated to NaN; the forward model produced garbage".into(),
        ));
    }
    Ok(())
}

/// Runs the posterior chain for an observation: builds the cached potential
/// from the config's positivity map and TV penalty, then drives
/// [`run_chain_with`] with a silent sink.
pub fn run_chain(
    cfg: &ChainConfig,
    y: PoissonObservation,
    map: FarFieldMap,
) -> Result<ChainResult> {
    let mut potential = PosteriorPotential::new(y, map, cfg.positivity, cfg.tv)?;
    run_chain_with(cfg, &mut potential, |_| {})
}

// ---------------------------------------------------------------------------
// posterior summaries
// ---------------------------------------------------------------------------

/// Maps retained latent samples through the positivity map and reduces them
/// to the pointwise mean radius and the empirical 2.5%/97.5% quantile band.
pub fn summarize(
    samples: &[LatentField],
    positivity: &PositivityMap,
) -> Result<(RadialCurve, Vec<f64>, Vec<f64>)> {
    if samples.len() < MIN_RETAINED {
        return Err(Error::Config(format!(
            "posterior summary needs at least {MIN_RETAINED} samples, got {}",
            samples.len()
        )));
    }
    let grid = samples[0].grid.clone();
    let n = grid.n_points();
    let radii: Vec<Vec<f64>> = samples
        .iter()
        .map(|r| positivity.apply(r).map(|curve| curve.q))
        .collect::<Result<_>>()?;

    let mut mean = vec![0.0; n];
    let mut band_lo = vec![0.0; n];
    let mut band_hi = vec![0.0; n];
    let mut column = vec![0.0; radii.len()];
    for j in 0..n {
        for (i, q) in radii.iter().enumerate() {
            column[i] = q[j];
        }
        mean[j] = column.iter().sum::<f64>() / column.len() as f64;
        column.sort_unstable_by(f64::total_cmp);
        band_lo[j] = quantile_sorted(&column, 0.025);
        band_hi[j] = quantile_sorted(&column, 0.975);
        debug_assert!(band_lo[j] <= band_hi[j]);
    }
    let mean_curve = RadialCurve::from_radii(grid, mean)?;
    Ok((mean_curve, band_lo, band_hi))
}

/// Linear-interpolation empirical quantile (the common "type 7" rule:
/// `h = (n−1)p`, interpolate between the straddling order statistics).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 == sorted.len() {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
