//! The acceptance gate: ten numbered end-to-end criteria, one test each.
//!
//! Every test prints `ACCEPTANCE <n> <PASS|FAIL> — <detail>` (visible with
//! `cargo test --test acceptance -- --nocapture`) and then asserts, so a
//! failed criterion is both printed and red.
//!
//! Criteria 8 and 9b measure honest limits of the implemented formulation
//! and are expected to fail; see their comments for the arithmetic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatter::curve::{Obstacle, PeriodicGrid, PositivityMap};
use scatter::forward::{FarFieldMap, IntensityVector};
use scatter::mcmc::{run_chain_with, ChainConfig, ZeroPotential};
use scatter::posterior::{poisson_potential, sample_poisson, PoissonObservation};
use scatter::prior::{sample_kl, sample_se, KLPriorSpec, PriorSpec, SEPriorSpec, TVSpec};
use scatter_cli::config::ExperimentConfig;
use scatter_cli::experiment::{run_experiment, SummaryFile};
use scatter_cli::validate;
use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn report(n: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {n} {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Prints the line, then enforces it.
fn gate(n: &str, pass: bool, detail: &str) {
    report(n, pass, detail);
    assert!(pass, "criterion {n}: {detail}");
}

// ---------------------------------------------------------------------------
// 1–4: forward solver
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_circle_far_field_matches_the_analytic_series() {
    let start = Instant::now();
    let defect = validate::mie_defect(128).unwrap();
    let elapsed = start.elapsed();
    let pass = defect < 1e-8 && elapsed < Duration::from_secs(1);
    gate(
        "1",
        pass,
        &format!(
            "circle far field max abs error {defect:.3e} (< 1e-8) in {:.0} ms (< 1 s)",
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_02_reciprocity_holds_across_the_catalog() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for (obstacle, tol) in [
        (Obstacle::Peanut, 1e-8),
        (Obstacle::Kite, 1e-8),
        (Obstacle::Cloverleaf, 1e-8),
        (Obstacle::Drop, 1e-4),
    ] {
        let defect = validate::reciprocity_defect(obstacle, 256).unwrap();
        pass &= defect < tol;
        detail.push_str(&format!("{} {defect:.2e} (< {tol:.0e}); ", obstacle.name()));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    detail.push_str(&format!("total {:.2} s (< 10 s)", elapsed.as_secs_f64()));
    gate("2", pass, &detail);
}

#[test]
fn criterion_03_optical_theorem_balances_energy() {
    let mut detail = String::new();
    let mut pass = true;
    for obstacle in [Obstacle::Peanut, Obstacle::Kite, Obstacle::Cloverleaf] {
        let defect = validate::optical_theorem_defect(obstacle, 256).unwrap();
        pass &= defect < 1e-6;
        detail.push_str(&format!("{} rel {defect:.2e}; ", obstacle.name()));
    }
    detail.push_str("(< 1e-6 each)");
    gate("3", pass, &detail);
}

#[test]
fn criterion_04_error_falls_superalgebraically_on_the_kite() {
    let (f1, f2) = validate::kite_convergence_factors().unwrap();
    let pass = f1 > 10.0 && f2 > 10.0;
    gate(
        "4",
        pass,
        &format!("error reduction per doubling: {f1:.1}x, {f2:.1}x (> 10x each)"),
    );
}

// ---------------------------------------------------------------------------
// 5: likelihood potential vs the product form
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_potential_agrees_with_the_log_product_likelihood() {
    use statrs::distribution::{Discrete, Poisson};
    use statrs::function::gamma::ln_gamma;

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let len = 8;
    let dirs = FarFieldMap::equispaced_directions(len);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lambda: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..40.0)).collect();
        let y: Vec<u64> = lambda
            .iter()
            .map(|&l| sample_poisson(&mut rng, l).unwrap())
            .collect();
        let obs = PoissonObservation::new(y.clone(), dirs.clone(), vec![[1.0, 0.0]], 1.0).unwrap();
        let ours = poisson_potential(&IntensityVector::new(lambda.clone()).unwrap(), &obs).unwrap();

        // Independent oracle: the negative log of the pmf product, with the
        // data-only factorial mass removed.
        let oracle: f64 = lambda
            .iter()
            .zip(&y)
            .map(|(&l, &k)| -Poisson::new(l).unwrap().ln_pmf(k) - ln_gamma(k as f64 + 1.0))
            .sum();
        worst = worst.max((ours - oracle).abs());
    }
    gate(
        "5",
        worst < 1e-10,
        &format!("max |Λ − (−ln ∏ pmf − Σ ln y!)| = {worst:.3e} over 100 pairs (< 1e-10)"),
    );
}

// ---------------------------------------------------------------------------
// 6: pCN prior preservation
// ---------------------------------------------------------------------------

/// Chain statistics for a zero-potential pCN run: per-node means/variances of
/// the retained (every-iteration) samples.
fn zero_potential_stats(prior: PriorSpec, seed: u64) -> (Vec<f64>, Vec<f64>, usize) {
    let grid = PeriodicGrid::new(64).unwrap();
    let cfg = ChainConfig {
        beta: 0.3,
        n_iters: 20_000,
        burn_in: 0,
        thin: 1,
        seed,
        grid,
        prior,
        positivity: PositivityMap::Exp,
        tv: TVSpec::off(),
    };
    let result = run_chain_with(&cfg, &mut ZeroPotential, |_| {}).unwrap();
    let n = result.samples.len();
    let nodes = result.samples[0].values.len();
    let mut mean = vec![0.0; nodes];
    for s in &result.samples {
        for (m, v) in mean.iter_mut().zip(&s.values) {
            *m += v / n as f64;
        }
    }
    let mut var = vec![0.0; nodes];
    for s in &result.samples {
        for ((v, m), x) in var.iter_mut().zip(&mean).zip(&s.values) {
            *v += (x - m) * (x - m) / (n - 1) as f64;
        }
    }
    (mean, var, n)
}

#[test]
fn criterion_06_pcn_preserves_both_priors_under_a_flat_potential() {
    let start = Instant::now();
    let grid = PeriodicGrid::new(64).unwrap();
    let kl = KLPriorSpec::new(2.0, 30, 0.5).unwrap();
    // Closed-form stationary pointwise variance of each prior.
    let kl_var: f64 =
        0.25 + (1..=30).map(|m| (m as f64).powi(-8)).sum::<f64>() / std::f64::consts::PI;
    let cases = [
        ("kl", PriorSpec::Kl(kl), kl_var, 606),
        (
            "se",
            PriorSpec::Se(SEPriorSpec::new(0.5, grid.clone()).unwrap()),
            1.0,
            607,
        ),
    ];

    // Retained samples form an AR(1) sequence with lag-1 correlation
    // √(1−β²) (every proposal is accepted when Ψ ≡ 0), so the mean's MC
    // variance is inflated by (1+ρ)/(1−ρ).
    let beta: f64 = 0.3;
    let rho = (1.0 - beta * beta).sqrt();
    let inflation = (1.0 + rho) / (1.0 - rho);

    let mut pass = true;
    let mut detail = String::new();
    for (name, prior, target_var, seed) in cases {
        let (mean, var, n) = zero_potential_stats(prior, seed);
        let se = (target_var * inflation / n as f64).sqrt();
        let worst_mean = mean.iter().fold(0.0_f64, |a, &m| a.max(m.abs()));
        let avg_var = var.iter().sum::<f64>() / var.len() as f64;
        let var_dev = (avg_var / target_var - 1.0).abs();
        let ok = worst_mean < 3.0 * se && var_dev < 0.05;
        pass &= ok;
        detail.push_str(&format!(
            "{name}: worst |mean| {worst_mean:.4} (< 3·SE = {:.4}), variance off by {:.1}% (< 5%); ",
            3.0 * se,
            100.0 * var_dev
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    detail.push_str(&format!("{:.1} s (< 30 s)", elapsed.as_secs_f64()));
    gate("6", pass, &detail);
}

// ---------------------------------------------------------------------------
// 7: prior sampler statistics
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_prior_samplers_match_their_moments() {
    let grid = PeriodicGrid::new(64).unwrap();
    let n_samples = 100_000;

    // SE: empirical second-moment matrix vs the stationary kernel, entrywise.
    let se = SEPriorSpec::new(0.5, grid.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let nodes = grid.n_points();
    let mut second = vec![0.0; nodes * nodes];
    for _ in 0..n_samples {
        let r = sample_se(&se, &mut rng).unwrap();
        for i in 0..nodes {
            let ri = r.values[i];
            for j in i..nodes {
                second[i * nodes + j] += ri * r.values[j] / n_samples as f64;
            }
        }
    }
    let l = 0.5;
    let mut worst_cov: f64 = 0.0;
    for i in 0..nodes {
        for j in i..nodes {
            let d = grid.node(i) - grid.node(j);
            let target = (-2.0 * (d / 2.0).sin().powi(2) / (l * l)).exp();
            worst_cov = worst_cov.max((second[i * nodes + j] - target).abs());
        }
    }

    // KL: pointwise variance vs the closed-form mode sum.
    let kl = KLPriorSpec::new(2.0, 30, 0.5).unwrap();
    let target_var: f64 =
        0.25 + (1..=30).map(|m| (m as f64).powi(-8)).sum::<f64>() / std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(708);
    let mut var = vec![0.0; nodes];
    for _ in 0..n_samples {
        let r = sample_kl(&kl, &grid, &mut rng).unwrap();
        for (v, x) in var.iter_mut().zip(&r.values) {
            *v += x * x / n_samples as f64;
        }
    }
    // Var(x²) = 2σ⁴ for a centered Gaussian, so SE(σ̂²) = σ²√(2/n).
    let se_var = target_var * (2.0 / n_samples as f64).sqrt();
    let worst_var = var
        .iter()
        .fold(0.0_f64, |a, &v| a.max((v - target_var).abs()));

    let pass = worst_cov < 0.02 && worst_var < 3.0 * se_var;
    gate(
        "7",
        pass,
        &format!(
            "SE covariance worst entry error {worst_cov:.4} (< 0.02); KL variance worst deviation {worst_var:.2e} (< 3·SE = {:.2e})",
            3.0 * se_var
        ),
    );
}

// ---------------------------------------------------------------------------
// 8: total-variation functional (expected failure)
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_tv_of_a_single_harmonic_hits_the_continuum_value() {
    use scatter::curve::LatentField;
    use scatter::prior::tv_seminorm;

    let n = 128;
    let grid = PeriodicGrid::new(n).unwrap();
    let values: Vec<f64> = grid.nodes().iter().map(|&t| t.cos()).collect();
    let r = LatentField::new(grid, values).unwrap();
    let tv = tv_seminorm(&r, &TVSpec::new(1.0).unwrap());
    let defect = (tv - 4.0).abs();

    // The implemented functional is the trapezoid sum of |r'| at the nodes;
    // for cos t that sum is (4π/N)·cot(π/N) exactly, which sits 4π²/(3N²)
    // ≈ 8.0e-4 below 4 at N = 128. A 1e-10 agreement with the continuum
    // value is therefore out of reach for this (intended) discretization;
    // the check is kept at its stated tolerance and fails honestly.
    let discrete_exact =
        (4.0 * std::f64::consts::PI / n as f64) / (std::f64::consts::PI / n as f64).tan();
    let self_consistent = (tv - discrete_exact).abs() < 1e-12;
    let pass = defect < 1e-10;
    gate(
        "8",
        pass,
        &format!(
            "R(cos t) = {tv:.12} at N = 128: |R − 4| = {defect:.3e} (< 1e-10); matches its own discrete closed form to {:.1e}",
            (tv - discrete_exact).abs()
        ),
    );
    assert!(self_consistent);
}

// ---------------------------------------------------------------------------
// 9: end-to-end reconstruction
// ---------------------------------------------------------------------------

struct PeanutRun {
    zeta: f64,
    summary: SummaryFile,
}

static PEANUT: OnceLock<(Vec<PeanutRun>, Duration)> = OnceLock::new();

/// Two full default-chain reconstructions of the peanut (ζ = 0 and ζ = 1),
/// shared between the 9a/9b tests.
fn peanut_runs() -> &'static (Vec<PeanutRun>, Duration) {
    PEANUT.get_or_init(|| {
        let start = Instant::now();
        let mut runs = Vec::new();
        for zeta in [0.0, 1.0] {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = ExperimentConfig::default_for(Obstacle::Peanut, dir.path());
            cfg.tv.zeta = zeta;
            let out = run_experiment(&cfg, false).unwrap();
            runs.push(PeanutRun {
                zeta,
                summary: out.summary,
            });
        }
        (runs, start.elapsed())
    })
}

#[test]
fn criterion_09a_posterior_mean_tracks_the_peanut() {
    let (runs, elapsed) = peanut_runs();
    let mut pass = true;
    let mut detail = String::new();
    for run in runs {
        let err = run.summary.rel_l2_error.unwrap();
        pass &= err < 0.15;
        detail.push_str(&format!(
            "zeta = {}: rel L2 error {err:.4} (< 0.15), acceptance {:.2}; ",
            run.zeta, run.summary.acceptance_rate
        ));
    }
    pass &= *elapsed < Duration::from_secs(900);
    detail.push_str(&format!(
        "both chains in {:.0} s (< 900 s)",
        elapsed.as_secs_f64()
    ));
    gate("9a", pass, &detail);
}

#[test]
fn criterion_09b_credible_band_covers_the_truth() {
    let (runs, _) = peanut_runs();
    let mut pass = true;
    let mut detail = String::new();
    for run in runs {
        let cov = run.summary.truth_coverage.unwrap();
        pass &= cov >= 0.90;
        detail.push_str(&format!(
            "zeta = {}: truth inside the 95% band at {:.1}% of angles (needs >= 90%); ",
            run.zeta,
            100.0 * cov
        ));
    }
    // The bounded radial map confines every sampled radius to (1, 3), while
    // the peanut's radius spends ~22% of the circle below 1 and touches 3 at
    // its tips, so near-full coverage is structurally unreachable with these
    // map parameters; the check is kept at its stated threshold and fails
    // honestly.
    detail.push_str("map bounds (1, 3) cannot cover radii below 1");
    gate("9b", pass, &detail);
}

#[test]
fn criterion_09c_the_pipeline_completes_on_the_rest_of_the_catalog() {
    let mut pass = true;
    let mut detail = String::new();
    for obstacle in [Obstacle::Kite, Obstacle::Drop, Obstacle::Cloverleaf] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default_for(obstacle, dir.path());
        // No error threshold is asserted here, so a shorter chain keeps the
        // whole-catalog sweep inside the runtime budget.
        cfg.forward.n_boundary = 64;
        cfg.chain.n_iters = 2000;
        cfg.chain.burn_in = 500;
        cfg.chain.thin = 10;
        let out = run_experiment(&cfg, false).unwrap();
        let figures_present = ["data.svg", "reconstruction.svg", "trace.svg"]
            .iter()
            .all(|n| dir.path().join(n).is_file());
        pass &= figures_present && out.summary.n_retained == 150;
        detail.push_str(&format!(
            "{}: {} retained, figures {}; ",
            obstacle.name(),
            out.summary.n_retained,
            if figures_present {
                "written"
            } else {
                "MISSING"
            }
        ));
    }
    gate("9c", pass, &detail);
}

// ---------------------------------------------------------------------------
// 10: byte-level determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_identical_configs_reproduce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default_for(Obstacle::Peanut, dir.path());
    cfg.forward.n_boundary = 32;
    cfg.forward.n_obs = 8;
    cfg.forward.tau = 200.0;
    cfg.forward.shift = 1.0;
    cfg.chain.n_iters = 600;
    cfg.chain.burn_in = 100;
    cfg.chain.thin = 5;
    cfg.chain.beta = 0.2;

    let files = ["data.json", "samples.csv", "summary.json"];
    run_experiment(&cfg, false).unwrap();
    let first: Vec<Vec<u8>> = files
        .iter()
        .map(|n| std::fs::read(dir.path().join(n)).unwrap())
        .collect();
    run_experiment(&cfg, false).unwrap();
    let mut pass = true;
    for (name, bytes) in files.iter().zip(&first) {
        pass &= &std::fs::read(dir.path().join(name)).unwrap() == bytes;
    }
    gate(
        "10",
        pass,
        &format!(
            "data file, sample CSV, and summary byte-identical across two runs ({} bytes total)",
            first.iter().map(Vec::len).sum::<usize>()
        ),
    );
}

// ---------------------------------------------------------------------------
// harness sanity
// ---------------------------------------------------------------------------

#[test]
fn criterion_grid_nodes_are_what_the_stats_assume() {
    // The closed-form variance targets above assume t_i = 2πi/N.
    let grid = PeriodicGrid::new(8).unwrap();
    for (i, &t) in grid.nodes().iter().enumerate() {
        assert!((t - TAU * i as f64 / 8.0).abs() < 1e-15);
    }
}
