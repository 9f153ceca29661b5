//! Statistical validation of the two Gaussian priors and the TV seminorm,
//! against closed-form moments of the underlying processes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scatter::curve::{spectral_derivative, LatentField, PeriodicGrid};
use scatter::prior::{
    kl_expand, sample_kl, sample_se, tv_seminorm, KLPriorSpec, PriorSpec, SEPriorSpec, TVSpec,
};
use std::f64::consts::PI;

fn grid(n: usize) -> PeriodicGrid {
    PeriodicGrid::new(n).unwrap()
}

/// Analytic pointwise variance of the KL prior:
/// Var r(t) = σ₀² + π^{-1} Σ_{n=1}^{M} n^{-2(s+2)}  (independent of t).
fn kl_variance(spec: &KLPriorSpec) -> f64 {
    let sum: f64 = (1..=spec.n_modes)
        .map(|n| (n as f64).powf(-2.0 * (spec.s + 2.0)))
        .sum();
    spec.mean_mode_std.powi(2) + sum / PI
}

/// Pointwise sample variance per node over a set of draws.
fn pointwise_variance(samples: &[LatentField]) -> Vec<f64> {
    let n = samples[0].grid.n_points();
    let count = samples.len() as f64;
    let mut mean = vec![0.0; n];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(&s.values) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count;
    }
    let mut var = vec![0.0; n];
    for s in samples {
        for j in 0..n {
            var[j] += (s.values[j] - mean[j]).powi(2);
        }
    }
    for v in &mut var {
        *v /= count - 1.0;
    }
    var
}

// ---------------------------------------------------------------------------
// KL prior
// ---------------------------------------------------------------------------

#[test]
fn kl_sample_reproduces_the_single_mode_example() {
    // With draws a₀ = 0, a₁ = 1, b₁ = 0 the expansion is π^{-1/2} cos t.
    let g = grid(32);
    let spec = KLPriorSpec::new(2.0, 1, 0.5).unwrap();
    let r = kl_expand(&spec, &g, 0.0, &[(1.0, 0.0)]).unwrap();
    for (i, &v) in r.values.iter().enumerate() {
        assert!((v - g.node(i).cos() / PI.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn kl_pointwise_variance_matches_the_mode_sum() {
    let g = grid(64);
    let spec = KLPriorSpec::new(2.0, 30, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n_samples = 100_000;
    let samples: Vec<LatentField> = (0..n_samples)
        .map(|_| sample_kl(&spec, &g, &mut rng).unwrap())
        .collect();
    let var = pointwise_variance(&samples);
    let exact = kl_variance(&spec);
    // The variance estimator of a Gaussian has sd σ²√(2/(n−1)).
    let se = exact * (2.0 / (n_samples as f64 - 1.0)).sqrt();
    for (j, &v) in var.iter().enumerate() {
        assert!(
            (v - exact).abs() < 3.0 * se,
            "node {j}: variance {v} vs analytic {exact} (3 se = {})",
            3.0 * se
        );
    }
}

#[test]
fn kl_samples_have_zero_grid_mean_without_the_constant_mode() {
    // Σ_i cos(n t_i) = Σ_i sin(n t_i) = 0 exactly for 1 ≤ n < N, so every
    // sample's grid mean vanishes to rounding.
    let g = grid(64);
    let spec = KLPriorSpec::new(2.0, 30, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let r = sample_kl(&spec, &g, &mut rng).unwrap();
        let mean = r.values.iter().sum::<f64>() / 64.0;
        assert!(mean.abs() < 1e-12, "grid mean {mean}");
    }
}

#[test]
fn larger_smoothness_gives_smaller_derivatives() {
    // Var r'(t) = π^{-1} Σ n^{-2s-2}, strictly decreasing in s; check the
    // empirical ordering over s ∈ {1, 2, 3}.
    let g = grid(64);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut derivative_power = Vec::new();
    for s in [1.0, 2.0, 3.0] {
        let spec = KLPriorSpec::new(s, 30, 0.0).unwrap();
        let mut total = 0.0;
        let n_samples = 10_000;
        for _ in 0..n_samples {
            let r = sample_kl(&spec, &g, &mut rng).unwrap();
            let d = spectral_derivative(&r.values).unwrap();
            total += d.iter().map(|v| v * v).sum::<f64>() / 64.0;
        }
        derivative_power.push(total / n_samples as f64);
    }
    assert!(
        derivative_power[0] > derivative_power[1] && derivative_power[1] > derivative_power[2],
        "derivative power should fall with s: {derivative_power:?}"
    );
}

#[test]
fn kl_sampler_is_seed_deterministic() {
    let g = grid(32);
    let spec = KLPriorSpec::new(2.0, 10, 0.5).unwrap();
    let a = sample_kl(&spec, &g, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
    let b = sample_kl(&spec, &g, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
    assert_eq!(a.values, b.values);
    let c = sample_kl(&spec, &g, &mut ChaCha8Rng::seed_from_u64(78)).unwrap();
    assert_ne!(a.values, c.values);
}

// ---------------------------------------------------------------------------
// squared-exponential prior
// ---------------------------------------------------------------------------

/// The kernel: exp(−2 sin²((t−s)/2)/l²).
fn se_kernel(dt: f64, l: f64) -> f64 {
    let s = (dt / 2.0).sin();
    (-2.0 * s * s / (l * l)).exp()
}

#[test]
fn se_empirical_covariance_matches_the_kernel() {
    let n = 32;
    let g = grid(n);
    let spec = SEPriorSpec::new(0.5, g.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n_samples = 100_000;
    let samples: Vec<LatentField> = (0..n_samples)
        .map(|_| sample_se(&spec, &mut rng).unwrap())
        .collect();

    // Marginal variance C(t, t) = 1 within 3 MC standard errors.
    let var = pointwise_variance(&samples);
    let se = (2.0 / (n_samples as f64 - 1.0)).sqrt();
    for (j, &v) in var.iter().enumerate() {
        assert!((v - 1.0).abs() < 3.0 * se, "node {j}: variance {v}");
    }

    // Full covariance matrix entrywise within 0.02 (far beyond MC noise).
    for i in 0..n {
        for j in 0..n {
            let mut cov = 0.0;
            for s in &samples {
                cov += s.values[i] * s.values[j];
            }
            cov /= n_samples as f64 - 1.0;
            let exact = se_kernel(g.node(i) - g.node(j), 0.5);
            assert!(
                (cov - exact).abs() < 0.02,
                "C({i},{j}) = {cov}, kernel {exact}"
            );
        }
    }
}

#[test]
fn se_correlation_at_opposite_nodes_matches_the_kernel() {
    // Nodes π apart: corr = exp(−2/l²). At l = 2 that is e^{-1/2} ≈ 0.6065,
    // far from 0 and sharply testable.
    let n = 64;
    let g = grid(n);
    let spec = SEPriorSpec::new(2.0, g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n_samples = 100_000;
    let mut c00 = 0.0;
    let mut chh = 0.0;
    let mut c0h = 0.0;
    let mut c01 = 0.0;
    let mut c0m = 0.0;
    for _ in 0..n_samples {
        let r = sample_se(&spec, &mut rng).unwrap();
        c00 += r.values[0] * r.values[0];
        chh += r.values[n / 2] * r.values[n / 2];
        c0h += r.values[0] * r.values[n / 2];
        c01 += r.values[0] * r.values[1];
        c0m += r.values[0] * r.values[n - 1];
    }
    let corr_half = c0h / (c00 * chh).sqrt();
    let exact = (-2.0f64 / 4.0).exp();
    let se = (1.0 - exact * exact) / (n_samples as f64).sqrt();
    assert!(
        (corr_half - exact).abs() < 3.0 * se,
        "corr(0, π) = {corr_half}, kernel {exact}"
    );
    // Circulant symmetry: one node forward correlates like one node back.
    let corr_fwd = c01 / c00;
    let corr_back = c0m / c00;
    assert!(
        (corr_fwd - corr_back).abs() < 4.0 / (n_samples as f64).sqrt(),
        "corr asymmetry: {corr_fwd} vs {corr_back}"
    );
}

#[test]
fn se_short_length_scale_decorrelates_opposite_nodes() {
    // At l = 0.5 the kernel at π is e^{-8} ≈ 3.4e-4 — indistinguishable
    // from zero at this sample size, and the estimate must agree.
    let n = 32;
    let g = grid(n);
    let spec = SEPriorSpec::new(0.5, g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n_samples = 50_000;
    let mut c0h = 0.0;
    for _ in 0..n_samples {
        let r = sample_se(&spec, &mut rng).unwrap();
        c0h += r.values[0] * r.values[n / 2];
    }
    c0h /= n_samples as f64;
    let exact = (-2.0f64 / 0.25).exp();
    assert!(
        (c0h - exact).abs() < 3.0 / (n_samples as f64).sqrt(),
        "cov(0, π) = {c0h}, kernel {exact}"
    );
}

#[test]
fn se_sampler_is_seed_deterministic() {
    let spec = SEPriorSpec::new(0.5, grid(32)).unwrap();
    let a = sample_se(&spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = sample_se(&spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn prior_spec_dispatch_checks_the_grid() {
    let g32 = grid(32);
    let g64 = grid(64);
    let se = PriorSpec::Se(SEPriorSpec::new(0.5, g32.clone()).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(se.sample(&g32, &mut rng).is_ok());
    assert!(se.sample(&g64, &mut rng).is_err());
    let kl = PriorSpec::Kl(KLPriorSpec::new(2.0, 5, 0.5).unwrap());
    assert!(kl.sample(&g32, &mut rng).is_ok());
    assert!(kl.sample(&g64, &mut rng).is_ok());
}

// ---------------------------------------------------------------------------
// total variation
// ---------------------------------------------------------------------------

/// The trapezoid rule applied to |−sin t| on the uniform grid sums to
/// (4π/N)·cot(π/N) exactly: the discrete TV of cos t is that number, which
/// approaches the analytic 4 at rate O(N^{-2}).
#[test]
fn tv_of_cosine_matches_the_cotangent_identity() {
    for n in [16usize, 64, 128, 256] {
        let g = grid(n);
        let r = LatentField::new(g.clone(), g.nodes().iter().map(|&t| t.cos()).collect()).unwrap();
        let tv = tv_seminorm(&r, &TVSpec::new(1.0).unwrap());
        let exact = (4.0 * PI / n as f64) / (PI / n as f64).tan();
        assert!(
            (tv - exact).abs() < 1e-12 * exact,
            "N = {n}: TV = {tv}, identity {exact}"
        );
        // Convergence to the analytic integral ∫|sin| = 4 is quadratic:
        // 4 − TV = (4π²/3)/N² + O(N^{-4}).
        let defect = 4.0 - tv;
        let leading = 4.0 * PI * PI / 3.0 / (n as f64 * n as f64);
        assert!(
            (defect - leading).abs() < 0.2 * leading,
            "N = {n}: defect {defect} vs leading term {leading}"
        );
    }
    // At N = 128 the discretization sits 8e-4 from the integral — close,
    // but a hard floor an equality test cannot cross.
    let g = grid(128);
    let r = LatentField::new(g.clone(), g.nodes().iter().map(|&t| t.cos()).collect()).unwrap();
    let tv = tv_seminorm(&r, &TVSpec::new(1.0).unwrap());
    assert!((tv - 4.0).abs() < 1e-3);
    assert!((tv - 4.0).abs() > 1e-4);
    // Linearity in ζ: ζ = 0.5 gives half.
    let half = tv_seminorm(&r, &TVSpec::new(0.5).unwrap());
    assert!((half - 0.5 * tv).abs() < 1e-14);
}

#[test]
fn tv_grows_with_oscillation() {
    let g = grid(128);
    let tv_of = |f: &dyn Fn(f64) -> f64| {
        let r = LatentField::new(g.clone(), g.nodes().iter().map(|&t| f(t)).collect()).unwrap();
        tv_seminorm(&r, &TVSpec::new(1.0).unwrap())
    };
    let slow = tv_of(&|t| t.cos());
    let fast = tv_of(&|t| (4.0 * t).cos());
    // cos(kt) sampled on N nodes sees an effective N/k-point grid per
    // period, so its discrete TV is k·T(N/k) with T(M) = (4π/M)cot(π/M).
    let t = |m: f64| (4.0 * PI / m) / (PI / m).tan();
    let exact_ratio = 4.0 * t(32.0) / t(128.0);
    assert!(
        (fast / slow - exact_ratio).abs() < 1e-12,
        "ratio {} vs exact {exact_ratio}",
        fast / slow
    );
    assert!(
        fast > 3.9 * slow,
        "TV must grow roughly linearly in frequency"
    );
}

// ---------------------------------------------------------------------------
// property-based checks
// ---------------------------------------------------------------------------

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// TV is nonnegative, kills constants, and is |c|-homogeneous.
        #[test]
        fn tv_seminorm_properties(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 16),
            scale in -5.0f64..5.0,
            offset in -10.0f64..10.0,
        ) {
            let g = grid(16);
            let base = LatentField::new(g.clone(), coeffs).unwrap();
            let spec = TVSpec::new(1.0).unwrap();
            let tv = tv_seminorm(&base, &spec);
            prop_assert!(tv >= 0.0);

            let scaled = LatentField::new(
                g.clone(),
                base.values.iter().map(|v| scale * v).collect(),
            ).unwrap();
            let tv_scaled = tv_seminorm(&scaled, &spec);
            prop_assert!((tv_scaled - scale.abs() * tv).abs() < 1e-9 * (1.0 + tv));

            let shifted = LatentField::new(
                g,
                base.values.iter().map(|v| v + offset).collect(),
            ).unwrap();
            let tv_shifted = tv_seminorm(&shifted, &spec);
            prop_assert!((tv_shifted - tv).abs() < 1e-9 * (1.0 + tv));
        }

        /// The KL combiner is linear in its coefficients.
        #[test]
        fn kl_expansion_is_linear(
            a0 in -3.0f64..3.0,
            a1 in -3.0f64..3.0,
            b1 in -3.0f64..3.0,
            c in -2.0f64..2.0,
        ) {
            let g = grid(16);
            let spec = KLPriorSpec::new(2.0, 1, 0.5).unwrap();
            let r = kl_expand(&spec, &g, a0, &[(a1, b1)]).unwrap();
            let rc = kl_expand(&spec, &g, c * a0, &[(c * a1, c * b1)]).unwrap();
            for (x, y) in r.values.iter().zip(&rc.values) {
                prop_assert!((c * x - y).abs() < 1e-12);
            }
        }
    }
}
