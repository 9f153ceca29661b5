//! Browser bindings for the interactive demo page.
//!
//! Three operations, each returning a JSON string (an `{"error": ...}`
//! object on failure, so the page never deals with exceptions):
//!
//! * [`far_field_demo`] — solve the forward problem for a catalog obstacle
//!   and plot the far-field intensity,
//! * [`prior_demo`] — draw boundary samples from a shape prior,
//! * [`chain_demo`] — run a miniature posterior chain and plot the
//!   reconstruction.
//!
//! The crate also builds natively so the demos stay under ordinary `cargo
//! test` coverage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scatter::curve::{
    obstacle_catalog, obstacle_catalog_graded, ErfMapParams, Obstacle, PeriodicGrid, PositivityMap,
};
use scatter::forward::{intensity, solve_far_field, FarFieldMap};
use scatter::mcmc::{run_chain, ChainConfig};
use scatter::plot::{AnnularBand, LineChart, PlaneChart, Series};
use scatter::posterior::{sample_poisson, PoissonObservation};
use scatter::prior::{KLPriorSpec, PriorSpec, SEPriorSpec, TVSpec};
use scatter::Result;
use serde_json::json;
use std::f64::consts::TAU;
use std::str::FromStr;
use wasm_bindgen::prelude::wasm_bindgen;

/// Boundary resolution for the forward demo.
const DEMO_BOUNDARY_NODES: usize = 128;
/// Grading order at the drop's corner.
const DEMO_GRADING_ORDER: u32 = 3;

fn err_json(msg: &str) -> String {
    json!({ "error": msg }).to_string()
}

fn catalog_curve(obstacle: Obstacle, n: usize) -> Result<scatter::curve::BoundaryCurve> {
    let grid = PeriodicGrid::new(n)?;
    Ok(if obstacle.has_corner() {
        obstacle_catalog_graded(obstacle, &grid, DEMO_GRADING_ORDER)?
    } else {
        obstacle_catalog(obstacle, &grid)
    })
}

/// Closed polygon through `(q_i cos t_i, q_i sin t_i)`.
fn polygon(angles: &[f64], q: &[f64]) -> Vec<[f64; 2]> {
    angles
        .iter()
        .zip(q)
        .map(|(&t, &r)| [r * t.cos(), r * t.sin()])
        .collect()
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

/// JSON array of the obstacle names the demos accept.
#[wasm_bindgen]
pub fn obstacle_names() -> String {
    let names: Vec<&str> = Obstacle::ALL.iter().map(|o| o.name()).collect();
    json!(names).to_string()
}

// ---------------------------------------------------------------------------
// forward demo
// ---------------------------------------------------------------------------

fn far_field_demo_inner(obstacle: &str, k: f64, n_obs: u32) -> Result<String> {
    let obstacle = Obstacle::from_str(obstacle)?;
    let n_obs = (n_obs as usize).clamp(8, 512);
    let curve = catalog_curve(obstacle, DEMO_BOUNDARY_NODES)?;
    let map = FarFieldMap::new(k, vec![[1.0, 0.0]], n_obs, 1.0)?;
    let far = solve_far_field(&curve, &map)?;
    let amplitude = intensity(&far, 1.0, &vec![0.0; n_obs])?;

    let angles: Vec<f64> = (0..n_obs).map(|j| TAU * j as f64 / n_obs as f64).collect();
    let data_svg = LineChart::new(
        &format!("far-field intensity: {obstacle} (k = {k})"),
        "observation angle",
        "intensity",
    )
    .with_series(Series::line(angles, amplitude.values, "|far field|^2"))
    .render()?;

    // Display the plain (ungraded) boundary: evenly spread points.
    let shape = obstacle_catalog(obstacle, &PeriodicGrid::new(DEMO_BOUNDARY_NODES)?);
    let shape_svg = PlaneChart::new(&format!("obstacle: {obstacle}"))
        .with_curve(shape.points, obstacle.name(), false)
        .render()?;

    Ok(json!({ "shape_svg": shape_svg, "data_svg": data_svg }).to_string())
}

/// Far-field intensity and silhouette for one obstacle; JSON with
/// `shape_svg` and `data_svg`.
#[wasm_bindgen]
pub fn far_field_demo(obstacle: &str, k: f64, n_obs: u32) -> String {
    far_field_demo_inner(obstacle, k, n_obs).unwrap_or_else(|e| err_json(&e.to_string()))
}

// ---------------------------------------------------------------------------
// prior demo
// ---------------------------------------------------------------------------

fn prior_demo_inner(kind: &str, length_scale: f64, smoothness: f64, seed: u32) -> Result<String> {
    let grid = PeriodicGrid::new(DEMO_BOUNDARY_NODES)?;
    let prior = match kind {
        "se" => PriorSpec::Se(SEPriorSpec::new(length_scale, grid.clone())?),
        "kl" => PriorSpec::Kl(KLPriorSpec::new(smoothness, 30, 0.5)?),
        other => {
            return Err(scatter::Error::Config(format!(
                "unknown prior kind '{other}' (expected \"se\" or \"kl\")"
            )))
        }
    };
    let positivity = PositivityMap::Erf(ErfMapParams::new(2.0, 2.0)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);

    let mut latent = LineChart::new(
        &format!("latent prior draws ({kind})"),
        "boundary angle",
        "latent value",
    );
    let mut shapes = PlaneChart::new("boundary draws through the erf map");
    for i in 0..3 {
        let r = prior.sample(&grid, &mut rng)?;
        let curve = positivity.apply(&r)?;
        latent = latent.with_series(Series::line(
            grid.nodes().to_vec(),
            r.values.clone(),
            &format!("draw {}", i + 1),
        ));
        shapes = shapes.with_curve(
            polygon(grid.nodes(), &curve.q),
            &format!("draw {}", i + 1),
            false,
        );
    }
    Ok(json!({ "latent_svg": latent.render()?, "shapes_svg": shapes.render()? }).to_string())
}

/// Three prior draws as latent fields and as mapped boundaries; JSON with
/// `latent_svg` and `shapes_svg`.
#[wasm_bindgen]
pub fn prior_demo(kind: &str, length_scale: f64, smoothness: f64, seed: u32) -> String {
    prior_demo_inner(kind, length_scale, smoothness, seed)
        .unwrap_or_else(|e| err_json(&e.to_string()))
}

// ---------------------------------------------------------------------------
// chain demo
// ---------------------------------------------------------------------------

fn chain_demo_inner(
    obstacle: &str,
    zeta: f64,
    beta: f64,
    n_iters: u32,
    seed: u32,
) -> Result<String> {
    let obstacle = Obstacle::from_str(obstacle)?;
    let n_iters = (n_iters as usize).clamp(400, 20_000);
    let n_boundary = 32;
    let n_obs = 32;
    let tau = 500.0;
    let shift = 1.0;

    // Synthetic counts from the true boundary at the demo resolution.
    let map =
        FarFieldMap::new(1.0, vec![[1.0, 0.0]], n_obs, tau)?.with_shift(vec![shift; n_obs])?;
    let truth = catalog_curve(obstacle, DEMO_BOUNDARY_NODES)?;
    let far = solve_far_field(&truth, &map)?;
    let lambda = intensity(&far, tau, map.shift())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let y: Vec<u64> = lambda
        .values
        .iter()
        .map(|&l| sample_poisson(&mut rng, l))
        .collect::<Result<_>>()?;
    let observation = PoissonObservation::new(
        y,
        map.obs_dirs().to_vec(),
        map.incident_dirs().to_vec(),
        tau,
    )?;

    let grid = PeriodicGrid::new(n_boundary)?;
    let burn_in = n_iters / 4;
    let thin = ((n_iters - burn_in) / 150).max(1);
    let cfg = ChainConfig {
        beta,
        n_iters,
        burn_in,
        thin,
        seed: seed as u64 + 1,
        grid: grid.clone(),
        prior: PriorSpec::Se(SEPriorSpec::new(0.5, grid.clone())?),
        positivity: PositivityMap::Erf(ErfMapParams::new(2.0, 2.0)?),
        tv: TVSpec::new(zeta)?,
    };
    let result = run_chain(&cfg, observation, map)?;

    // Plain truth points for display.
    let truth_points = obstacle_catalog(obstacle, &PeriodicGrid::new(DEMO_BOUNDARY_NODES)?).points;
    let reconstruction_svg = PlaneChart::new(&format!("reconstruction: {obstacle}"))
        .with_band(AnnularBand {
            outer: polygon(grid.nodes(), &result.band_hi),
            inner: polygon(grid.nodes(), &result.band_lo),
            label: "95% band".to_string(),
        })
        .with_curve(
            polygon(grid.nodes(), &result.mean_curve.q),
            "posterior mean",
            false,
        )
        .with_curve(truth_points, "truth", true)
        .render()?;

    let iters: Vec<f64> = (1..=result.potential_trace.len())
        .map(|i| i as f64)
        .collect();
    let trace_svg = LineChart::new("potential trace", "iteration", "potential")
        .with_series(Series::line(
            iters,
            result.potential_trace.clone(),
            "potential",
        ))
        .render()?;

    Ok(json!({
        "reconstruction_svg": reconstruction_svg,
        "trace_svg": trace_svg,
        "acceptance_rate": result.acceptance_rate,
        "n_retained": result.samples.len(),
    })
    .to_string())
}

/// A miniature posterior run (32-node boundary, 32 detectors) against
/// synthetic counts; JSON with `reconstruction_svg`, `trace_svg`,
/// `acceptance_rate`, and `n_retained`.
#[wasm_bindgen]
pub fn chain_demo(obstacle: &str, zeta: f64, beta: f64, n_iters: u32, seed: u32) -> String {
    chain_demo_inner(obstacle, zeta, beta, n_iters, seed)
        .unwrap_or_else(|e| err_json(&e.to_string()))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
