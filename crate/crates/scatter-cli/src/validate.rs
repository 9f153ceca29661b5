//! The `scatter validate` diagnostic suite: analytic cross-checks of the
//! forward solver, printed with their measured errors.
//!
//! Every check has an exact or analytically-known target: the circle's
//! separation-of-variables far field, reciprocity, the optical theorem, and
//! the solver's convergence order on the kite.

use crate::error::{CliError, Result};
use scatter::curve::{
    obstacle_catalog, obstacle_catalog_graded, radial_to_boundary, BoundaryCurve, Obstacle,
    PeriodicGrid, RadialCurve,
};
use scatter::forward::{circle_far_field, solve_far_field, FarField, FarFieldMap};
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;

/// Grading order used for the drop's corner in these checks.
const GRADING_ORDER: u32 = 3;

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Human-readable measurement, e.g. `max |Δu∞| = 3.1e-12 (tolerance 1e-8)`.
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{}  {:<24} {}",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.detail
            )?;
        }
        write!(
            f,
            "{} of {} checks passed",
            self.checks.len() - self.failed(),
            self.checks.len()
        )
    }
}

fn outcome(name: &str, measured: f64, tolerance: f64, quantity: &str) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: measured < tolerance,
        detail: format!("{quantity} = {measured:.3e} (tolerance {tolerance:.0e})"),
    }
}

// ---------------------------------------------------------------------------
// the checks
// ---------------------------------------------------------------------------

fn catalog_curve(obstacle: Obstacle, n: usize) -> Result<BoundaryCurve> {
    let grid = PeriodicGrid::new(n)?;
    Ok(if obstacle.has_corner() {
        obstacle_catalog_graded(obstacle, &grid, GRADING_ORDER)?
    } else {
        obstacle_catalog(obstacle, &grid)
    })
}

/// Max abs deviation of the solved circle far field from the analytic series
/// (R = 1, k = 1, η = k, d = (1,0), 64 observation directions).
pub fn mie_defect(n: usize) -> Result<f64> {
    let grid = PeriodicGrid::new(n)?;
    let circle = radial_to_boundary(&RadialCurve::from_radii(grid, vec![1.0; n])?);
    let obs = FarFieldMap::equispaced_directions(64);
    let map = FarFieldMap::new(1.0, vec![[1.0, 0.0]], 64, 1.0)?;
    let far = solve_far_field(&circle, &map)?;
    let exact = circle_far_field(1.0, 1.0, [1.0, 0.0], &obs);
    let defect = (0..64)
        .map(|j| (far.value(j, 0) - exact[j]).norm())
        .fold(0.0, f64::max);
    Ok(defect)
}

/// Solves one obstacle with 8 antipodally-closed directions as both incident
/// and observation set.
fn eight_direction_far(obstacle: Obstacle, n: usize) -> Result<FarField> {
    let curve = catalog_curve(obstacle, n)?;
    let dirs = FarFieldMap::equispaced_directions(8);
    let map = FarFieldMap::new(1.0, dirs, 8, 1.0)?;
    Ok(solve_far_field(&curve, &map)?)
}

/// Max abs defect of u∞(x̂; d) = u∞(−d; −x̂) over an antipodally-closed
/// direction set.
pub fn reciprocity_defect(obstacle: Obstacle, n: usize) -> Result<f64> {
    let far = eight_direction_far(obstacle, n)?;
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let swapped = far.value((j + 4) % 8, (i + 4) % 8);
            worst = worst.max((far.value(i, j) - swapped).norm());
        }
    }
    Ok(worst)
}

/// Relative defect of ∫|u∞|²dθ = −√(8π/k)·Re[e^{iπ/4} u∞(d; d)].
pub fn optical_theorem_defect(obstacle: Obstacle, n: usize) -> Result<f64> {
    let curve = catalog_curve(obstacle, n)?;
    let k = 1.0;
    let m = 256;
    let map = FarFieldMap::new(k, vec![[1.0, 0.0]], m, 1.0)?;
    let far = solve_far_field(&curve, &map)?;
    // Periodic trapezoid rule: spectrally accurate for the smooth integrand.
    let lhs: f64 = (0..m).map(|j| far.value(j, 0).norm_sqr()).sum::<f64>() * TAU / m as f64;
    let forward = far.value(0, 0); // observation direction 0 is d itself
    let rhs =
        -(8.0 * PI / k).sqrt() * (num_complex::Complex64::from_polar(1.0, FRAC_PI_4) * forward).re;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Far-field errors on the kite against an N = 512 reference, halving from
/// N = 128 down to 32; returns the error-reduction factors per doubling.
pub fn kite_convergence_factors() -> Result<(f64, f64)> {
    let obs = 16;
    let map = FarFieldMap::new(1.0, vec![[1.0, 0.0]], obs, 1.0)?;
    let solve = |n: usize| -> Result<Vec<num_complex::Complex64>> {
        let far = solve_far_field(&catalog_curve(Obstacle::Kite, n)?, &map)?;
        Ok((0..obs).map(|j| far.value(j, 0)).collect())
    };
    let reference = solve(512)?;
    let error = |values: &[num_complex::Complex64]| {
        values
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let e32 = error(&solve(32)?);
    let e64 = error(&solve(64)?);
    let e128 = error(&solve(128)?);
    if e64 == 0.0 || e128 == 0.0 {
        return Err(CliError::Numerical(
            "kite convergence check hit an exactly-zero error".to_string(),
        ));
    }
    Ok((e32 / e64, e64 / e128))
}

// ---------------------------------------------------------------------------
// the suite
// ---------------------------------------------------------------------------

pub fn validate_forward() -> Result<ValidationReport> {
    let mut checks = Vec::new();

    checks.push(outcome("circle-mie", mie_defect(128)?, 1e-8, "max |Δu∞|"));

    for obstacle in [Obstacle::Peanut, Obstacle::Kite, Obstacle::Cloverleaf] {
        checks.push(outcome(
            &format!("reciprocity-{}", obstacle.name()),
            reciprocity_defect(obstacle, 256)?,
            1e-8,
            "max defect",
        ));
    }
    checks.push(outcome(
        "reciprocity-drop",
        reciprocity_defect(Obstacle::Drop, 256)?,
        1e-4,
        "max defect (graded)",
    ));

    for obstacle in [Obstacle::Peanut, Obstacle::Kite, Obstacle::Cloverleaf] {
        checks.push(outcome(
            &format!("optical-theorem-{}", obstacle.name()),
            optical_theorem_defect(obstacle, 256)?,
            1e-6,
            "relative defect",
        ));
    }

    let (f1, f2) = kite_convergence_factors()?;
    let worst = f1.min(f2);
    checks.push(CheckOutcome {
        name: "kite-convergence".to_string(),
        passed: worst > 10.0,
        detail: format!("error reduction per doubling = {f1:.1}x, {f2:.1}x (needs > 10x)"),
    });

    Ok(ValidationReport { checks })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
