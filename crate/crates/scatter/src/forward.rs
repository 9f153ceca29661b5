//! The forward scattering map: combined-field integral equation (CFIE)
//! assembly with Kussmaul–Martensen quadrature, direct solve for the boundary
//! density, far-field and near-field evaluation, and the Poisson intensity
//! vector observed by the photon detectors.
//!
//! For a sound-soft obstacle hit by the plane wave `u^i(x) = exp(ik x·d)`,
//! the density `φ` solves `(I + K − iηS)φ = −2u^i` on the boundary, where `S`
//! and `K` are the single- and (adjoint-free) double-layer operators scaled
//! with the factor 2 convention. The kernels split into an analytic part plus
//! `ln(4 sin²((t−τ)/2))` times an analytic part; the log part is integrated
//! by trigonometric product quadrature, the smooth part by the trapezoid
//! rule, giving spectral accuracy on smooth curves.

use crate::curve::{radial_to_boundary, BoundaryCurve, LatentField, PeriodicGrid, PositivityMap};
use crate::special;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::rc::Rc;

/// Relative residual bound enforced after every direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// far-field map description
// ---------------------------------------------------------------------------

/// Static description of the measurement setup: wavenumber, incident plane
/// waves, coupling parameter, detector directions, exposure time, and the
/// detector dark-count shift.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMap {
    k: f64,
    eta: f64,
    incident_dirs: Vec<[f64; 2]>,
    obs_dirs: Vec<[f64; 2]>,
    tau: f64,
    shift: Vec<f64>,
}

pub(crate) fn check_unit_dirs(dirs: &[[f64; 2]], what: &str) -> Result<()> {
    if dirs.is_empty() {
        return Err(Error::Config(format!(
            "{what} directions must be non-empty"
        )));
    }
    for (i, d) in dirs.iter().enumerate() {
        let len = d[0].hypot(d[1]);
        if !len.is_finite() || (len - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "{what} direction {i} = ({}, {}) is not a unit vector",
                d[0], d[1]
            )));
        }
    }
    Ok(())
}

impl FarFieldMap {
    /// Builds a map with `n_obs` equispaced detector directions
    /// `(cos 2πj/m, sin 2πj/m)`, coupling `η = k`, and zero shift.
    pub fn new(k: f64, incident_dirs: Vec<[f64; 2]>, n_obs: usize, tau: f64) -> Result<Self> {
        if n_obs == 0 {
            return Err(Error::Config("need at least one detector direction".into()));
        }
        Self::with_obs_dirs(k, incident_dirs, Self::equispaced_directions(n_obs), tau)
    }

    /// As [`FarFieldMap::new`] with explicit detector directions.
    pub fn with_obs_dirs(
        k: f64,
        incident_dirs: Vec<[f64; 2]>,
        obs_dirs: Vec<[f64; 2]>,
        tau: f64,
    ) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!(
                "wavenumber k must be positive, got {k}"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Config(format!(
                "exposure time tau must be positive, got {tau}"
            )));
        }
        check_unit_dirs(&incident_dirs, "incident")?;
        check_unit_dirs(&obs_dirs, "observation")?;
        let shift = vec![0.0; obs_dirs.len()];
        Ok(Self {
            k,
            eta: k,
            incident_dirs,
            obs_dirs,
            tau,
            shift,
        })
    }

    /// Overrides the coupling parameter (default `η = k`).
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::Config(format!(
                "coupling eta must be finite, got {eta}"
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    /// Sets the detector shift `e_j ≥ 0`, one entry per detector.
    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != self.obs_dirs.len() {
            return Err(Error::Config(format!(
                "shift has {} entries for {} detectors",
                shift.len(),
                self.obs_dirs.len()
            )));
        }
        if let Some(i) = shift.iter().position(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Config(format!(
                "shift entry {i} is {}; shifts must be non-negative",
                shift[i]
            )));
        }
        self.shift = shift;
        Ok(self)
    }

    /// `m` unit vectors at angles `2πj/m`.
    pub fn equispaced_directions(m: usize) -> Vec<[f64; 2]> {
        (0..m)
            .map(|j| {
                let (s, c) = (TAU * j as f64 / m as f64).sin_cos();
                [c, s]
            })
            .collect()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn incident_dirs(&self) -> &[[f64; 2]] {
        &self.incident_dirs
    }

    pub fn obs_dirs(&self) -> &[[f64; 2]] {
        &self.obs_dirs
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn n_obs(&self) -> usize {
        self.obs_dirs.len()
    }

    /// Length of the intensity vector: detectors × incident directions.
    pub fn output_len(&self) -> usize {
        self.obs_dirs.len() * self.incident_dirs.len()
    }
}

// ---------------------------------------------------------------------------
// quadrature tables
// ---------------------------------------------------------------------------

/// Circulant tables reused across assemblies on the same grid size.
struct QuadTables {
    /// Product-quadrature weights for the log kernel, indexed by
    /// `(i − j) mod N`.
    rlog: Vec<f64>,
    /// `ln(4 sin²(πd/N))` for `d = 1..N` (entry 0 unused).
    log_dist: Vec<f64>,
}

thread_local! {
    static QUAD_CACHE: RefCell<HashMap<usize, Rc<QuadTables>>> = RefCell::new(HashMap::new());
}

fn quad_tables(n: usize) -> Rc<QuadTables> {
    QUAD_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let rlog = km_log_weights(n);
                let log_dist = (0..n)
                    .map(|d| {
                        if d == 0 {
                            0.0
                        } else {
                            let s = (PI * d as f64 / n as f64).sin();
                            (4.0 * s * s).ln()
                        }
                    })
                    .collect();
                Rc::new(QuadTables { rlog, log_dist })
            })
            .clone()
    })
}

/// Product-quadrature weights for the periodic logarithmic kernel: with
/// `d = (i − j) mod N`,
///
/// ```text
/// R[d] = -(4π/N) Σ_{m=1}^{N/2-1} cos(2πmd/N)/m - (4π/N²)(-1)^d,
/// ```
///
/// so that `Σ_j R[(i-j) mod N] f(t_j) = ∫₀^{2π} ln(4 sin²((t_i-τ)/2)) f(τ) dτ`
/// exactly for trigonometric polynomials `f` of degree ≤ N/2 (the log kernel
/// has Fourier series `-2 Σ_{m≥1} cos(mθ)/m`).
pub fn km_log_weights(n: usize) -> Vec<f64> {
    assert!(n >= 2 && n % 2 == 0, "weights need an even grid size");
    let nf = n as f64;
    (0..n)
        .map(|d| {
            let mut sum = 0.0;
            for m in 1..n / 2 {
                sum += (TAU * (m * d) as f64 / nf).cos() / m as f64;
            }
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            -(4.0 * PI / nf) * sum - 4.0 * PI / (nf * nf) * sign
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CFIE assembly
// ---------------------------------------------------------------------------

/// Assembles the Nyström matrix of `I + K − iηS` (factor-2 layer operators)
/// on the given boundary curve.
///
/// Kernel splitting per operator: `M(t,τ) = M₁(t,τ) ln(4sin²((t−τ)/2)) + M₂(t,τ)`
/// with the analytically known diagonal limits; `M₁` rides on the product
/// quadrature, `M₂` on the trapezoid rule. A corner node with zero Jacobian
/// contributes nothing (its column vanishes).
pub fn assemble_cfie(curve: &BoundaryCurve, k: f64, eta: f64) -> Result<DMatrix<Complex64>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Config(format!(
            "wavenumber k must be positive, got {k}"
        )));
    }
    if !eta.is_finite() {
        return Err(Error::Config(format!(
            "coupling eta must be finite, got {eta}"
        )));
    }
    let n = curve.n_points();
    let h = TAU / n as f64;
    let tables = quad_tables(n);
    let i_eta = Complex64::new(0.0, eta);
    let mut a = DMatrix::<Complex64>::zeros(n, n);

    // Diagonal: L₁(t,t) = 0, M₁(t,t) = −|x'|/2π,
    // L₂(t,t) = −κ|x'|/2π, M₂(t,t) = (i/2 − γ/π − ln(k|x'|/2)/π)|x'|.
    for i in 0..n {
        let jac = curve.jacobian[i];
        let entry = if jac > 0.0 {
            let m1 = -jac / (2.0 * PI);
            let l2 = Complex64::new(-curve.curvature[i] * jac / (2.0 * PI), 0.0);
            let m2 = Complex64::new(
                (-special::EULER_GAMMA / PI - (0.5 * k * jac).ln() / PI) * jac,
                0.5 * jac,
            );
            Complex64::new(1.0, 0.0) - tables.rlog[0] * i_eta * m1 + h * (l2 - i_eta * m2)
        } else {
            // Corner node: the kernels' x·ln(x) diagonal limits vanish with
            // the Jacobian; only the identity survives.
            Complex64::new(1.0, 0.0)
        };
        a[(i, i)] = entry;
    }

    // Off-diagonal entries come in (i,j)/(j,i) pairs sharing the Bessel
    // evaluations at k|x_i − x_j|.
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = [
                curve.points[i][0] - curve.points[j][0],
                curve.points[i][1] - curve.points[j][1],
            ];
            let r = dx[0].hypot(dx[1]);
            if !(r > 0.0) {
                return Err(Error::Numerical(format!(
                    "boundary nodes {i} and {j} coincide at ({}, {})",
                    curve.points[i][0], curve.points[i][1]
                )));
            }
            let z = k * r;
            let j0 = special::bessel_j(0, z);
            let y0 = special::bessel_y(0, z);
            let j1 = special::bessel_j(1, z);
            let y1 = special::bessel_y(1, z);
            // Circulant index: both tables are symmetric under d ↔ N − d.
            let d = j - i;
            let ls = tables.log_dist[d];
            let rw = tables.rlog[d];

            // Target t, source s: M = (i/2)H₀(kr)|x'_s|, L = (ik/2)H₁(kr)·D/r
            // with D = (x_t − x_s)·(x₂'_s, −x₁'_s).
            let entry = |sign: f64, s: usize| -> Complex64 {
                let jac_s = curve.jacobian[s];
                let tan_s = curve.tangents[s];
                let dterm = sign * (dx[0] * tan_s[1] - dx[1] * tan_s[0]);
                let m_full = Complex64::new(-0.5 * y0, 0.5 * j0) * jac_s;
                let m1 = -j0 * jac_s / (2.0 * PI);
                let l_full = Complex64::new(-0.5 * k * y1, 0.5 * k * j1) * (dterm / r);
                let l1 = -k * j1 * dterm / (2.0 * PI * r);
                let l2 = l_full - ls * l1;
                let m2 = m_full - ls * m1;
                rw * (l1 - i_eta * m1) + h * (l2 - i_eta * m2)
            };
            a[(i, j)] = entry(1.0, j);
            a[(j, i)] = entry(-1.0, i);
        }
    }

    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical(format!(
                    "CFIE matrix entry at nodes ({i}, {j}) is not finite \
                     (t_i = {:.6}, t_j = {:.6})",
                    curve.grid.node(i),
                    curve.grid.node(j)
                )));
            }
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// density solve
// ---------------------------------------------------------------------------

/// Boundary densities solving the CFIE, one per incident direction.
#[derive(Debug, Clone)]
pub struct DensitySolution {
    pub grid: PeriodicGrid,
    pub incident_dirs: Vec<[f64; 2]>,
    /// `phi[l][i]` = density for incident direction `l` at node `i`.
    pub phi: Vec<Vec<Complex64>>,
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Crude 1-norm condition estimate (error reporting only; O(N³)).
fn condition_estimate(a: &DMatrix<Complex64>) -> f64 {
    match a.clone().lu().try_inverse() {
        Some(inv) => one_norm(a) * one_norm(&inv),
        None => f64::INFINITY,
    }
}

/// Solves the assembled system for one incident direction.
pub fn solve_density(
    matrix: &DMatrix<Complex64>,
    curve: &BoundaryCurve,
    k: f64,
    incident: [f64; 2],
) -> Result<DensitySolution> {
    solve_densities(matrix, curve, k, &[incident])
}

/// Solves the assembled system for several incident directions, reusing one
/// LU factorization. Every solution is residual-checked against
/// [`RESIDUAL_TOL`]; failure reports a condition estimate.
pub fn solve_densities(
    matrix: &DMatrix<Complex64>,
    curve: &BoundaryCurve,
    k: f64,
    incident_dirs: &[[f64; 2]],
) -> Result<DensitySolution> {
    check_unit_dirs(incident_dirs, "incident")?;
    let n = curve.n_points();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(Error::Config(format!(
            "matrix is {}x{} but the curve has {n} nodes",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let lu = matrix.clone().lu();
    let mut phi = Vec::with_capacity(incident_dirs.len());
    for d in incident_dirs {
        let rhs = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let x = curve.points[i];
                let phase = k * (x[0] * d[0] + x[1] * d[1]);
                -2.0 * Complex64::new(phase.cos(), phase.sin())
            }),
        );
        let sol = lu.solve(&rhs).ok_or_else(|| {
            Error::Numerical(format!(
                "CFIE system is singular to working precision \
                 (1-norm condition estimate {:.3e})",
                condition_estimate(matrix)
            ))
        })?;
        let rel_residual = (matrix * &sol - &rhs).norm() / rhs.norm();
        if !(rel_residual <= RESIDUAL_TOL) {
            return Err(Error::Numerical(format!(
                "CFIE solve residual {rel_residual:.3e} exceeds {RESIDUAL_TOL:.0e}; \
                 the system is ill-conditioned (1-norm condition estimate {:.3e})",
                condition_estimate(matrix)
            )));
        }
        phi.push(sol.iter().cloned().collect());
    }
    Ok(DensitySolution {
        grid: curve.grid.clone(),
        incident_dirs: incident_dirs.to_vec(),
        phi,
    })
}

// ---------------------------------------------------------------------------
// far field and near field
// ---------------------------------------------------------------------------

/// Far-field pattern samples: `values[(j, l)]` is `u∞(x̂_j; d_l)` for detector
/// `j` and incident direction `l`.
#[derive(Debug, Clone)]
pub struct FarField {
    pub obs_dirs: Vec<[f64; 2]>,
    pub incident_dirs: Vec<[f64; 2]>,
    pub values: DMatrix<Complex64>,
}

impl FarField {
    pub fn value(&self, obs: usize, incident: usize) -> Complex64 {
        self.values[(obs, incident)]
    }

    pub fn n_obs(&self) -> usize {
        self.obs_dirs.len()
    }

    pub fn n_incident(&self) -> usize {
        self.incident_dirs.len()
    }
}

/// Evaluates the far-field pattern of the solved density:
///
/// ```text
/// u∞(x̂) = e^{-iπ/4}/√(8πk) · ∫ (k ν·x̂ + η) e^{-ik x̂·x(τ)} φ(τ) |x'(τ)| dτ,
/// ```
///
/// computed with the trapezoid rule; `(k ν·x̂ + η)|x'|` is evaluated as
/// `k (x₂', −x₁')·x̂ + η|x'|`, which stays well-defined at a corner node.
pub fn far_field(
    density: &DensitySolution,
    curve: &BoundaryCurve,
    k: f64,
    eta: f64,
    obs_dirs: &[[f64; 2]],
) -> Result<FarField> {
    check_unit_dirs(obs_dirs, "observation")?;
    if density.grid != curve.grid {
        return Err(Error::Config(
            "density and curve were sampled on different grids".into(),
        ));
    }
    let n = curve.n_points();
    let h = TAU / n as f64;
    let prefactor = Complex64::from_polar(h / (8.0 * PI * k).sqrt(), -FRAC_PI_4);
    let mut values = DMatrix::<Complex64>::zeros(obs_dirs.len(), density.phi.len());
    let mut kernel_row = vec![Complex64::new(0.0, 0.0); n];
    for (jm, xh) in obs_dirs.iter().enumerate() {
        for i in 0..n {
            let x = curve.points[i];
            let tan = curve.tangents[i];
            let weight = k * (tan[1] * xh[0] - tan[0] * xh[1]) + eta * curve.jacobian[i];
            let phase = -k * (xh[0] * x[0] + xh[1] * x[1]);
            kernel_row[i] = weight * Complex64::new(phase.cos(), phase.sin());
        }
        for (l, phi) in density.phi.iter().enumerate() {
            let sum: Complex64 = kernel_row.iter().zip(phi).map(|(kern, ph)| kern * ph).sum();
            values[(jm, l)] = prefactor * sum;
        }
    }
    Ok(FarField {
        obs_dirs: obs_dirs.to_vec(),
        incident_dirs: density.incident_dirs.clone(),
        values,
    })
}

/// Evaluates the scattered field at exterior points:
/// `u^s(p) = ∫ [∂Φ/∂ν(p, x(τ)) − iη Φ(p, x(τ))] φ(τ) |x'(τ)| dτ`.
///
/// Points closer to the boundary than one grid spacing of arclength
/// (`h · max|x'|`) are rejected with a domain error — the plain trapezoid
/// quadrature degrades there.
///
/// Returns `fields[l][p]` for incident direction `l` and point `p`.
pub fn eval_scattered_field(
    density: &DensitySolution,
    curve: &BoundaryCurve,
    k: f64,
    eta: f64,
    points: &[[f64; 2]],
) -> Result<Vec<Vec<Complex64>>> {
    if density.grid != curve.grid {
        return Err(Error::Config(
            "density and curve were sampled on different grids".into(),
        ));
    }
    let n = curve.n_points();
    let h = TAU / n as f64;
    let min_dist = h * curve.max_jacobian();
    for (pi, p) in points.iter().enumerate() {
        let closest = curve
            .points
            .iter()
            .map(|x| (p[0] - x[0]).hypot(p[1] - x[1]))
            .fold(f64::INFINITY, f64::min);
        if closest <= min_dist {
            return Err(Error::Domain(format!(
                "evaluation point {pi} at ({}, {}) is within one grid spacing of \
                 arclength ({min_dist:.3e}) of the boundary; refine the grid or move \
                 the point away",
                p[0], p[1]
            )));
        }
    }
    let mut fields = Vec::with_capacity(density.phi.len());
    for phi in &density.phi {
        let mut row = Vec::with_capacity(points.len());
        for p in points {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let x = curve.points[i];
                let tan = curve.tangents[i];
                let dx = [p[0] - x[0], p[1] - x[1]];
                let r = dx[0].hypot(dx[1]);
                let z = k * r;
                // ∂Φ/∂ν(x̃)|x'| = (ik/4) H₁(kr) (p−x)·(x₂',−x₁') / r
                let dterm = dx[0] * tan[1] - dx[1] * tan[0];
                let dlayer = Complex64::new(0.0, 0.25 * k) * special::hankel1(1, z) * (dterm / r);
                // Φ|x'| = (i/4) H₀(kr) |x'|
                let slayer = Complex64::new(0.0, 0.25) * special::hankel1(0, z) * curve.jacobian[i];
                acc += (dlayer - Complex64::new(0.0, eta) * slayer) * phi[i];
            }
            row.push(h * acc);
        }
        fields.push(row);
    }
    Ok(fields)
}

// ---------------------------------------------------------------------------
// intensity and the composed forward operator
// ---------------------------------------------------------------------------

/// Poisson intensities `λ_j ≥ 0`, detectors fastest, incident directions
/// concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityVector {
    pub values: Vec<f64>,
}

impl IntensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Numerical(format!(
                "intensity entry {i} is {}; intensities must be non-negative and finite",
                values[i]
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Photon-count intensities `λ_{l,j} = τ·|u∞(x̂_j; d_l)|² + e_j`, flattened
/// with detectors varying fastest.
pub fn intensity(far: &FarField, tau: f64, shift: &[f64]) -> Result<IntensityVector> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Config(format!(
            "exposure time tau must be positive, got {tau}"
        )));
    }
    if shift.len() != far.n_obs() {
        return Err(Error::Config(format!(
            "shift has {} entries for {} detectors",
            shift.len(),
            far.n_obs()
        )));
    }
    if let Some(i) = shift.iter().position(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Config(format!(
            "shift entry {i} is {}; shifts must be non-negative",
            shift[i]
        )));
    }
    let mut values = Vec::with_capacity(far.n_obs() * far.n_incident());
    for l in 0..far.n_incident() {
        for j in 0..far.n_obs() {
            values.push(tau * far.value(j, l).norm_sqr() + shift[j]);
        }
    }
    IntensityVector::new(values)
}

/// Assembles, solves, and radiates a boundary curve under the given
/// measurement setup.
pub fn solve_far_field(curve: &BoundaryCurve, map: &FarFieldMap) -> Result<FarField> {
    let a = assemble_cfie(curve, map.k(), map.eta())?;
    let density = solve_densities(&a, curve, map.k(), map.incident_dirs())?;
    far_field(&density, curve, map.k(), map.eta(), map.obs_dirs())
}

/// The full forward operator: latent field → positivity map → boundary →
/// CFIE solve → far field → Poisson intensities.
pub fn forward_operator(
    r: &LatentField,
    map: &FarFieldMap,
    positivity: &PositivityMap,
) -> Result<IntensityVector> {
    let radial = positivity.apply(r)?;
    let curve = radial_to_boundary(&radial);
    let far = solve_far_field(&curve, map)?;
    intensity(&far, map.tau(), map.shift())
}

// ---------------------------------------------------------------------------
// analytic circle reference
// ---------------------------------------------------------------------------

/// Analytic far-field pattern of a sound-soft circle of radius `radius`
/// centered at the origin, from the Fourier–Bessel series
///
/// ```text
/// u∞(x̂) = −√(2/(πk)) e^{−iπ/4} [a₀ + 2 Σ_{n≥1} aₙ cos(n(θ − θ_d))],
/// aₙ = Jₙ(kR)/H¹ₙ(kR),
/// ```
///
/// truncated once the coefficients hit machine precision.
pub fn circle_far_field(
    radius: f64,
    k: f64,
    incident: [f64; 2],
    obs_dirs: &[[f64; 2]],
) -> Vec<Complex64> {
    let kr = k * radius;
    let theta_d = incident[1].atan2(incident[0]);
    let coeffs = circle_coefficients(kr);
    let prefactor = Complex64::from_polar((2.0 / (PI * k)).sqrt(), -FRAC_PI_4);
    obs_dirs
        .iter()
        .map(|xh| {
            let delta = xh[1].atan2(xh[0]) - theta_d;
            let mut sum = coeffs[0];
            for (n, a) in coeffs.iter().enumerate().skip(1) {
                sum += 2.0 * a * (n as f64 * delta).cos();
            }
            -prefactor * sum
        })
        .collect()
}

/// Analytic scattered field of the sound-soft circle at exterior points,
/// from `u^s(x) = −Σₙ iⁿ aₙ Hₙ(k|x|) e^{in(θ_x − θ_d)}` (full signed sum).
/// Pairing ±n leaves the iⁿ factor intact — `H₋ₙ`'s `(−1)ⁿ` turns `i⁻ⁿ` into
/// `iⁿ` — giving `−[a₀H₀ + 2 Σ_{n≥1} iⁿ aₙ Hₙ(k|x|) cos(nΔ)]`.
pub fn circle_scattered_field(
    radius: f64,
    k: f64,
    incident: [f64; 2],
    points: &[[f64; 2]],
) -> Vec<Complex64> {
    const I_POW: [Complex64; 4] = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let kr = k * radius;
    let theta_d = incident[1].atan2(incident[0]);
    let coeffs = circle_coefficients(kr);
    points
        .iter()
        .map(|p| {
            let rho = p[0].hypot(p[1]);
            let theta = p[1].atan2(p[0]);
            let mut sum = coeffs[0] * special::hankel1(0, k * rho);
            for (n, a) in coeffs.iter().enumerate().skip(1) {
                let delta = n as f64 * (theta - theta_d);
                sum += 2.0 * delta.cos() * I_POW[n % 4] * a * special::hankel1(n as i32, k * rho);
            }
            -sum
        })
        .collect()
}

/// Mie coefficients `aₙ = Jₙ(kR)/H¹ₙ(kR)` up to machine-precision truncation.
fn circle_coefficients(kr: f64) -> Vec<Complex64> {
    let mut coeffs = Vec::new();
    let mut n = 0;
    loop {
        let a = Complex64::new(special::bessel_j(n, kr), 0.0) / special::hankel1(n, kr);
        coeffs.push(a);
        if n as f64 > kr && a.norm() < 1e-18 {
            break;
        }
        n += 1;
        if n > 300 {
            break;
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
