//! Boundary-curve geometry: uniform periodic grids, latent fields, the
//! positivity maps taking a latent field to a star-shaped radius, spectral
//! differentiation, boundary curves with the differential data the quadrature
//! needs, a graded parameterization for corners, and the catalog of benchmark
//! obstacles.

use crate::fft;
use crate::special;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

// ---------------------------------------------------------------------------
// periodic grid
// ---------------------------------------------------------------------------

/// Uniform periodic grid `t_i = 2πi/N`, `i = 0..N`, on `[0, 2π)`.
///
/// `N` must be even (spectral differentiation pairs the modes `±m` and needs
/// an unambiguous Nyquist mode) and at least [`PeriodicGrid::MIN_POINTS`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    n_points: usize,
    nodes: Vec<f64>,
}

impl PeriodicGrid {
    /// Smallest useful grid for the trigonometric quadrature.
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < Self::MIN_POINTS || n_points % 2 != 0 {
            return Err(Error::Config(format!(
                "grid size must be an even integer >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        let nodes = (0..n_points)
            .map(|i| TAU * i as f64 / n_points as f64)
            .collect();
        Ok(Self { n_points, nodes })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// The nodes `t_i = 2πi/N` in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Uniform spacing `h = 2π/N`.
    pub fn spacing(&self) -> f64 {
        TAU / self.n_points as f64
    }
}

// ---------------------------------------------------------------------------
// latent field and radial curve
// ---------------------------------------------------------------------------

/// A latent field `r` sampled at the grid nodes — the state the MCMC chain
/// moves in. Values are unconstrained reals (finite).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentField {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

impl LatentField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "latent field has {} values for a grid of {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "latent field value at node {i} is not finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        let values = vec![0.0; grid.n_points()];
        Self { grid, values }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Result<Self> {
        let values = vec![value; grid.n_points()];
        Self::new(grid, values)
    }
}

/// Star-shaped radius samples `q(t_i) > 0` together with the derivative
/// `dq/dt` at the nodes.
///
/// The two fields are consistent in the spectral sense: whenever `q` comes
/// from a trigonometric polynomial that the grid resolves, `q_prime` is its
/// exact derivative. The positivity maps construct `q_prime` by their chain
/// rules from a spectral derivative of the latent field.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialCurve {
    pub grid: PeriodicGrid,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
}

impl RadialCurve {
    pub fn new(grid: PeriodicGrid, q: Vec<f64>, q_prime: Vec<f64>) -> Result<Self> {
        if q.len() != grid.n_points() || q_prime.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "radial curve needs {} radii and derivatives, got {} and {}",
                grid.n_points(),
                q.len(),
                q_prime.len()
            )));
        }
        if let Some(i) = q.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!(
                "radius at node {i} is {}; radii must be positive and finite",
                q[i]
            )));
        }
        if let Some(i) = q_prime.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "radius derivative at node {i} is not finite"
            )));
        }
        Ok(Self { grid, q, q_prime })
    }

    /// Builds the curve from radii alone, differentiating spectrally.
    pub fn from_radii(grid: PeriodicGrid, q: Vec<f64>) -> Result<Self> {
        let q_prime = spectral_derivative(&q)?;
        Self::new(grid, q, q_prime)
    }
}

// ---------------------------------------------------------------------------
// spectral differentiation
// ---------------------------------------------------------------------------

/// Differentiates periodic samples by FFT: transform, multiply mode `m` by
/// `i·m` (with `m - N` for the upper half and zero for the Nyquist mode, so
/// real input stays real), transform back.
pub fn spectral_derivative(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "spectral differentiation needs an even, positive number of samples, got {n}"
        )));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut buf);
    for (m, value) in buf.iter_mut().enumerate() {
        let wave = if m < n / 2 {
            m as f64
        } else if m == n / 2 {
            0.0
        } else {
            m as f64 - n as f64
        };
        *value *= Complex64::new(0.0, wave);
    }
    fft::inverse(&mut buf);
    Ok(buf.into_iter().map(|z| z.re / n as f64).collect())
}

// ---------------------------------------------------------------------------
// positivity maps
// ---------------------------------------------------------------------------

/// Parameters of the bounded positivity map
/// `q = (a/2)(erf(r) + b)`, which confines radii to the open interval
/// `((a/2)(b-1), (a/2)(b+1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErfMapParams {
    a: f64,
    b: f64,
}

impl ErfMapParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Config(format!(
                "erf map scale a must be positive, got {a}"
            )));
        }
        if !(b.is_finite() && b > 1.0) {
            return Err(Error::Config(format!(
                "erf map offset b must exceed 1 (so radii stay positive), got {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The open interval of attainable radii, `((a/2)(b-1), (a/2)(b+1))`.
    pub fn radius_bounds(&self) -> (f64, f64) {
        (0.5 * self.a * (self.b - 1.0), 0.5 * self.a * (self.b + 1.0))
    }
}

/// Latent values above this make `exp` meaningless in f64 arithmetic; the
/// exp map reports a divergent chain state instead of overflowing.
pub const EXP_MAP_MAX_LATENT: f64 = 700.0;

/// Unbounded positivity map `q = exp(r)`, with `q' = q · r'` by the chain
/// rule (`r'` spectral).
pub fn latent_to_radius_exp(r: &LatentField) -> Result<RadialCurve> {
    if let Some(i) = r.values.iter().position(|&v| v > EXP_MAP_MAX_LATENT) {
        return Err(Error::Domain(format!(
            "latent value {} at node {i} exceeds {EXP_MAP_MAX_LATENT}; exp would overflow \
             (divergent chain state)",
            r.values[i]
        )));
    }
    let r_prime = spectral_derivative(&r.values)?;
    let q: Vec<f64> = r.values.iter().map(|&v| v.exp()).collect();
    let q_prime: Vec<f64> = q.iter().zip(&r_prime).map(|(&q, &dr)| q * dr).collect();
    RadialCurve::new(r.grid.clone(), q, q_prime)
}

/// Bounded positivity map `q = (a/2)(erf(r) + b)`, with
/// `q' = (a/√π) · r' · exp(-r²)`.
pub fn latent_to_radius_erf(r: &LatentField, params: &ErfMapParams) -> Result<RadialCurve> {
    // erf saturates to ±1 in f64 for |r| ≳ 6, which would park radii exactly
    // on the interval endpoints; nudge such radii one ulp inside so the
    // strict-bound invariant survives rounding.
    let (lo, hi) = params.radius_bounds();
    let (lo_in, hi_in) = (lo.next_up(), hi.next_down());
    let r_prime = spectral_derivative(&r.values)?;
    let a = params.a;
    let b = params.b;
    let q: Vec<f64> = r
        .values
        .iter()
        .map(|&v| (0.5 * a * (special::erf(v) + b)).clamp(lo_in, hi_in))
        .collect();
    let c = a / PI.sqrt();
    let q_prime: Vec<f64> = r
        .values
        .iter()
        .zip(&r_prime)
        .map(|(&v, &dr)| c * dr * (-v * v).exp())
        .collect();
    RadialCurve::new(r.grid.clone(), q, q_prime)
}

/// The positivity map used to turn latent fields into radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityMap {
    /// `q = exp(r)` — unbounded radii.
    Exp,
    /// `q = (a/2)(erf(r) + b)` — radii confined to a known open interval.
    Erf(ErfMapParams),
}

impl PositivityMap {
    pub fn apply(&self, r: &LatentField) -> Result<RadialCurve> {
        match self {
            PositivityMap::Exp => latent_to_radius_exp(r),
            PositivityMap::Erf(params) => latent_to_radius_erf(r, params),
        }
    }

    /// Range of attainable radii: `(0, ∞)` for exp, the open erf interval otherwise.
    pub fn radius_bounds(&self) -> (f64, f64) {
        match self {
            PositivityMap::Exp => (0.0, f64::INFINITY),
            PositivityMap::Erf(params) => params.radius_bounds(),
        }
    }
}

// ---------------------------------------------------------------------------
// boundary curves
// ---------------------------------------------------------------------------

/// A closed boundary curve sampled at the grid nodes, carrying the
/// differential data the Nyström quadrature consumes.
///
/// Invariants (checked on construction): all fields are finite and
/// node-aligned; the Jacobian `|x'(t_i)|` is strictly positive except at a
/// marked corner node, where a graded parameterization pins it to zero so the
/// corner carries no quadrature weight; normals are unit length (1e-12) and
/// point into the exterior for these counterclockwise curves.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub grid: PeriodicGrid,
    /// Node positions `x(t_i)`.
    pub points: Vec<[f64; 2]>,
    /// Unnormalized tangents `x'(t_i)`.
    pub tangents: Vec<[f64; 2]>,
    /// Parameterization speed `|x'(t_i)|`.
    pub jacobian: Vec<f64>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 2]>,
    /// Signed curvature at the nodes (positive on convex arcs of these
    /// counterclockwise curves); enters the double-layer quadrature diagonal.
    pub curvature: Vec<f64>,
    /// Corner node of a piecewise-smooth curve, if any.
    pub corner: Option<usize>,
}

impl BoundaryCurve {
    pub fn new(
        grid: PeriodicGrid,
        points: Vec<[f64; 2]>,
        tangents: Vec<[f64; 2]>,
        jacobian: Vec<f64>,
        normals: Vec<[f64; 2]>,
        curvature: Vec<f64>,
        corner: Option<usize>,
    ) -> Result<Self> {
        let n = grid.n_points();
        if points.len() != n
            || tangents.len() != n
            || jacobian.len() != n
            || normals.len() != n
            || curvature.len() != n
        {
            return Err(Error::Config(
                "boundary curve fields must all have one entry per grid node".into(),
            ));
        }
        if let Some(i) = corner {
            if i >= n {
                return Err(Error::Config(format!(
                    "corner index {i} out of range for {n} nodes"
                )));
            }
        }
        for i in 0..n {
            let finite = points[i]
                .iter()
                .chain(&tangents[i])
                .chain(&normals[i])
                .all(|v| v.is_finite())
                && jacobian[i].is_finite()
                && curvature[i].is_finite();
            if !finite {
                return Err(Error::Numerical(format!(
                    "boundary curve has a non-finite field at node {i}"
                )));
            }
            if corner == Some(i) {
                if jacobian[i] < 0.0 {
                    return Err(Error::Domain(format!(
                        "corner node {i} has negative Jacobian {}",
                        jacobian[i]
                    )));
                }
            } else if jacobian[i] <= 0.0 {
                return Err(Error::Domain(format!(
                    "Jacobian at node {i} is {}; the parameterization must be regular \
                     away from a marked corner",
                    jacobian[i]
                )));
            }
            let nrm = (normals[i][0].powi(2) + normals[i][1].powi(2)).sqrt();
            if (nrm - 1.0).abs() > 1e-12 {
                return Err(Error::Numerical(format!(
                    "normal at node {i} has length {nrm}, expected 1"
                )));
            }
        }
        Ok(Self {
            grid,
            points,
            tangents,
            jacobian,
            normals,
            curvature,
            corner,
        })
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Maximum node Jacobian — one "grid spacing of arclength" is
    /// `spacing() * max_jacobian()`.
    pub fn max_jacobian(&self) -> f64 {
        self.jacobian.iter().cloned().fold(0.0, f64::max)
    }
}

/// Builds the boundary curve of a star-shaped domain from radius samples:
/// `x(t) = q(t)(cos t, sin t)`.
///
/// Curvature uses `κ = (q² + 2q'² − q·q'')/(q² + q'²)^{3/2}` with `q''` the
/// spectral derivative of `q'`. Infallible: the radial-curve invariants
/// (`q > 0`, even grid) make every denominator positive.
pub fn radial_to_boundary(curve: &RadialCurve) -> BoundaryCurve {
    let n = curve.grid.n_points();
    let q_second = spectral_derivative(&curve.q_prime).expect("grid size is even");
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut jacobian = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let t = curve.grid.node(i);
        let (s, c) = t.sin_cos();
        let q = curve.q[i];
        let dq = curve.q_prime[i];
        points.push([q * c, q * s]);
        let tx = dq * c - q * s;
        let ty = dq * s + q * c;
        let jac = tx.hypot(ty);
        tangents.push([tx, ty]);
        jacobian.push(jac);
        normals.push([ty / jac, -tx / jac]);
        curvature.push((q * q + 2.0 * dq * dq - q * q_second[i]) / jac.powi(3));
    }
    BoundaryCurve {
        grid: curve.grid.clone(),
        points,
        tangents,
        jacobian,
        normals,
        curvature,
        corner: None,
    }
}

// ---------------------------------------------------------------------------
// obstacle catalog
// ---------------------------------------------------------------------------

/// The benchmark obstacles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Obstacle {
    /// Star-shaped: `q(t) = 3(cos²t + ¼sin²t)`.
    Peanut,
    /// Non-convex: `x(t) = (cos t + 0.65 cos 2t − 0.65, 1.5 sin t)`.
    Kite,
    /// Piecewise smooth with one corner at `t = 0`:
    /// `x(t) = (−1 + 2 sin(t/2), −sin t)`.
    Drop,
    /// Star-shaped: `q(t) = 1 + 0.3 cos 4t`.
    Cloverleaf,
}

impl Obstacle {
    pub const ALL: [Obstacle; 4] = [
        Obstacle::Peanut,
        Obstacle::Kite,
        Obstacle::Drop,
        Obstacle::Cloverleaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Obstacle::Peanut => "peanut",
            Obstacle::Kite => "kite",
            Obstacle::Drop => "drop",
            Obstacle::Cloverleaf => "cloverleaf",
        }
    }

    /// True for boundaries that are only piecewise smooth (the drop's corner);
    /// these want the graded parameterization.
    pub fn has_corner(self) -> bool {
        matches!(self, Obstacle::Drop)
    }

    /// The radial profile `q(t)` for star-shaped obstacles, `None` otherwise.
    pub fn radius(self, t: f64) -> Option<f64> {
        match self {
            Obstacle::Peanut => {
                let c = t.cos();
                let s = t.sin();
                Some(3.0 * (c * c + 0.25 * s * s))
            }
            Obstacle::Cloverleaf => Some(1.0 + 0.3 * (4.0 * t).cos()),
            Obstacle::Kite | Obstacle::Drop => None,
        }
    }
}

impl fmt::Display for Obstacle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Obstacle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "peanut" => Ok(Obstacle::Peanut),
            "kite" => Ok(Obstacle::Kite),
            "drop" => Ok(Obstacle::Drop),
            "cloverleaf" => Ok(Obstacle::Cloverleaf),
            other => Err(Error::Config(format!(
                "unknown obstacle '{other}'; valid names: peanut, kite, drop, cloverleaf"
            ))),
        }
    }
}

/// Position, velocity, and acceleration of an obstacle's parameterization at
/// parameter `t` (one-sided from above at the drop's corner).
fn obstacle_jet(name: Obstacle, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let (s, c) = t.sin_cos();
    match name {
        Obstacle::Peanut => radial_jet(
            1.875 + 1.125 * (2.0 * t).cos(),
            -2.25 * (2.0 * t).sin(),
            -4.5 * (2.0 * t).cos(),
            s,
            c,
        ),
        Obstacle::Cloverleaf => radial_jet(
            1.0 + 0.3 * (4.0 * t).cos(),
            -1.2 * (4.0 * t).sin(),
            -4.8 * (4.0 * t).cos(),
            s,
            c,
        ),
        Obstacle::Kite => {
            let (s2, c2) = (2.0 * t).sin_cos();
            (
                [c + 0.65 * c2 - 0.65, 1.5 * s],
                [-s - 1.3 * s2, 1.5 * c],
                [-c - 2.6 * c2, -1.5 * s],
            )
        }
        Obstacle::Drop => {
            let (sh, ch) = (0.5 * t).sin_cos();
            ([-1.0 + 2.0 * sh, -s], [ch, -c], [-0.5 * sh, s])
        }
    }
}

/// Jet of `x(t) = q(t)(cos t, sin t)` given `q, q', q''` at `t`.
fn radial_jet(q: f64, dq: f64, ddq: f64, s: f64, c: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    (
        [q * c, q * s],
        [dq * c - q * s, dq * s + q * c],
        [
            ddq * c - 2.0 * dq * s - q * c,
            ddq * s + 2.0 * dq * c - q * s,
        ],
    )
}

/// Samples a catalog obstacle on the grid with its plain parameterization.
///
/// For the drop, node 0 sits on the corner and carries the one-sided (from
/// above) tangent; quadrature on this plain parameterization converges poorly
/// there — use [`obstacle_catalog_graded`] for solving.
pub fn obstacle_catalog(name: Obstacle, grid: &PeriodicGrid) -> BoundaryCurve {
    let n = grid.n_points();
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut jacobian = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let (x, dx, ddx) = obstacle_jet(name, grid.node(i));
        let jac = dx[0].hypot(dx[1]);
        points.push(x);
        tangents.push(dx);
        jacobian.push(jac);
        normals.push([dx[1] / jac, -dx[0] / jac]);
        curvature.push((dx[0] * ddx[1] - dx[1] * ddx[0]) / jac.powi(3));
    }
    let corner = name.has_corner().then_some(0);
    BoundaryCurve {
        grid: grid.clone(),
        points,
        tangents,
        jacobian,
        normals,
        curvature,
        corner,
    }
}

/// The polynomial grading substitution `w(s)` of the given order `p ≥ 2` and
/// its derivative `w'(s)`, for `s ∈ [0, 2π]`.
///
/// `w` maps `[0, 2π]` onto itself with `w(0) = 0`, `w(π) = π`, `w(2π) = 2π`,
/// strictly increasing, and `w'` vanishing to order `p − 1` at both ends —
/// composing a closed curve with `w` crowds quadrature nodes toward the
/// parameter value 0 (a corner, say) and zeroes out its quadrature weight.
pub fn corner_grading(s: f64, order: u32) -> (f64, f64) {
    let p = order as f64;
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= TAU {
        return (TAU, 0.0);
    }
    let ip = order as i32;
    // Kress' cubic blend; clamped at 0 against roundoff near the endpoints.
    let v = |u: f64| -> f64 {
        let w = (PI - u) / PI;
        ((1.0 / p - 0.5) * w * w * w + (u - PI) / (p * PI) + 0.5).max(0.0)
    };
    let dv = |u: f64| -> f64 {
        let w = (PI - u) / PI;
        -3.0 * (1.0 / p - 0.5) * w * w / PI + 1.0 / (p * PI)
    };
    let v1 = v(s);
    let v2 = v(TAU - s);
    let p1 = v1.powi(ip);
    let p2 = v2.powi(ip);
    let denom = p1 + p2;
    let w = TAU * p1 / denom;
    let wp = TAU * p * v1.powi(ip - 1) * v2.powi(ip - 1) * (dv(s) * v2 + v1 * dv(TAU - s))
        / (denom * denom);
    (w, wp)
}

/// Samples a catalog obstacle through the grading substitution
/// `x̃(s) = x(w(s))`, crowding nodes toward `t = 0`.
///
/// Node 0 gets a zero Jacobian (w′(0) = 0), so it drops out of every
/// quadrature sum; for the drop this silences the corner. The node's normal
/// is still recorded: the exterior bisector `(−1, 0)` at the drop's corner and
/// the geometric normal for smooth obstacles. Curvature is parameterization-
/// invariant, so the remaining nodes reuse the plain formulas at `w(s)`.
pub fn obstacle_catalog_graded(
    name: Obstacle,
    grid: &PeriodicGrid,
    order: u32,
) -> Result<BoundaryCurve> {
    if order < 2 {
        return Err(Error::Config(format!(
            "grading order must be at least 2, got {order}"
        )));
    }
    let n = grid.n_points();
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut jacobian = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let (w, wp) = corner_grading(grid.node(i), order);
        let (x, dx, ddx) = obstacle_jet(name, w);
        points.push(x);
        tangents.push([wp * dx[0], wp * dx[1]]);
        let jac_plain = dx[0].hypot(dx[1]);
        jacobian.push(wp * jac_plain);
        if i == 0 && name == Obstacle::Drop {
            // Corner: one-sided normals (−1, ∓1)/√2 average to the exterior
            // bisector.
            normals.push([-1.0, 0.0]);
            curvature.push(0.0);
        } else {
            normals.push([dx[1] / jac_plain, -dx[0] / jac_plain]);
            curvature.push((dx[0] * ddx[1] - dx[1] * ddx[0]) / jac_plain.powi(3));
        }
    }
    BoundaryCurve::new(
        grid.clone(),
        points,
        tangents,
        jacobian,
        normals,
        curvature,
        Some(0),
    )
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
