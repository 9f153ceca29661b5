//! The three standard figures for an experiment: the synthetic data, the
//! reconstructed boundary, and the potential trace.

use crate::data::DataFile;
use crate::error::Result;
use scatter::plot::{AnnularBand, LineChart, PlaneChart, Series};
use std::f64::consts::TAU;

/// Detector angles in `[0, 2π)`, in file order.
fn detector_angles(obs_dirs: &[[f64; 2]]) -> Vec<f64> {
    obs_dirs
        .iter()
        .map(|d| d[1].atan2(d[0]).rem_euclid(TAU))
        .collect()
}

/// Counts (dots) over exact intensities (lines) per incident direction.
pub fn data_figure(data: &DataFile) -> Result<String> {
    let m = data.obs_dirs.len();
    let angles = detector_angles(&data.obs_dirs);
    let many = data.incident_dirs.len() > 1;
    let mut chart = LineChart::new(
        &format!("synthetic data: {}", data.obstacle),
        "detector angle",
        "counts",
    );
    for (i, _) in data.incident_dirs.iter().enumerate() {
        let lambda = data.lambda[i * m..(i + 1) * m].to_vec();
        let counts = data.y[i * m..(i + 1) * m]
            .iter()
            .map(|&y| y as f64)
            .collect();
        let (l_label, c_label) = if many {
            (format!("intensity {i}"), format!("counts {i}"))
        } else {
            ("intensity".to_string(), "counts".to_string())
        };
        chart = chart
            .with_series(Series::line(angles.clone(), lambda, &l_label))
            .with_series(Series::dots(angles.clone(), counts, &c_label));
    }
    Ok(chart.render()?)
}

/// Closed polygon through `(q_i cos t_i, q_i sin t_i)`.
fn polygon(angles: &[f64], q: &[f64]) -> Vec<[f64; 2]> {
    angles
        .iter()
        .zip(q)
        .map(|(&t, &r)| [r * t.cos(), r * t.sin()])
        .collect()
}

/// Posterior mean boundary with its pointwise 95% band and the truth.
pub fn reconstruction_figure(
    obstacle: &str,
    angles: &[f64],
    mean_q: &[f64],
    band_lo: &[f64],
    band_hi: &[f64],
    truth_points: &[[f64; 2]],
) -> Result<String> {
    let chart = PlaneChart::new(&format!("reconstruction: {obstacle}"))
        .with_band(AnnularBand {
            outer: polygon(angles, band_hi),
            inner: polygon(angles, band_lo),
            label: "95% band".to_string(),
        })
        .with_curve(polygon(angles, mean_q), "posterior mean", false)
        .with_curve(truth_points.to_vec(), "truth", true);
    Ok(chart.render()?)
}

/// Potential value against iteration number for a (possibly decimated) trace.
pub fn trace_figure(trace: &[f64], stride: usize) -> Result<String> {
    let iters: Vec<f64> = (0..trace.len())
        .map(|i| ((i * stride) + 1) as f64)
        .collect();
    let chart = LineChart::new("potential trace", "iteration", "potential")
        .with_series(Series::line(iters, trace.to_vec(), "potential"));
    Ok(chart.render()?)
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use scatter::curve::Obstacle;
    use scatter::forward::FarFieldMap;

    #[test]
    fn figures_render_for_a_small_synthetic_set() {
        let map = FarFieldMap::new(1.0, vec![[1.0, 0.0], [0.0, 1.0]], 8, 100.0)
            .unwrap()
            .with_shift(vec![1.0; 8])
            .unwrap();
        let data = DataFile::synthesize(Obstacle::Peanut, &map, 2).unwrap();
        let svg = data_figure(&data).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("intensity 0") && svg.contains("counts 1"));

        let angles: Vec<f64> = (0..16).map(|i| TAU * i as f64 / 16.0).collect();
        let q: Vec<f64> = angles.iter().map(|t| 2.0 + 0.1 * t.sin()).collect();
        let lo: Vec<f64> = q.iter().map(|v| v - 0.2).collect();
        let hi: Vec<f64> = q.iter().map(|v| v + 0.2).collect();
        let svg =
            reconstruction_figure("peanut", &angles, &q, &lo, &hi, &data.truth.points).unwrap();
        assert!(svg.contains("posterior mean") && svg.contains("truth"));

        let trace: Vec<f64> = (0..500).map(|i| 100.0 / (1.0 + i as f64)).collect();
        let svg = trace_figure(&trace, 10).unwrap();
        assert!(svg.contains("potential trace"));
    }

    #[test]
    fn detector_angles_are_monotone_for_equispaced_directions() {
        let dirs = FarFieldMap::equispaced_directions(12);
        let angles = detector_angles(&dirs);
        for w in angles.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(angles[0].abs() < 1e-12);
    }
}
