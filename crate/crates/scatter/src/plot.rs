//! Minimal deterministic SVG plotting for the experiment figures.
//!
//! Two chart kinds cover everything the pipeline emits: [`LineChart`]
//! (values against observation angle or iteration, optionally with a filled
//! band) and [`PlaneChart`] (closed boundary curves drawn with equal axis
//! scales, optionally with a filled annular credible band). Rendering is a
//! pure function of the inputs — identical charts produce byte-identical
//! SVG — and there are no drawing dependencies; the output is plain hand
//! written SVG 1.1.

use crate::{Error, Result};
use std::fmt::Write as _;

/// Fill/stroke palette, cycled per series.
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const BAND_FILL: &str = "#9ecae1";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 58.0;

// ---------------------------------------------------------------------------
// chart inputs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dots,
}

/// One labelled data series.
#[derive(Debug, Clone)]
pub struct Series {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub label: String,
    pub style: Style,
}

impl Series {
    pub fn line(x: Vec<f64>, y: Vec<f64>, label: &str) -> Self {
        Self {
            x,
            y,
            label: label.to_string(),
            style: Style::Line,
        }
    }

    pub fn dots(x: Vec<f64>, y: Vec<f64>, label: &str) -> Self {
        Self {
            x,
            y,
            label: label.to_string(),
            style: Style::Dots,
        }
    }
}

/// A filled vertical band between two curves over a shared abscissa.
#[derive(Debug, Clone)]
pub struct Band {
    pub x: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub label: String,
}

/// Values plotted against a shared horizontal axis.
#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub band: Option<Band>,
}

impl LineChart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            band: None,
        }
    }

    pub fn with_series(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }

    pub fn with_band(mut self, band: Band) -> Self {
        self.band = Some(band);
        self
    }
}

/// A closed curve in the plane (first point is not repeated; the path closes
/// itself).
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    pub points: Vec<[f64; 2]>,
    pub label: String,
    pub dashed: bool,
}

/// The region between two nested closed curves, filled with the even-odd
/// rule — the pointwise credible band around a boundary.
#[derive(Debug, Clone)]
pub struct AnnularBand {
    pub outer: Vec<[f64; 2]>,
    pub inner: Vec<[f64; 2]>,
    pub label: String,
}

/// Closed curves drawn with equal axis scales.
#[derive(Debug, Clone)]
pub struct PlaneChart {
    pub title: String,
    pub curves: Vec<ClosedCurve>,
    pub band: Option<AnnularBand>,
}

impl PlaneChart {
    pub fn new(title: &str) -> Self {
        Self {
            title: title.to_string(),
            curves: Vec::new(),
            band: None,
        }
    }

    pub fn with_curve(mut self, points: Vec<[f64; 2]>, label: &str, dashed: bool) -> Self {
        self.curves.push(ClosedCurve {
            points,
            label: label.to_string(),
            dashed,
        });
        self
    }

    pub fn with_band(mut self, band: AnnularBand) -> Self {
        self.band = Some(band);
        self
    }
}

// ---------------------------------------------------------------------------
// shared drawing helpers
// ---------------------------------------------------------------------------

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name} has no data to plot")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{name} contains non-finite values")));
    }
    Ok(())
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Fixed-precision coordinate formatting keeps the output byte-stable.
fn c(v: f64) -> String {
    format!("{:.2}", v)
}

/// Tick label: up to six decimals with trailing zeros trimmed.
fn tick_label(v: f64) -> String {
    let mut s = format!("{:.6}", v);
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        let drop_dot = s.ends_with('.');
        s.pop();
        if drop_dot {
            break;
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Round-valued tick positions covering `[lo, hi]` with steps of
/// 1, 2, or 5 times a power of ten.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.5 {
        1.0
    } else if norm <= 3.0 {
        2.0
    } else if norm <= 7.0 {
        5.0
    } else {
        10.0
    } * mag;
    let mut t = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    while t <= hi + 1e-9 * span {
        // Snap near-zero ticks so labels don't read "-0".
        ticks.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    ticks
}

/// Pads a degenerate range so the chart never divides by zero.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    } else {
        let pad = (hi - lo) * 0.04;
        (lo - pad, hi + pad)
    }
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(out: &mut String) {
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = write!(
        out,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##
    );
}

fn draw_title(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r##"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15" fill="#222">{}</text>"##,
        c(WIDTH / 2.0),
        esc(title)
    );
}

fn draw_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = write!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444" stroke-width="1"/>"##,
        c(x0),
        c(y0),
        c(x1),
        c(y0)
    );
    let _ = write!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444" stroke-width="1"/>"##,
        c(x0),
        c(y0),
        c(x0),
        c(y1)
    );
    for t in nice_ticks(frame.x_lo, frame.x_hi, 6) {
        let sx = frame.sx(t);
        let _ = write!(
            out,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#444" stroke-width="1"/>"##,
            c(sx),
            c(y0),
            c(y0 + 5.0)
        );
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11" fill="#333">{}</text>"##,
            c(sx),
            c(y0 + 18.0),
            tick_label(t)
        );
    }
    for t in nice_ticks(frame.y_lo, frame.y_hi, 6) {
        let sy = frame.sy(t);
        let _ = write!(
            out,
            r##"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="#444" stroke-width="1"/>"##,
            c(sy),
            c(x0 - 5.0),
            c(x0)
        );
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11" fill="#333">{}</text>"##,
            c(x0 - 8.0),
            c(sy + 4.0),
            tick_label(t)
        );
        let _ = write!(
            out,
            r##"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="#ddd" stroke-width="0.5"/>"##,
            c(sy),
            c(x0),
            c(x1)
        );
    }
    let _ = write!(
        out,
        r##"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" fill="#222">{}</text>"##,
        c((x0 + x1) / 2.0),
        c(HEIGHT - 14.0),
        esc(x_label)
    );
    let _ = write!(
        out,
        r##"<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" fill="#222" transform="rotate(-90 18 {})">{}</text>"##,
        c((y0 + y1) / 2.0),
        c((y0 + y1) / 2.0),
        esc(y_label)
    );
}

struct LegendEntry {
    label: String,
    color: String,
    filled: bool,
    dashed: bool,
}

fn draw_legend(out: &mut String, entries: &[LegendEntry]) {
    let x = WIDTH - MARGIN_R - 180.0;
    let mut y = MARGIN_T + 10.0;
    for e in entries {
        if e.filled {
            let _ = write!(
                out,
                r##"<rect x="{}" y="{}" width="22" height="10" fill="{}" fill-opacity="0.5"/>"##,
                c(x),
                c(y - 8.0),
                e.color
            );
        } else {
            let dash = if e.dashed {
                r##" stroke-dasharray="6 4""##
            } else {
                ""
            };
            let _ = write!(
                out,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"{}/>"##,
                c(x),
                c(y - 3.0),
                c(x + 22.0),
                c(y - 3.0),
                e.color,
                dash
            );
        }
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#222">{}</text>"##,
            c(x + 28.0),
            c(y),
            esc(&e.label)
        );
        y += 16.0;
    }
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

impl LineChart {
    pub fn render(&self) -> Result<String> {
        if self.series.is_empty() && self.band.is_none() {
            return Err(Error::Config("chart has nothing to draw".into()));
        }
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            check_finite(&format!("series '{}' x", s.label), &s.x)?;
            check_finite(&format!("series '{}' y", s.label), &s.y)?;
            if s.x.len() != s.y.len() {
                return Err(Error::Config(format!(
                    "series '{}' has {} x values but {} y values",
                    s.label,
                    s.x.len(),
                    s.y.len()
                )));
            }
            xs.extend_from_slice(&s.x);
            ys.extend_from_slice(&s.y);
        }
        if let Some(b) = &self.band {
            check_finite("band x", &b.x)?;
            check_finite("band lo", &b.lo)?;
            check_finite("band hi", &b.hi)?;
            if b.lo.len() != b.x.len() || b.hi.len() != b.x.len() {
                return Err(Error::Config(
                    "band edge lengths disagree with its x".into(),
                ));
            }
            xs.extend_from_slice(&b.x);
            ys.extend_from_slice(&b.lo);
            ys.extend_from_slice(&b.hi);
        }
        let (x_lo, x_hi) = padded(
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let (y_lo, y_hi) = padded(
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let frame = Frame {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        };

        let mut out = String::new();
        svg_open(&mut out);
        draw_title(&mut out, &self.title);
        draw_axes(&mut out, &frame, &self.x_label, &self.y_label);

        let mut legend = Vec::new();
        if let Some(b) = &self.band {
            let mut d = String::from("M");
            for (x, hi) in b.x.iter().zip(&b.hi) {
                let _ = write!(d, " {} {}", c(frame.sx(*x)), c(frame.sy(*hi)));
            }
            for (x, lo) in b.x.iter().zip(&b.lo).rev() {
                let _ = write!(d, " L {} {}", c(frame.sx(*x)), c(frame.sy(*lo)));
            }
            d.push_str(" Z");
            let _ = write!(
                out,
                r##"<path d="{d}" fill="{BAND_FILL}" fill-opacity="0.5" stroke="none"/>"##
            );
            legend.push(LegendEntry {
                label: b.label.clone(),
                color: BAND_FILL.to_string(),
                filled: true,
                dashed: false,
            });
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            match s.style {
                Style::Line => {
                    let mut points = String::new();
                    for (x, y) in s.x.iter().zip(&s.y) {
                        let _ = write!(points, "{},{} ", c(frame.sx(*x)), c(frame.sy(*y)));
                    }
                    let _ = write!(
                        out,
                        r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"/>"##,
                        points.trim_end(),
                        color
                    );
                }
                Style::Dots => {
                    for (x, y) in s.x.iter().zip(&s.y) {
                        let _ = write!(
                            out,
                            r##"<circle cx="{}" cy="{}" r="2.2" fill="{}"/>"##,
                            c(frame.sx(*x)),
                            c(frame.sy(*y)),
                            color
                        );
                    }
                }
            }
            legend.push(LegendEntry {
                label: s.label.clone(),
                color: color.to_string(),
                filled: false,
                dashed: false,
            });
        }
        draw_legend(&mut out, &legend);
        out.push_str("</svg>\n");
        Ok(out)
    }
}

impl PlaneChart {
    pub fn render(&self) -> Result<String> {
        if self.curves.is_empty() && self.band.is_none() {
            return Err(Error::Config("chart has nothing to draw".into()));
        }
        let mut all: Vec<[f64; 2]> = Vec::new();
        for curve in &self.curves {
            let flat: Vec<f64> = curve.points.iter().flatten().cloned().collect();
            check_finite(&format!("curve '{}'", curve.label), &flat)?;
            all.extend_from_slice(&curve.points);
        }
        if let Some(b) = &self.band {
            for (name, ring) in [("outer band edge", &b.outer), ("inner band edge", &b.inner)] {
                let flat: Vec<f64> = ring.iter().flatten().cloned().collect();
                check_finite(name, &flat)?;
            }
            all.extend_from_slice(&b.outer);
            all.extend_from_slice(&b.inner);
        }
        let (mut x_lo, mut x_hi) = padded(
            all.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
            all.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max),
        );
        let (mut y_lo, mut y_hi) = padded(
            all.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min),
            all.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max),
        );
        // Equal scales: widen the narrow axis around its center.
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let unit_x = (x_hi - x_lo) / plot_w;
        let unit_y = (y_hi - y_lo) / plot_h;
        let unit = unit_x.max(unit_y);
        let (cx, cy) = ((x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0);
        x_lo = cx - unit * plot_w / 2.0;
        x_hi = cx + unit * plot_w / 2.0;
        y_lo = cy - unit * plot_h / 2.0;
        y_hi = cy + unit * plot_h / 2.0;
        let frame = Frame {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        };

        let mut out = String::new();
        svg_open(&mut out);
        draw_title(&mut out, &self.title);
        draw_axes(&mut out, &frame, "x1", "x2");

        let ring_path = |points: &[[f64; 2]]| {
            let mut d = String::from("M");
            for p in points {
                let _ = write!(d, " {} {}", c(frame.sx(p[0])), c(frame.sy(p[1])));
            }
            d.push_str(" Z");
            d
        };

        let mut legend = Vec::new();
        if let Some(b) = &self.band {
            let d = format!("{} {}", ring_path(&b.outer), ring_path(&b.inner));
            let _ = write!(
                out,
                r##"<path d="{d}" fill="{BAND_FILL}" fill-opacity="0.5" fill-rule="evenodd" stroke="none"/>"##
            );
            legend.push(LegendEntry {
                label: b.label.clone(),
                color: BAND_FILL.to_string(),
                filled: true,
                dashed: false,
            });
        }
        for (i, curve) in self.curves.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let dash = if curve.dashed {
                r##" stroke-dasharray="6 4""##
            } else {
                ""
            };
            let _ = write!(
                out,
                r##"<path d="{}" fill="none" stroke="{}" stroke-width="1.8"{}/>"##,
                ring_path(&curve.points),
                color,
                dash
            );
            legend.push(LegendEntry {
                label: curve.label.clone(),
                color: color.to_string(),
                filled: false,
                dashed: curve.dashed,
            });
        }
        draw_legend(&mut out, &legend);
        out.push_str("</svg>\n");
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
