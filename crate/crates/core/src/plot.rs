//! Static SVG rendering of a fit: data points, fitted curve and, optionally,
//! one panel with the centred contribution of each wave.

use std::f64::consts::TAU;
use std::fmt::Write;

use crate::error::{FmmError, Result};
use crate::estimation::FitResult;
use crate::io::TimeSeries;

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN: f64 = 48.0;
/// Points on the dense grid used for curves.
const CURVE_POINTS: usize = 512;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlotOptions {
    /// Add a panel with one curve per wave.
    pub components: bool,
}

struct Panel {
    top: f64,
    y_range: (f64, f64),
}

impl Panel {
    fn new(top: f64, values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        Panel {
            top,
            y_range: (lo - pad, hi + pad),
        }
    }

    fn x(&self, t: f64) -> f64 {
        MARGIN + t / TAU * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.top + PANEL_HEIGHT - MARGIN - (v - lo) / (hi - lo) * (PANEL_HEIGHT - 2.0 * MARGIN)
    }

    fn frame(&self, svg: &mut String, title: &str) {
        let (x0, x1) = (MARGIN, WIDTH - MARGIN);
        let (y0, y1) = (self.top + MARGIN, self.top + PANEL_HEIGHT - MARGIN);
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{title}</text>"#,
            WIDTH / 2.0,
            self.top + MARGIN - 12.0
        );
        for (k, label) in ["0", "π/2", "π", "3π/2", "2π"].iter().enumerate() {
            let x = self.x(k as f64 * TAU / 4.0);
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{label}</text>"#,
                y1 + 16.0
            );
        }
        let (lo, hi) = self.y_range;
        for v in [lo, (lo + hi) / 2.0, hi] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.3}</text>"#,
                x0 - 6.0,
                self.y(v) + 4.0
            );
        }
    }

    fn polyline(&self, svg: &mut String, t: &[f64], v: &[f64], colour: &str, class: &str) {
        let points: Vec<String> = t
            .iter()
            .zip(v)
            .map(|(&ti, &vi)| format!("{:.2},{:.2}", self.x(ti), self.y(vi)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="{class}" fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
    }
}

/// Renders the fit as an SVG document. `data` must have the fit's time points.
pub fn render_svg(result: &FitResult, data: &TimeSeries, opts: PlotOptions) -> Result<String> {
    if data.len() != result.time_points.len() {
        return Err(FmmError::format(
            None,
            format!(
                "data has {} points but the fit has {}",
                data.len(),
                result.time_points.len()
            ),
        ));
    }
    let model = &result.model;
    let grid: Vec<f64> = (0..CURVE_POINTS)
        .map(|i| TAU * i as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    let curve = model.values(&grid);

    let panels = if opts.components { 2.0 } else { 1.0 };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.0}" font-family="sans-serif">"#,
        panels * PANEL_HEIGHT,
        panels * PANEL_HEIGHT
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let main = Panel::new(0.0, data.values().iter().chain(&curve).copied());
    main.frame(&mut svg, &format!("FMM fit (R² = {:.4})", result.r2_total));
    for (&t, &v) in data.time_points().iter().zip(data.values()) {
        let _ = writeln!(
            svg,
            r##"<circle class="data" cx="{:.2}" cy="{:.2}" r="2.5" fill="#777"/>"##,
            main.x(t),
            main.y(v)
        );
    }
    main.polyline(&mut svg, &grid, &curve, PALETTE[0], "fit");

    if opts.components {
        let waves: Vec<Vec<f64>> = (0..model.order())
            .map(|j| model.component_values(j, &grid))
            .collect();
        let panel = Panel::new(PANEL_HEIGHT, waves.iter().flatten().copied());
        panel.frame(&mut svg, "Components");
        for (j, w) in waves.iter().enumerate() {
            let colour = PALETTE[j % PALETTE.len()];
            panel.polyline(&mut svg, &grid, w, colour, "component");
            let (x, y) = (
                WIDTH - MARGIN - 70.0,
                PANEL_HEIGHT + MARGIN + 16.0 + 16.0 * j as f64,
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"#,
                x - 24.0,
                y - 4.0,
                x - 6.0,
                y - 4.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{y:.2}" font-size="12">Wave {}</text>"#,
                j + 1
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
