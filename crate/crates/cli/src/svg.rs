//! Minimal self-contained SVG plots: no scripts, fonts or external links.

use std::fmt::Write;

use umbilic_core::CircleSample;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Plot in chart coordinates over `[x_min, x_max, y_min, y_max]`, y up.
pub struct Plot {
    window: [f64; 4],
    width: f64,
    height: f64,
    body: String,
}

impl Plot {
    /// `equal` keeps one unit the same length on both axes.
    pub fn new(window: [f64; 4], equal: bool) -> Self {
        let (dx, dy) = (window[1] - window[0], window[3] - window[2]);
        let (width, height) = if equal && dx > dy {
            (SIZE, SIZE * dy / dx)
        } else if equal {
            (SIZE * dx / dy, SIZE)
        } else {
            (SIZE, SIZE * 0.5)
        };
        Self {
            window,
            width,
            height,
            body: String::new(),
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        (
            MARGIN + (p[0] - x0) / (x1 - x0) * self.width,
            MARGIN + (y1 - p[1]) / (y1 - y0) * self.height,
        )
    }

    fn scale(&self) -> f64 {
        self.width / (self.window[1] - self.window[0])
    }

    pub fn polyline(&mut self, pts: &[[f64; 2]], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "" } else { " " });
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{d}" fill="none" stroke="{color}" stroke-width="{width}"/>"#
        );
    }

    pub fn circle(&mut self, center: [f64; 2], radius: f64, color: &str) {
        let (x, y) = self.map(center);
        let r = radius * self.scale();
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
    }

    pub fn dot(&mut self, p: [f64; 2], radius_px: f64, color: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius_px}" fill="{color}"/>"#
        );
    }

    pub fn text(&mut self, p: [f64; 2], label: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="12" font-family="sans-serif">{}</text>"#,
            escape(label)
        );
    }

    pub fn finish(self, title: &str) -> String {
        let (w, h) = (self.width + 2.0 * MARGIN, self.height + 2.0 * MARGIN);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            self.width, self.height
        );
        out.push_str(&self.body);
        let [x0, x1, y0, y1] = self.window;
        let _ = writeln!(
            out,
            r#"<text x="{MARGIN}" y="{:.2}" font-size="11" font-family="sans-serif">x [{x0}, {x1}]  y [{y0}, {y1}]</text>"#,
            h - 12.0
        );
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Splits at wraps of the line field so jumps between +-1/4 show as gaps.
fn psi_runs(samples: &[CircleSample]) -> Vec<Vec<[f64; 2]>> {
    let mut runs: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut prev: Option<f64> = None;
    for s in samples {
        if prev.map_or(true, |p| (s.psi - p).abs() > 0.125) {
            runs.push(Vec::new());
        }
        runs.last_mut().expect("run started").push([s.theta, s.psi]);
        prev = Some(s.psi);
    }
    runs
}

/// `psi` against `theta`, both in turns, for both branches.
pub fn psi_plot(max: &[CircleSample], min: &[CircleSample], title: &str) -> String {
    let mut plot = Plot::new([0.0, 1.0, -0.25, 0.25], false);
    plot.polyline(&[[0.0, 0.0], [1.0, 0.0]], "#bbbbbb", 0.5);
    for run in psi_runs(max) {
        plot.polyline(&run, "#1f4fbf", 1.5);
    }
    for run in psi_runs(min) {
        plot.polyline(&run, "#c03020", 1.0);
    }
    plot.finish(title)
}
