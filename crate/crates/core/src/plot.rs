//! Minimal log-log SVG plots with a fitted power law. Output is a pure
//! function of the data, so identical runs give identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// A log-log scatter of `(x, y)` with the line `y = c·x^slope` fitted in
/// log space, annotated with the slope.
pub struct LogLogPlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: &'a [(f64, f64)],
    pub slope: f64,
}

impl LogLogPlot<'_> {
    pub fn render(&self) -> String {
        let logs: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        if logs.is_empty() {
            svg.push_str("</svg>\n");
            return svg;
        }
        let (x0, x1) = bounds(logs.iter().map(|p| p.0));
        let (y0, y1) = bounds(logs.iter().map(|p| p.1));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        for d in decades(x0, x1) {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{d}</text>"#,
                px(d as f64),
                HEIGHT - MARGIN + 16.0
            );
        }
        for d in decades(y0, y1) {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">1e{d}</text>"#,
                MARGIN - 6.0,
                py(d as f64) + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 18.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(self.y_label)
        );

        // the fitted line passes through the centroid in log space
        let m = logs.len() as f64;
        let cx = logs.iter().map(|p| p.0).sum::<f64>() / m;
        let cy = logs.iter().map(|p| p.1).sum::<f64>() / m;
        let line_y = |x: f64| cy + self.slope * (x - cx);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
            px(x0),
            py(line_y(x0)),
            px(x1),
            py(line_y(x1))
        );
        for &(x, y) in &logs {
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#2c3e50"/>"##,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="13">fitted slope {:.4}</text>"#,
            WIDTH - MARGIN - 8.0,
            MARGIN + 18.0,
            self.slope
        );
        svg.push_str("</svg>\n");
        svg
    }
}

/// Range padded by 5%, never degenerate.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn decades(lo: f64, hi: f64) -> impl Iterator<Item = i32> {
    (lo.ceil() as i32)..=(hi.floor() as i32)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
