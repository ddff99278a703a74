//! Single-panel standalone SVG line and scatter plots.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Points,
    Polyline,
    /// Smooth curve drawn as a `<path>`.
    Curve,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Plot {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn with(mut self, label: &str, style: Style, points: Vec<(f64, f64)>) -> Plot {
        self.series.push(Series {
            label: label.into(),
            style,
            points,
        });
        self
    }

    pub fn log_y(mut self) -> Plot {
        self.log_y = true;
        self
    }

    fn ty(&self, y: f64) -> Option<f64> {
        let v = if self.log_y {
            if y > 0.0 {
                y.log10()
            } else {
                return None;
            }
        } else {
            y
        };
        v.is_finite().then_some(v)
    }

    /// Renders the plot; data points are embedded as circles or vertices.
    pub fn render(&self) -> String {
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter_map(|&(x, y)| Some((x, self.ty(y)?)).filter(|p| p.0.is_finite()))
            .collect();
        let range = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (x0, x1) = range(&mut pts.iter().map(|p| p.0));
        let (y0, y1) = range(&mut pts.iter().map(|p| p.1));
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        let fmt = |v: f64| format!("{v:.4e}");
        let ylab = |v: f64| if self.log_y { fmt(10f64.powf(v)) } else { fmt(v) };
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" text-anchor="start">{}</text>"#, H - MARGIN + 16.0, fmt(x0));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, W - MARGIN, H - MARGIN + 16.0, fmt(x1));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, H - MARGIN, ylab(y0));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + 10.0, ylab(y1));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 18.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            esc(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mapped: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter_map(|&(x, y)| Some((sx(x), sy(self.ty(y)?))))
                .collect();
            let coords = mapped
                .iter()
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect::<Vec<_>>();
            match series.style {
                Style::Points => {
                    for ((x, y), (dx, dy)) in mapped.iter().zip(&series.points) {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}" data-x="{dx}" data-y="{dy}"/>"#
                        );
                    }
                }
                Style::Polyline => {
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        coords.join(" ")
                    );
                    for ((x, y), (dx, dy)) in mapped.iter().zip(&series.points) {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}" data-x="{dx}" data-y="{dy}"/>"#
                        );
                    }
                }
                Style::Curve => {
                    if !coords.is_empty() {
                        let _ = writeln!(
                            s,
                            r#"<path fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="5 3" d="M {}"/>"#,
                            coords.join(" L ")
                        );
                    }
                }
            }
            let ly = MARGIN + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
                MARGIN + 8.0,
                esc(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure() {
        let svg = Plot::new("t", "x", "y")
            .with("data", Style::Polyline, vec![(0.0, 1.0), (1.0, 2.0)])
            .with("fit", Style::Curve, vec![(0.0, 1.0), (1.0, 2.1)])
            .render();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polyline") && svg.contains("<path"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn degenerate_and_log() {
        let svg = Plot::new("t", "x", "y")
            .log_y()
            .with("d", Style::Points, vec![(1.0, 0.0), (1.0, 1e-3)])
            .render();
        assert!(!svg.contains("NaN"));
    }
}
