//! Minimal static SVG quick-looks: line charts, scatter plots and heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
        }
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> Self {
        let (mut x, mut y) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
        for &(px, py) in points.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x = (x.0.min(px), x.1.max(px));
            y = (y.0.min(py), y.1.max(py));
        }
        let widen = |r: (f64, f64)| {
            if !r.0.is_finite() {
                (0.0, 1.0)
            } else if r.1 - r.0 < 1e-300 {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                r
            }
        };
        Frame { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle" font-family="sans-serif">{}</text>"#, W / 2.0, escape(title));
    s
}

fn axes(s: &mut String, fr: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for (v, anchor, x, y) in [
        (fr.x.0, "start", PAD, H - PAD + 15.0),
        (fr.x.1, "end", W - PAD, H - PAD + 15.0),
        (fr.y.0, "end", PAD - 4.0, H - PAD),
        (fr.y.1, "end", PAD - 4.0, PAD + 10.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}" font-family="sans-serif">{v:.3e}</text>"#);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn legend(s: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = PAD + 14.0 + 14.0 * i as f64;
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="3" fill="{c}"/>"#, W - PAD - 150.0, y - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="10" font-family="sans-serif">{}</text>"#, W - PAD - 135.0, escape(l));
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn lines(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let fr = Frame::fit(series.iter().flat_map(|s| s.points.iter()));
    let mut s = header(title);
    axes(&mut s, &fr, xlabel, ylabel);
    for (i, se) in series.iter().enumerate() {
        let mut d = String::new();
        for (k, &(x, y)) in se.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).enumerate() {
            let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, fr.px(x), fr.py(y));
        }
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.2"/>"#, COLORS[i % COLORS.len()]);
    }
    legend(&mut s, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Points coloured by sign of `weight`, sized by its magnitude.
pub fn scatter(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64, f64)]) -> String {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1)).collect();
    let fr = Frame::fit(xy.iter());
    let wmax = points.iter().map(|p| p.2.abs()).filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-300);
    let mut s = header(title);
    axes(&mut s, &fr, xlabel, ylabel);
    for &(x, y, w) in points.iter().filter(|p| p.0.is_finite() && p.1.is_finite() && p.2.is_finite()) {
        let r = 1.0 + 3.0 * (w.abs() / wmax).sqrt();
        let c = if w >= 0.0 { COLORS[1] } else { COLORS[0] };
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="{c}" fill-opacity="0.6"/>"#, fr.px(x), fr.py(y));
    }
    s.push_str("</svg>\n");
    s
}

/// `values[i * ny + j]` drawn at `(x_i, y_j)` on a grey scale.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, x: &[f64], y: &[f64], values: &[f64]) -> String {
    let corners = [(x[0], y[0]), (x[x.len() - 1], y[y.len() - 1])];
    let fr = Frame::fit(corners.iter());
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cw = (W - 2.0 * PAD) / x.len() as f64;
    let ch = (H - 2.0 * PAD) / y.len() as f64;
    let mut s = header(title);
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let v = values[i * y.len() + j];
            let g = if v.is_finite() { (255.0 * (1.0 - (v - lo) / span)).round() as u8 } else { 255 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({g},{g},{g})"/>"#,
                fr.px(xi) - cw / 2.0,
                fr.py(yj) - ch / 2.0,
                cw + 0.2,
                ch + 0.2
            );
        }
    }
    axes(&mut s, &fr, xlabel, ylabel);
    s.push_str("</svg>\n");
    s
}

pub fn save(path: impl AsRef<Path>, svg: &str) -> Result<()> {
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_are_closed() {
        let l = lines("t", "x", "y", &[Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)])]);
        assert!(l.starts_with("<svg") && l.trim_end().ends_with("</svg>"));
        let h = heatmap("h", "a", "b", &[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0, 2.0, f64::NAN]);
        assert_eq!(h.matches("<rect").count(), 1 + 4 + 1);
        assert!(scatter("s", "a", "b", &[(0.0, 0.0, -1.0)]).contains("circle"));
    }
}
