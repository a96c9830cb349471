//! Minimal SVG rendering: heat maps, line plots and curve overlays.

use std::fmt::Write as _;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn around(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Self { x0, x1, y0, y1 }
    }

    /// Equal scales on both axes.
    fn square(self) -> Self {
        let (cx, cy) = (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1));
        let h = 0.5 * (self.x1 - self.x0).max(self.y1 - self.y0);
        Self {
            x0: cx - h,
            x1: cx + h,
            y0: cy - h,
            y1: cy + h,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Blue to white to red.
fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (s, s, 1.0)
    } else {
        let s = (1.0 - t) / 0.5;
        (1.0, s, s)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

fn polyline(out: &mut String, f: &Frame, pts: &[[f64; 2]], closed: bool, stroke: &str) {
    let mut d = String::new();
    for p in pts {
        let _ = write!(d, "{:.2},{:.2} ", f.px(p[0]), f.py(p[1]));
    }
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(out, r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="1"/>"#, d.trim_end());
}

/// Heat map of `(x, y, value)` samples on a regular grid of spacing `h`,
/// with an optional boundary outline.
pub fn heatmap(samples: &[[f64; 3]], h: f64, outline: &[[f64; 2]], title: &str) -> String {
    let f = Frame::around(
        samples.iter().map(|s| s[0]).chain(outline.iter().map(|p| p[0])),
        samples.iter().map(|s| s[1]).chain(outline.iter().map(|p| p[1])),
    )
    .square();
    let (lo, hi) = bounds(samples.iter().map(|s| s[2]));
    let mut out = String::new();
    header(&mut out);
    let size = (f.px(h) - f.px(0.0)).abs();
    for s in samples {
        if !s[2].is_finite() {
            continue;
        }
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            f.px(s[0]) - 0.5 * size,
            f.py(s[1]) - 0.5 * size,
            size,
            size,
            color((s[2] - lo) / (hi - lo))
        );
    }
    if !outline.is_empty() {
        polyline(&mut out, &f, outline, true, "black");
    }
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="12">{title} [{lo:.3e}, {hi:.3e}]</text>"#);
    out.push_str("</svg>\n");
    out
}

/// Log-log plot of one or more series of positive values.
pub fn loglog(series: &[(&str, Vec<[f64; 2]>)], title: &str) -> String {
    let logged: Vec<(&str, Vec<[f64; 2]>)> = series
        .iter()
        .map(|(name, pts)| {
            (
                *name,
                pts.iter()
                    .filter(|p| p[0] > 0.0 && p[1].abs() > 0.0)
                    .map(|p| [p[0].log10(), p[1].abs().log10()])
                    .collect(),
            )
        })
        .collect();
    let f = Frame::around(
        logged.iter().flat_map(|s| s.1.iter().map(|p| p[0])).collect::<Vec<_>>().into_iter(),
        logged.iter().flat_map(|s| s.1.iter().map(|p| p[1])).collect::<Vec<_>>().into_iter(),
    );
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="gray"/>"#,
        w = SIZE - 2.0 * MARGIN
    );
    for (k, (name, pts)) in logged.iter().enumerate() {
        let c = colors[k % colors.len()];
        polyline(&mut out, &f, pts, false, c);
        for p in pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, f.px(p[0]), f.py(p[1]));
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{c}">{name}</text>"#,
            MARGIN + 8.0,
            MARGIN + 16.0 * (k as f64 + 1.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="20" font-size="12">{title} (log10 x: [{:.2}, {:.2}], log10 y: [{:.2}, {:.2}])</text>"#,
        f.x0, f.x1, f.y0, f.y1
    );
    out.push_str("</svg>\n");
    out
}

/// Closed curves drawn on one canvas, earliest lightest.
pub fn overlay(curves: &[Vec<[f64; 2]>], title: &str) -> String {
    let f = Frame::around(
        curves.iter().flatten().map(|p| p[0]).collect::<Vec<_>>().into_iter(),
        curves.iter().flatten().map(|p| p[1]).collect::<Vec<_>>().into_iter(),
    )
    .square();
    let mut out = String::new();
    header(&mut out);
    let n = curves.len().max(2) - 1;
    for (k, c) in curves.iter().enumerate() {
        polyline(&mut out, &f, c, true, &color(0.5 + 0.5 * k as f64 / n as f64));
    }
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="12">{title}</text>"#);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_are_closed() {
        let h = heatmap(&[[0.0, 0.0, 1.0], [0.1, 0.0, 2.0]], 0.1, &[], "t");
        assert!(h.starts_with("<svg") && h.ends_with("</svg>\n"));
        let l = loglog(&[("a", vec![[0.1, 1e-3], [0.2, 4e-3]])], "t");
        assert!(l.contains("<polyline"));
        let o = overlay(&[vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]], "t");
        assert!(o.contains("<polygon"));
    }

    #[test]
    fn color_ends() {
        assert_eq!(color(0.0), "#0000ff");
        assert_eq!(color(1.0), "#ff0000");
    }
}
