//! Deterministic SVG rendering of a report: one panel per isotopy (grey
//! trails of the branch values, red endpoints, the merging pair and the
//! extracted matching path highlighted) and a final panel with the basis.

use std::fmt::Write;

use bifib_core::analysis::Report;
use num_complex::Complex64 as C;

const PANEL: f64 = 320.0;
const MARGIN: f64 = 24.0;
const COLUMNS: usize = 4;
const BASIS_COLOURS: [&str; 4] = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlotError {
    #[error("report has no isotopy frames to plot")]
    Empty,
}

struct View {
    lo: C,
    span: f64,
}

impl View {
    /// Bounding box of all plotted points, padded 10% and made square.
    fn fit(points: impl Iterator<Item = C>) -> Option<Self> {
        let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        let mut any = false;
        for p in points.filter(|p| p.re.is_finite() && p.im.is_finite()) {
            lo = C::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C::new(hi.re.max(p.re), hi.im.max(p.im));
            any = true;
        }
        if !any {
            return None;
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9) * 1.2;
        let centre = (lo + hi) * 0.5;
        Some(View { lo: centre - C::new(span, span) * 0.5, span })
    }

    fn map(&self, p: C, ox: f64, oy: f64) -> (f64, f64) {
        let s = (PANEL - 2.0 * MARGIN) / self.span;
        (ox + MARGIN + (p.re - self.lo.re) * s, oy + PANEL - MARGIN - (p.im - self.lo.im) * s)
    }
}

fn polyline(out: &mut String, view: &View, pts: &[C], ox: f64, oy: f64, style: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|p| {
            let (x, y) = view.map(*p, ox, oy);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(out, r#"<polyline points="{}" fill="none" {style}/>"#, coords.join(" "));
}

fn dot(out: &mut String, view: &View, p: C, ox: f64, oy: f64, r: f64, fill: &str) {
    let (x, y) = view.map(p, ox, oy);
    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(report: &Report) -> Result<String, PlotError> {
    let isos: Vec<_> = report.isotopies.iter().filter(|i| !i.trail.is_empty()).collect();
    if isos.is_empty() {
        return Err(PlotError::Empty);
    }
    let mut pts: Vec<C> = isos.iter().flat_map(|i| i.trail.iter().flatten().copied()).collect();
    pts.extend(report.fibre.branch_values.iter().copied());
    let view = View::fit(pts.into_iter()).ok_or(PlotError::Empty)?;

    let panels = isos.len() + usize::from(report.basis.is_some());
    let cols = panels.min(COLUMNS);
    let rows = panels.div_ceil(cols);
    let (w, h) = (cols as f64 * PANEL, rows as f64 * PANEL);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    for (k, iso) in isos.iter().enumerate() {
        let (ox, oy) = ((k % cols) as f64 * PANEL, (k / cols) as f64 * PANEL);
        let _ = writeln!(out, r##"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#ddd"/>"##);
        let title = format!("path {} to {:.3}{:+.3}i{}", iso.index, iso.target.re, iso.target.im, if iso.bent { " (bent)" } else { "" });
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, ox + 6.0, oy + 14.0, escape(&title));
        let n = iso.trail[0].len();
        for b in 0..n {
            let trail: Vec<C> = iso.trail.iter().filter_map(|f| f.get(b).copied()).collect();
            let merging = iso.merge_pair.is_some_and(|(i, j)| b == i || b == j);
            let style = if merging { r##"stroke="#e9a23b" stroke-width="1.6""## } else { r##"stroke="#999" stroke-width="1""## };
            polyline(&mut out, &view, &trail, ox, oy, style);
        }
        if let Some(m) = &iso.matching_path {
            polyline(&mut out, &view, m, ox, oy, r##"stroke="#1f77b4" stroke-width="1.4" stroke-dasharray="4 2""##);
        }
        for p in &iso.trail[0] {
            dot(&mut out, &view, *p, ox, oy, 2.0, "#555");
        }
        for p in iso.trail.last().unwrap() {
            dot(&mut out, &view, *p, ox, oy, 2.5, "#d62728");
        }
        if let Some(c) = iso.collision {
            dot(&mut out, &view, c, ox, oy, 4.0, "#e9a23b");
        }
    }

    if let Some(basis) = &report.basis {
        let k = isos.len();
        let (ox, oy) = ((k % cols) as f64 * PANEL, (k / cols) as f64 * PANEL);
        let _ = writeln!(out, r##"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">basis of matching paths ({})</text>"#, ox + 6.0, oy + 14.0, escape(&basis.source));
        for (i, p) in basis.paths.iter().enumerate() {
            let colour = BASIS_COLOURS[i % BASIS_COLOURS.len()];
            polyline(&mut out, &view, p, ox, oy, &format!(r#"stroke="{colour}" stroke-width="1.8""#));
            if let Some(label) = basis.labels.get(i) {
                let mid = p[p.len() / 2];
                let (x, y) = view.map(if p.len() == 2 { (p[0] + p[1]) * 0.5 } else { mid }, ox, oy);
                let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" fill="{colour}">{}</text>"#, x + 3.0, y - 3.0, escape(label));
            }
        }
        for p in &report.fibre.branch_values {
            dot(&mut out, &view, *p, ox, oy, 2.5, "#d62728");
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
