use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;
use resokam_core::covering::{Scan2d, ZoneCode};
use resokam_core::secular::StandardFormData;

use crate::error::{CliError, CliResult};

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

/// Affine map from a data rectangle onto a pixel rectangle (y up).
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }
    fn py(&self, y: f64) -> f64 {
        self.top + (self.y1 - y) / (self.y1 - self.y0) * self.height
    }

    fn axes(&self, svg: &mut String, xlabel: &str, ylabel: &str) {
        let _ = write!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
            self.left, self.top, self.width, self.height
        );
        for (v, anchor_x) in [(self.x0, self.left), (self.x1, self.left + self.width)] {
            let _ = write!(
                svg,
                r#"<text x="{anchor_x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                self.top + self.height + 14.0,
                short(v)
            );
        }
        for (v, anchor_y) in [(self.y0, self.top + self.height), (self.y1, self.top)] {
            let _ = write!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                self.left - 4.0,
                anchor_y + 4.0,
                short(v)
            );
        }
        let _ = write!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{xlabel}</text>"#,
            self.left + self.width / 2.0,
            self.top + self.height + 30.0
        );
        let _ = write!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            self.left - 32.0,
            self.top + self.height / 2.0,
            self.left - 32.0,
            self.top + self.height / 2.0
        );
    }

    fn polyline(&self, svg: &mut String, pts: &[(f64, f64)], color: &str, dash: bool) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let dash = if dash { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = write!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            coords.join(" ")
        );
    }
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn open(title: &str, height: f64) -> String {
    format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}"><rect width="100%" height="100%" fill="white"/><text x="{:.1}" y="20" font-size="14" text-anchor="middle">{title}</text>"##,
        W / 2.0
    )
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn zone_color(z: ZoneCode) -> &'static str {
    match z {
        ZoneCode::R0 => "#cfe8cf",
        ZoneCode::R1 => "#5b8fd6",
        ZoneCode::R0R1 => "#9bbde8",
        ZoneCode::R2 => "#d64545",
        ZoneCode::Outside => "#ffffff",
    }
}

/// Heat map of zone labels on a planar grid.
pub fn zones2d(scan: &Scan2d, dim: usize) -> CliResult<String> {
    if dim != 2 {
        return Err(CliError::usage(format!("unsupported plot: zones2d needs n = 2, model has n = {dim}")));
    }
    let f = Frame {
        x0: scan.u_range.0,
        x1: scan.u_range.1,
        y0: scan.v_range.0,
        y1: scan.v_range.1,
        left: PAD,
        top: PAD,
        width: H - 2.0 * PAD,
        height: H - 2.0 * PAD,
    };
    let mut svg = open("covering zones", H);
    let du = (f.x1 - f.x0) / scan.grid as f64;
    let dv = (f.y1 - f.y0) / scan.grid as f64;
    for c in &scan.cells {
        let _ = write!(
            svg,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            f.px(c.u - du / 2.0),
            f.py(c.v + dv / 2.0),
            f.width / scan.grid as f64 + 0.05,
            f.height / scan.grid as f64 + 0.05,
            zone_color(c.zone)
        );
    }
    f.axes(&mut svg, &format!("y{}", scan.axes.0 + 1), &format!("y{}", scan.axes.1 + 1));
    for (i, z) in [ZoneCode::R0, ZoneCode::R1, ZoneCode::R0R1, ZoneCode::R2].into_iter().enumerate() {
        let y = PAD + 20.0 * i as f64;
        let _ = write!(
            svg,
            r##"<rect x="{:.1}" y="{y:.1}" width="14" height="14" fill="{}" stroke="#333"/><text x="{:.1}" y="{:.1}" font-size="12">{}</text>"##,
            H,
            zone_color(z),
            H + 20.0,
            y + 11.0,
            z.as_str()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// `eta(varpi, ·)` over the base for the given curves (n = 2).
pub fn graph_curves(curves: &[(String, Vec<(f64, f64)>)], dim: usize, k: &[i64]) -> CliResult<String> {
    if dim != 2 {
        return Err(CliError::usage(format!("unsupported plot: graph needs n = 2, model has n = {dim}")));
    }
    let all = curves.iter().flat_map(|(_, c)| c.iter());
    let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    if !xl.is_finite() {
        (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = padded(xl, xh);
    let (y0, y1) = padded(yl, yh);
    let f = Frame {
        x0,
        x1,
        y0,
        y1,
        left: PAD + 20.0,
        top: PAD,
        width: W - 2.0 * PAD - 140.0,
        height: H - 2.0 * PAD,
    };
    let ks: Vec<String> = k.iter().map(i64::to_string).collect();
    let mut svg = open(&format!("resonance graph, k = ({})", ks.join(",")), H);
    f.axes(&mut svg, "base action", "slow action");
    let colors = ["#1f4e9c", "#c0392b", "#27ae60", "#8e44ad"];
    for (i, (label, pts)) in curves.iter().enumerate() {
        let color = colors[i % colors.len()];
        // break the polyline where the base grid has gaps between cubes
        let mut run: Vec<(f64, f64)> = Vec::new();
        let gap = typical_gap(pts) * 3.0;
        for &p in pts {
            if let Some(&(px, _)) = run.last() {
                if p.0 - px > gap {
                    f.polyline(&mut svg, &run, color, i > 0);
                    run.clear();
                }
            }
            run.push(p);
        }
        f.polyline(&mut svg, &run, color, i > 0);
        let y = PAD + 18.0 * i as f64;
        let _ = write!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{label}</text>"#,
            W - 140.0,
            y + 6.0,
            W - 120.0,
            y + 6.0,
            W - 116.0,
            y + 10.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn typical_gap(pts: &[(f64, f64)]) -> f64 {
    let mut gaps: Vec<f64> = pts.windows(2).map(|w| w[1].0 - w[0].0).filter(|g| *g > 0.0).collect();
    if gaps.is_empty() {
        return f64::INFINITY;
    }
    gaps.sort_by(f64::total_cmp);
    gaps[gaps.len() / 2]
}

fn eval(series: &std::collections::BTreeMap<i64, Complex64>, theta: f64) -> f64 {
    series
        .iter()
        .map(|(&j, c)| (c * Complex64::from_polar(1.0, j as f64 * theta)).re)
        .sum()
}

/// `G0` over one period, and level sets of the leading pendulum
/// `m_k p^2 + eps f1(q)` below, at and above the separatrix.
pub fn g0_and_pendulum(sf: &StandardFormData) -> String {
    let total_h = 2.0 * H - PAD;
    let mut svg = open("averaged potential and pendulum levels", total_h);
    let samples = 721;
    let thetas: Vec<f64> = (0..samples).map(|i| 2.0 * PI * i as f64 / (samples - 1) as f64).collect();
    let g: Vec<(f64, f64)> = thetas.iter().map(|&t| (t, eval(&sf.g0, t))).collect();
    let (gl, gh) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (y0, y1) = padded(gl, gh);
    let top = Frame {
        x0: 0.0,
        x1: 2.0 * PI,
        y0,
        y1,
        left: PAD + 20.0,
        top: PAD,
        width: W - 2.0 * PAD - 20.0,
        height: H - 2.0 * PAD - 20.0,
    };
    top.axes(&mut svg, "q", "G0");
    top.polyline(&mut svg, &g, "#1f4e9c", false);
    for c in &sf.critical_points {
        let _ = write!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#c0392b"/>"##,
            top.px(c.theta),
            top.py(c.value)
        );
    }
    let Some(e) = &sf.pendulum_energies else {
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">degenerate: no pendulum structure</text>"#,
            W / 2.0,
            H + 60.0
        );
        svg.push_str("</svg>\n");
        return svg;
    };
    let f1: Vec<f64> = thetas.iter().map(|&t| sf.eps * eval(&sf.f1, t)).collect();
    let span = (e.max - e.min).max(f64::MIN_POSITIVE);
    let levels = [
        e.min + 0.25 * span,
        e.min + 0.6 * span,
        e.separatrix,
        e.max + 0.4 * span,
    ];
    let pmax = ((levels[3] - e.min) / sf.m_k).sqrt();
    let bottom = Frame {
        x0: 0.0,
        x1: 2.0 * PI,
        y0: -1.1 * pmax,
        y1: 1.1 * pmax,
        left: PAD + 20.0,
        top: H + 10.0,
        width: W - 2.0 * PAD - 20.0,
        height: H - 2.0 * PAD - 20.0,
    };
    bottom.axes(&mut svg, "q", "p");
    for (i, &lev) in levels.iter().enumerate() {
        let color = if i == 2 { "#c0392b" } else { "#1f4e9c" };
        for sign in [1.0, -1.0] {
            let mut run = Vec::new();
            for (&t, &v) in thetas.iter().zip(&f1) {
                let d = lev - v;
                if d >= 0.0 {
                    run.push((t, sign * (d / sf.m_k).sqrt()));
                } else if !run.is_empty() {
                    bottom.polyline(&mut svg, &run, color, false);
                    run.clear();
                }
            }
            bottom.polyline(&mut svg, &run, color, false);
        }
    }
    svg.push_str("</svg>\n");
    svg
}
