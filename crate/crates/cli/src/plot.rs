//! Deterministic SVG charts of result documents.

use std::fmt::Write;

use systole_core::cmpfun::{collar_width, Sidedness};
use systole_core::lab::CandidateFamily;

use crate::docs::{CandidatesDoc, CoverDoc, ResultDoc, SandwichDoc, SpectrumDoc};
use crate::output::sig;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const DIGITS: usize = 6;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Line,
    Markers,
    LineMarkers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Pixel coordinate with two decimals.
fn px(v: f64) -> String {
    format!("{v:.2}")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let vals: Vec<f64> = values.map(|v| if log { v.log10() } else { v }).filter(|v| v.is_finite()).collect();
        let mut lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            let pad = if lo == 0.0 || log { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            if b - a >= 1 {
                let step = ((b - a) as f64 / 6.0).ceil().max(1.0) as i32;
                return (a..=b).step_by(step as usize).map(|e| 10f64.powi(e)).collect();
            }
            return (0..5).map(|k| 10f64.powf(self.lo + (self.hi - self.lo) * (k as f64 + 0.5) / 5.0)).collect();
        }
        (0..=5).map(|k| self.lo + (self.hi - self.lo) * k as f64 / 5.0).collect()
    }
}

impl Chart {
    pub fn is_empty(&self) -> bool {
        self.series.iter().all(|s| s.points.is_empty())
    }

    pub fn render(&self) -> String {
        let pts = || self.series.iter().flat_map(|s| s.points.iter().copied());
        let usable = |(x, y): (f64, f64)| (!self.log_x || x > 0.0) && (!self.log_y || y > 0.0) && x.is_finite() && y.is_finite();
        let xa = Axis::new(pts().filter(|&p| usable(p)).map(|p| p.0), self.log_x);
        let ya = Axis::new(pts().filter(|&p| usable(p)).map(|p| p.1), self.log_y);
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let sx = |x: f64| LEFT + xa.frac(x) * pw;
        let sy = |y: f64| TOP + (1.0 - ya.frac(y)) * ph;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(o, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            px(LEFT + pw / 2.0),
            escape(&self.title)
        );
        let _ = writeln!(
            o,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            px(LEFT),
            px(TOP),
            px(pw),
            px(ph)
        );
        for t in xa.ticks() {
            let x = sx(t);
            let _ = writeln!(o, r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#dddddd"/>"##, px(TOP), px(TOP + ph), x = px(x));
            let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, px(x), px(TOP + ph + 18.0), sig(t, DIGITS));
        }
        for t in ya.ticks() {
            let y = sy(t);
            let _ = writeln!(o, r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#dddddd"/>"##, px(LEFT), px(LEFT + pw), y = px(y));
            let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, px(LEFT - 6.0), px(y + 4.0), sig(t, DIGITS));
        }
        let _ = writeln!(
            o,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(LEFT + pw / 2.0),
            px(HEIGHT - 16.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">{}</text>"#,
            escape(&self.y_label),
            y = px(TOP + ph / 2.0)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let points: Vec<(f64, f64)> = s.points.iter().copied().filter(|&p| usable(p)).collect();
            if matches!(s.style, Style::Line | Style::LineMarkers) && points.len() > 1 {
                let path: Vec<String> = points.iter().map(|&(x, y)| format!("{},{}", px(sx(x)), px(sy(y)))).collect();
                let _ = writeln!(o, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
            }
            if matches!(s.style, Style::Markers | Style::LineMarkers) {
                for &(x, y) in &points {
                    let _ = writeln!(o, r#"<circle cx="{}" cy="{}" r="3.5" fill="{color}"/>"#, px(sx(x)), px(sy(y)));
                }
            }
            let ly = TOP + 14.0 + 20.0 * i as f64;
            let lx = LEFT + pw + 14.0;
            let _ = writeln!(
                o,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="3"/>"#,
                px(lx),
                px(ly),
                px(lx + 18.0),
                px(ly)
            );
            let _ = writeln!(o, r#"<text x="{}" y="{}">{}</text>"#, px(lx + 24.0), px(ly + 4.0), escape(&s.name));
        }
        o.push_str("</svg>\n");
        o
    }
}

fn family_name(f: CandidateFamily) -> &'static str {
    match f {
        CandidateFamily::Ball => "balls (radius)",
        CandidateFamily::Collar => "collars (half-width)",
        CandidateFamily::Superlevel => "superlevel sets",
    }
}

/// `λ₀` of ball and collar candidates against their radius or half-width.
pub fn candidates_chart(doc: &CandidatesDoc) -> Chart {
    let mut series = Vec::new();
    for family in [CandidateFamily::Ball, CandidateFamily::Collar] {
        let mut points: Vec<(f64, f64)> = doc
            .candidates
            .iter()
            .filter(|c| c.family == family)
            .map(|c| (c.parameter, c.lambda0))
            .collect();
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if !points.is_empty() {
            series.push(Series {
                name: family_name(family).into(),
                points,
                style: Style::LineMarkers,
            });
        }
    }
    if !series.is_empty() {
        let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
        let (lo, hi) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(0.0, f64::max));
        series.push(Series {
            name: format!("upper bound {}", sig(doc.lambda_up, DIGITS)),
            points: vec![(lo, doc.lambda_up), (hi, doc.lambda_up)],
            style: Style::Line,
        });
        if let Some(b) = doc.lower_bound {
            series.push(Series {
                name: format!("lower bound {}", sig(b, DIGITS)),
                points: vec![(lo, b), (hi, b)],
                style: Style::Line,
            });
        }
    }
    Chart {
        title: format!("Candidate eigenvalues on {}", doc.scene),
        x_label: "radius or collar half-width".into(),
        y_label: "first Dirichlet eigenvalue".into(),
        log_y: true,
        series,
        ..Chart::default()
    }
}

/// Both sides of the two-sided estimate as functions of the systole, with
/// the measured upper bound marked.
pub fn sandwich_chart(scene: &str, doc: &SandwichDoc) -> Chart {
    let pi = std::f64::consts::PI;
    let chi = doc.chi as f64;
    let n = 64;
    let sys: Vec<f64> = (0..=n).map(|k| doc.systole * (0.5 + k as f64 / n as f64)).collect();
    let lower = sys.iter().map(|&s| (s, 0.25 + s * s / (4.0 * pi * pi * chi * chi))).collect();
    let upper = sys
        .iter()
        .filter_map(|&s| collar_width(s, Sidedness::TwoSided).ok().map(|w| (s, 0.25 + 4.0 * pi * pi / (w * w))))
        .collect();
    Chart {
        title: format!("Systole sandwich on {scene}"),
        x_label: "systole".into(),
        y_label: "eigenvalue".into(),
        log_y: true,
        series: vec![
            Series {
                name: "lower bound".into(),
                points: lower,
                style: Style::Line,
            },
            Series {
                name: "upper bound".into(),
                points: upper,
                style: Style::Line,
            },
            Series {
                name: format!("measured {}", sig(doc.lambda_up, DIGITS)),
                points: vec![(doc.systole, doc.lambda_up)],
                style: Style::Markers,
            },
        ],
        ..Chart::default()
    }
}

/// Log-log decay of `λ₀` over the number of sheets with the fitted power law.
pub fn cover_chart(doc: &CoverDoc) -> Chart {
    let points: Vec<(f64, f64)> = doc
        .rows
        .iter()
        .filter(|r| r.sheets >= 2 && r.lambda0 > 0.0)
        .map(|r| (r.sheets as f64, r.lambda0))
        .collect();
    let mut series = vec![Series {
        name: "chains".into(),
        points: points.clone(),
        style: Style::Markers,
    }];
    if let (Some(p), false) = (doc.fitted_exponent, points.is_empty()) {
        let n = points.len() as f64;
        let log_c = points.iter().map(|&(k, l)| l.ln() + p * k.ln()).sum::<f64>() / n;
        series.push(Series {
            name: format!("fit k^-{}", sig(p, DIGITS)),
            points: points.iter().map(|&(k, _)| (k, (log_c - p * k.ln()).exp())).collect(),
            style: Style::Line,
        });
    }
    Chart {
        title: format!("Cover decay on {}", doc.scene),
        x_label: "sheets".into(),
        y_label: "first Dirichlet eigenvalue".into(),
        log_x: true,
        log_y: true,
        series,
    }
}

/// `λ₀` against the squared mesh size with the extrapolated value at zero.
pub fn spectrum_chart(doc: &SpectrumDoc) -> Chart {
    let mut series = vec![Series {
        name: "refinements".into(),
        points: doc.rows.iter().map(|r| (r.mesh_h * r.mesh_h, r.lambda0)).collect(),
        style: Style::LineMarkers,
    }];
    if let (Some(v), false) = (doc.extrapolated, doc.rows.is_empty()) {
        series.push(Series {
            name: format!("extrapolated {}", sig(v, DIGITS)),
            points: vec![(0.0, v)],
            style: Style::Markers,
        });
    }
    Chart {
        title: format!("Refinement of {}", doc.scene),
        x_label: "squared mesh size".into(),
        y_label: "first Dirichlet eigenvalue".into(),
        series,
        ..Chart::default()
    }
}

/// Named SVG files for a result document; empty when there is nothing to draw.
pub fn charts(doc: &ResultDoc) -> Vec<(String, Chart)> {
    let mut out = Vec::new();
    match doc {
        ResultDoc::Candidates(c) => {
            out.push(("candidates.svg".to_string(), candidates_chart(c)));
            if let Some(s) = &c.sandwich {
                out.push(("sandwich.svg".to_string(), sandwich_chart(&c.scene, s)));
            }
        }
        ResultDoc::Cover(c) => out.push(("cover.svg".to_string(), cover_chart(c))),
        ResultDoc::Spectrum(s) => out.push(("spectrum.svg".to_string(), spectrum_chart(s))),
        ResultDoc::Systole(_) | ResultDoc::Reports(_) => {}
    }
    out.retain(|(_, c)| !c.is_empty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ticks_cover_decades() {
        let a = Axis::new([0.3, 250.0].into_iter(), true);
        let t = a.ticks();
        assert!(t.contains(&1.0) && t.contains(&100.0));
    }

    #[test]
    fn render_is_deterministic() {
        let chart = Chart {
            title: "a < b".into(),
            series: vec![Series {
                name: "s".into(),
                points: vec![(1.0, 2.0), (2.0, 3.0)],
                style: Style::LineMarkers,
            }],
            ..Chart::default()
        };
        let svg = chart.render();
        assert_eq!(svg, chart.render());
        assert!(svg.contains("a &lt; b"));
        assert!(svg.starts_with("<svg"));
    }
}
