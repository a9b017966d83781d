//! SVG rendering of chord sets in the unit disk.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::chord::Chord;
use crate::error::{QmlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeodesicStyle {
    Straight,
    #[default]
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrokeBy {
    #[default]
    Uniform,
    Period,
    Generation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderConfig {
    pub geodesic_style: GeodesicStyle,
    pub size_px: u32,
    pub stroke_by: StrokeBy,
    pub include_circle: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            geodesic_style: GeodesicStyle::Hyperbolic,
            size_px: 800,
            stroke_by: StrokeBy::Uniform,
            include_circle: true,
        }
    }
}

/// A chord with the optional data used for colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgLeaf {
    pub chord: Chord,
    pub period: Option<usize>,
    pub generation: Option<usize>,
}

impl From<Chord> for SvgLeaf {
    fn from(chord: Chord) -> Self {
        SvgLeaf { chord, period: None, generation: None }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub fn render_svg(leaves: &[Chord], cfg: &RenderConfig) -> Result<String> {
    let leaves: Vec<SvgLeaf> = leaves.iter().cloned().map(SvgLeaf::from).collect();
    render_leaves(&leaves, cfg)
}

/// Draws one element with class `leaf` per input, in canonical chord order.
/// Coordinates carry 12 significant digits.
pub fn render_leaves(leaves: &[SvgLeaf], cfg: &RenderConfig) -> Result<String> {
    if cfg.size_px == 0 {
        return Err(QmlError::Argument("size_px must be positive".into()));
    }
    let mut order: Vec<&SvgLeaf> = leaves.iter().collect();
    order.sort_by(|x, y| x.chord.cmp(&y.chord));

    let size = f64::from(cfg.size_px);
    let c = size / 2.0;
    let r = size / 2.0 * 0.96;
    let stroke = (size / 1000.0).max(0.25);
    let point = |t: f64| (c + r * (2.0 * PI * t).cos(), c - r * (2.0 * PI * t).sin());

    let mut out = String::with_capacity(128 + leaves.len() * 96);
    let _ = write!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">
"#,
        s = cfg.size_px
    );
    if cfg.include_circle {
        let _ = writeln!(
            out,
            r#"<circle class="boundary" cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
            num(c),
            num(c),
            num(r),
            num(stroke)
        );
    }
    let _ = writeln!(out, r#"<g fill="none" stroke-width="{}">"#, num(stroke));
    for leaf in order {
        let colour = match cfg.stroke_by {
            StrokeBy::Uniform => None,
            StrokeBy::Period => leaf.period,
            StrokeBy::Generation => leaf.generation,
        }
        .map_or("black", |k| PALETTE[k % PALETTE.len()]);
        let ch = &leaf.chord;
        let (ta, tb) = (ch.a().to_f64(), ch.b().to_f64());
        let (x1, y1) = point(ta);
        if ch.is_degenerate() {
            let _ = writeln!(
                out,
                r#"<circle class="leaf" cx="{}" cy="{}" r="{}" fill="{colour}"/>"#,
                num(x1),
                num(y1),
                num(stroke * 2.0)
            );
            continue;
        }
        let (x2, y2) = point(tb);
        if cfg.geodesic_style == GeodesicStyle::Straight || ch.is_diameter() {
            let _ = writeln!(
                out,
                r#"<line class="leaf" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}"/>"#,
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
            continue;
        }
        // Orthogonal circle through both endpoints: radius r·tan(Δ/2) where
        // Δ is the short arc in radians. Going from `from` to `to` the
        // geodesic turns clockwise on screen about its centre outside the
        // disk, which SVG calls sweep-flag 1.
        let delta = 2.0 * PI * ch.length().to_f64();
        let radius = r * (delta / 2.0).tan();
        let (from, to) = ch.short_arc();
        let (fx, fy) = point(from.to_f64());
        let (tx, ty) = point(to.to_f64());
        let _ = writeln!(
            out,
            r#"<path class="leaf" d="M {} {} A {} {} 0 0 1 {} {}" stroke="{colour}"/>"#,
            num(fx),
            num(fy),
            num(radius),
            num(radius),
            num(tx),
            num(ty)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Decimal with 12 significant digits above 1 and 11 decimals below, no
/// exponent. Rounding noise near zero prints as 0.
fn num(x: f64) -> Num {
    Num(x)
}

struct Num(f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let x = self.0;
        if !x.is_finite() {
            return f.write_str("0");
        }
        let magnitude = x.abs().max(1.0).log10().floor() as i32;
        let decimals = (11 - magnitude).clamp(0, 11) as u32;
        // Scaled to an integer there are at most 12 digits for the
        // coordinates we draw; larger values fall back to float formatting.
        let scaled = (x.abs() * 10f64.powi(decimals as i32)).round();
        if scaled >= 1e15 {
            let s = format!("{x:.0}");
            return f.write_str(if s == "-0" { "0" } else { &s });
        }
        let mut units = scaled as u64;
        if units == 0 {
            return f.write_str("0");
        }
        let mut decimals = decimals;
        while decimals > 0 && units.is_multiple_of(10) {
            units /= 10;
            decimals -= 1;
        }
        let scale = 10u64.pow(decimals);
        let sign = if x < 0.0 { "-" } else { "" };
        if decimals == 0 {
            write!(f, "{sign}{units}")
        } else {
            write!(f, "{sign}{}.{:0width$}", units / scale, units % scale, width = decimals as usize)
        }
    }
}
