//! SVG rendering of sieve constructions on the number line.
//!
//! Each term is drawn as a zero-centered sinusoid that starts at its anchor
//! and vanishes on the anchor's multiples (odd multiples only for odd-only
//! terms). White square markers sit on every integer the construction
//! crosses. Marker placement is decided by [`crossers_of`], never by the
//! sampled curves. Output is byte-identical for identical inputs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numberline::{
    crossers_of, spawn_construction, SieveConstruction, SieveTerm, SpawnRule, Variant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    /// All primes in range, anchor 2 highlighted.
    Progression,
    Full2,
    Full23,
    Full235,
    Full2357,
    Full235711,
    Odd3,
    Odd35,
    Odd357,
    Odd35711,
    /// All odd primes in range, with the anchor-2 full term as reference.
    OddAll,
    Custom,
}

impl FigureId {
    /// The eleven reproducible figures, in order.
    pub const ALL: [FigureId; 11] = [
        FigureId::Progression,
        FigureId::Full2,
        FigureId::Full23,
        FigureId::Full235,
        FigureId::Full2357,
        FigureId::Full235711,
        FigureId::Odd3,
        FigureId::Odd35,
        FigureId::Odd357,
        FigureId::Odd35711,
        FigureId::OddAll,
    ];

    pub fn slug(&self) -> &'static str {
        match self {
            FigureId::Progression => "progression",
            FigureId::Full2 => "full2",
            FigureId::Full23 => "full23",
            FigureId::Full235 => "full235",
            FigureId::Full2357 => "full2357",
            FigureId::Full235711 => "full235711",
            FigureId::Odd3 => "odd3",
            FigureId::Odd35 => "odd35",
            FigureId::Odd357 => "odd357",
            FigureId::Odd35711 => "odd35711",
            FigureId::OddAll => "odd_all",
            FigureId::Custom => "custom",
        }
    }

    pub fn file_name(&self) -> String {
        format!("figure_{}.svg", self.slug())
    }

    /// Variant and largest anchor of the progression this figure shows.
    /// `None` means every anchor up to the bound.
    fn stage(&self) -> Option<(Variant, Option<u64>)> {
        use FigureId::*;
        Some(match self {
            Progression => (Variant::Full, None),
            Full2 => (Variant::Full, Some(2)),
            Full23 => (Variant::Full, Some(3)),
            Full235 => (Variant::Full, Some(5)),
            Full2357 => (Variant::Full, Some(7)),
            Full235711 => (Variant::Full, Some(11)),
            Odd3 => (Variant::OddOnly, Some(3)),
            Odd35 => (Variant::OddOnly, Some(5)),
            Odd357 => (Variant::OddOnly, Some(7)),
            Odd35711 => (Variant::OddOnly, Some(11)),
            OddAll => (Variant::OddOnly, None),
            Custom => return None,
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        FigureId::ALL
            .iter()
            .chain([FigureId::Custom].iter())
            .find(|f| f.slug() == norm)
            .copied()
            .ok_or_else(|| Error::config(format!("unknown figure id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorRole {
    Background,
    Axis,
    Term,
    Highlight,
    Reference,
    MarkerStroke,
    MarkerFill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Highlight {
    None,
    Anchor(u64),
    /// The largest anchor in the construction.
    Newest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub figure: FigureId,
    pub x_range: (f64, f64),
    pub amplitude: f64,
    pub sample_step: f64,
    pub colors: BTreeMap<ColorRole, String>,
    pub highlight: Highlight,
    /// Drawn dashed for orientation; never contribute markers.
    pub reference_terms: Vec<SieveTerm>,
}

impl PlotSpec {
    pub fn for_figure(figure: FigureId) -> PlotSpec {
        let mut colors = BTreeMap::from([
            (ColorRole::Background, "#ffffff".to_string()),
            (ColorRole::Axis, "#000000".to_string()),
            (ColorRole::Term, "#000000".to_string()),
            (ColorRole::Highlight, "#d62728".to_string()),
            (ColorRole::Reference, "#d62728".to_string()),
            (ColorRole::MarkerStroke, "#000000".to_string()),
            (ColorRole::MarkerFill, "#ffffff".to_string()),
        ]);
        let mut highlight = Highlight::Newest;
        let mut reference_terms = Vec::new();
        match figure {
            FigureId::Progression => highlight = Highlight::Anchor(2),
            FigureId::Odd3 | FigureId::Odd35 | FigureId::Odd357 | FigureId::Odd35711 => {
                colors.insert(ColorRole::Highlight, "#1f4fd6".to_string());
            }
            FigureId::OddAll => {
                highlight = Highlight::None;
                reference_terms.push(SieveTerm::full(2).expect("2 is a valid anchor"));
            }
            FigureId::Custom => highlight = Highlight::None,
            _ => {}
        }
        PlotSpec {
            figure,
            x_range: (0.0, 40.0),
            amplitude: 0.9,
            sample_step: 0.01,
            colors,
            highlight,
            reference_terms,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (x0, x1) = self.x_range;
        if !x0.is_finite() || !x1.is_finite() || x1 <= x0 {
            return Err(Error::config(format!(
                "x_range must be finite with positive width, got [{x0}, {x1}]"
            )));
        }
        if x0 < 0.0 {
            return Err(Error::config("x_range must start at or after 0"));
        }
        if !(self.sample_step > 0.0 && self.sample_step.is_finite()) {
            return Err(Error::config("sample_step must be > 0"));
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(Error::config("amplitude must be in (0, 1]"));
        }
        if (x1 - x0) / self.sample_step > 50_000_000.0 {
            return Err(Error::config("sample_step too small for x_range"));
        }
        Ok(())
    }

    fn color(&self, role: ColorRole) -> &str {
        self.colors.get(&role).map_or("#000000", String::as_str)
    }

    /// Smallest construction bound covering `x_range`.
    pub fn required_bound(&self) -> u64 {
        (self.x_range.1.ceil() as u64).max(2)
    }
}

/// The construction a predefined figure shows, over `[2, bound]`.
pub fn figure_construction(figure: FigureId, bound: u64) -> Result<SieveConstruction> {
    let (variant, stage) = figure
        .stage()
        .ok_or_else(|| Error::config("custom figures take an explicit construction"))?;
    let full = spawn_construction(variant, SpawnRule::CaseI, bound, false)?;
    Ok(match stage {
        Some(max_anchor) => full.prefix(max_anchor),
        None => full,
    })
}

/// `amplitude * sin(pi * (x - anchor) / period_units)`. Zeros fall on every
/// multiple of a full term's anchor; the doubled period of an odd-only term
/// puts zeros on odd multiples and extrema on even ones.
pub fn waveform_value(term: SieveTerm, x: f64, amplitude: f64) -> f64 {
    let a = term.anchor() as f64;
    let phase = (x - a) / term.period_units() as f64;
    amplitude * (PI * phase).sin()
}

/// Integers in `x_range` crossed by some term of `construction`.
pub fn marker_set(spec: &PlotSpec, construction: &SieveConstruction) -> Result<Vec<u64>> {
    let lo = (spec.x_range.0.ceil() as u64).max(2);
    let hi = (spec.x_range.1.floor() as u64).min(construction.bound());
    let mut out = Vec::new();
    for n in lo..=hi {
        if !crossers_of(construction, n)?.is_empty() {
            out.push(n);
        }
    }
    Ok(out)
}

const WIDTH: f64 = 1200.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 40.0;
const AXIS_Y: f64 = 260.0;
const UNIT_Y: f64 = 120.0;
const MARKER: f64 = 8.0;
const LEGEND_COLS: usize = 7;

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn label_step(span: f64) -> u64 {
    [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000]
        .into_iter()
        .find(|&s| span / s as f64 <= 50.0)
        .unwrap_or(100_000)
}

/// Renders `construction` as a standalone SVG document.
pub fn render_figure(spec: &PlotSpec, construction: &SieveConstruction) -> Result<String> {
    spec.validate()?;
    if construction.bound() < spec.required_bound() {
        return Err(Error::config(format!(
            "construction bound {} does not cover x_range end {}",
            construction.bound(),
            spec.x_range.1
        )));
    }
    let (x0, x1) = spec.x_range;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| AXIS_Y - y * UNIT_Y;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(w, "<title>figure {}</title>", spec.figure.slug()).unwrap();
    writeln!(
        w,
        r#"<rect width="100%" height="100%" fill="{}"/>"#,
        spec.color(ColorRole::Background)
    )
    .unwrap();

    // number line
    let axis = spec.color(ColorRole::Axis);
    writeln!(w, r#"<g id="axis" stroke="{axis}" stroke-width="1">"#).unwrap();
    writeln!(
        w,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(px(x0)),
        num(AXIS_Y),
        num(px(x1)),
        num(AXIS_Y)
    )
    .unwrap();
    let first_int = x0.ceil() as u64;
    let last_int = x1.floor() as u64;
    let step = label_step(x1 - x0);
    let tick_step = if last_int - first_int <= 200 { 1 } else { step };
    for n in (first_int..=last_int).filter(|n| n % tick_step == 0) {
        let h = if n % step == 0 { 6.0 } else { 3.0 };
        writeln!(
            w,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
            num(AXIS_Y - h),
            num(AXIS_Y + h),
            x = num(px(n as f64))
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    writeln!(
        w,
        r#"<g id="labels" fill="{axis}" font-size="10" text-anchor="middle">"#
    )
    .unwrap();
    for n in (first_int..=last_int).filter(|n| n % step == 0) {
        writeln!(
            w,
            r#"<text x="{}" y="{}">{n}</text>"#,
            num(px(n as f64)),
            num(AXIS_Y + 20.0)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();

    // curves
    let newest = construction.anchors().last().copied();
    let highlighted = |a: u64| match spec.highlight {
        Highlight::None => false,
        Highlight::Anchor(h) => h == a,
        Highlight::Newest => newest == Some(a),
    };
    let samples = ((x1 - x0) / spec.sample_step + 1e-9).floor() as u64;
    let polyline = |w: &mut String, term: SieveTerm, color: &str, dashed: bool| {
        let a = term.anchor() as f64;
        if a > x1 {
            return;
        }
        let mut points = String::new();
        for i in 0..=samples {
            let x = x0 + i as f64 * spec.sample_step;
            if x + 1e-9 < a {
                continue;
            }
            if !points.is_empty() {
                points.push(' ');
            }
            let y = waveform_value(term, x, spec.amplitude);
            points.push_str(&num(px(x)));
            points.push(',');
            points.push_str(&num(py(y)));
        }
        let dash = if dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        writeln!(
            w,
            r#"<polyline data-anchor="{}" stroke="{color}" stroke-width="1.2"{dash} points="{points}"/>"#,
            term.anchor()
        )
        .unwrap();
    };
    writeln!(w, r#"<g id="references" fill="none">"#).unwrap();
    for &term in &spec.reference_terms {
        polyline(w, term, spec.color(ColorRole::Reference), true);
    }
    writeln!(w, "</g>").unwrap();
    writeln!(w, r#"<g id="waves" fill="none">"#).unwrap();
    // highlighted curve last so it sits on top
    let mut terms: Vec<SieveTerm> = construction.terms().collect();
    terms.sort_by_key(|t| (highlighted(t.anchor()), t.anchor()));
    for term in terms {
        let role = if highlighted(term.anchor()) {
            ColorRole::Highlight
        } else {
            ColorRole::Term
        };
        polyline(w, term, spec.color(role), false);
    }
    writeln!(w, "</g>").unwrap();

    // zero-cross markers
    writeln!(
        w,
        r#"<g id="markers" fill="{}" stroke="{}" stroke-width="1">"#,
        spec.color(ColorRole::MarkerFill),
        spec.color(ColorRole::MarkerStroke)
    )
    .unwrap();
    for n in marker_set(spec, construction)? {
        writeln!(
            w,
            r#"<rect data-n="{n}" x="{}" y="{}" width="{MARKER}" height="{MARKER}"/>"#,
            num(px(n as f64) - MARKER / 2.0),
            num(AXIS_Y - MARKER / 2.0)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();

    // legend
    writeln!(w, r#"<g id="legend" font-size="12">"#).unwrap();
    let mut entries: Vec<(String, &str)> = spec
        .reference_terms
        .iter()
        .map(|t| (t.to_string(), spec.color(ColorRole::Reference)))
        .collect();
    for term in construction.terms().filter(|t| t.anchor() as f64 <= x1) {
        let role = if highlighted(term.anchor()) {
            ColorRole::Highlight
        } else {
            ColorRole::Term
        };
        entries.push((term.to_string(), spec.color(role)));
    }
    for (i, (label, color)) in entries.iter().enumerate() {
        let x = MARGIN + (i % LEGEND_COLS) as f64 * 160.0;
        let y = 24.0 + (i / LEGEND_COLS) as f64 * 18.0;
        writeln!(
            w,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            num(x),
            num(y - 4.0),
            num(x + 18.0),
            num(y - 4.0)
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{}" y="{}" fill="{color}">{label}</text>"#,
            num(x + 24.0),
            num(y)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

/// Renders one of the predefined figures over the bound its x-range needs.
pub fn render_predefined(spec: &PlotSpec) -> Result<String> {
    let construction = figure_construction(spec.figure, spec.required_bound())?;
    render_figure(spec, &construction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberline::zero_cross;

    fn full(a: u64) -> SieveTerm {
        SieveTerm::full(a).unwrap()
    }

    fn odd(a: u64) -> SieveTerm {
        SieveTerm::odd_only(a).unwrap()
    }

    #[test]
    fn waveform_examples() {
        assert!(waveform_value(full(2), 4.0, 0.9).abs() < 1e-12);
        assert!((waveform_value(odd(3), 6.0, 0.9).abs() - 0.9).abs() < 1e-12);
        assert!(waveform_value(odd(3), 9.0, 0.9).abs() < 1e-12);
        assert!((waveform_value(odd(3), 12.0, 0.9).abs() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn zeros_align_with_crossings() {
        for a in (2..=1_000u64).step_by(7) {
            for variant in [Variant::Full, Variant::OddOnly] {
                let Ok(t) = SieveTerm::new(a, variant) else {
                    continue;
                };
                for n in t.crossings(1_000) {
                    assert!(
                        waveform_value(t, n as f64, 1.0).abs() < 1e-9,
                        "{t:?} at {n}"
                    );
                }
                if variant == Variant::OddOnly {
                    // even multiples are extrema
                    let m = 2 * a;
                    if m <= 1_000 {
                        assert!((waveform_value(t, m as f64, 1.0).abs() - 1.0).abs() < 1e-9);
                        assert!(!zero_cross(t, m));
                    }
                }
            }
        }
    }

    #[test]
    fn figure_ids_parse() {
        for f in FigureId::ALL {
            assert_eq!(f.slug().parse::<FigureId>().unwrap(), f);
        }
        assert_eq!("odd-all".parse::<FigureId>().unwrap(), FigureId::OddAll);
        assert!("fig99".parse::<FigureId>().is_err());
        assert_eq!(FigureId::Odd3.file_name(), "figure_odd3.svg");
    }

    #[test]
    fn marker_examples() {
        let spec = PlotSpec::for_figure(FigureId::Odd3);
        let c = figure_construction(FigureId::Odd3, 40).unwrap();
        assert_eq!(marker_set(&spec, &c).unwrap(), vec![9, 15, 21, 27, 33, 39]);

        let spec = PlotSpec::for_figure(FigureId::Full2);
        let c = figure_construction(FigureId::Full2, 40).unwrap();
        assert_eq!(
            marker_set(&spec, &c).unwrap(),
            (4..=40).step_by(2).collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_construction_draws_only_the_line() {
        let spec = PlotSpec::for_figure(FigureId::Custom);
        let c = spawn_construction(Variant::Full, SpawnRule::CaseI, 40, false)
            .unwrap()
            .prefix(1);
        let svg = render_figure(&spec, &c).unwrap();
        assert!(!svg.contains("<rect data-n"));
        assert!(!svg.contains("<polyline"));
        assert!(svg.contains(r#"<g id="axis""#));
    }

    #[test]
    fn render_is_deterministic() {
        let spec = PlotSpec::for_figure(FigureId::Odd35711);
        assert_eq!(
            render_predefined(&spec).unwrap(),
            render_predefined(&spec).unwrap()
        );
    }

    #[test]
    fn spec_validation() {
        let c = figure_construction(FigureId::Full23, 40).unwrap();
        let mut spec = PlotSpec::for_figure(FigureId::Full23);
        spec.x_range = (0.0, 41.0);
        assert!(matches!(render_figure(&spec, &c), Err(Error::Config(_))));
        for bad in [(5.0, 5.0), (f64::NAN, 3.0), (-1.0, 3.0)] {
            let mut spec = PlotSpec::for_figure(FigureId::Full23);
            spec.x_range = bad;
            assert!(spec.validate().is_err());
        }
        let mut spec = PlotSpec::for_figure(FigureId::Full23);
        spec.amplitude = 1.5;
        assert!(spec.validate().is_err());
        spec.amplitude = 0.5;
        spec.sample_step = 0.0;
        assert!(spec.validate().is_err());
        assert!(figure_construction(FigureId::Custom, 40).is_err());
    }

    #[test]
    fn highlight_follows_captions() {
        let svg = render_predefined(&PlotSpec::for_figure(FigureId::Odd35)).unwrap();
        assert!(svg.contains(r##"data-anchor="5" stroke="#1f4fd6""##));
        assert!(svg.contains(r##"data-anchor="3" stroke="#000000""##));
        let svg = render_predefined(&PlotSpec::for_figure(FigureId::Full235711)).unwrap();
        assert!(svg.contains(r##"data-anchor="11" stroke="#d62728""##));
        let svg = render_predefined(&PlotSpec::for_figure(FigureId::OddAll)).unwrap();
        assert!(svg.contains(r#"stroke-dasharray"#));
        assert!(svg.contains("3 + sin(1/6)"));
        assert!(svg.contains("2 + sin(1/2)"));
    }
}
