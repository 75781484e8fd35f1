//! Static SVG figures: MI against epoch, and the information plane.

use std::fmt::Write;
use std::path::Path;

use super::curves::{info_plane, mi_curves, MICurve};
use super::ReportError;
use crate::data::Split;
use crate::experiment::RunResult;

/// Layer colours, fixed so figures from different runs line up.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939",
];
const REF_X: &str = "#000000";
const REF_Y: &str = "#888888";

/// Epoch colour ramp, early to late.
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn layer_colour(layer: usize) -> &'static str {
    PALETTE[layer % PALETTE.len()]
}

fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(RAMP.len() - 2);
    let f = t - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">
<title>{}</title>
<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#,
        escape(title)
    );
}

/// Plot area and axis ranges. Epoch axes are log-scaled.
struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    x_max: f64,
    y_max: f64,
    log_x: bool,
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        let t = if self.log_x {
            let span = self.x_max.log10();
            if span > 0.0 {
                v.max(1.0).log10() / span
            } else {
                0.5
            }
        } else {
            v / self.x_max
        };
        self.x + t * self.w
    }

    fn py(&self, v: f64) -> f64 {
        self.y + self.h - (v / self.y_max) * self.h
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str, title: &str) {
        let (x0, y0, x1, y1) = (self.x, self.y, self.x + self.w, self.y + self.h);
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            self.w, self.h
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            x0 + self.w / 2.0,
            y0 - 8.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x0 + self.w / 2.0,
            y1 + 30.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            x0 - 32.0,
            y0 + self.h / 2.0,
            x0 - 32.0,
            y0 + self.h / 2.0,
            escape(y_label)
        );
        for v in self.x_ticks() {
            let x = self.px(v);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                y1 + 4.0,
                y1 + 15.0,
                v
            );
        }
        let step = (self.y_max / 5.0).ceil().max(1.0);
        let mut v = 0.0;
        while v <= self.y_max + 1e-9 {
            let y = self.py(v);
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v}</text>"##,
                x0 - 4.0,
                x0 - 6.0,
                y + 4.0
            );
            v += step;
        }
        let _ = x1;
    }

    fn x_ticks(&self) -> Vec<f64> {
        if self.log_x {
            let mut ticks = vec![1.0];
            let mut t = 10.0;
            while t <= self.x_max {
                ticks.push(t);
                t *= 10.0;
            }
            if self.x_max > 1.0 && *ticks.last().unwrap() != self.x_max {
                ticks.push(self.x_max);
            }
            ticks
        } else {
            let step = (self.x_max / 5.0).ceil().max(1.0);
            (0..).map(|i| i as f64 * step).take_while(|&v| v <= self.x_max + 1e-9).collect()
        }
    }
}

fn polyline(out: &mut String, class: &str, extra: &str, colour: &str, points: impl Iterator<Item = (f64, f64)>) {
    let pts: Vec<String> = points.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" {extra} fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
        pts.join(" ")
    );
}

#[derive(Clone, Copy)]
enum Quantity {
    Input,
    Label,
}

struct References {
    h_x: f64,
    h_y: f64,
}

fn references(result: &RunResult, split: Split) -> Result<References, ReportError> {
    let r = result.reference(split).ok_or(ReportError::Empty(split))?;
    Ok(References {
        h_x: (r.samples as f64).log2(),
        h_y: r.h_y_bits,
    })
}

/// One MI-vs-epoch panel: a polyline per layer plus H(X) and H(Y) lines.
fn mi_panel(out: &mut String, frame: &Frame, curves: &[MICurve], refs: &References, q: Quantity, title: &str) {
    let label = match q {
        Quantity::Input => "I(X;T) bits",
        Quantity::Label => "I(Y;T) bits",
    };
    let id = match q {
        Quantity::Input => "i-xt",
        Quantity::Label => "i-ty",
    };
    let _ = writeln!(out, r#"<g class="panel" data-quantity="{id}">"#);
    frame.axes(out, "epoch (log scale)", label, title);
    for c in curves {
        polyline(
            out,
            "layer",
            &format!(r#"data-layer="{}""#, c.layer),
            layer_colour(c.layer),
            c.points.iter().map(|&(e, xt, ty)| {
                let v = match q {
                    Quantity::Input => xt,
                    Quantity::Label => ty,
                };
                (frame.px(e as f64), frame.py(v))
            }),
        );
    }
    for (name, v, colour) in [("H(X)", refs.h_x, REF_X), ("H(Y)", refs.h_y, REF_Y)] {
        let y = frame.py(v);
        polyline(
            out,
            "reference",
            &format!(r#"data-ref="{name}" stroke-dasharray="5,3""#),
            colour,
            [(frame.x, y), (frame.x + frame.w, y)].into_iter(),
        );
    }
    let _ = writeln!(out, "</g>");
}

fn legend(out: &mut String, x: f64, y: f64, layers: &[String]) {
    let _ = writeln!(out, r#"<g class="legend">"#);
    let entries = layers
        .iter()
        .enumerate()
        .map(|(i, name)| (format!("layer {i} ({name})"), layer_colour(i), ""))
        .chain([
            ("H(X)".to_string(), REF_X, r#" stroke-dasharray="5,3""#),
            ("H(Y)".to_string(), REF_Y, r#" stroke-dasharray="5,3""#),
        ]);
    for (i, (text, colour, dash)) in entries.enumerate() {
        let yy = y + i as f64 * 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{colour}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 18.0,
            x + 24.0,
            yy + 4.0,
            escape(&text)
        );
    }
    let _ = writeln!(out, "</g>");
}

fn max_epoch(result: &RunResult) -> f64 {
    result.records.iter().map(|r| r.epoch).max().unwrap_or(1) as f64
}

fn label_for(result: &RunResult) -> String {
    let c = &result.config;
    let arch = c.variant.clone().unwrap_or_else(|| {
        c.architecture.conv_widths.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("-")
    });
    format!("{} {}", c.dataset.name, arch)
}

/// I(X;T) and I(Y;T) against epoch, side by side.
pub fn mi_epoch_svg(result: &RunResult, split: Split) -> Result<String, ReportError> {
    if result.records_for(split).next().is_none() {
        return Err(ReportError::Empty(split));
    }
    let refs = references(result, split)?;
    let curves = mi_curves(result, split);
    let (pw, ph) = (320.0, 260.0);
    let width = 70.0 + 2.0 * (pw + 60.0) + 170.0;
    let height = ph + 90.0;
    let mut out = String::new();
    header(&mut out, width, height, &format!("MI against epoch, {} split, {}", split, label_for(result)));
    for (i, (q, title)) in [(Quantity::Input, "I(X;T)"), (Quantity::Label, "I(Y;T)")].into_iter().enumerate() {
        let frame = Frame {
            x: 70.0 + i as f64 * (pw + 60.0),
            y: 30.0,
            w: pw,
            h: ph,
            x_max: max_epoch(result),
            y_max: refs.h_x,
            log_x: true,
        };
        mi_panel(&mut out, &frame, &curves, &refs, q, &format!("{title}, {split}"));
    }
    legend(&mut out, 70.0 + 2.0 * (pw + 60.0), 40.0, &result.layers);
    out.push_str("</svg>\n");
    Ok(out)
}

/// One column per sweep variant, I(X;T) on top and I(Y;T) below.
pub fn sweep_svg(results: &[RunResult], split: Split) -> Result<String, ReportError> {
    let first = results.first().ok_or(ReportError::Empty(split))?;
    let (pw, ph) = (240.0, 200.0);
    let cols = results.len() as f64;
    let width = 70.0 + cols * (pw + 60.0) + 20.0;
    let height = 2.0 * (ph + 80.0) + 20.0;
    let mut out = String::new();
    let family = first.config.sweep.clone().unwrap_or_else(|| "sweep".into());
    header(&mut out, width, height, &format!("{family} sweep, {split} split"));
    for (col, result) in results.iter().enumerate() {
        let refs = references(result, split)?;
        let curves = mi_curves(result, split);
        let tag = (b'A' + (col % 26) as u8) as char;
        let name = result.config.variant.clone().unwrap_or_else(|| label_for(result));
        for (row, q) in [Quantity::Input, Quantity::Label].into_iter().enumerate() {
            let frame = Frame {
                x: 70.0 + col as f64 * (pw + 60.0),
                y: 30.0 + row as f64 * (ph + 80.0),
                w: pw,
                h: ph,
                x_max: max_epoch(result),
                y_max: refs.h_x,
                log_x: true,
            };
            mi_panel(&mut out, &frame, &curves, &refs, q, &format!("({tag}) {name}"));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// (I(X;T), I(Y;T)) per layer per measurement epoch, coloured early to late.
pub fn infoplane_svg(result: &RunResult, split: Split) -> Result<String, ReportError> {
    if result.records_for(split).next().is_none() {
        return Err(ReportError::Empty(split));
    }
    let refs = references(result, split)?;
    let series = info_plane(result, split);
    let (pw, ph) = (420.0, 320.0);
    let width = 70.0 + pw + 200.0;
    let height = ph + 90.0;
    let frame = Frame {
        x: 70.0,
        y: 30.0,
        w: pw,
        h: ph,
        x_max: refs.h_x,
        y_max: refs.h_y + 0.5,
        log_x: false,
    };
    let mut out = String::new();
    header(&mut out, width, height, &format!("Information plane, {} split, {}", split, label_for(result)));
    frame.axes(&mut out, "I(X;T) bits", "I(Y;T) bits", &format!("information plane, {split}"));
    let last = series.epochs.len().saturating_sub(1).max(1) as f64;
    for (layer, pts) in series.layers.iter().enumerate() {
        let _ = writeln!(out, r#"<g class="layer" data-layer="{layer}">"#);
        polyline(
            &mut out,
            "trajectory",
            r#"stroke-opacity="0.5""#,
            layer_colour(layer),
            pts.iter().map(|&(x, y)| (frame.px(x), frame.py(y))),
        );
        for (e, &(x, y)) in pts.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<circle class="point" data-epoch="{}" cx="{:.2}" cy="{:.2}" r="3.5" fill="{}" stroke="{}"/>"#,
                series.epochs[e],
                frame.px(x),
                frame.py(y),
                ramp(e as f64 / last),
                layer_colour(layer)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    // epoch colour bar
    let bx = 70.0 + pw + 30.0;
    let _ = writeln!(out, r#"<g class="colourbar"><text x="{bx:.2}" y="40">epoch</text>"#);
    for i in 0..=10 {
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.2}" y="{:.2}" width="14" height="12" fill="{}"/>"#,
            48.0 + i as f64 * 12.0,
            ramp(i as f64 / 10.0)
        );
    }
    if let (Some(a), Some(b)) = (series.epochs.first(), series.epochs.last()) {
        let _ = writeln!(out, r#"<text x="{:.2}" y="58">{a}</text>"#, bx + 20.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="178">{b}</text>"#, bx + 20.0);
    }
    let _ = writeln!(out, "</g>");
    for (i, name) in result.layers.iter().enumerate() {
        let yy = 210.0 + i as f64 * 15.0;
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{yy:.2}" r="4" fill="white" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">layer {i} ({})</text>"#,
            bx + 7.0,
            layer_colour(i),
            bx + 18.0,
            yy + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_mi_epoch_svg(result: &RunResult, split: Split, path: &Path) -> Result<(), ReportError> {
    super::write_file(path, &mi_epoch_svg(result, split)?)
}

pub fn emit_infoplane_svg(result: &RunResult, split: Split, path: &Path) -> Result<(), ReportError> {
    super::write_file(path, &infoplane_svg(result, split)?)
}

pub fn emit_sweep_svg(results: &[RunResult], split: Split, path: &Path) -> Result<(), ReportError> {
    super::write_file(path, &sweep_svg(results, split)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
    }

    #[test]
    fn log_axis_maps_endpoints() {
        let f = Frame {
            x: 10.0,
            y: 0.0,
            w: 100.0,
            h: 50.0,
            x_max: 100.0,
            y_max: 10.0,
            log_x: true,
        };
        assert_eq!(f.px(1.0), 10.0);
        assert_eq!(f.px(100.0), 110.0);
        assert!((f.px(10.0) - 60.0).abs() < 1e-9);
        assert_eq!(f.py(0.0), 50.0);
        assert_eq!(f.py(10.0), 0.0);
        assert_eq!(f.x_ticks(), vec![1.0, 10.0, 100.0]);
    }
}
