//! Self-contained SVG rendering of result curves: no external plotting
//! tool, byte-stable output for identical inputs.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    NoData,
    #[error("could not write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub curves: Vec<Curve>,
}

const WIDTH: f64 = 920.0;
const PANEL_HEIGHT: f64 = 460.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 56.0;

const COLORS: [&str; 6] = [
    "#4477aa", "#cc3311", "#228833", "#111111", "#aa3377", "#ee7733",
];
/// dotted, dash-dot, solid, dashed, then repeats
const DASHES: [&str; 4] = ["2,5", "10,4,2,4", "", "9,6"];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s.is_empty() || s == "-" {
            "0".into()
        } else {
            s.into()
        }
    }
}

fn data_bounds(curves: &[Curve]) -> ((f64, f64), (f64, f64)) {
    let mut xb = (f64::INFINITY, f64::NEG_INFINITY);
    let mut yb = (f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for &(x, y) in &c.points {
            xb.0 = xb.0.min(x);
            xb.1 = xb.1.max(x);
            yb.0 = yb.0.min(y);
            yb.1 = yb.1.max(y);
        }
    }
    if !(xb.1 > xb.0) {
        xb.1 = xb.0 + 1.0;
    }
    if !(yb.1 > yb.0) {
        yb.1 = yb.0 + 1.0;
    }
    // headroom so curves do not touch the frame
    let pad = (yb.1 - yb.0) * 0.05;
    (xb, (yb.0 - pad, yb.1 + pad))
}

fn render_panel(svg: &mut String, panel: &Panel, y_offset: f64) {
    let ((x0, x1), (y0, y1)) = data_bounds(&panel.curves);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| y_offset + MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        fmt(MARGIN_LEFT),
        fmt(y_offset + MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    );
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-size="17" text-anchor="middle" font-family="sans-serif">{}</text>"##,
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(y_offset + MARGIN_TOP - 16.0),
        panel.title
    );

    // ticks
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xp = px(xv);
        let yp = py(yv);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333333" stroke-width="1"/>"##,
            fmt(xp),
            fmt(y_offset + MARGIN_TOP + plot_h),
            fmt(xp),
            fmt(y_offset + MARGIN_TOP + plot_h + 5.0)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" font-size="13" text-anchor="middle" font-family="sans-serif">{}</text>"##,
            fmt(xp),
            fmt(y_offset + MARGIN_TOP + plot_h + 20.0),
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333333" stroke-width="1"/>"##,
            fmt(MARGIN_LEFT - 5.0),
            fmt(yp),
            fmt(MARGIN_LEFT),
            fmt(yp)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" font-size="13" text-anchor="end" font-family="sans-serif">{}</text>"##,
            fmt(MARGIN_LEFT - 9.0),
            fmt(yp + 4.0),
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-size="15" text-anchor="middle" font-family="sans-serif">{}</text>"##,
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(y_offset + PANEL_HEIGHT - 14.0),
        panel.x_label
    );
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-size="15" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 {} {})">{}</text>"##,
        fmt(20.0),
        fmt(y_offset + MARGIN_TOP + plot_h / 2.0),
        fmt(20.0),
        fmt(y_offset + MARGIN_TOP + plot_h / 2.0),
        panel.y_label
    );

    // curves
    for (idx, curve) in panel.curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let dash = DASHES[idx % DASHES.len()];
        let mut d = String::new();
        for (i, &(x, y)) in curve.points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{} {} ", fmt(px(x)), fmt(py(y)));
        }
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r##" stroke-dasharray="{dash}""##)
        };
        let _ = writeln!(
            svg,
            r##"<path d="{}" fill="none" stroke="{}" stroke-width="1.8"{}/>"##,
            d.trim_end(),
            color,
            dash_attr
        );
    }

    // legend, top-right corner of the frame
    for (idx, curve) in panel.curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let dash = DASHES[idx % DASHES.len()];
        let ly = y_offset + MARGIN_TOP + 18.0 + idx as f64 * 19.0;
        let lx = MARGIN_LEFT + plot_w - 150.0;
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r##" stroke-dasharray="{dash}""##)
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.8"{}/>"##,
            fmt(lx),
            fmt(ly - 4.0),
            fmt(lx + 34.0),
            fmt(ly - 4.0),
            color,
            dash_attr
        );
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" font-size="13" font-family="sans-serif">{}</text>"##,
            fmt(lx + 40.0),
            fmt(ly),
            curve.label
        );
    }
}

/// Render panels stacked vertically into one SVG document.
pub fn render_svg(panels: &[Panel]) -> Result<String, PlotError> {
    if panels.is_empty()
        || panels
            .iter()
            .all(|p| p.curves.iter().all(|c| c.points.is_empty()))
    {
        return Err(PlotError::NoData);
    }
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"##,
        WIDTH, height, WIDTH, height
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="white"/>"##);
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut svg, panel, i as f64 * PANEL_HEIGHT);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write; refuses to create a file when there is nothing to
/// plot.
pub fn emit_plot(panels: &[Panel], path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(panels)?;
    std::fs::write(path, svg).map_err(|source| PlotError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_panel() -> Panel {
        Panel {
            title: "demo".into(),
            x_label: "gt".into(),
            y_label: "P_e".into(),
            curves: vec![
                Curve {
                    label: "CI".into(),
                    points: (0..50)
                        .map(|i| (i as f64 * 0.1, (i as f64 * 0.2).sin()))
                        .collect(),
                },
                Curve {
                    label: "DI".into(),
                    points: (0..50).map(|i| (i as f64 * 0.1, 0.0)).collect(),
                },
            ],
        }
    }

    #[test]
    fn rendering_is_byte_stable() {
        let panel = sample_panel();
        let a = render_svg(std::slice::from_ref(&panel)).unwrap();
        let b = render_svg(std::slice::from_ref(&panel)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("</svg>"));
    }

    #[test]
    fn empty_input_is_an_error_and_creates_no_file() {
        let path = std::env::temp_dir().join("ionchain_plot_empty_test.svg");
        let _ = std::fs::remove_file(&path);
        let err = emit_plot(&[], &path).unwrap_err();
        assert!(matches!(err, PlotError::NoData));
        assert!(!path.exists());
    }

    #[test]
    fn curves_fit_inside_the_viewbox() {
        let svg = render_svg(&[sample_panel()]).unwrap();
        // every path coordinate must be within the canvas
        for chunk in svg.split("<path d=\"").skip(1) {
            let d = chunk.split('"').next().unwrap();
            for token in d.split(&['M', 'L', ' '][..]).filter(|s| !s.is_empty()) {
                let v: f64 = token.parse().unwrap();
                assert!((-1.0..=921.0).contains(&v), "coordinate {v} out of range");
            }
        }
    }
}
