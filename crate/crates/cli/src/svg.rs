//! Minimal SVG line charts: stacked panels of polylines with labelled axes.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: Vec<f64>,
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub series: Vec<Series<'a>>,
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        let pad = lo.abs().max(1e-12);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

pub fn render(times: &[f64], panels: &[Panel<'_>]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    let (t0, t1) = bounds(times.iter().copied());
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    for (k, panel) in panels.iter().enumerate() {
        let top = k as f64 * PANEL_HEIGHT + MARGIN_TOP;
        let bottom = top + plot_h;
        let (y0, y1) = bounds(panel.series.iter().flat_map(|s| s.values.iter().copied()));
        let px = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;
        let py = |y: f64| bottom - (y - y0) / (y1 - y0) * plot_h;

        writeln!(s, r#"<text x="{MARGIN_LEFT}" y="{:.1}" font-size="13">{}</text>"#, top - 10.0, panel.title).unwrap();
        writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{top:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        let right = MARGIN_LEFT + plot_w;
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y1:.3e}</text>"#, MARGIN_LEFT - 4.0, top + 4.0)
            .unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{bottom:.1}" text-anchor="end">{y0:.3e}</text>"#, MARGIN_LEFT - 4.0).unwrap();
        writeln!(s, r#"<text x="{MARGIN_LEFT}" y="{:.1}">{t0:.3}</text>"#, bottom + 14.0).unwrap();
        writeln!(s, r#"<text x="{right:.1}" y="{:.1}" text-anchor="end">t = {t1:.3}</text>"#, bottom + 14.0).unwrap();

        for (j, series) in panel.series.iter().enumerate() {
            let points: Vec<String> = times
                .iter()
                .zip(&series.values)
                .filter(|(_, y)| y.is_finite())
                .map(|(&t, &y)| format!("{:.2},{:.2}", px(t), py(y)))
                .collect();
            writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
                series.color,
                points.join(" ")
            )
            .unwrap();
            let ly = bottom + 28.0;
            let lx = MARGIN_LEFT + 120.0 * j as f64;
            writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}"/>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0,
                series.color
            )
            .unwrap();
            writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, lx + 22.0, series.label).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}
