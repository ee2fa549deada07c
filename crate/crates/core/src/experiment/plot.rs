//! Minimal standalone SVG line chart of BR curves.

use std::fmt::Write as _;

use super::BrCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per curve. Rates are placed at evenly spaced positions (the
/// grid is not uniform), the y axis is mean accuracy in percent.
pub fn render_curves_svg(title: &str, curves: &[BrCurve]) -> String {
    let rates: Vec<f64> = curves.first().map(|c| c.points.iter().map(|p| p.0).collect()).unwrap_or_default();
    let accs = curves.iter().flat_map(|c| c.points.iter().map(|p| 100.0 * p.1));
    let (lo, hi) = accs.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    let (lo, hi) = if lo.is_finite() {
        let pad = ((hi - lo) * 0.05).max(0.5);
        (lo - pad, hi + pad)
    } else {
        (0.0, 100.0)
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_at = |i: usize| LEFT + plot_w * (i as f64 + 0.5) / rates.len().max(1) as f64;
    let y_at = |acc: f64| TOP + plot_h * (1.0 - (acc - lo) / (hi - lo));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y}" stroke="black"/>"#,
        y = TOP + plot_h,
        x2 = LEFT + plot_w
    );
    for (i, br) in rates.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{br}</text>"#,
            x_at(i),
            TOP + plot_h + 18.0
        );
    }
    for k in 0..=5 {
        let acc = lo + (hi - lo) * f64::from(k) / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{acc:.1}</text>"#,
            LEFT - 6.0,
            y_at(acc) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">br</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">accuracy %</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (n, c) in curves.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{:.2},{:.2}", x_at(i), y_at(100.0 * p.1)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            escape(&c.config)
        );
        let ly = TOP + 14.0 * n as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{lx2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{tx}" y="{ty}">{}</text>"#,
            escape(&c.config),
            lx = WIDTH - RIGHT + 12.0,
            lx2 = WIDTH - RIGHT + 30.0,
            tx = WIDTH - RIGHT + 35.0,
            ty = ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
