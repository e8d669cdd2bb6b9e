//! Minimal SVG line charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const M: (f64, f64, f64, f64) = (60.0, 20.0, 40.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart with optional log-scaled x axis. Points with non-positive x are
/// dropped on a log axis.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_x: bool) -> String {
    let fx = |x: f64| if log_x { x.log10() } else { x };
    let pts = series.iter().flat_map(|s| &s.points).filter(|p| !log_x || p.0 > 0.0);
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in pts {
        x0 = x0.min(fx(x));
        x1 = x1.max(fx(x));
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    y1 *= 1.05;
    let (pw, ph) = (W - M.0 - M.1, H - M.2 - M.3);
    let sx = |x: f64| M.0 + (fx(x) - x0) / (x1 - x0) * pw;
    let sy = |y: f64| M.2 + ph - y / y1 * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(title));
    let _ = writeln!(
        s,
        r#"<path d="M{l},{t} V{b} H{r}" fill="none" stroke="black"/>"#,
        l = M.0,
        t = M.2,
        b = M.2 + ph,
        r = M.0 + pw
    );
    // x ticks at the data abscissae of the first series
    if let Some(first) = series.first() {
        for &(x, _) in first.points.iter().filter(|p| !log_x || p.0 > 0.0) {
            let px = sx(x);
            let _ = writeln!(
                s,
                r#"<line x1="{px:.1}" y1="{b}" x2="{px:.1}" y2="{b2}" stroke="black"/><text x="{px:.1}" y="{ty}" text-anchor="middle">{x}</text>"#,
                b = M.2 + ph,
                b2 = M.2 + ph + 4.0,
                ty = M.2 + ph + 18.0
            );
        }
    }
    for i in 0..=4 {
        let y = y1 * i as f64 / 4.0;
        let py = sy(y);
        let _ = writeln!(
            s,
            r#"<line x1="{a}" y1="{py:.1}" x2="{l}" y2="{py:.1}" stroke="black"/><text x="{tx}" y="{ty:.1}" text-anchor="end">{y:.3}</text>"#,
            a = M.0 - 4.0,
            l = M.0,
            tx = M.0 - 6.0,
            ty = py + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, M.0 + pw / 2.0, H - 10.0, esc(x_label));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{y}" text-anchor="middle" transform="rotate(-90 15 {y})">{}</text>"#,
        esc(y_label),
        y = M.2 + ph / 2.0
    );
    for (k, ser) in series.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        let path: Vec<String> = ser
            .points
            .iter()
            .filter(|p| !log_x || p.0 > 0.0)
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, path.join(" "));
        }
        let ly = M.2 + 14.0 + 16.0 * k as f64;
        let lx = M.0 + pw - 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            esc(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series() {
        let s = line_chart(
            "a<b",
            "x",
            "y",
            &[Series { label: "mp".into(), points: vec![(8.0, 3.0), (64.0, 1.0)] }],
            true,
        );
        assert!(s.starts_with("<svg"));
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(line_chart("t", "x", "y", &[], false).ends_with("</svg>\n"));
    }
}
