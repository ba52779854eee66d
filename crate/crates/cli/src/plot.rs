//! Minimal line plots as standalone SVG.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

pub fn line_plot(title: &str, series: &[(&str, &[(f64, f64)])]) -> String {
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{PAD}" y="24" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}">{x0:.3}</text>"#, H - PAD + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{x1:.3}</text>"#, W - PAD, H - PAD + 16.0);
    let _ = writeln!(svg, r#"<text x="4" y="{}">{y0:.3}</text>"#, H - PAD);
    let _ = writeln!(svg, r#"<text x="4" y="{PAD}">{y1:.3}</text>"#);
    for (i, (label, data)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (j, &(x, y)) in data.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2} ", if j == 0 { "M" } else { "L" }, sx(x), sy(y));
        }
        let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="{color}"/>"#, d.trim_end());
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - PAD - 160.0,
            PAD + 16.0 * i as f64,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series() {
        let data = [(0.0, 0.0), (1.0, 2.0)];
        let svg = line_plot("t<1>", &[("a", &data)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("t&lt;1&gt;"));
        assert!(svg.contains("M48.00 352.00 L592.00 48.00"));
    }
}
