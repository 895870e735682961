use std::fmt::Write;

use crate::logs::LearningCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line chart of error rate against opportunity with a translucent interval
/// band per curve and a legend on the right.
pub fn render_curve_svg(curves: &[LearningCurve], labels: &[&str]) -> String {
    assert!(!curves.is_empty(), "nothing to plot");
    let max_x = curves.iter().map(|c| c.points.len()).max().unwrap_or(1).saturating_sub(1).max(1) as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |k: usize| LEFT + plot_w * k as f64 / max_x;
    let y = |e: f64| TOP + plot_h * (1.0 - e.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for i in 0..=4 {
        let e = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{yy:.2}" x2="{x2:.2}" y2="{yy:.2}" stroke="#dddddd"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{e:.2}</text>"##,
            yy = y(e),
            x2 = LEFT + plot_w,
            tx = LEFT - 6.0,
            ty = y(e) + 4.0
        );
    }
    let step = ((max_x / 10.0).ceil() as usize).max(1);
    for k in (0..=max_x as usize).step_by(step) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            x(k),
            TOP + plot_h + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/><line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{b:.2}" stroke="black"/>"#,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Opportunity</text><text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">Error rate</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, curve) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if curve.points.is_empty() {
            continue;
        }
        let upper: Vec<String> = curve.points.iter().map(|p| format!("{:.2},{:.2}", x(p.opportunity), y(p.ci_high))).collect();
        let lower: Vec<String> = curve.points.iter().rev().map(|p| format!("{:.2},{:.2}", x(p.opportunity), y(p.ci_low))).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = curve.points.iter().map(|p| format!("{:.2},{:.2}", x(p.opportunity), y(p.error_rate))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "));
    }

    for (i, label) in labels.iter().enumerate().take(curves.len()) {
        let color = COLORS[i % COLORS.len()];
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{:.2}" width="14" height="10" fill="{color}"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 9.0,
            lx + 20.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logs::CurvePoint;

    fn flat(n: usize, e: f64) -> LearningCurve {
        LearningCurve {
            points: (0..n)
                .map(|k| CurvePoint { opportunity: k, error_rate: e, n: 1, ci_low: e, ci_high: e })
                .collect(),
        }
    }

    #[test]
    fn flat_zero_sits_on_the_baseline() {
        let svg = render_curve_svg(&[flat(5, 0.0)], &["zero"]);
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let base = format!("{:.2}", HEIGHT - BOTTOM);
        let pts = line.split('"').nth(1).unwrap();
        assert!(pts.split(' ').all(|p| p.ends_with(&format!(",{base}"))), "{pts}");
    }

    #[test]
    fn deterministic_and_escaped() {
        let a = render_curve_svg(&[flat(3, 0.5), flat(4, 0.2)], &["a<b", "c&d"]);
        assert_eq!(a, render_curve_svg(&[flat(3, 0.5), flat(4, 0.2)], &["a<b", "c&d"]));
        assert!(a.contains("a&lt;b") && a.contains("c&amp;d"));
    }
}
