use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::summary::{Summary, SummaryRow};
use crate::error::{CboError, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    BestSoFar,
    CumulativeRegret,
}

impl PlotMetric {
    fn label(&self) -> &'static str {
        match self {
            PlotMetric::BestSoFar => "best so far (mean ± 1 std)",
            PlotMetric::CumulativeRegret => "cumulative regret (mean ± 1 std)",
        }
    }

    fn value(&self, r: &SummaryRow) -> Option<(f64, f64)> {
        match self {
            PlotMetric::BestSoFar => Some((r.mean_best, r.std_best)),
            PlotMetric::CumulativeRegret => r.mean_cum_regret.zip(r.std_cum_regret),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one line per method with a shaded ±1 std band.
pub fn render_svg(summary: &Summary, metric: PlotMetric) -> Result<String> {
    let methods = summary.method_names();
    if methods.is_empty() {
        return Err(CboError::Config("nothing to plot: no methods in summary".into()));
    }
    let series: Vec<(&str, Vec<(f64, f64, f64)>)> = methods
        .iter()
        .map(|&m| {
            let points = summary
                .rows_for(m)
                .filter_map(|r| metric.value(r).map(|(mean, std)| (r.iteration as f64, mean, std)))
                .collect();
            (m, points)
        })
        .collect();
    if series.iter().all(|(_, p): &(&str, Vec<_>)| p.is_empty()) {
        return Err(CboError::Config("nothing to plot: metric missing from summary".into()));
    }

    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x_max, mut y_min, mut y_max) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, m, s) in all {
        x_max = x_max.max(x);
        y_min = y_min.min(m - s);
        y_max = y_max.max(m + s);
    }
    if x_max <= 0.0 {
        x_max = 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let fx = i as f64 / 5.0;
        let xv = fx * x_max;
        let px = sx(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            format_tick(xv)
        );
        let yv = y_min + fx * (y_max - y_min);
        let py = sy(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            format_tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(metric.label())
    );

    for (k, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if points.is_empty() {
            continue;
        }
        let mut band = String::new();
        for &(x, m, s) in points {
            let _ = write!(band, "{:.2},{:.2} ", sx(x), sy(m + s));
        }
        for &(x, m, s) in points.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(x), sy(m - s));
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = points
            .iter()
            .map(|&(x, m, _)| format!("{:.2},{:.2}", sx(x), sy(m)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"><title>{}</title></polyline>"#,
            line.join(" "),
            escape(name)
        );
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx:.2}" y="{:.2}" width="18" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            ly - 2.0,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e5) {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Writes the best-so-far chart. Nothing is written if there is nothing to plot.
pub fn plot_svg(summary: &Summary, path: impl AsRef<Path>) -> Result<()> {
    plot_svg_metric(summary, PlotMetric::BestSoFar, path)
}

pub fn plot_svg_metric(summary: &Summary, metric: PlotMetric, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(summary, metric)?;
    let path = path.as_ref();
    fs::write(path, svg).map_err(|e| CboError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::summary::MethodSummary;

    fn summary(methods: &[&str]) -> Summary {
        let mut s = Summary::default();
        for (k, m) in methods.iter().enumerate() {
            for i in 0..4 {
                s.rows.push(SummaryRow {
                    method: m.to_string(),
                    iteration: i,
                    runs: 2,
                    mean_best: 3.0 - i as f64 * 0.5 - k as f64,
                    std_best: 0.1,
                    mean_cum_regret: None,
                    std_cum_regret: None,
                });
            }
            s.methods.push(MethodSummary {
                method: m.to_string(),
                runs: 2,
                final_best_mean: 0.0,
                final_best_std: 0.0,
                mean_regret: None,
            });
        }
        s
    }

    #[test]
    fn one_polyline_per_method() {
        let svg = render_svg(&summary(&["random", "cbo<lookup>"]), PlotMetric::BestSoFar).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains("cbo&lt;lookup&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_summary_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.svg");
        assert!(plot_svg(&Summary::default(), &p).is_err());
        assert!(!p.exists());
        assert!(plot_svg_metric(&summary(&["a"]), PlotMetric::CumulativeRegret, &p).is_err());
        assert!(!p.exists());
        plot_svg(&summary(&["a"]), &p).unwrap();
        assert!(p.exists());
    }
}
