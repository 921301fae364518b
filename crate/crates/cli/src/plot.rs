//! Minimal SVG line charts and a gnuplot script for trajectory CSVs.

use std::fmt::Write as _;

use inerton_core::dynamics::Trajectory;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const MAX_POINTS: usize = 4000;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in series.iter().flat_map(|s| s.points.iter()) {
        b = (b.0.min(*x), b.1.max(*x), b.2.min(*y), b.3.max(*y));
    }
    // flat data still needs a nonzero span
    if !(b.1 > b.0) {
        b.1 = b.0 + 1.0;
    }
    if !(b.3 > b.2) {
        b.2 -= 0.5;
        b.3 += 0.5;
    }
    b
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (value, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{value:.3e}</text>"#
        );
    }
    for (value, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end">{value:.3e}</text>"#,
            MARGIN - 4.0
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
        let path: Vec<String> = s
            .points
            .iter()
            .step_by(stride)
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 + 14.0 * i as f64,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Time series of `X/lambda`, `dX/dt / v0`, `x/Lambda` and `dx/dt / c`.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let p = &traj.params;
    let t = |f: &dyn Fn(&inerton_core::AggregateState) -> f64| -> Vec<(f64, f64)> {
        traj.samples
            .iter()
            .map(|s| (s.t / p.period, f(s)))
            .collect()
    };
    let series = [
        Series {
            label: "X / lambda",
            points: t(&|s| s.particle_x / p.lambda),
        },
        Series {
            label: "dX/dt / v0",
            points: t(&|s| s.particle_v / p.v0),
        },
        Series {
            label: "x / Lambda",
            points: t(&|s| s.cloud_x / p.cloud_amplitude),
        },
        Series {
            label: "dx/dt / c",
            points: t(&|s| s.cloud_v / p.c),
        },
    ];
    line_chart("Particle and cloud", "t / T", "scaled value", &series)
}

/// Cloud phase plane `(x/Lambda, dx/dt / c)` and particle velocity against
/// cloud separation.
pub fn phase_svg(traj: &Trajectory) -> String {
    let p = &traj.params;
    let series = [
        Series {
            label: "cloud",
            points: traj
                .samples
                .iter()
                .map(|s| (s.cloud_x / p.cloud_amplitude, s.cloud_v / p.c))
                .collect(),
        },
        Series {
            label: "particle",
            points: traj
                .samples
                .iter()
                .map(|s| (s.cloud_x / p.cloud_amplitude, s.particle_v / p.v0))
                .collect(),
        },
    ];
    line_chart("Phase plane", "x / Lambda", "velocity / scale", &series)
}

/// gnuplot script plotting `csv_name` next to it.
pub fn gnuplot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set multiplot layout 2,1\n\
         set xlabel 't'\n\
         plot '{csv_name}' using 1:2 with lines, '' using 1:4 with lines\n\
         set xlabel 'x'\n\
         plot '{csv_name}' using 4:5 with lines title 'cloud phase plane'\n\
         unset multiplot\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use inerton_core::dynamics::{integrate, Mode};
    use inerton_core::SystemParams;

    #[test]
    fn charts_are_well_formed() {
        let traj = integrate(&SystemParams::natural(), 2.0, 1e-3, &Mode::Aggregate).unwrap();
        for svg in [trajectory_svg(&traj), phase_svg(&traj)] {
            assert!(svg.starts_with("<svg"));
            assert!(svg.trim_end().ends_with("</svg>"));
            assert!(svg.contains("<polyline"));
            assert!(!svg.contains("NaN"));
        }
    }

    #[test]
    fn flat_series_do_not_divide_by_zero() {
        let s = [Series {
            label: "a<b",
            points: vec![(1.0, 2.0), (1.0, 2.0)],
        }];
        let svg = line_chart("t", "x", "y", &s);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert!(svg.contains("a&lt;b"));
    }
}
