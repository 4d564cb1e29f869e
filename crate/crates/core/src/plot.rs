//! Static SVG line chart of mean sum secrecy rate against the power split,
//! one series per scheme.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::SweepResult;
use crate::precoder::Scheme;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn color(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::ZfConv => "#1f77b4",
        Scheme::RzfConv => "#ff7f0e",
        Scheme::ZfEveFull => "#2ca02c",
        Scheme::RzfEveFull => "#d62728",
        Scheme::ZfEveLimited => "#9467bd",
        Scheme::RzfEveLimited => "#8c564b",
        Scheme::NonlinearSocp => "#000000",
    }
}

fn dash(scheme: Scheme) -> &'static str {
    if scheme.is_zf() {
        " stroke-dasharray=\"6 4\""
    } else {
        ""
    }
}

/// Smallest "round" number (1, 2 or 5 times a power of ten) at or above `x`.
fn nice_ceil(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * p)
        .find(|&v| v >= x * (1.0 - 1e-12))
        .unwrap_or(10.0 * p)
}

pub fn plot_file_name(n_users: usize) -> String {
    format!("sum_secrecy_rate_k{n_users}.svg")
}

/// Renders the chart. Output depends only on `result`.
pub fn render_svg(result: &SweepResult) -> String {
    let cfg = &result.config;
    let (x0, x1) = cfg
        .phi_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
    let y_max = nice_ceil(
        result
            .cells
            .iter()
            .map(|c| c.mean_sum_secrecy_rate)
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max),
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">Sum secrecy rate vs power splitting factor (K = {}, N = {}, M = {})</text>",
        LEFT + plot_w / 2.0,
        cfg.n_users,
        cfg.n_bs_antennas,
        cfg.n_eve_antennas
    );

    // grid and ticks
    for i in 0..=5 {
        let yv = y_max * i as f64 / 5.0;
        let y = sy(yv);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT:.1}\" y1=\"{y:.2}\" x2=\"{:.1}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            y + 4.0,
            trim(yv)
        );
    }
    for i in 0..=10 {
        let xv = x0 + (x1 - x0) * i as f64 / 10.0;
        let x = sx(xv);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{TOP:.1}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"#eeeeee\"/>",
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            TOP + plot_h + 18.0,
            trim(xv)
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT:.1}\" y=\"{TOP:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">Power splitting factor \u{3c6}</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">Mean sum secrecy rate (bit/s/Hz)</text>",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // series and legend
    for (idx, &scheme) in cfg.schemes.iter().enumerate() {
        let col = color(scheme);
        let points: Vec<(f64, f64)> = result
            .curve(scheme)
            .iter()
            .filter(|c| c.mean_sum_secrecy_rate.is_finite())
            .map(|c| (sx(c.phi), sy(c.mean_sum_secrecy_rate)))
            .collect();
        let _ = writeln!(s, "<g class=\"series\" data-scheme=\"{}\">", scheme.id());
        let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{col}\" stroke-width=\"2\"{}/>",
            path.join(" "),
            dash(scheme)
        );
        for (x, y) in &points {
            let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{col}\"/>");
        }
        let _ = writeln!(s, "</g>");

        let ly = TOP + 14.0 + 22.0 * idx as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{col}\" stroke-width=\"2\"{}/>",
            lx + 26.0,
            dash(scheme)
        );
        let _ = writeln!(
            s,
            "<text class=\"legend\" x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            lx + 32.0,
            ly + 4.0,
            scheme.id()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim(x: f64) -> String {
    let t = format!("{x:.3}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(result)).map_err(|e| Error::io(path, e))
}
