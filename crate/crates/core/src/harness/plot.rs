//! Minimal hand-written SVG charts.

use std::fmt::Write as _;

use super::experiment::RunRecord;
use crate::optimizer::Algorithm;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn color(algo: Algorithm) -> &'static str {
    match algo {
        Algorithm::Ours => "#1f77b4",
        Algorithm::Rand => "#ff7f0e",
        Algorithm::RMax => "#2ca02c",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |a: f64, b: f64| if (b - a).abs() < 1e-12 { (a - 1.0, b + 1.0) } else { (a, b) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#);
    for i in 0..=4 {
        let fx = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        let fy = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            frame.x(fx),
            b + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            l - 6.0,
            frame.y(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, fill)) in entries.iter().enumerate() {
        let y = MARGIN + 4.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN - 110.0;
        let _ = writeln!(out, r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{fill}"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 18.0,
            y + 11.0,
            escape(label)
        );
    }
}

/// (budget, mean, min, max) per budget for one algorithm.
fn stats(records: &[RunRecord], algo: Algorithm, field: impl Fn(&RunRecord) -> f64) -> Vec<(f64, f64, f64, f64)> {
    let mut budgets: Vec<f64> = records.iter().filter(|r| r.algo == algo).map(|r| r.budget).collect();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    budgets
        .into_iter()
        .map(|b| {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.algo == algo && r.budget == b)
                .map(&field)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (b, mean, lo, hi)
        })
        .collect()
}

fn present(records: &[RunRecord]) -> Vec<Algorithm> {
    Algorithm::ALL
        .iter()
        .copied()
        .filter(|a| records.iter().any(|r| r.algo == *a))
        .collect()
}

/// Mean objective value against budget, one line per algorithm, with the
/// min..max range across Rand seeds shaded.
pub fn value_vs_budget_svg(records: &[RunRecord], title: &str) -> String {
    let algos = present(records);
    let series: Vec<_> = algos.iter().map(|&a| (a, stats(records, a, |r| r.value))).collect();
    let all = series.iter().flat_map(|(_, s)| s.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(b, _, lo, hi) in all {
        x0 = x0.min(b);
        x1 = x1.max(b);
        y0 = y0.min(lo);
        y1 = y1.max(hi);
    }
    let mut out = String::new();
    open(&mut out, title);
    if !x0.is_finite() {
        out.push_str("</svg>\n");
        return out;
    }
    let frame = Frame::new(x0, x1, y0.min(0.0), y1);
    axes(&mut out, &frame, "budget", "objective value");
    for (algo, s) in &series {
        if *algo == Algorithm::Rand && !s.is_empty() {
            let mut pts: Vec<String> = s.iter().map(|p| format!("{:.1},{:.1}", frame.x(p.0), frame.y(p.3))).collect();
            pts.extend(s.iter().rev().map(|p| format!("{:.1},{:.1}", frame.x(p.0), frame.y(p.2))));
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
                pts.join(" "),
                color(*algo)
            );
        }
        let pts: Vec<String> = s.iter().map(|p| format!("{:.1},{:.1}", frame.x(p.0), frame.y(p.1))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            color(*algo)
        );
        for p in s {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{}"/>"#,
                frame.x(p.0),
                frame.y(p.1),
                color(*algo)
            );
        }
    }
    let labels: Vec<String> = algos.iter().map(|a| a.to_string()).collect();
    let entries: Vec<(&str, &str)> = algos.iter().zip(&labels).map(|(a, l)| (l.as_str(), color(*a))).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Stacked bars of mean travel and collection energy per budget and
/// algorithm.
pub fn energy_split_svg(records: &[RunRecord], title: &str) -> String {
    let algos = present(records);
    let travel: Vec<_> = algos.iter().map(|&a| stats(records, a, |r| r.travel_energy)).collect();
    let collect: Vec<_> = algos.iter().map(|&a| stats(records, a, |r| r.collect_energy)).collect();
    let mut budgets: Vec<f64> = records.iter().map(|r| r.budget).collect();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    let mut top: f64 = 0.0;
    for (t, c) in travel.iter().zip(&collect) {
        for (a, b) in t.iter().zip(c) {
            top = top.max(a.1 + b.1);
        }
    }
    let mut out = String::new();
    open(&mut out, title);
    if budgets.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let frame = Frame::new(0.0, budgets.len() as f64, 0.0, top);
    axes(&mut out, &frame, "budget index", "energy");
    let group = (WIDTH - 2.0 * MARGIN) / budgets.len() as f64;
    let bar = group * 0.8 / algos.len().max(1) as f64;
    for (bi, &b) in budgets.iter().enumerate() {
        let gx = MARGIN + group * bi as f64 + group * 0.1;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="10">B={}</text>"#,
            gx + group * 0.4,
            HEIGHT - MARGIN - 4.0,
            tick(b)
        );
        for (ai, algo) in algos.iter().enumerate() {
            let find = |s: &[(f64, f64, f64, f64)]| s.iter().find(|p| p.0 == b).map_or(0.0, |p| p.1);
            let t = find(&travel[ai]);
            let c = find(&collect[ai]);
            let x = gx + bar * ai as f64;
            let y_t = frame.y(t);
            let y_tc = frame.y(t + c);
            let base = frame.y(0.0);
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y_t:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                bar * 0.9,
                base - y_t,
                color(*algo)
            );
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y_tc:.1}" width="{:.1}" height="{:.1}" fill="{}" fill-opacity="0.45"/>"#,
                bar * 0.9,
                y_t - y_tc,
                color(*algo)
            );
        }
    }
    let labels: Vec<String> = algos.iter().map(|a| format!("{a} travel")).collect();
    let mut entries: Vec<(&str, &str)> = algos.iter().zip(&labels).map(|(a, l)| (l.as_str(), color(*a))).collect();
    entries.push(("light: collection", "#bbbbbb"));
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// PoIs with the selected ones highlighted and the tour drawn from the
/// depot.
pub fn poi_selection_svg(coords: &[[f64; 2]], depot: [f64; 2], selected: &[usize], tour: &[usize], title: &str) -> String {
    let mut x1 = depot[0];
    let mut y1 = depot[1];
    let mut x0 = depot[0];
    let mut y0 = depot[1];
    for p in coords {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let frame = Frame::new(x0, x1, y0, y1);
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, "x", "y");
    if !tour.is_empty() {
        let mut pts = vec![format!("{:.1},{:.1}", frame.x(depot[0]), frame.y(depot[1]))];
        pts.extend(tour.iter().map(|&i| format!("{:.1},{:.1}", frame.x(coords[i][0]), frame.y(coords[i][1]))));
        pts.push(pts[0].clone());
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    for (i, p) in coords.iter().enumerate() {
        let (fill, r) = if selected.contains(&i) { ("#d62728", 5.0) } else { ("#999999", 3.0) };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.1}" cy="{:.1}" r="{r}" fill="{fill}"/>"#,
            frame.x(p[0]),
            frame.y(p[1])
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="black"/>"#,
        frame.x(depot[0]) - 5.0,
        frame.y(depot[1]) - 5.0
    );
    legend(&mut out, &[("selected", "#d62728"), ("not selected", "#999999"), ("depot", "black")]);
    out.push_str("</svg>\n");
    out
}
