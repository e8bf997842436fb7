//! Minimal SVG renderings of result tables: line panels for sweeps and a
//! case heat map for region maps. The CSV stays the record; plots are drawn
//! from it.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::run::Table;
use crate::spec::ScenarioKind;

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 48.0;
const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn render(scenario: ScenarioKind, table: &Table) -> String {
    match scenario {
        ScenarioKind::Baseline => lines(table, "alpha1", &[], &["p1_star", "n1_star", "pi0_star"]),
        ScenarioKind::Monopolistic => lines(
            table,
            "gamma",
            &["alpha1", "alpha2"],
            &["p1_star", "p2_star", "n1_star", "n2_star", "pi_m_star"],
        ),
        ScenarioKind::Strategic => lines(
            table,
            "gamma",
            &["alpha1", "alpha2", "delta"],
            &["p1_star", "p2_star", "n1_star", "n2_star", "pi1_star", "pi2_star"],
        ),
        ScenarioKind::Feasibility => lines(
            table,
            "gamma",
            &["alpha1", "alpha2", "delta"],
            &["pi0_star", "pi_m_star", "pi1_star", "pi2_star", "n_total_mono", "n_total_strat"],
        ),
        ScenarioKind::RegionMap => heatmap(table),
        ScenarioKind::Sim => String::new(),
    }
}

fn cell(table: &Table, row: &[String], name: &str) -> Option<f64> {
    table.column(name).and_then(|i| row[i].parse().ok())
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn lines(table: &Table, x: &str, keys: &[&str], ys: &[&str]) -> String {
    // Series in order of first appearance.
    let mut order: Vec<String> = Vec::new();
    let mut series: BTreeMap<String, Vec<&Vec<String>>> = BTreeMap::new();
    for row in &table.rows {
        let label = keys
            .iter()
            .filter_map(|k| table.column(k).map(|i| format!("{k}={}", row[i])))
            .collect::<Vec<_>>()
            .join(" ");
        if !series.contains_key(&label) {
            order.push(label.clone());
        }
        series.entry(label).or_default().push(row);
    }
    let legend_h = 16.0 * order.len() as f64;
    let height = ys.len() as f64 * (PANEL_H + MARGIN) + MARGIN + legend_h;
    let width = PANEL_W + 2.0 * MARGIN;
    let mut svg = header(width, height);
    let (x_lo, x_hi) = extent(table.rows.iter().filter_map(|r| cell(table, r, x)));

    for (k, y) in ys.iter().enumerate() {
        let top = MARGIN + k as f64 * (PANEL_H + MARGIN);
        let (y_lo, y_hi) = extent(table.rows.iter().filter_map(|r| cell(table, r, y)));
        let sx = |v: f64| MARGIN + (v - x_lo) / (x_hi - x_lo) * PANEL_W;
        let sy = |v: f64| top + PANEL_H - (v - y_lo) / (y_hi - y_lo) * PANEL_H;
        let frame = Frame { left: MARGIN, top, width: PANEL_W, height: PANEL_H };
        axes(&mut svg, frame, x, y, (x_lo, x_hi), (y_lo, y_hi));
        for (s, label) in order.iter().enumerate() {
            let color = PALETTE[s % PALETTE.len()];
            // Missing values split the line.
            let mut path = String::new();
            let mut pen_down = false;
            for row in &series[label] {
                match (cell(table, row, x), cell(table, row, y)) {
                    (Some(a), Some(b)) => {
                        let cmd = if pen_down { 'L' } else { 'M' };
                        let _ = write!(path, "{cmd}{:.2},{:.2} ", sx(a), sy(b));
                        pen_down = true;
                    }
                    _ => pen_down = false,
                }
            }
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.trim_end()
            );
        }
    }
    let legend_top = height - legend_h - 4.0;
    for (s, label) in order.iter().enumerate() {
        let yy = legend_top + 16.0 * s as f64 + 12.0;
        let color = PALETTE[s % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{m}" y1="{y0}" x2="{m2}" y2="{y0}" stroke="{color}" stroke-width="3"/><text x="{t}" y="{y1}" font-size="11">{}</text>"#,
            escape(if label.is_empty() { "all" } else { label }),
            m = MARGIN,
            m2 = MARGIN + 20.0,
            y0 = yy - 4.0,
            t = MARGIN + 26.0,
            y1 = yy,
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn heatmap(table: &Table) -> String {
    let cells: Vec<(f64, f64, &str)> = table
        .rows
        .iter()
        .filter_map(|r| Some((cell(table, r, "p1")?, cell(table, r, "p2")?, r[2].as_str())))
        .collect();
    let mut p1s: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let mut p2s: Vec<f64> = cells.iter().map(|c| c.1).collect();
    for v in [&mut p1s, &mut p2s] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let side = PANEL_W;
    let (w, h) = (
        side / p1s.len().max(1) as f64,
        side / p2s.len().max(1) as f64,
    );
    let mut svg = header(side + 2.0 * MARGIN, side + 2.0 * MARGIN + 20.0);
    let color = |case: &str| match case {
        "I" => "#4c72b0",
        "II" => "#dd8452",
        "III" => "#55a868",
        _ => "#dddddd",
    };
    for (p1, p2, case) in &cells {
        let i = p1s.partition_point(|v| v < p1);
        let j = p2s.partition_point(|v| v < p2);
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            MARGIN + i as f64 * w,
            MARGIN + side - (j + 1) as f64 * h,
            w + 0.05,
            h + 0.05,
            color(case)
        );
    }
    let (x_range, y_range) = (extent(p1s.iter().copied()), extent(p2s.iter().copied()));
    let frame = Frame { left: MARGIN, top: MARGIN, width: side, height: side };
    axes(&mut svg, frame, "p1", "p2", x_range, y_range);
    for (k, case) in ["I", "II", "III", "IV"].iter().enumerate() {
        let x = MARGIN + 70.0 * k as f64;
        let y = side + 2.0 * MARGIN;
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{y}" font-size="11">Case {case}</text>"#,
            y - 10.0,
            color(case),
            x + 16.0,
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

fn axes(svg: &mut String, f: Frame, x: &str, y: &str, xr: (f64, f64), yr: (f64, f64)) {
    let Frame { left, top, width, height } = f;
    let (right, bottom) = (left + width, top + height);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{width}" height="{height}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{left}" y="{}" font-size="11">{}</text><text x="{right}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        bottom + 14.0,
        short(xr.0),
        bottom + 14.0,
        short(xr.1),
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        left + width / 2.0,
        bottom + 28.0,
        escape(x)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{bottom}" font-size="11" text-anchor="end">{}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        left - 4.0,
        short(yr.0),
        left - 4.0,
        top + 10.0,
        short(yr.1),
    );
    let _ = writeln!(
        svg,
        r#"<text x="{left}" y="{}" font-size="12">{}</text>"#,
        top - 6.0,
        escape(y)
    );
}

fn short(v: f64) -> String {
    format!("{v:.4}")
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
