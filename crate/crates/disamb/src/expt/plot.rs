//! Plot-ready trend data: one tidy CSV per (dataset, block, metric) with
//! columns ratio, classifier, mean, std, ordered by ratio with "all"
//! last; optionally rendered as simple SVG line charts.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::BlockAggregate;
use crate::learn::ModelKind;
use crate::metrics::Summary;
use crate::pairs::RatioKind;

const METRICS: [&str; 3] = ["bp", "br", "bf1"];

fn sanitize(part: &str) -> String {
    part.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn metric_summary<'a>(agg: &'a BlockAggregate, metric: &str) -> &'a Summary {
    match metric {
        "bp" => &agg.bp,
        "br" => &agg.br,
        _ => &agg.bf1,
    }
}

/// Write per-(block, metric) trend CSVs under `dir`; returns the files
/// written. Missing (classifier, ratio) cells are omitted, never imputed.
pub fn emit_plot_data(
    dir: &Path,
    aggregates: &[BlockAggregate],
    render_svg: bool,
) -> io::Result<Vec<PathBuf>> {
    if aggregates.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;

    type Cell = BTreeMap<(RatioKind, ModelKind), usize>;
    let mut by_block: BTreeMap<(String, String), Cell> = BTreeMap::new();
    for (i, agg) in aggregates.iter().enumerate() {
        by_block
            .entry((agg.key.dataset.clone(), agg.key.block_key.clone()))
            .or_default()
            .insert((agg.key.ratio, agg.key.classifier), i);
    }

    let mut written = Vec::new();
    for ((dataset, block), cells) in &by_block {
        for metric in METRICS {
            let mut csv = String::from("ratio,classifier,mean,std\n");
            let mut series: BTreeMap<ModelKind, Vec<(String, f64)>> = BTreeMap::new();
            for ((ratio, classifier), &idx) in cells {
                let summary = metric_summary(&aggregates[idx], metric);
                let std = summary
                    .std
                    .map(|s| format!("{s:.6}"))
                    .unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{:.6},{}\n",
                    ratio, classifier, summary.mean, std
                ));
                series
                    .entry(*classifier)
                    .or_default()
                    .push((ratio.label(), summary.mean));
            }
            let base = format!("{}__{}__{}", sanitize(dataset), sanitize(block), metric);
            let csv_path = dir.join(format!("{base}.csv"));
            fs::write(&csv_path, csv)?;
            written.push(csv_path);
            if render_svg {
                let svg_path = dir.join(format!("{base}.svg"));
                let title = format!("{dataset} / {block} / {metric}");
                fs::write(&svg_path, render_chart(&title, &series))?;
                written.push(svg_path);
            }
        }
    }
    Ok(written)
}

fn color_of(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::LogisticRegression => "#1f77b4",
        ModelKind::NaiveBayes => "#ff7f0e",
        ModelKind::RandomForest => "#2ca02c",
    }
}

/// A minimal line chart: one polyline per classifier, y fixed to [0, 1],
/// x spaced by ratio position.
fn render_chart(title: &str, series: &BTreeMap<ModelKind, Vec<(String, f64)>>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 50.0;
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 40.0;

    let mut x_labels: Vec<String> = Vec::new();
    for points in series.values() {
        for (label, _) in points {
            if !x_labels.contains(label) {
                x_labels.push(label.clone());
            }
        }
    }
    let n = x_labels.len().max(1);
    let x_of = |i: usize| {
        if n == 1 {
            ML + (W - ML - MR) / 2.0
        } else {
            ML + (W - ML - MR) * i as f64 / (n - 1) as f64
        }
    };
    let y_of = |v: f64| MT + (H - MT - MB) * (1.0 - v);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">{title}</text>\n",
        W / 2.0
    ));
    // Axes and y gridlines at 0, 0.25, ..., 1.
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let y = y_of(v);
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n",
            W - MR
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v:.2}</text>\n",
            ML - 6.0,
            y + 4.0
        ));
    }
    for (i, label) in x_labels.iter().enumerate() {
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{label}</text>\n",
            x_of(i),
            H - MB + 18.0
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>\n",
        y_of(0.0),
        W - MR,
        y_of(0.0)
    ));

    for (kind, points) in series {
        let coords: Vec<String> = points
            .iter()
            .filter_map(|(label, mean)| {
                x_labels
                    .iter()
                    .position(|l| l == label)
                    .map(|i| format!("{:.1},{:.1}", x_of(i), y_of(*mean)))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color_of(*kind),
            coords.join(" ")
        ));
    }
    // Legend.
    for (i, kind) in series.keys().enumerate() {
        let y = MT + 14.0 * i as f64;
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"3\" fill=\"{}\"/>\n",
            W - MR - 70.0,
            y,
            color_of(*kind)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{kind}</text>\n",
            W - MR - 55.0,
            y + 5.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
