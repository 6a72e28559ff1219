//! Report files: one bits-versus-G table per scenario, the convergence
//! series, a JSON summary and an SVG plot.

use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::experiment::{ExperimentReport, ScenarioReport};

/// One line of a `table_<scenario>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "G")]
    pub cluster_size: usize,
    pub baseline_bits: u64,
    pub huffman_bits_frozen: f64,
    pub huffman_bits_adaptive: f64,
    pub entropy: f64,
}

/// One line of `convergence.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub scenario: String,
    #[serde(rename = "G")]
    pub cluster_size: usize,
    pub t: usize,
    pub mean_bits: f64,
}

pub fn table_rows(s: &ScenarioReport) -> Vec<TableRow> {
    s.rows
        .iter()
        .map(|r| TableRow {
            cluster_size: r.cluster_size,
            baseline_bits: r.baseline_bits,
            huffman_bits_frozen: r.huffman_bits_frozen,
            huffman_bits_adaptive: r.huffman_bits_adaptive,
            entropy: r.entropy,
        })
        .collect()
}

pub fn convergence_rows(report: &ExperimentReport) -> Vec<ConvergenceRow> {
    let mut out = Vec::new();
    for s in &report.scenarios {
        for r in &s.rows {
            out.extend(r.convergence.iter().enumerate().map(|(i, &b)| ConvergenceRow {
                scenario: s.name.clone(),
                cluster_size: r.cluster_size,
                t: i + 1,
                mean_bits: b,
            }));
        }
    }
    out
}

pub fn table_file_name(scenario: &str) -> String {
    format!("table_{scenario}.csv")
}

fn csv_error(path: &Path, e: csv::Error) -> SimError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SimError::io(path, io),
        other => SimError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Writes `rows` with a header line, even when `rows` is empty.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> SimResult<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> SimResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

pub const TABLE_HEADER: [&str; 5] = [
    "G",
    "baseline_bits",
    "huffman_bits_frozen",
    "huffman_bits_adaptive",
    "entropy",
];
pub const CONVERGENCE_HEADER: [&str; 4] = ["scenario", "G", "t", "mean_bits"];

/// Writes every output file into `dir` (created if missing) and returns
/// their paths.
pub fn emit_outputs(report: &ExperimentReport, dir: &Path) -> SimResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut written = Vec::new();
    for s in &report.scenarios {
        let path = dir.join(table_file_name(&s.name));
        write_csv(&path, &TABLE_HEADER, &table_rows(s))?;
        written.push(path);
    }
    let path = dir.join("convergence.csv");
    write_csv(&path, &CONVERGENCE_HEADER, &convergence_rows(report))?;
    written.push(path);

    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&path, json + "\n").map_err(|e| SimError::io(&path, e))?;
    written.push(path);

    let path = dir.join("convergence.svg");
    plot_convergence(report, &path)?;
    written.push(path);
    Ok(written)
}

/// Mean Huffman bits against symbol index, one line per scenario and G.
pub fn plot_convergence(report: &ExperimentReport, path: &Path) -> SimResult<()> {
    let plot_err = |e: String| SimError::io(path, std::io::Error::other(e));
    let series: Vec<(String, Vec<(f64, f64)>)> = report
        .scenarios
        .iter()
        .flat_map(|s| {
            s.rows.iter().map(move |r| {
                let pts = r
                    .convergence
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| ((i + 1) as f64, b))
                    .collect();
                (format!("{} G={}", s.name, r.cluster_size), pts)
            })
        })
        .collect();
    let t_max = series.iter().map(|(_, p)| p.len()).max().unwrap_or(1).max(2) as f64;
    let y_max = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|&(_, y)| y))
        .fold(1.0f64, f64::max)
        * 1.05;

    let root = SVGBackend::new(path, (960, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Huffman feedback bits per OFDM symbol", ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(1.0..t_max, 0.0..y_max)
        .map_err(|e| plot_err(e.to_string()))?;
    chart
        .configure_mesh()
        .x_desc("OFDM symbol t")
        .y_desc("mean bits")
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    for (i, (label, pts)) in series.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(|e| plot_err(e.to_string()))?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    root.present().map_err(|e| plot_err(e.to_string()))
}
