//! Plain-text codebook and matrix files.
//!
//! ```text
//! # optional comments
//! Mt N
//! re im re im ...   (one line per codeword, 2*Mt numbers)
//! ```
//!
//! Matrix files use the same layout with a `rows cols` header and one line
//! of `2*cols` numbers per row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use grassfeed_core::codebook::{Codebook, CodebookSource, NORM_TOLERANCE};
use grassfeed_core::numerics::{norm2, ComplexMatrix};
use grassfeed_core::Complex64;

use crate::error::{SimError, SimResult};

#[derive(Clone, Copy)]
enum Header {
    /// `rows cols`
    RowsCols,
    /// `cols rows`, the codebook's `Mt N`
    ColsRows,
}

struct Block {
    cols: usize,
    /// Each row with the line it came from.
    rows: Vec<(usize, Vec<Complex64>)>,
}

fn parse_block(path: &Path, text: &str, order: Header) -> SimResult<Block> {
    let err = |line: usize, message: String| SimError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header line".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| err(hline, format!("bad header {header:?}: {e}")))?;
    let [a, b] = dims[..] else {
        return Err(err(hline, format!("header must hold two counts, got {header:?}")));
    };
    let (nrows, cols) = match order {
        Header::RowsCols => (a, b),
        Header::ColsRows => (b, a),
    };
    if nrows == 0 || cols == 0 {
        return Err(err(hline, "dimensions must be positive".into()));
    }

    let mut rows = Vec::with_capacity(nrows);
    for (lineno, line) in lines {
        if rows.len() == nrows {
            return Err(err(
                lineno,
                format!("more than the {nrows} rows announced in the header"),
            ));
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| err(lineno, format!("bad number: {e}")))?;
        if nums.len() != 2 * cols {
            return Err(err(
                lineno,
                format!("expected {} numbers (re/im interleaved), got {}", 2 * cols, nums.len()),
            ));
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(err(lineno, "non-finite entry".into()));
        }
        rows.push((lineno, nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()));
    }
    if rows.len() != nrows {
        return Err(err(
            text.lines().count().max(1),
            format!("header announces {nrows} rows, file has {}", rows.len()),
        ));
    }
    Ok(Block { cols, rows })
}

fn read(path: &Path) -> SimResult<String> {
    fs::read_to_string(path).map_err(|e| SimError::io(path, e))
}

fn write(path: &Path, text: &str) -> SimResult<()> {
    fs::write(path, text).map_err(|e| SimError::io(path, e))
}

/// Parses codebook text. `path` only labels diagnostics.
pub fn parse_codebook(path: &Path, text: &str) -> SimResult<Codebook> {
    let block = parse_block(path, text, Header::ColsRows)?;
    for (line, v) in &block.rows {
        let n = norm2(v);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("codeword norm {n} is not within {NORM_TOLERANCE:e} of 1"),
            });
        }
    }
    let lines: Vec<usize> = block.rows.iter().map(|(l, _)| *l).collect();
    let vectors = block.rows.into_iter().map(|(_, v)| v).collect();
    let source = CodebookSource::File(path.display().to_string());
    Codebook::new(block.cols, vectors, source).map_err(|e| {
        // point duplicate-line errors at the file
        let msg = e.to_string();
        let line = first_vector_index(&msg)
            .and_then(|i| lines.get(i).copied())
            .unwrap_or(1);
        SimError::Parse {
            path: path.to_path_buf(),
            line,
            message: msg,
        }
    })
}

fn first_vector_index(msg: &str) -> Option<usize> {
    let rest = &msg[msg.find("vectors ").or_else(|| msg.find("vector "))?..];
    rest.split_whitespace().nth(1)?.parse().ok()
}

pub fn load_codebook(path: &Path) -> SimResult<Codebook> {
    parse_codebook(path, &read(path)?)
}

pub fn format_codebook(cb: &Codebook) -> String {
    let mut out = String::new();
    writeln!(out, "# min chordal distance {}", cb.min_distance()).unwrap();
    writeln!(out, "{} {}", cb.dim(), cb.size()).unwrap();
    for v in cb.vectors() {
        push_row(&mut out, v);
    }
    out
}

pub fn save_codebook(cb: &Codebook, path: &Path) -> SimResult<()> {
    write(path, &format_codebook(cb))
}

pub fn parse_matrix(path: &Path, text: &str) -> SimResult<ComplexMatrix> {
    let block = parse_block(path, text, Header::RowsCols)?;
    let rows = block.rows.len();
    let data = block.rows.into_iter().flat_map(|(_, v)| v).collect();
    Ok(ComplexMatrix::from_vec(rows, block.cols, data)?)
}

pub fn load_matrix(path: &Path) -> SimResult<ComplexMatrix> {
    parse_matrix(path, &read(path)?)
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        push_row(&mut out, m.row(r));
    }
    out
}

pub fn save_matrix(m: &ComplexMatrix, path: &Path) -> SimResult<()> {
    write(path, &format_matrix(m))
}

fn push_row(out: &mut String, v: &[Complex64]) {
    let fields: Vec<String> = v.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
    out.push_str(&fields.join(" "));
    out.push('\n');
}
