//! Plain-text graph files and run reports.
//!
//! A graph file is a `wlgraph <n> <r>` header followed by `n` rows of `n`
//! space-separated positive colors. Lines starting with `#` and blank lines
//! are ignored anywhere. On reading, colors are renumbered by rank among the
//! distinct values, so a file whose colors are already `1..=r` reads back
//! unchanged and permuted copies of a graph keep the same color ids. `r` must
//! equal the number of distinct colors.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::coloring::ColorMatrix;
use crate::error::{Error, Result};

pub const MAGIC: &str = "wlgraph";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses a graph file.
pub fn parse_graph<R: BufRead>(reader: R) -> Result<ColorMatrix> {
    let mut header: Option<(usize, usize)> = None;
    let mut cells: Vec<u32> = Vec::new();
    let mut rows_read = 0usize;
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some((n, _)) = header else {
            let mut tokens = text.split_whitespace();
            if tokens.next() != Some(MAGIC) {
                return Err(parse_err(lineno, format!("expected `{MAGIC} <n> <r>` header")));
            }
            let mut field = |name: &str| -> Result<usize> {
                tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| parse_err(lineno, format!("header needs a positive {name}")))
            };
            let n = field("n")?;
            let r = field("r")?;
            if tokens.next().is_some() {
                return Err(parse_err(lineno, "trailing tokens in header"));
            }
            if n > crate::coloring::MAX_VERTICES {
                return Err(Error::TooLarge(n));
            }
            cells.reserve_exact(n * n);
            header = Some((n, r));
            continue;
        };
        if rows_read == n {
            return Err(parse_err(lineno, format!("more than {n} rows")));
        }
        let before = cells.len();
        for token in text.split_whitespace() {
            let value: u32 = token
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad color `{token}`")))?;
            if value == 0 {
                return Err(Error::NonPositiveEntry {
                    row: rows_read,
                    col: cells.len() - before,
                    value: 0,
                });
            }
            cells.push(value);
        }
        let len = cells.len() - before;
        if len != n {
            return Err(Error::NonSquare { row: rows_read, len, n });
        }
        rows_read += 1;
    }
    let Some((n, r)) = header else {
        return Err(parse_err(last_line, "missing header"));
    };
    if rows_read != n {
        return Err(parse_err(last_line, format!("expected {n} rows, found {rows_read}")));
    }
    let matrix = ColorMatrix::from_ranked(n, cells)?;
    if matrix.r() as usize != r {
        return Err(parse_err(
            1,
            format!("header says {r} colors, grid has {}", matrix.r()),
        ));
    }
    Ok(matrix)
}

/// Reads a graph file and returns it with the hex SHA-256 of its bytes.
pub fn read_graph_file(path: &Path) -> Result<(ColorMatrix, String)> {
    let bytes = fs::read(path)?;
    let digest = hex_digest(&bytes);
    let matrix = parse_graph(&bytes[..])?;
    Ok((matrix, digest))
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn write_graph<W: Write>(mut out: W, x: &ColorMatrix) -> std::io::Result<()> {
    writeln!(out, "{MAGIC} {} {}", x.n(), x.r())?;
    let mut line = String::new();
    for u in 0..x.n() {
        line.clear();
        for (i, c) in x.row(u).iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{c}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = BufWriter::new(tmp.as_file());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_graph_file(path: &Path, x: &ColorMatrix) -> Result<()> {
    write_atomic(path, |w| write_graph(w, x))
}

/// Machine-readable summary of one `close` run, one `key: value` per line.
/// Only the `time_*` lines vary between runs with identical inputs and seeds.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub input_digest: String,
    pub n: usize,
    pub r_input: u32,
    pub r_closure: u32,
    pub mode: String,
    pub iterations: usize,
    pub refining_iterations: usize,
    pub trace: Vec<usize>,
    pub stopping_reason: String,
    pub seed: Option<u64>,
    pub m: Option<u64>,
    pub policy: Option<String>,
    pub backend: Option<String>,
    pub max_value: Option<i64>,
    /// Extra analysis lines, e.g. error bounds.
    pub notes: Vec<(String, String)>,
    /// Phase name and seconds.
    pub timings: Vec<(String, f64)>,
    pub closure: Option<ColorMatrix>,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input_digest: {}", self.input_digest)?;
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "r_input: {}", self.r_input)?;
        if let Some(seed) = self.seed {
            writeln!(f, "seed: {seed}")?;
        }
        if let Some(m) = self.m {
            writeln!(f, "m: {m}")?;
        }
        if let Some(policy) = &self.policy {
            writeln!(f, "policy: {policy}")?;
        }
        if let Some(backend) = &self.backend {
            writeln!(f, "backend: {backend}")?;
        }
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "refining_iterations: {}", self.refining_iterations)?;
        let trace: Vec<String> = self.trace.iter().map(usize::to_string).collect();
        writeln!(f, "trace: {}", trace.join(" "))?;
        writeln!(f, "stopping_reason: {}", self.stopping_reason)?;
        if let Some(max) = self.max_value {
            writeln!(f, "max_value: {max}")?;
        }
        for (key, value) in &self.notes {
            writeln!(f, "{key}: {value}")?;
        }
        writeln!(f, "r_closure: {}", self.r_closure)?;
        for (phase, secs) in &self.timings {
            writeln!(f, "time_{phase}_s: {secs:.6}")?;
        }
        if let Some(closure) = &self.closure {
            writeln!(f, "closure:")?;
            let mut buf = Vec::new();
            write_graph(&mut buf, closure).map_err(|_| fmt::Error)?;
            f.write_str(&String::from_utf8_lossy(&buf))?;
        }
        Ok(())
    }
}
