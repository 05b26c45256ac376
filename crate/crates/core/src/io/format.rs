//! Instance files.
//!
//! * `matrix`: `KMEDIAN 1`, then `nF nC k`, then the full `(nF+nC)²`
//!   distance matrix row by row, facilities first.
//! * `coord`: `KMEDIAN-COORD 1`, then `nF nC k dim`, then one point per
//!   line, facilities first; distances are Euclidean.
//! * `pmed`: OR-Library p-median files. `n m p`, then `m` lines `u v w` with
//!   1-based vertices and integer weights. Every vertex is both a facility
//!   and a client; distances are shortest-path lengths. A repeated edge
//!   overrides the earlier one.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::Instance;

use super::generate::euclidean;

pub const MATRIX_HEADER: &str = "KMEDIAN 1";
pub const COORD_HEADER: &str = "KMEDIAN-COORD 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Matrix,
    Coord,
    Pmed,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(Format::Matrix),
            "coord" => Ok(Format::Coord),
            "pmed" => Ok(Format::Pmed),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?}"))),
        }
    }
}

/// Whitespace tokens with their 1-based line numbers.
struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(lines: impl Iterator<Item = (usize, &'a str)> + 'a) -> Self {
        Tokens {
            inner: Box::new(lines.flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)))),
            last_line: 0,
        }
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let (line, tok) = self.inner.next().ok_or_else(|| Error::Parse {
            line: self.last_line.max(1),
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        self.last_line = line;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, found {tok:?}"),
        })
    }

    fn finish(mut self) -> Result<()> {
        match self.inner.next() {
            None => Ok(()),
            Some((line, tok)) => Err(Error::Parse {
                line,
                msg: format!("trailing data {tok:?}"),
            }),
        }
    }
}

fn numbered(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.find(|(_, l)| !l.trim().is_empty()) {
        Some((_, l)) if l.trim() == header => Ok(()),
        Some((n, l)) => Err(Error::Parse {
            line: n,
            msg: format!("expected header {header:?}, found {:?}", l.trim()),
        }),
        None => Err(Error::Parse {
            line: 1,
            msg: format!("empty input, expected header {header:?}"),
        }),
    }
}

/// Parses instance text. With `strict`, an asymmetric matrix is rejected.
pub fn parse_instance(text: &str, format: Format, strict: bool) -> Result<Instance> {
    let inst = match format {
        Format::Matrix => parse_matrix(text)?,
        Format::Coord => parse_coord(text)?,
        Format::Pmed => parse_pmed(text)?,
    };
    if strict {
        let report = inst.validate();
        if report.has_asymmetry() {
            return Err(Error::InvalidInstance(format!("asymmetric distances:\n{report}")));
        }
    }
    Ok(inst)
}

fn parse_matrix(text: &str) -> Result<Instance> {
    let mut lines = numbered(text);
    expect_header(&mut lines, MATRIX_HEADER)?;
    let mut tok = Tokens::new(lines);
    let nf: usize = tok.next("nF")?;
    let nc: usize = tok.next("nC")?;
    let k: usize = tok.next("k")?;
    let n = nf + nc;
    let mut dist = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        dist.push(tok.next::<f64>("distance")?);
    }
    tok.finish()?;
    Instance::from_matrix(k, nf, nc, dist)
}

fn parse_coord(text: &str) -> Result<Instance> {
    let mut lines = numbered(text);
    expect_header(&mut lines, COORD_HEADER)?;
    let mut tok = Tokens::new(lines);
    let nf: usize = tok.next("nF")?;
    let nc: usize = tok.next("nC")?;
    let k: usize = tok.next("k")?;
    let dim: usize = tok.next("dim")?;
    if dim == 0 {
        return Err(Error::InvalidInstance("dimension must be positive".into()));
    }
    let mut points = Vec::with_capacity(nf + nc);
    for _ in 0..nf + nc {
        let p = (0..dim).map(|_| tok.next::<f64>("coordinate")).collect::<Result<Vec<_>>>()?;
        points.push(p);
    }
    tok.finish()?;
    Instance::from_fn(k, nf, nc, |p, q| euclidean(&points[p], &points[q]))
}

fn parse_pmed(text: &str) -> Result<Instance> {
    let mut tok = Tokens::new(numbered(text));
    let n: usize = tok.next("vertex count")?;
    let m: usize = tok.next("edge count")?;
    let p: usize = tok.next("p")?;
    if n == 0 {
        return Err(Error::InvalidInstance("graph has no vertices".into()));
    }
    const NONE: i64 = i64::MAX;
    let mut w = vec![NONE; n * n];
    for v in 0..n {
        w[v * n + v] = 0;
    }
    for _ in 0..m {
        let u: usize = tok.next("edge endpoint")?;
        let v: usize = tok.next("edge endpoint")?;
        let line = tok.last_line;
        let weight: i64 = tok.next("integer edge weight")?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::Parse {
                line,
                msg: format!("edge {u}-{v} outside vertices 1..={n}"),
            });
        }
        if weight < 0 {
            return Err(Error::Parse {
                line,
                msg: format!("negative weight {weight}"),
            });
        }
        if u != v {
            w[(u - 1) * n + (v - 1)] = weight;
            w[(v - 1) * n + (u - 1)] = weight;
        }
    }
    tok.finish()?;

    for via in 0..n {
        for a in 0..n {
            let da = w[a * n + via];
            if da == NONE {
                continue;
            }
            for b in 0..n {
                let db = w[via * n + b];
                if db != NONE && da + db < w[a * n + b] {
                    w[a * n + b] = da + db;
                }
            }
        }
    }
    let reached = w[..n].iter().filter(|&&d| d != NONE).count();
    if reached < n {
        return Err(Error::Disconnected {
            vertex: 1,
            size: reached,
            total: n,
        });
    }

    Instance::from_fn(p, n, n, |a, b| w[(a % n) * n + b % n] as f64)
}

/// Reads an instance, named after the file stem.
pub fn read_instance(path: impl AsRef<Path>, format: Format, strict: bool) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let inst = parse_instance(&text, format, strict)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(inst.with_name(name))
}

/// Matrix-format text; floats use the shortest exact representation.
pub fn format_matrix(inst: &Instance) -> String {
    let n = inst.n_points();
    let mut s = String::new();
    writeln!(s, "{MATRIX_HEADER}").unwrap();
    writeln!(s, "{} {} {}", inst.n_facilities(), inst.n_clients(), inst.k()).unwrap();
    for row in inst.matrix().chunks(n) {
        let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    s
}

pub fn write_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<()> {
    std::fs::write(path, format_matrix(inst))?;
    Ok(())
}
