//! Output formats: binary PGM images and CSV point dumps.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzySet;
use crate::grid::GridFuzzySet;
use crate::scalar::Scalar;

/// Binary PGM (P5, maxval 255). The first image row is the highest world
/// `y`; each pixel is `round(255 · level)`.
pub fn render_pgm(grid: &GridFuzzySet) -> Vec<u8> {
    let (w, h) = (grid.width(), grid.height());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for row in (0..h).rev() {
        out.extend(grid.row(row).iter().map(|&l| pixel(l)));
    }
    out
}

pub fn pixel(level: f64) -> u8 {
    (255.0 * level.clamp(0.0, 1.0)).round() as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PgmHeader {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Byte offset of the pixel payload.
    pub data_offset: usize,
}

/// Parses a P5 header (whitespace separated, `#` comments allowed).
pub fn parse_pgm_header(bytes: &[u8]) -> Result<PgmHeader> {
    let bad = |m: &str| Error::Parse {
        line: 1,
        column: 1,
        message: format!("PGM: {m}"),
    };
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("magic number is not P5"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad number"));
    let header = PgmHeader {
        width: num(fields[1])?,
        height: num(fields[2])?,
        maxval: num(fields[3])?
            .try_into()
            .map_err(|_| bad("maxval too large"))?,
        // exactly one whitespace byte after maxval
        data_offset: pos + 1,
    };
    Ok(header)
}

/// CSV with header `x,y,level,iteration` (coordinates named `x1..xD` when
/// `D ≠ 2`). Levels and coordinates use the scalar's textual form.
pub fn write_csv<'a, S: Scalar>(
    iterates: impl IntoIterator<Item = (usize, &'a FuzzySet<S>)>,
) -> String {
    let mut iter = iterates.into_iter().peekable();
    let dim = iter.peek().map_or(2, |(_, u)| u.dim());
    let mut out = String::new();
    let names: Vec<String> = match dim {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        d => (1..=d).map(|k| format!("x{k}")).collect(),
    };
    let _ = writeln!(out, "{},level,iteration", names.join(","));
    for (n, u) in iter {
        let mut rows: Vec<(Vec<String>, &S, Vec<S>)> = u
            .iter()
            .map(|(p, l)| {
                (
                    p.coords().iter().map(Scalar::format).collect(),
                    l,
                    p.coords().to_vec(),
                )
            })
            .collect();
        rows.sort_by(|a, b| {
            a.2.iter()
                .zip(&b.2)
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for (coords, level, _) in rows {
            let _ = writeln!(out, "{},{},{}", coords.join(","), level.format(), n);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub coords: Vec<f64>,
    pub level: f64,
    pub iteration: usize,
}

/// Reads the CSV produced by [`write_csv`]; values may be rationals or
/// decimals.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "empty CSV".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[cols.len() - 2] != "level" || cols[cols.len() - 1] != "iteration" {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected header ending in level,iteration".into(),
        });
    }
    let dim = cols.len() - 2;
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = |message: String| Error::Parse {
            line: i + 1,
            column: 1,
            message,
        };
        if fields.len() != cols.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                cols.len(),
                fields.len()
            )));
        }
        let value = |s: &str| -> Result<f64> {
            crate::scalar::parse_rational(s)
                .map(|r| r.to_f64())
                .or_else(|_| {
                    s.parse::<f64>()
                        .map_err(|_| err(format!("bad number {s:?}")))
                })
        };
        let coords = fields[..dim]
            .iter()
            .map(|s| value(s))
            .collect::<Result<Vec<_>>>()?;
        rows.push(CsvRow {
            coords,
            level: value(fields[dim])?,
            iteration: fields[dim + 1]
                .parse()
                .map_err(|_| err(format!("bad iteration {:?}", fields[dim + 1])))?,
        });
    }
    Ok(rows)
}
