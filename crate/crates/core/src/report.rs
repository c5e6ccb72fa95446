//! Benchmark report rows and their json-lines / tsv encodings.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ReportError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub item: String,
    pub count: u32,
}

/// One (engine, query) measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub engine: String,
    pub query_tokens: Vec<String>,
    pub k: usize,
    pub elapsed_ns: u64,
    pub result: Vec<ResultEntry>,
    /// Engine-specific work counter.
    pub visited: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    JsonLines,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" | "json-lines" | "json" => Ok(ReportFormat::JsonLines),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(format!(
                "unknown report format {other:?} (expected jsonl or tsv)"
            )),
        }
    }
}

const TSV_HEADER: &str = "engine\tquery_tokens\tk\telapsed_ns\tresult\tvisited";

fn tsv_token(token: &str) -> Result<&str, ReportError> {
    if token.is_empty() || token.contains([',', '\t', '\n', '\r']) {
        return Err(ReportError::UnrepresentableToken(token.to_owned()));
    }
    Ok(token)
}

fn write_tsv_row<W: Write>(out: &mut W, row: &BenchRow) -> Result<(), ReportError> {
    if row.engine.contains(['\t', '\n', '\r']) {
        return Err(ReportError::UnrepresentableToken(row.engine.clone()));
    }
    let query = row
        .query_tokens
        .iter()
        .map(|t| tsv_token(t))
        .collect::<Result<Vec<_>, _>>()?
        .join(",");
    let result = row
        .result
        .iter()
        .map(|e| tsv_token(&e.item).map(|t| format!("{t}:{}", e.count)))
        .collect::<Result<Vec<_>, _>>()?
        .join(",");
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}",
        row.engine, query, row.k, row.elapsed_ns, result, row.visited
    )?;
    Ok(())
}

/// Writes rows; tsv output always starts with a header line.
pub fn write_report<W: Write>(
    rows: &[BenchRow],
    writer: W,
    format: ReportFormat,
) -> Result<(), ReportError> {
    let mut out = BufWriter::new(writer);
    match format {
        ReportFormat::JsonLines => {
            for row in rows {
                serde_json::to_writer(&mut out, row).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
        }
        ReportFormat::Tsv => {
            writeln!(out, "{TSV_HEADER}")?;
            for row in rows {
                write_tsv_row(&mut out, row)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_report(
    rows: &[BenchRow],
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), ReportError> {
    write_report(rows, File::create(path)?, format)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').filter(|p| !p.is_empty())
}

fn parse_tsv_row(line: &str, lineno: usize) -> Result<BenchRow, ReportError> {
    let bad = |reason: String| ReportError::Tsv {
        line: lineno,
        reason,
    };
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 6 {
        return Err(bad(format!("expected 6 columns, found {}", cols.len())));
    }
    let num = |s: &str, what: &str| s.parse::<u64>().map_err(|e| bad(format!("{what}: {e}")));
    let result = split_list(cols[4])
        .map(|pair| {
            let (item, count) = pair
                .rsplit_once(':')
                .ok_or_else(|| bad(format!("result entry {pair:?} lacks a count")))?;
            Ok(ResultEntry {
                item: item.to_owned(),
                count: count
                    .parse()
                    .map_err(|e| bad(format!("result count: {e}")))?,
            })
        })
        .collect::<Result<Vec<_>, ReportError>>()?;
    Ok(BenchRow {
        engine: cols[0].to_owned(),
        query_tokens: split_list(cols[1]).map(str::to_owned).collect(),
        k: num(cols[2], "k")? as usize,
        elapsed_ns: num(cols[3], "elapsed_ns")?,
        result,
        visited: num(cols[5], "visited")?,
    })
}

pub fn parse_report<R: Read>(
    reader: R,
    format: ReportFormat,
) -> Result<Vec<BenchRow>, ReportError> {
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        match format {
            ReportFormat::JsonLines => {
                if line.trim().is_empty() {
                    continue;
                }
                rows.push(
                    serde_json::from_str(&line).map_err(|source| ReportError::Json {
                        line: lineno,
                        source,
                    })?,
                );
            }
            ReportFormat::Tsv => {
                if idx == 0 {
                    if line != TSV_HEADER {
                        return Err(ReportError::Tsv {
                            line: 1,
                            reason: "missing header".into(),
                        });
                    }
                    continue;
                }
                rows.push(parse_tsv_row(&line, lineno)?);
            }
        }
    }
    Ok(rows)
}

pub fn read_report(
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<Vec<BenchRow>, ReportError> {
    parse_report(File::open(path)?, format)
}
