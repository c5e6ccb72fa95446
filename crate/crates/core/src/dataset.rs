//! FIMI-style transaction files: one transaction per line, items separated
//! by whitespace. Tokens are opaque text.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::DatasetError;
use crate::model::TransactionDatabase;

/// Parses transactions from any reader. Blank lines are skipped and
/// repeated tokens within a line collapse.
pub fn parse_fimi<R: Read>(reader: R) -> Result<TransactionDatabase, DatasetError> {
    let mut rows = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let row: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(TransactionDatabase::from_rows(rows))
}

pub fn load_fimi(path: impl AsRef<Path>) -> Result<TransactionDatabase, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_fimi(file).map_err(|e| match e {
        DatasetError::Io(source) => DatasetError::Read {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

/// Writes one line per transaction, tokens in ascending id order separated
/// by single spaces, LF endings. Reading the output back reproduces the
/// same database, dictionary order included.
pub fn write_fimi<W: Write>(db: &TransactionDatabase, writer: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(writer);
    for (_, t) in db.iter() {
        let mut first = true;
        for token in db.tokens(t) {
            if !first {
                out.write_all(b" ")?;
            }
            out.write_all(token.as_bytes())?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_fimi(db: &TransactionDatabase, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let wrap = |source| DatasetError::Write {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    write_fimi(db, file).map_err(wrap)
}
