//! The VertexSet text format and CSV/JSON emission.
//!
//! A VertexSet file is a header line `n=<decimal>` followed by one decimal bitmask id per line,
//! strictly ascending.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sperner_core::VertexSet;

use crate::error::{LabError, LabResult};

pub fn format_vertex_set(set: &VertexSet) -> String {
    let mut out = format!("n={}\n", set.n());
    for id in set.ids() {
        out.push_str(&id.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_vertex_set(text: &str, path: &Path) -> LabResult<VertexSet> {
    let err = |line: usize, message: String| LabError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or_else(|| err(1, "missing `n=` header".into()))?;
    let n: u32 = header
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(line, format!("expected `n=<decimal>`, found `{header}`")))?;
    let mut ids = Vec::new();
    for (line, raw) in lines {
        let id: u32 = raw
            .parse()
            .map_err(|_| err(line, format!("`{raw}` is not a decimal vertex id")))?;
        if ids.last().is_some_and(|&last| id <= last) {
            return Err(err(line, format!("id {id} is not strictly ascending")));
        }
        ids.push(id);
    }
    VertexSet::new(n, ids).map_err(|e| err(line, e.to_string()))
}

pub fn read_vertex_set(path: &Path) -> LabResult<(VertexSet, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| LabError::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| LabError::Format {
        path: path.to_path_buf(),
        line: 0,
        message: "not UTF-8".into(),
    })?;
    Ok((parse_vertex_set(text, path)?, bytes))
}

/// Rows with a header from the field names, `,`-separated.
pub fn csv_bytes<T: Serialize>(rows: &[T]) -> LabResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| LabError::Failed(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| LabError::Failed(format!("csv: {e}")))
}

/// An explicit header, used when there are no rows to derive one from.
pub fn csv_with_header<T: Serialize>(header: &[&str], rows: &[T]) -> LabResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| LabError::Failed(format!("csv: {e}")))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| LabError::Failed(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| LabError::Failed(format!("csv: {e}")))
}

pub fn json_bytes<T: Serialize>(value: &T) -> LabResult<Vec<u8>> {
    let mut out =
        serde_json::to_vec_pretty(value).map_err(|e| LabError::Failed(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Where a command's bytes went, for the manifest.
#[derive(Clone, Debug)]
pub struct Emitted {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, bytes: Vec<u8>) -> LabResult<Emitted> {
    match path {
        Some(p) => {
            fs::write(p, &bytes).map_err(|e| LabError::io(p, e))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|e| LabError::io("<stdout>", e))?;
        }
    }
    Ok(Emitted {
        path: path.map(Path::to_path_buf),
        bytes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = VertexSet::from_ids(4, [3, 5, 6, 9]).unwrap();
        let text = format_vertex_set(&s);
        assert_eq!(text, "n=4\n3\n5\n6\n9\n");
        assert_eq!(parse_vertex_set(&text, Path::new("x")).unwrap(), s);
        let empty = VertexSet::empty(3);
        assert_eq!(parse_vertex_set(&format_vertex_set(&empty), Path::new("x")).unwrap(), empty);
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("f");
        for bad in ["", "3\n", "n=x\n", "n=2\n1\n1\n", "n=2\n2\n1\n", "n=2\n4\n", "n=2\nfoo\n", "n=31\n"] {
            assert!(parse_vertex_set(bad, p).is_err(), "{bad:?}");
        }
    }
}
