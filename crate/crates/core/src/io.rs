//! JSON file helpers for matrices, partitions, manifests and reports.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so write-then-read is the identity on every artifact type.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::partition::Partition;
use crate::search::Manifest;
use crate::{Error, Result};

/// Failure to read or write a file, kept apart from schema errors so front
/// ends can tell them apart.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: Error },
}

impl IoError {
    fn file(path: &Path, source: std::io::Error) -> Self {
        Self::File {
            path: path.display().to_string(),
            source,
        }
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Schema(e.to_string()))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Schema(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    from_json(&text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut text = to_json_pretty(value).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| IoError::file(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix, IoError> {
    read_json(path)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<(), IoError> {
    write_json(path, m)
}

/// Reads and validates a partition file.
pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition, IoError> {
    read_json(path)
}

pub fn write_partition(path: impl AsRef<Path>, p: &Partition) -> Result<(), IoError> {
    write_json(path, p)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest, IoError> {
    read_json(path)
}

/// Writes `value` as one compact JSON line and flushes.
pub fn write_json_line<T: Serialize>(out: &mut impl Write, value: &T) -> std::io::Result<()> {
    let line = to_json(value).map_err(std::io::Error::other)?;
    writeln!(out, "{line}")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::grid;
    use crate::random::{random_matrix, rng};

    fn scratch(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("blockpythag-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = random_matrix(&mut rng(11), 3, 4);
        let path = scratch("m.json");
        write_matrix(&path, &m).unwrap();
        assert_eq!(read_matrix(&path).unwrap(), m);
    }

    #[test]
    fn partition_file_round_trip() {
        let p = grid(&[2, 1], &[1, 3]).unwrap();
        let path = scratch("p.json");
        write_partition(&path, &p).unwrap();
        assert_eq!(read_partition(&path).unwrap(), p);
    }

    #[test]
    fn missing_file_and_bad_schema_are_distinct() {
        assert!(matches!(read_matrix(scratch("absent.json")), Err(IoError::File { .. })));
        let path = scratch("bad.json");
        fs::write(&path, "{\"rows\": 2}").unwrap();
        assert!(matches!(read_matrix(&path), Err(IoError::Parse { .. })));
    }

    #[test]
    fn overlapping_partition_rejected_on_load() {
        let text = r#"{"hostRows":2,"hostCols":2,"blocks":[
            {"name":"A","rows":[0,1],"cols":[0,1]},
            {"name":"B","rows":[0],"cols":[0]}]}"#;
        assert!(from_json::<Partition>(text).is_err());
    }
}
