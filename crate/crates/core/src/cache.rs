//! Append-only JSON-lines store of exact counts keyed by `(tau, n)`.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use thiserror::Error;

use crate::enumeration::CountRecord;
use crate::partition::SetPartition;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Corrupt { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}:{line}: conflicting count for tau={tau}, n={n}")]
    Conflict { path: PathBuf, line: usize, tau: String, n: usize },
}

/// In-memory view of a count cache file plus an appending writer.
///
/// Records are only ever appended; existing lines are never rewritten.
#[derive(Debug)]
pub struct CountCache {
    path: PathBuf,
    entries: HashMap<(String, usize), BigUint>,
    writer: Option<BufWriter<File>>,
}

impl CountCache {
    /// Loads `path` if it exists; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        let mut entries = HashMap::new();
        match File::open(&path) {
            Ok(f) => {
                for (i, line) in BufReader::new(f).lines().enumerate() {
                    let line = line.map_err(io_err)?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let rec: CountRecord = serde_json::from_str(&line).map_err(|source| {
                        CacheError::Corrupt { path: path.clone(), line: i + 1, source }
                    })?;
                    let key = (rec.tau.to_string(), rec.n);
                    if let Some(old) = entries.get(&key) {
                        if old != &rec.count {
                            return Err(CacheError::Conflict {
                                path: path.clone(),
                                line: i + 1,
                                tau: key.0,
                                n: key.1,
                            });
                        }
                    }
                    entries.insert(key, rec.count);
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(io_err(e)),
        }
        Ok(CountCache { path, entries, writer: None })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, tau: &SetPartition, n: usize) -> Option<CountRecord> {
        self.entries.get(&(tau.to_string(), n)).map(|count| CountRecord {
            tau: tau.clone(),
            n,
            count: count.clone(),
        })
    }

    /// Appends `record` unless an entry for its key already exists.
    /// Returns whether a line was written.
    pub fn insert(&mut self, record: &CountRecord) -> Result<bool, CacheError> {
        let key = (record.tau.to_string(), record.n);
        if self.entries.contains_key(&key) {
            return Ok(false);
        }
        let path = self.path.clone();
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        if self.writer.is_none() {
            let f =
                OpenOptions::new().create(true).append(true).open(&self.path).map_err(io_err)?;
            self.writer = Some(BufWriter::new(f));
        }
        let w = self.writer.as_mut().expect("opened above");
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(w, "{line}").and_then(|_| w.flush()).map_err(io_err)?;
        self.entries.insert(key, record.count.clone());
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counts.jsonl");
        let tau: SetPartition = "123".parse().unwrap();
        let rec = CountRecord { tau: tau.clone(), n: 10, count: BigUint::from(9496u32) };
        {
            let mut c = CountCache::open(&path).unwrap();
            assert!(c.is_empty());
            assert!(c.insert(&rec).unwrap());
            assert!(!c.insert(&rec).unwrap());
        }
        let c = CountCache::open(&path).unwrap();
        assert_eq!(c.get(&tau, 10), Some(rec));
        assert_eq!(c.get(&tau, 9), None);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "{\"tau\":\"123\",\"n\":10,\"count\":\"9496\"}\n");
    }

    #[test]
    fn corrupt_lines_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"tau\":\"12\",\"n\":2,\"count\":\"1\"}\nnot json\n").unwrap();
        assert!(matches!(CountCache::open(&path), Err(CacheError::Corrupt { line: 2, .. })));
        std::fs::write(
            &path,
            "{\"tau\":\"12\",\"n\":2,\"count\":\"1\"}\n{\"tau\":\"12\",\"n\":2,\"count\":\"2\"}\n",
        )
        .unwrap();
        assert!(matches!(CountCache::open(&path), Err(CacheError::Conflict { line: 2, .. })));
    }
}
