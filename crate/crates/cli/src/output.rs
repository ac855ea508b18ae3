//! Atomic file output and the metadata sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub const METADATA_FILE: &str = "metadata.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::usage(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let fail = |e: std::io::Error| {
            CliError::usage(format!("cannot write {}: {e}", self.dir.join(name).display()))
        };
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(fail)?;
        tmp.write_all(bytes).map_err(fail)?;
        tmp.as_file().sync_all().map_err(fail)?;
        tmp.persist(self.dir.join(name)).map_err(|e| fail(e.error))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, meta: Metadata) -> CliResult<()> {
        let meta = Metadata {
            files: std::mem::take(&mut self.files),
            ..meta
        };
        let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        text.push('\n');
        self.write(METADATA_FILE, text.as_bytes())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub replicates: usize,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triplet_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_table_sha256: Option<String>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub details: serde_json::Map<String, serde_json::Value>,
    pub files: Vec<String>,
}

impl Metadata {
    pub fn new(command: &'static str, seed: u64, replicates: usize, config_sha256: String) -> Self {
        Self {
            tool: "levyito",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            replicates,
            config_sha256,
            triplet_sha256: None,
            psi_table_sha256: None,
            details: serde_json::Map::new(),
            files: Vec::new(),
        }
    }
}

/// CSV text from a header and rows of numbers (shortest round-trip form).
pub fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn num(v: f64) -> String {
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_shortest_round_trip() {
        let bytes = csv_bytes(&["t".into(), "value".into()], [vec![num(0.1), num(1.0 / 3.0)]]);
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "t,value\n0.1,0.3333333333333333\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutDir::create(dir.path()).unwrap();
        out.write("a.txt", b"one").unwrap();
        out.write("a.txt", b"two").unwrap();
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
