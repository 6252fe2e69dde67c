use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qwoa_cvrp::export::CsvTable;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON text of a command's resolved configuration.
pub fn config_hash(config: &serde_json::Value) -> String {
    sha256_hex(config.to_string().as_bytes())
}

/// Files staged in memory and written together once a command succeeds.
pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(dir: &Path, config: &serde_json::Value) -> Self {
        Self {
            dir: dir.to_path_buf(),
            hash: config_hash(config),
            files: Vec::new(),
        }
    }

    pub fn csv(&mut self, name: impl Into<String>, table: &CsvTable) {
        let text = table.render(Some(&self.hash));
        self.files.push((name.into(), text.into_bytes()));
    }

    pub fn raw(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Writes every file to a temporary sibling first and renames them into
    /// place only after all writes succeeded.
    pub fn commit(self) -> Result<Vec<PathBuf>, Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::io(&self.dir, e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp =
                NamedTempFile::new_in(&self.dir).map_err(|e| Failure::io(&self.dir, e))?;
            tmp.write_all(bytes)
                .map_err(|e| Failure::io(tmp.path(), e))?;
            tmp.as_file()
                .sync_all()
                .map_err(|e| Failure::io(tmp.path(), e))?;
            staged.push((tmp, self.dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, dest) in staged {
            tmp.persist(&dest)
                .map_err(|e| Failure::io(&dest, e.error))?;
            written.push(dest);
        }
        Ok(written)
    }
}
