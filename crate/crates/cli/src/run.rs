//! Output directory handling and the per-command run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const ARTIFACT: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub role: String,
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub inputs: &'a [FileDigest],
    pub outputs: &'a [FileDigest],
    pub warnings: &'a [String],
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One command invocation: the effective config, the files it read and the
/// files it wrote. No clock or host data ends up in the output.
pub struct Run {
    pub command: &'static str,
    pub config: RunConfig,
    out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    pub warnings: Vec<String>,
}

impl Run {
    pub fn new(command: &'static str, config: RunConfig, out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Run {
            command,
            config,
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn outputs(&self) -> &[FileDigest] {
        &self.outputs
    }

    /// Records the digest of an input file before it is parsed.
    pub fn input(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        let bytes =
            fs::read(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            role: role.to_string(),
            path: path.display().to_string(),
            bytes: bytes.len() as u64,
            sha256: digest(&bytes),
        });
        Ok(())
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(FileDigest {
            role: "output".into(),
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: digest(bytes),
        });
        Ok(())
    }

    pub fn write_csv<S: AsRef<str>>(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<S>],
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(AsRef::as_ref))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::io(format!("csv buffer: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::io(format!("json encoding: {e}")))?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// Writes `<command>.manifest.json` and returns its path.
    pub fn finish(self) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            artifact: ARTIFACT,
            version: VERSION,
            command: self.command,
            config: &self.config,
            inputs: &self.inputs,
            outputs: &self.outputs,
            warnings: &self.warnings,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::io(format!("json encoding: {e}")))?;
        bytes.push(b'\n');
        let path = self
            .out_dir
            .join(format!("{}.manifest.json", self.command.replace('-', "_")));
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_inputs_and_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        fs::write(&input, "a\n1\n").unwrap();
        let mut run = Run::new("demo", RunConfig::default(), &dir.path().join("out")).unwrap();
        run.input("table", &input).unwrap();
        run.write_csv("t.csv", &["a"], &[vec!["1"]]).unwrap();
        let path = run.finish().unwrap();
        let text = fs::read_to_string(path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["inputs"][0]["role"], "table");
        assert_eq!(v["outputs"][0]["path"], "t.csv");
        assert_eq!(v["config"]["x"], 5.0);
        assert!(run_missing_input_fails());
    }

    fn run_missing_input_fails() -> bool {
        let dir = tempfile::tempdir().unwrap();
        let mut run = Run::new("demo", RunConfig::default(), dir.path()).unwrap();
        run.input("x", &dir.path().join("nope")).is_err()
    }
}
