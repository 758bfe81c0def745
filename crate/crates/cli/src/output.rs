//! Output directory handling, config hashing and exit-code mapping.

use std::fs;
use std::path::{Path, PathBuf};

use afk_core::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_REGIME: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    /// Maps a library error, prefixing the pipeline stage.
    pub fn at(stage: &str, e: Error) -> Self {
        let code = match &e {
            Error::ResourceLimit(_) => EXIT_RESOURCE,
            Error::NotAlmostFuchsian { .. } => EXIT_REGIME,
            Error::SolverFailure { .. } | Error::Precondition(_) | Error::DegenerateNode { .. } => EXIT_SOLVER,
            _ => EXIT_INPUT,
        };
        Failure { code, message: format!("stage {stage}: {e}") }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// SHA-256 over the canonical JSON of the configuration followed by the
/// raw bytes of every input file.
pub fn config_hash<C: Serialize>(config: &C, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text(path: &Path, bytes: &[u8]) -> CliResult<String> {
    String::from_utf8(bytes.to_vec()).map_err(|e| Failure::input(format!("{}: not UTF-8: {e}", path.display())))
}

pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| Failure::input(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// Pretty JSON with `config_hash` added as the last top-level field.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T, hash: &str) -> CliResult<()> {
        let mut v = serde_json::to_value(value).expect("report serializes");
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("config_hash".into(), hash.into());
        }
        let mut text = serde_json::to_string_pretty(&v).expect("value serializes");
        text.push('\n');
        self.write(name, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_config_and_inputs() {
        let a = config_hash(&("solve", 129), &[b"[[0,0]]"]);
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash(&("solve", 129), &[b"[[0,0]]"]));
        assert_ne!(a, config_hash(&("solve", 65), &[b"[[0,0]]"]));
        assert_ne!(a, config_hash(&("solve", 129), &[b"[[0,1]]"]));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::at("s", Error::ResourceLimit("x".into())).code, EXIT_RESOURCE);
        assert_eq!(Failure::at("s", Error::Parse("x".into())).code, EXIT_INPUT);
        let e = Error::NotAlmostFuchsian { sup: 1.2, at: num_complex::Complex64::new(0.0, 0.0) };
        let f = Failure::at("solve", e);
        assert_eq!(f.code, EXIT_REGIME);
        assert!(f.message.starts_with("stage solve:") && f.message.contains("1.2"));
    }
}
