use std::fs;
use std::path::{Path, PathBuf};

use crate::commands::CliError;

/// Files produced by a command, written only once everything has been computed.
#[derive(Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, path: impl Into<PathBuf>, contents: Vec<u8>) {
        self.files.push((path.into(), contents));
    }

    /// Writes every file; on failure removes the ones already written.
    pub fn commit(self) -> Result<(), CliError> {
        let mut written: Vec<&Path> = Vec::new();
        for (path, contents) in &self.files {
            if let Err(e) = fs::write(path, contents) {
                for done in written {
                    let _ = fs::remove_file(done);
                }
                return Err(CliError::new(format!("{}: {e}", path.display())));
            }
            written.push(path);
        }
        Ok(())
    }
}
