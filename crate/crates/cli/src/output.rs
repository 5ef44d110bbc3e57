//! Files are written into a staging directory inside the output directory
//! and moved into place only once the whole command has succeeded.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use erw_core::export::{write_csv, write_json, Metadata};
use serde::Serialize;
use tempfile::TempDir;

use crate::config::Format;
use crate::error::CliResult;

pub struct Staging {
    dir: TempDir,
    out: PathBuf,
    files: Vec<String>,
}

impl Staging {
    pub fn new(out: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(out)?;
        let dir = tempfile::Builder::new().prefix(".erw-staging-").tempdir_in(out)?;
        Ok(Self { dir, out: out.to_path_buf(), files: Vec::new() })
    }

    fn create(&mut self, name: String) -> CliResult<BufWriter<File>> {
        let file = File::create(self.dir.path().join(&name))?;
        self.files.push(name);
        Ok(BufWriter::new(file))
    }

    /// Writes `rows` as `<stem>.csv` or `<stem>.json`.
    pub fn table<T: Serialize>(&mut self, stem: &str, format: Format, meta: &Metadata, rows: &[T]) -> CliResult<()> {
        match format {
            Format::Csv => {
                let w = self.create(format!("{stem}.csv"))?;
                write_csv(w, meta, rows)?;
            }
            Format::Json => {
                let w = self.create(format!("{stem}.json"))?;
                write_json(w, meta, &rows)?;
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, meta: &Metadata, data: &T) -> CliResult<()> {
        let w = self.create(format!("{stem}.json"))?;
        write_json(w, meta, data)?;
        Ok(())
    }

    /// Moves every staged file into the output directory.
    pub fn commit(self) -> CliResult<Vec<PathBuf>> {
        let mut done = Vec::new();
        for name in &self.files {
            let target = self.out.join(name);
            std::fs::rename(self.dir.path().join(name), &target)?;
            done.push(target);
        }
        Ok(done)
    }
}
