use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An output directory for one command. Every `.tsv` file starts with a
/// `#` line naming the tool, version, command and seed; a manifest records
/// the configuration needed to re-run the command.
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    seed: Option<u64>,
    written: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path, command: &'static str, seed: Option<u64>) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            command,
            seed,
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn file(&mut self, name: &str) -> Result<Writer, CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = Writer {
            inner: BufWriter::new(file),
            path,
        };
        if name.ends_with(".tsv") {
            let seed = self.seed.map(|s| format!(" seed={s}")).unwrap_or_default();
            writeln!(w, "# bioid {VERSION} {}{seed}", self.command)?;
        }
        self.written.push(name.to_string());
        Ok(w)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.finish()
    }

    /// Writes `<command>.manifest.json` listing inputs, configuration, seed
    /// and every file written so far.
    pub fn manifest<C: Serialize>(mut self, config: &C, inputs: &[&Path]) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Manifest<'a, C> {
            tool: &'static str,
            version: &'static str,
            command: &'static str,
            seed: Option<u64>,
            inputs: Vec<String>,
            config: &'a C,
            outputs: Vec<String>,
        }
        let m = Manifest {
            tool: "bioid",
            version: VERSION,
            command: self.command,
            seed: self.seed,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config,
            outputs: std::mem::take(&mut self.written),
        };
        let name = format!("{}.manifest.json", self.command);
        self.json(&name, &m)
    }
}

pub struct Writer {
    inner: BufWriter<File>,
    path: PathBuf,
}

impl Writer {
    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) -> Result<(), CliError> {
        bioid::tsv::write_row(&mut self.inner, cells).map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

impl Write for Writer {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}
