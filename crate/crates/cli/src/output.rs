use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::{Classify, Failure, Global};

/// Where a command writes its files.
pub struct OutDir {
    root: PathBuf,
    stdout: bool,
}

impl OutDir {
    pub fn open(global: &Global) -> Result<Self, Failure> {
        fs::create_dir_all(&global.out)
            .with_context(|| format!("cannot create output directory {}", global.out.display()))
            .internal()?;
        Ok(Self {
            root: global.out.clone(),
            stdout: global.stdout,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `name` through `body`; returns the bytes written.
    pub fn write<F>(&self, name: &str, body: F) -> Result<Vec<u8>, Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
    {
        let mut buf = Vec::new();
        body(&mut buf).internal()?;
        let path = self.path(name);
        let file = fs::File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))
            .internal()?;
        let mut w = BufWriter::new(file);
        w.write_all(&buf)
            .and_then(|_| w.flush())
            .with_context(|| format!("cannot write {}", path.display()))
            .internal()?;
        Ok(buf)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<Vec<u8>, Failure> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    /// Copies a primary table to standard output when `--stdout` is set.
    pub fn mirror(&self, bytes: &[u8]) -> Result<(), Failure> {
        if self.stdout {
            let mut out = io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).internal()?;
        }
        Ok(())
    }
}

/// Fixed-precision number, or `NA`.
pub fn fixed(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) => format!("{v:.decimals$}"),
        None => "NA".to_owned(),
    }
}
