use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// CSV writer that always emits the header row, even when no records
/// follow.
pub struct RowWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl RowWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut inner = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        inner
            .write_record(header.split(','))
            .map_err(|e| Error::csv(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            inner,
        })
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.inner.serialize(row).map_err(|e| Error::csv(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner
            .flush()
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// Reads every row of a headed CSV file, checking the header first.
pub fn read_rows<T: DeserializeOwned>(path: &Path, header: &str) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let expected: Vec<&str> = header.split(',').collect();
    if found.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!(
                "header {:?} does not match {header:?}",
                found.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}
