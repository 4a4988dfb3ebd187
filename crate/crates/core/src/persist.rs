//! Versioned binary blobs: an 8-byte magic, a little-endian `u32` format
//! version, then a bincode payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) fn write_blob<T: Serialize>(
    mut w: impl Write,
    magic: &[u8; 8],
    version: u32,
    value: &T,
) -> Result<()> {
    let fail = |e: std::io::Error| Error::Format(e.to_string());
    w.write_all(magic).map_err(fail)?;
    w.write_all(&version.to_le_bytes()).map_err(fail)?;
    bincode::serialize_into(&mut w, value).map_err(|e| Error::Format(e.to_string()))?;
    w.flush().map_err(fail)
}

pub(crate) fn read_blob<T: DeserializeOwned>(
    mut r: impl Read,
    magic: &[u8; 8],
    version: u32,
) -> Result<T> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if &head[..8] != magic {
        return Err(Error::Format(format!(
            "bad magic, expected {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let found = u32::from_le_bytes(head[8..12].try_into().unwrap());
    if found != version {
        return Err(Error::Format(format!(
            "unsupported format version {found}, expected {version}"
        )));
    }
    bincode::deserialize_from(r).map_err(|e| Error::Format(e.to_string()))
}

pub(crate) fn save<T: Serialize>(path: &Path, magic: &[u8; 8], version: u32, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_blob(BufWriter::new(f), magic, version, value)
}

pub(crate) fn load<T: DeserializeOwned>(path: &Path, magic: &[u8; 8], version: u32) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_blob(BufReader::new(f), magic, version)
}
