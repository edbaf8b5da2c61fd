//! On-disk formats: binary word files, JSONL traces and reports, CSV
//! profiles. Every writer goes through a temporary file and a rename.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::construct::TraceRecord;
use crate::Word;

pub const WORD_MAGIC: [u8; 4] = *b"SSFW";
pub const WORD_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

impl IoError {
    fn io(path: &Path, source: io::Error) -> Self {
        IoError::Io { path: path.display().to_string(), source }
    }

    fn format(path: &Path, message: impl Into<String>) -> Self {
        IoError::Format { path: path.display().to_string(), message: message.into() }
    }
}

/// A word together with the alphabet size recorded in its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordFile {
    pub alphabet: u32,
    pub symbols: Word,
}

impl WordFile {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.symbols.len());
        out.extend_from_slice(&WORD_MAGIC);
        out.extend_from_slice(&WORD_VERSION.to_le_bytes());
        out.extend_from_slice(&self.alphabet.to_le_bytes());
        out.extend_from_slice(&(self.symbols.len() as u64).to_le_bytes());
        for s in &self.symbols {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("file has {} bytes, shorter than the 20-byte header", bytes.len()));
        }
        if bytes[..4] != WORD_MAGIC {
            return Err("bad magic, expected SSFW".into());
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let version = u32_at(4);
        if version != WORD_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let alphabet = u32_at(8);
        let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
        let body = &bytes[HEADER_LEN..];
        if Some(body.len() as u64) != len.checked_mul(4) {
            return Err(format!("header says {len} symbols, body holds {} bytes", body.len()));
        }
        let symbols: Word = body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        if let Some(bad) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(format!("symbol {bad} outside alphabet of size {alphabet}"));
        }
        Ok(WordFile { alphabet, symbols })
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

pub fn write_word(path: &Path, word: &WordFile) -> Result<(), IoError> {
    write_atomic(path, &word.encode())
}

pub fn read_word(path: &Path) -> Result<WordFile, IoError> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| IoError::io(path, e))?;
    WordFile::decode(&bytes).map_err(|m| IoError::format(path, m))
}

pub fn trace_to_jsonl(trace: &[TraceRecord]) -> String {
    trace.iter().map(|r| r.to_json_line() + "\n").collect()
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<(), IoError> {
    write_atomic(path, trace_to_jsonl(trace).as_bytes())
}

/// Blank lines are ignored.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(TraceRecord::from_json_line(&line).map_err(|m| IoError::format(path, format!("line {}: {m}", i + 1)))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let bytes = WordFile { alphabet: 5, symbols: vec![1, 0, 2] }.encode();
        assert_eq!(&bytes[..4], b"SSFW");
        assert_eq!(bytes[4..8], [1, 0, 0, 0]);
        assert_eq!(bytes[8..12], [5, 0, 0, 0]);
        assert_eq!(bytes[12..20], [3, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(bytes.len(), 32);
    }

    #[test]
    fn rejects_damage() {
        let good = WordFile { alphabet: 3, symbols: vec![1, 2] }.encode();
        assert!(WordFile::decode(&good[..19]).is_err());
        assert!(WordFile::decode(&good[..27]).is_err());
        let mut magic = good.clone();
        magic[0] = b'X';
        assert!(WordFile::decode(&magic).is_err());
        let mut symbol = good;
        symbol[20] = 9;
        assert!(WordFile::decode(&symbol).unwrap_err().contains("outside alphabet"));
    }

    proptest! {
        #[test]
        fn round_trip(symbols in prop::collection::vec(0u32..1000, 0..300)) {
            let word = WordFile { alphabet: 1000, symbols };
            prop_assert_eq!(WordFile::decode(&word.encode()).unwrap(), word);
        }
    }
}
