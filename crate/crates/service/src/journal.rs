//! Append-only edit journal: one JSON record per LF-terminated line.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use fsn_core::ontology::{Edit, KnowledgeBase, OntologyError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const JOURNAL_FILE: &str = "journal.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub revision: u64,
    pub timestamp: DateTime<Utc>,
    pub op: Edit,
    pub actor: String,
}

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("journal i/o: {0}")]
    Io(#[from] io::Error),
    #[error("journal line {line} is not a record: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("journal line {line} has revision {found}, expected {expected}")]
    RevisionGap { line: usize, expected: u64, found: u64 },
    #[error("journal line {line} does not replay: {source}")]
    Rejected {
        line: usize,
        #[source]
        source: OntologyError,
    },
}

/// Parses journal bytes. A final line without its LF is a torn write and is
/// dropped; the returned offset is where the intact prefix ends.
pub fn parse(bytes: &[u8]) -> Result<(Vec<JournalRecord>, usize), JournalError> {
    let mut records = Vec::new();
    let mut offset = 0;
    for (i, line) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
        if line.last() != Some(&b'\n') {
            break;
        }
        let record = serde_json::from_slice(&line[..line.len() - 1]).map_err(|e| JournalError::Corrupt {
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
        offset += line.len();
    }
    Ok((records, offset))
}

/// Rebuilds the knowledge base from an empty one.
pub fn replay(records: &[JournalRecord]) -> Result<KnowledgeBase, JournalError> {
    let mut kb = KnowledgeBase::new();
    for (i, rec) in records.iter().enumerate() {
        let expected = kb.revision() + 1;
        if rec.revision != expected {
            return Err(JournalError::RevisionGap {
                line: i + 1,
                expected,
                found: rec.revision,
            });
        }
        kb.apply(&rec.op)
            .map_err(|source| JournalError::Rejected { line: i + 1, source })?;
    }
    Ok(kb)
}

pub fn encode(record: &JournalRecord) -> String {
    let mut line = serde_json::to_string(record).expect("journal records serialize");
    line.push('\n');
    line
}

#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    /// Opens (creating if needed) the journal in `dir` and returns the intact
    /// records. A torn tail is truncated away.
    pub fn open(dir: &Path) -> Result<(Self, Vec<JournalRecord>), JournalError> {
        let path = dir.join(JOURNAL_FILE);
        let file = OpenOptions::new().create(true).read(true).append(true).open(&path)?;
        let bytes = std::fs::read(&path)?;
        let (records, intact) = parse(&bytes)?;
        if intact < bytes.len() {
            file.set_len(intact as u64)?;
        }
        Ok((Self { path, file }, records))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one record and syncs it to disk before returning.
    pub fn append(&mut self, record: &JournalRecord) -> io::Result<()> {
        self.file.write_all(encode(record).as_bytes())?;
        self.file.sync_data()
    }
}
