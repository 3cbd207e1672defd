//! Snapshot state with a single-writer commit point.
//!
//! Readers clone an `Arc<Snapshot>` and never wait on writers. Writers take
//! the journal mutex, apply the edit to a copy of the knowledge base, append
//! the record, then publish the new snapshot.

use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use chrono::Utc;
use fsn_core::fsn::{FsnError, FsnGraph};
use fsn_core::nav::{build_root, colorize, PieModel};
use fsn_core::ontology::{Edit, KnowledgeBase, OntologyError};
use fsn_core::query::TemplateRegistry;
use fsn_core::{seed, ElasticityParams};
use thiserror::Error;

use crate::config::Config;
use crate::journal::{replay, Journal, JournalError, JournalRecord};

pub const SEED_ACTOR: &str = "seed-fixture";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("data directory {path} is not writable: {reason}")]
    DataDirUnwritable { path: PathBuf, reason: String },
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error("FSN setup: {0}")]
    Fsn(#[from] FsnError),
    #[error("seed fixture: {0}")]
    Seed(#[from] CommitError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum CommitError {
    #[error("expected revision {expected}, knowledge base is at {actual}")]
    Conflict { expected: u64, actual: u64 },
    #[error(transparent)]
    Rejected(#[from] OntologyError),
    #[error("journal write failed: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub kb: KnowledgeBase,
    pub fsn: Arc<FsnGraph<f64>>,
    pub templates: Arc<TemplateRegistry>,
}

impl Snapshot {
    pub fn revision(&self) -> u64 {
        self.kb.revision()
    }

    pub fn params(&self) -> &ElasticityParams {
        self.fsn.params()
    }

    pub fn colorize(&self, model: PieModel) -> PieModel {
        colorize(model, &self.fsn, self.fsn.params())
    }

    pub fn root_model(&self) -> PieModel {
        self.colorize(build_root(&self.kb))
    }
}

#[derive(Debug)]
pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    writer: Mutex<Journal>,
    model: RwLock<Arc<PieModel>>,
}

fn unwritable(path: &std::path::Path, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::DataDirUnwritable {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

impl AppState {
    /// Replays the journal in `config.data_dir`; seeds the news fixture when
    /// asked and the journal is empty.
    pub fn open(config: &Config) -> Result<Self, ServiceError> {
        let dir = &config.data_dir;
        std::fs::create_dir_all(dir).map_err(|e| unwritable(dir, e))?;
        let (journal, records) = Journal::open(dir).map_err(|e| match e {
            JournalError::Io(io) => unwritable(dir, io),
            other => other.into(),
        })?;
        let kb = replay(&records)?;
        let (fsn, templates) = if config.seed_fixture {
            (seed::news_fsn(config.theta, config.params)?, seed::news_templates())
        } else {
            (FsnGraph::new(config.theta, config.params)?, TemplateRegistry::new())
        };
        let snapshot = Snapshot {
            kb,
            fsn: Arc::new(fsn),
            templates: Arc::new(templates),
        };
        let model = snapshot.root_model();
        let state = Self {
            snapshot: RwLock::new(Arc::new(snapshot)),
            writer: Mutex::new(journal),
            model: RwLock::new(Arc::new(model)),
        };
        if config.seed_fixture && records.is_empty() {
            for edit in seed::news_edits() {
                state.commit(edit, SEED_ACTOR, None)?;
            }
            state.set_model(state.snapshot().root_model());
        }
        Ok(state)
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn model(&self) -> Arc<PieModel> {
        self.model.read().expect("model lock").clone()
    }

    pub fn set_model(&self, model: PieModel) {
        *self.model.write().expect("model lock") = Arc::new(model);
    }

    pub fn journal_path(&self) -> PathBuf {
        self.writer.lock().expect("writer lock").path().to_path_buf()
    }

    /// Applies `edit` as the single writer. The journal record is on disk
    /// before the new snapshot becomes visible.
    pub fn commit(&self, edit: Edit, actor: &str, expected: Option<u64>) -> Result<u64, CommitError> {
        let mut journal = self.writer.lock().expect("writer lock");
        let current = self.snapshot();
        if let Some(expected) = expected {
            if expected != current.revision() {
                return Err(CommitError::Conflict {
                    expected,
                    actual: current.revision(),
                });
            }
        }
        let mut next = (*current).clone();
        next.kb.apply(&edit)?;
        let record = JournalRecord {
            revision: next.kb.revision(),
            timestamp: Utc::now(),
            op: edit,
            actor: actor.to_string(),
        };
        journal.append(&record)?;
        let revision = record.revision;
        *self.snapshot.write().expect("snapshot lock") = Arc::new(next);
        Ok(revision)
    }
}
