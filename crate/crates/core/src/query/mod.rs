//! Query subset parser/evaluator and the predefined template registry.

mod ast;
mod eval;
mod parser;
mod template;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{
    Filter, FilterOp, QueryAst, Term, TriplePattern, RDFS_LABEL, RDFS_NS, RDF_NS, RDF_TYPE, XSD_NS,
};
pub use eval::{evaluate, evaluate_triples, evaluate_with, kb_triples, EvalOptions, RdfTerm, ResultTable, Triple};
pub use parser::{parse_query, parse_query_with, parse_skeleton, Prefixes};
pub use template::{description_slots, ParamType, QueryTemplate, TemplateParam, TemplateRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "details")]
pub enum QueryError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("unsupported feature {feature} at {line}:{col}")]
    UnsupportedFeature {
        feature: String,
        line: usize,
        col: usize,
    },
    #[error("unknown prefix `{prefix}:` at {line}:{col}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        col: usize,
    },
    #[error("selected variable ?{0} does not occur in any pattern")]
    UnboundSelectVar(String),
    #[error("filtered variable ?{0} does not occur in any pattern")]
    UnboundFilterVar(String),
    #[error("result exceeds the row limit of {0}")]
    RowLimitExceeded(usize),
    #[error("template `{0}` already registered")]
    DuplicateId(String),
    #[error("slot mismatch: {0}")]
    SlotMismatch(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("parameter `{0}` is not bound")]
    MissingParam(String),
    #[error("parameter `{param}` must be {required}")]
    RestrictionViolation { param: String, required: String },
}

impl QueryError {
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::Syntax { .. } => "SyntaxError",
            QueryError::UnsupportedFeature { .. } => "UnsupportedFeature",
            QueryError::UnknownPrefix { .. } => "UnknownPrefix",
            QueryError::UnboundSelectVar(_) => "UnboundSelectVar",
            QueryError::UnboundFilterVar(_) => "UnboundFilterVar",
            QueryError::RowLimitExceeded(_) => "RowLimitExceeded",
            QueryError::DuplicateId(_) => "DuplicateId",
            QueryError::SlotMismatch(_) => "SlotMismatch",
            QueryError::UnknownTemplate(_) => "UnknownTemplate",
            QueryError::MissingParam(_) => "MissingParam",
            QueryError::RestrictionViolation { .. } => "RestrictionViolation",
        }
    }
}
