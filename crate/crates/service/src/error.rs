//! Wire errors: `{error_code, message, details}` with one HTTP status per code.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fsn_core::nav::NavError;
use fsn_core::ontology::OntologyError;
use fsn_core::query::QueryError;
use serde::Serialize;
use serde_json::{json, Value};

use crate::piedoc::PieDocError;

/// Every error code the API can emit, with its status.
pub const ERROR_TABLE: &[(&str, u16)] = &[
    // knowledge base
    ("DuplicateIri", 422),
    ("InvalidIri", 422),
    ("BuiltIn", 422),
    ("UnknownParent", 404),
    ("IsACycle", 422),
    ("UnknownClass", 404),
    ("UnknownProperty", 404),
    ("UnknownIndividual", 404),
    ("BadCardinality", 422),
    ("KindMismatch", 422),
    ("EmptyLabels", 422),
    ("InvalidLiteral", 422),
    ("RangeViolation", 422),
    ("DomainViolation", 422),
    ("CardinalityExceeded", 422),
    ("DuplicateAssertion", 422),
    ("UnknownAssertion", 404),
    ("WouldCreateCycle", 422),
    ("SecondFather", 422),
    ("ChainFork", 422),
    ("NotHierarchical", 422),
    ("NotTotalOrder", 422),
    ("ChainInconsistent", 422),
    ("InvalidInverse", 422),
    // queries and templates
    ("SyntaxError", 400),
    ("UnsupportedFeature", 400),
    ("UnknownPrefix", 400),
    ("UnboundSelectVar", 400),
    ("UnboundFilterVar", 400),
    ("RowLimitExceeded", 422),
    ("DuplicateId", 422),
    ("SlotMismatch", 422),
    ("UnknownTemplate", 404),
    ("MissingParam", 422),
    ("RestrictionViolation", 422),
    // navigation
    ("NotExpandable", 422),
    ("UnknownSector", 404),
    ("UnknownTag", 404),
    ("EmptyTagList", 422),
    // pie-chart documents
    ("MalformedDocument", 400),
    ("BadPercent", 422),
    // transport
    ("MalformedBody", 400),
    ("NotFound", 404),
    ("RevisionConflict", 409),
    ("Internal", 500),
];

pub fn status_of(code: &str) -> Option<StatusCode> {
    ERROR_TABLE
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, s)| StatusCode::from_u16(*s).expect("valid status"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error_code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(error_code: &'static str, message: impl Into<String>, details: Value) -> Self {
        Self {
            status: status_of(error_code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            error_code,
            message: message.into(),
            details,
        }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new("MalformedBody", message, Value::Null)
    }

    pub fn not_found(path: &str) -> Self {
        Self::new("NotFound", format!("no resource at {path}"), json!({ "path": path }))
    }

    pub fn conflict(expected: u64, actual: u64) -> Self {
        Self::new(
            "RevisionConflict",
            format!("expected revision {expected}, knowledge base is at {actual}"),
            json!({ "expected": expected, "actual": actual }),
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new("Internal", message, Value::Null)
    }

    /// Engine errors serialize as `{code, details}`; keep the details part.
    fn engine<E: Serialize + std::fmt::Display>(code: &'static str, err: &E) -> Self {
        let details = serde_json::to_value(err)
            .ok()
            .and_then(|mut v| v.get_mut("details").map(Value::take))
            .unwrap_or(Value::Null);
        Self::new(code, err.to_string(), details)
    }
}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        Self::engine(e.code(), &e)
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        Self::engine(e.code(), &e)
    }
}

impl From<NavError> for ApiError {
    fn from(e: NavError) -> Self {
        match e {
            NavError::Ontology(inner) => inner.into(),
            other => Self::engine(other.code(), &other),
        }
    }
}

impl From<PieDocError> for ApiError {
    fn from(e: PieDocError) -> Self {
        Self::engine(e.code(), &e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
