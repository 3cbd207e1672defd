use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::{Literal, PrimitiveType};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

pub(crate) fn xsd_local(datatype: PrimitiveType) -> &'static str {
    match datatype {
        PrimitiveType::String => "string",
        PrimitiveType::Integer => "integer",
        PrimitiveType::Decimal => "decimal",
        PrimitiveType::Boolean => "boolean",
        PrimitiveType::Uri => "anyURI",
    }
}

pub(crate) fn datatype_from_xsd(local: &str) -> Option<PrimitiveType> {
    PrimitiveType::ALL.into_iter().find(|t| xsd_local(*t) == local)
}

/// A position of a triple pattern or a filter operand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Term {
    Var(String),
    Iri(String),
    Literal(Literal),
    /// Named hole of a template skeleton.
    Param(String),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn param(&self) -> Option<&str> {
        match self {
            Term::Param(p) => Some(p),
            _ => None,
        }
    }
}

pub(crate) fn write_literal(f: &mut impl fmt::Write, lit: &Literal) -> fmt::Result {
    f.write_char('"')?;
    for c in lit.value.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')?;
    if lit.datatype != PrimitiveType::String {
        write!(f, "^^xsd:{}", xsd_local(lit.datatype))?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(lit) => write_literal(f, lit),
            Term::Param(p) => write!(f, "${p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: Term,
    pub property: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, property: Term, object: Term) -> Self {
        Self {
            subject,
            property,
            object,
        }
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.property, &self.object]
    }

    pub(crate) fn terms_mut(&mut self) -> [&mut Term; 3] {
        [&mut self.subject, &mut self.property, &mut self.object]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterOp {
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filter {
    pub var: String,
    pub op: FilterOp,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryAst {
    pub select_vars: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
}

impl QueryAst {
    pub fn pattern_vars(&self) -> BTreeSet<&str> {
        self.patterns
            .iter()
            .flat_map(|p| p.terms())
            .filter_map(Term::var)
            .collect()
    }

    pub fn params(&self) -> BTreeSet<&str> {
        self.patterns
            .iter()
            .flat_map(|p| p.terms())
            .chain(self.filters.iter().map(|f| &f.value))
            .filter_map(Term::param)
            .collect()
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT")?;
        for v in &self.select_vars {
            write!(f, " ?{v}")?;
        }
        f.write_str(" WHERE {")?;
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(" .")?;
            }
            write!(f, " {} ", p.subject)?;
            match &p.property {
                Term::Iri(iri) if iri == RDF_TYPE => f.write_str("a")?,
                other => write!(f, "{other}")?,
            }
            write!(f, " {}", p.object)?;
        }
        for filter in &self.filters {
            let op = match filter.op {
                FilterOp::Eq => "=",
                FilterOp::Ne => "!=",
            };
            write!(f, " FILTER(?{} {} {})", filter.var, op, filter.value)?;
        }
        f.write_str(" }")
    }
}
