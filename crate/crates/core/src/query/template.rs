//! Predefined queries: a natural-language description with `{label}` slots,
//! a skeleton query with matching `$label` holes, and typed parameters.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ontology::{KnowledgeBase, Literal, PrimitiveType};
use crate::query::ast::{QueryAst, Term};
use crate::query::QueryError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParamType {
    /// An individual that must be an instance of `class`.
    ClassInstance { class: String },
    Literal { datatype: PrimitiveType },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateParam {
    pub label: String,
    #[serde(flatten)]
    pub kind: ParamType,
}

impl TemplateParam {
    pub fn instance(label: impl Into<String>, class: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: ParamType::ClassInstance {
                class: class.into(),
            },
        }
    }

    pub fn literal(label: impl Into<String>, datatype: PrimitiveType) -> Self {
        Self {
            label: label.into(),
            kind: ParamType::Literal { datatype },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTemplate {
    pub id: String,
    pub description: String,
    pub skeleton: QueryAst,
    pub params: Vec<TemplateParam>,
}

/// Slot labels of a description, in order of first appearance.
pub fn description_slots(description: &str) -> Result<Vec<String>, QueryError> {
    let mut slots = Vec::new();
    let mut rest = description;
    while let Some(open) = rest.find(['{', '}']) {
        if rest[open..].starts_with('}') {
            return Err(QueryError::SlotMismatch("unbalanced '}' in description".into()));
        }
        let after = &rest[open + 1..];
        let close = after
            .find(['{', '}'])
            .filter(|&i| after[i..].starts_with('}'))
            .ok_or_else(|| QueryError::SlotMismatch("unterminated '{' in description".into()))?;
        let label = &after[..close];
        if label.is_empty() {
            return Err(QueryError::SlotMismatch("empty slot in description".into()));
        }
        if !slots.iter().any(|s| s == label) {
            slots.push(label.to_string());
        }
        rest = &after[close + 1..];
    }
    Ok(slots)
}

impl QueryTemplate {
    /// Checks that description slots, parameters and skeleton holes name the
    /// same labels, each parameter once.
    pub fn validate(&self) -> Result<(), QueryError> {
        let slots: BTreeSet<String> = description_slots(&self.description)?.into_iter().collect();
        let mut params = BTreeSet::new();
        for p in &self.params {
            if !params.insert(p.label.clone()) {
                return Err(QueryError::SlotMismatch(format!("parameter `{}` declared twice", p.label)));
            }
        }
        let holes: BTreeSet<String> = self.skeleton.params().into_iter().map(str::to_string).collect();
        if slots != params {
            return Err(QueryError::SlotMismatch(format!(
                "description slots {slots:?} do not match parameters {params:?}"
            )));
        }
        if holes != params {
            return Err(QueryError::SlotMismatch(format!(
                "skeleton holes {holes:?} do not match parameters {params:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, QueryTemplate>,
}

impl TemplateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, template: QueryTemplate) -> Result<(), QueryError> {
        if self.templates.contains_key(&template.id) {
            return Err(QueryError::DuplicateId(template.id));
        }
        template.validate()?;
        self.templates.insert(template.id.clone(), template);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&QueryTemplate> {
        self.templates.get(id)
    }

    pub fn list(&self) -> impl Iterator<Item = &QueryTemplate> {
        self.templates.values()
    }

    /// Substitutes `bindings` into the skeleton of template `id`, checking
    /// class restrictions against `kb`.
    pub fn instantiate(
        &self,
        id: &str,
        bindings: &BTreeMap<String, String>,
        kb: &KnowledgeBase,
    ) -> Result<QueryAst, QueryError> {
        let template = self
            .templates
            .get(id)
            .ok_or_else(|| QueryError::UnknownTemplate(id.to_string()))?;
        let mut values: BTreeMap<&str, Term> = BTreeMap::new();
        for param in &template.params {
            let raw = bindings
                .get(&param.label)
                .ok_or_else(|| QueryError::MissingParam(param.label.clone()))?;
            let term = match &param.kind {
                ParamType::ClassInstance { class } => {
                    if !kb.is_instance_of(raw, class) {
                        return Err(QueryError::RestrictionViolation {
                            param: param.label.clone(),
                            required: class.clone(),
                        });
                    }
                    Term::Iri(raw.clone())
                }
                ParamType::Literal { datatype } => Literal::new(*datatype, raw.clone())
                    .map(Term::Literal)
                    .map_err(|_| QueryError::RestrictionViolation {
                        param: param.label.clone(),
                        required: datatype.to_string(),
                    })?,
            };
            values.insert(&param.label, term);
        }
        let mut ast = template.skeleton.clone();
        let fill = |t: &mut Term| {
            if let Term::Param(p) = t {
                *t = values[p.as_str()].clone();
            }
        };
        for pattern in &mut ast.patterns {
            for t in pattern.terms_mut() {
                fill(t);
            }
        }
        for f in &mut ast.filters {
            fill(&mut f.value);
        }
        Ok(ast)
    }
}
