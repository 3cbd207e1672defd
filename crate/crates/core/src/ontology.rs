//! T-Box/A-Box knowledge base with constraint-checked editing.
//!
//! Every edit validates against the current state first and mutates only on
//! success, so a rejected edit leaves the base (revision included) untouched.
//!
//! Object properties may belong to one of two structural families:
//! hierarchical ones (`PartOf`) give each individual at most one father and
//! must stay acyclic, total-order ones (`isFollowedBy`) chain individuals
//! into simple sequences.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The root class every class reaches through `isA`.
pub const THING: &str = "Thing";

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "details")]
pub enum OntologyError {
    #[error("iri `{0}` is already in use")]
    DuplicateIri(String),
    #[error("invalid iri `{0}`")]
    InvalidIri(String),
    #[error("`{0}` is built in and cannot be redefined")]
    BuiltIn(String),
    #[error("unknown parent class `{0}`")]
    UnknownParent(String),
    #[error("isA cycle: {}", .0.join(" -> "))]
    IsACycle(Vec<String>),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("max cardinality {max} is below min cardinality {min}")]
    BadCardinality { min: u32, max: u32 },
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("individual needs at least one label")]
    EmptyLabels,
    #[error("invalid {datatype} literal `{value}`")]
    InvalidLiteral { datatype: PrimitiveType, value: String },
    #[error("`{object}` is not in the range {expected} of `{property}`")]
    RangeViolation {
        property: String,
        object: String,
        expected: String,
    },
    #[error("`{subject}` is not in the domain `{expected}` of `{property}`")]
    DomainViolation {
        property: String,
        subject: String,
        expected: String,
    },
    #[error("`{subject}` already has {max} value(s) for `{property}`")]
    CardinalityExceeded {
        property: String,
        subject: String,
        max: u32,
    },
    #[error("assertion already present")]
    DuplicateAssertion,
    #[error("no such assertion")]
    UnknownAssertion,
    #[error("`{property}` would become cyclic: {}", .path.join(" -> "))]
    WouldCreateCycle { property: String, path: Vec<String> },
    #[error("`{individual}` already has father `{existing}` via `{property}`")]
    SecondFather {
        property: String,
        individual: String,
        existing: String,
    },
    #[error("`{individual}` would get a second neighbour on chain `{property}`")]
    ChainFork { property: String, individual: String },
    #[error("`{0}` is not a hierarchical property")]
    NotHierarchical(String),
    #[error("`{0}` is not a total-order property")]
    NotTotalOrder(String),
    #[error("chain of `{0}` is inconsistent")]
    ChainInconsistent(String),
    #[error("invalid inverse declaration: {0}")]
    InvalidInverse(String),
}

impl OntologyError {
    /// Stable variant name used as the wire error code.
    pub fn code(&self) -> &'static str {
        match self {
            OntologyError::DuplicateIri(_) => "DuplicateIri",
            OntologyError::InvalidIri(_) => "InvalidIri",
            OntologyError::BuiltIn(_) => "BuiltIn",
            OntologyError::UnknownParent(_) => "UnknownParent",
            OntologyError::IsACycle(_) => "IsACycle",
            OntologyError::UnknownClass(_) => "UnknownClass",
            OntologyError::UnknownProperty(_) => "UnknownProperty",
            OntologyError::UnknownIndividual(_) => "UnknownIndividual",
            OntologyError::BadCardinality { .. } => "BadCardinality",
            OntologyError::KindMismatch(_) => "KindMismatch",
            OntologyError::EmptyLabels => "EmptyLabels",
            OntologyError::InvalidLiteral { .. } => "InvalidLiteral",
            OntologyError::RangeViolation { .. } => "RangeViolation",
            OntologyError::DomainViolation { .. } => "DomainViolation",
            OntologyError::CardinalityExceeded { .. } => "CardinalityExceeded",
            OntologyError::DuplicateAssertion => "DuplicateAssertion",
            OntologyError::UnknownAssertion => "UnknownAssertion",
            OntologyError::WouldCreateCycle { .. } => "WouldCreateCycle",
            OntologyError::SecondFather { .. } => "SecondFather",
            OntologyError::ChainFork { .. } => "ChainFork",
            OntologyError::NotHierarchical(_) => "NotHierarchical",
            OntologyError::NotTotalOrder(_) => "NotTotalOrder",
            OntologyError::ChainInconsistent(_) => "ChainInconsistent",
            OntologyError::InvalidInverse(_) => "InvalidInverse",
        }
    }
}

type Result<T> = std::result::Result<T, OntologyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveType {
    String,
    Integer,
    Decimal,
    Boolean,
    Uri,
}

impl PrimitiveType {
    pub const ALL: [PrimitiveType; 5] = [
        PrimitiveType::String,
        PrimitiveType::Integer,
        PrimitiveType::Decimal,
        PrimitiveType::Boolean,
        PrimitiveType::Uri,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveType::String => "string",
            PrimitiveType::Integer => "integer",
            PrimitiveType::Decimal => "decimal",
            PrimitiveType::Boolean => "boolean",
            PrimitiveType::Uri => "uri",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn accepts(&self, lexical: &str) -> bool {
        match self {
            PrimitiveType::String => true,
            PrimitiveType::Integer => {
                let digits = lexical.strip_prefix(['-', '+']).unwrap_or(lexical);
                !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
            }
            PrimitiveType::Decimal => {
                let body = lexical.strip_prefix(['-', '+']).unwrap_or(lexical);
                let (int, frac) = body.split_once('.').unwrap_or((body, ""));
                !(int.is_empty() && frac.is_empty())
                    && int.bytes().all(|b| b.is_ascii_digit())
                    && frac.bytes().all(|b| b.is_ascii_digit())
                    && !(body.ends_with('.') && int.is_empty())
            }
            PrimitiveType::Boolean => lexical == "true" || lexical == "false",
            PrimitiveType::Uri => url::Url::parse(lexical).is_ok(),
        }
    }
}

impl std::fmt::Display for PrimitiveType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub datatype: PrimitiveType,
    pub value: String,
}

impl Literal {
    pub fn new(datatype: PrimitiveType, value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if !datatype.accepts(&value) {
            return Err(OntologyError::InvalidLiteral { datatype, value });
        }
        Ok(Self { datatype, value })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Self {
            datatype: PrimitiveType::String,
            value: value.into(),
        }
    }
}

/// Object position of an assertion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Individual(String),
    Literal(Literal),
}

impl Value {
    pub fn individual(iri: impl Into<String>) -> Self {
        Value::Individual(iri.into())
    }

    pub fn as_individual(&self) -> Option<&str> {
        match self {
            Value::Individual(iri) => Some(iri),
            Value::Literal(_) => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Value::Individual(iri) => iri.clone(),
            Value::Literal(l) => format!("\"{}\"^^{}", l.value, l.datatype),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDef {
    pub iri: String,
    pub label: String,
    /// Direct `isA` parents in declaration order; empty means `Thing`.
    #[serde(default)]
    pub parents: Vec<String>,
}

impl ClassDef {
    pub fn new<I, S>(iri: impl Into<String>, label: impl Into<String>, parents: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            iri: iri.into(),
            label: label.into(),
            parents: parents.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyKind {
    ObjectProperty,
    DatatypeProperty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyFamily {
    Hierarchical,
    TotalOrder,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Range {
    Class(String),
    Primitive(PrimitiveType),
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Range::Class(c) => write!(f, "class `{c}`"),
            Range::Primitive(p) => write!(f, "type `{p}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDef {
    pub iri: String,
    pub kind: PropertyKind,
    #[serde(default)]
    pub domain: Option<String>,
    pub range: Range,
    #[serde(default)]
    pub min_card: u32,
    #[serde(default)]
    pub max_card: Option<u32>,
    #[serde(default)]
    pub family: Option<PropertyFamily>,
    /// Declares this property as the inverse view of another object
    /// property. Values are stored on the base property with subject and
    /// object swapped.
    #[serde(default)]
    pub inverse_of: Option<String>,
}

impl PropertyDef {
    pub fn object(iri: impl Into<String>, range_class: impl Into<String>) -> Self {
        Self {
            iri: iri.into(),
            kind: PropertyKind::ObjectProperty,
            domain: None,
            range: Range::Class(range_class.into()),
            min_card: 0,
            max_card: None,
            family: None,
            inverse_of: None,
        }
    }

    pub fn datatype(iri: impl Into<String>, range: PrimitiveType) -> Self {
        Self {
            iri: iri.into(),
            kind: PropertyKind::DatatypeProperty,
            domain: None,
            range: Range::Primitive(range),
            min_card: 0,
            max_card: None,
            family: None,
            inverse_of: None,
        }
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain = Some(domain.into());
        self
    }

    pub fn with_family(mut self, family: PropertyFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn with_cardinality(mut self, min: u32, max: Option<u32>) -> Self {
        self.min_card = min;
        self.max_card = max;
        self
    }

    pub fn inverse_of(mut self, base: impl Into<String>) -> Self {
        self.inverse_of = Some(base.into());
        self
    }

    pub fn family(&self) -> PropertyFamily {
        self.family.unwrap_or(PropertyFamily::Plain)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub iri: String,
    /// First label is the primary display label.
    pub labels: Vec<String>,
    #[serde(default)]
    pub classes: BTreeSet<String>,
}

impl Individual {
    pub fn new<L, C>(iri: impl Into<String>, labels: L, classes: C) -> Self
    where
        L: IntoIterator,
        L::Item: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        Self {
            iri: iri.into(),
            labels: labels.into_iter().map(Into::into).collect(),
            classes: classes.into_iter().map(Into::into).collect(),
        }
    }

    pub fn primary_label(&self) -> &str {
        &self.labels[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assertion {
    pub subject: String,
    pub property: String,
    pub object: Value,
}

/// What happens to the hierarchical children of a removed individual.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemoveMode {
    /// Children are re-attached to the removed node's father.
    #[default]
    Splice,
    /// Hierarchical descendants are removed as well.
    Cascade,
}

/// A single journaled edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    DefineClass(ClassDef),
    RedefineClass(ClassDef),
    DefineProperty(PropertyDef),
    AssertIndividual(Individual),
    SetPropertyValue {
        subject: String,
        property: String,
        object: Value,
    },
    RemovePropertyValue {
        subject: String,
        property: String,
        object: Value,
    },
    RemoveIndividual {
        iri: String,
        #[serde(default)]
        mode: RemoveMode,
    },
}

fn valid_iri(iri: &str) -> bool {
    !iri.is_empty()
        && !iri
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    classes: BTreeMap<String, ClassDef>,
    properties: BTreeMap<String, PropertyDef>,
    individuals: BTreeMap<String, Individual>,
    assertions: BTreeSet<Assertion>,
    revision: u64,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new()
    }
}

impl KnowledgeBase {
    /// Empty base holding only `Thing`, at revision 0.
    pub fn new() -> Self {
        let mut classes = BTreeMap::new();
        classes.insert(
            THING.to_string(),
            ClassDef {
                iri: THING.to_string(),
                label: THING.to_string(),
                parents: Vec::new(),
            },
        );
        Self {
            classes,
            properties: BTreeMap::new(),
            individuals: BTreeMap::new(),
            assertions: BTreeSet::new(),
            revision: 0,
        }
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn classes(&self) -> &BTreeMap<String, ClassDef> {
        &self.classes
    }

    pub fn properties(&self) -> &BTreeMap<String, PropertyDef> {
        &self.properties
    }

    pub fn individuals(&self) -> &BTreeMap<String, Individual> {
        &self.individuals
    }

    pub fn assertions(&self) -> &BTreeSet<Assertion> {
        &self.assertions
    }

    pub fn class(&self, iri: &str) -> Option<&ClassDef> {
        self.classes.get(iri)
    }

    pub fn property(&self, iri: &str) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn individual(&self, iri: &str) -> Option<&Individual> {
        self.individuals.get(iri)
    }

    fn iri_in_use(&self, iri: &str) -> bool {
        self.classes.contains_key(iri)
            || self.properties.contains_key(iri)
            || self.individuals.contains_key(iri)
    }

    fn check_new_iri(&self, iri: &str) -> Result<()> {
        if !valid_iri(iri) {
            return Err(OntologyError::InvalidIri(iri.to_string()));
        }
        if self.iri_in_use(iri) {
            return Err(OntologyError::DuplicateIri(iri.to_string()));
        }
        Ok(())
    }

    // ---- T-Box queries ----

    /// `class` and all its ancestors.
    pub fn superclasses(&self, class: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![class.to_string()];
        while let Some(c) = stack.pop() {
            if !out.insert(c.clone()) {
                continue;
            }
            if let Some(def) = self.classes.get(&c) {
                stack.extend(def.parents.iter().cloned());
            }
        }
        out
    }

    pub fn is_subclass_of(&self, class: &str, ancestor: &str) -> bool {
        self.superclasses(class).contains(ancestor)
    }

    /// Classes that list `class` as a direct parent.
    pub fn direct_subclasses(&self, class: &str) -> Vec<&ClassDef> {
        self.classes
            .values()
            .filter(|c| c.parents.iter().any(|p| p == class))
            .collect()
    }

    /// All classes of an individual, closed under `isA`.
    pub fn types_of(&self, individual: &str) -> BTreeSet<String> {
        let Some(ind) = self.individuals.get(individual) else {
            return BTreeSet::new();
        };
        ind.classes.iter().flat_map(|c| self.superclasses(c)).collect()
    }

    pub fn is_instance_of(&self, individual: &str, class: &str) -> bool {
        self.individuals
            .get(individual)
            .is_some_and(|ind| ind.classes.iter().any(|c| self.is_subclass_of(c, class)))
    }

    /// Individuals asserted directly as members of `class`.
    pub fn direct_members(&self, class: &str) -> Vec<&Individual> {
        self.individuals
            .values()
            .filter(|i| i.classes.contains(class))
            .collect()
    }

    /// Members of `class` or any of its subclasses.
    pub fn instances_of(&self, class: &str) -> Vec<&Individual> {
        self.individuals
            .values()
            .filter(|i| self.is_instance_of(&i.iri, class))
            .collect()
    }

    /// Finds an `isA` cycle through `start` assuming `start` has `parents`.
    fn isa_cycle_from(&self, start: &str, parents: &[String]) -> Option<Vec<String>> {
        // DFS over parent edges, with `start`'s edges overridden
        fn visit(
            kb: &KnowledgeBase,
            start: &str,
            start_parents: &[String],
            node: &str,
            path: &mut Vec<String>,
            seen: &mut BTreeSet<String>,
        ) -> bool {
            let parents: &[String] = if node == start {
                start_parents
            } else {
                kb.classes.get(node).map(|c| c.parents.as_slice()).unwrap_or(&[])
            };
            for p in parents {
                path.push(p.clone());
                if p == start {
                    return true;
                }
                if seen.insert(p.clone()) && visit(kb, start, start_parents, p, path, seen) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = vec![start.to_string()];
        let mut seen = BTreeSet::new();
        visit(self, start, parents, start, &mut path, &mut seen).then_some(path)
    }

    fn normalized_class(&self, def: &ClassDef) -> Result<ClassDef> {
        let mut parents: Vec<String> = Vec::new();
        for p in &def.parents {
            if !parents.contains(p) {
                parents.push(p.clone());
            }
        }
        if parents.is_empty() {
            parents.push(THING.to_string());
        }
        if parents.iter().any(|p| p == &def.iri) {
            return Err(OntologyError::IsACycle(vec![def.iri.clone(), def.iri.clone()]));
        }
        if let Some(missing) = parents.iter().find(|p| !self.classes.contains_key(*p)) {
            return Err(OntologyError::UnknownParent(missing.clone()));
        }
        Ok(ClassDef {
            iri: def.iri.clone(),
            label: def.label.clone(),
            parents,
        })
    }

    // ---- T-Box edits ----

    pub fn define_class(&mut self, def: ClassDef) -> Result<()> {
        if !valid_iri(&def.iri) {
            return Err(OntologyError::InvalidIri(def.iri));
        }
        if def.parents.iter().any(|p| p == &def.iri) {
            return Err(OntologyError::IsACycle(vec![def.iri.clone(), def.iri.clone()]));
        }
        self.check_new_iri(&def.iri)?;
        let def = self.normalized_class(&def)?;
        if let Some(path) = self.isa_cycle_from(&def.iri, &def.parents) {
            return Err(OntologyError::IsACycle(path));
        }
        self.classes.insert(def.iri.clone(), def);
        self.revision += 1;
        Ok(())
    }

    /// Replaces the label and parents of an existing class.
    pub fn redefine_class(&mut self, def: ClassDef) -> Result<()> {
        if def.iri == THING {
            return Err(OntologyError::BuiltIn(def.iri));
        }
        if !self.classes.contains_key(&def.iri) {
            return Err(OntologyError::UnknownClass(def.iri));
        }
        let def = self.normalized_class(&def)?;
        if let Some(path) = self.isa_cycle_from(&def.iri, &def.parents) {
            return Err(OntologyError::IsACycle(path));
        }
        self.classes.insert(def.iri.clone(), def);
        self.revision += 1;
        Ok(())
    }

    pub fn define_property(&mut self, def: PropertyDef) -> Result<()> {
        self.check_new_iri(&def.iri)?;
        if let Some(max) = def.max_card {
            if max < def.min_card {
                return Err(OntologyError::BadCardinality {
                    min: def.min_card,
                    max,
                });
            }
        }
        match (&def.kind, &def.range) {
            (PropertyKind::ObjectProperty, Range::Class(c)) => {
                if !self.classes.contains_key(c) {
                    return Err(OntologyError::UnknownClass(c.clone()));
                }
            }
            (PropertyKind::DatatypeProperty, Range::Primitive(_)) => {}
            (PropertyKind::ObjectProperty, Range::Primitive(_)) => {
                return Err(OntologyError::KindMismatch(
                    "object property needs a class range".into(),
                ))
            }
            (PropertyKind::DatatypeProperty, Range::Class(_)) => {
                return Err(OntologyError::KindMismatch(
                    "datatype property needs a primitive range".into(),
                ))
            }
        }
        if matches!(
            def.family,
            Some(PropertyFamily::Hierarchical | PropertyFamily::TotalOrder)
        ) && def.kind != PropertyKind::ObjectProperty
        {
            return Err(OntologyError::KindMismatch(format!(
                "{:?} family requires an object property",
                def.family.unwrap()
            )));
        }
        if let Some(domain) = &def.domain {
            if !self.classes.contains_key(domain) {
                return Err(OntologyError::UnknownClass(domain.clone()));
            }
        }
        if let Some(base) = &def.inverse_of {
            let Some(base_def) = self.properties.get(base) else {
                return Err(OntologyError::UnknownProperty(base.clone()));
            };
            if def.kind != PropertyKind::ObjectProperty
                || base_def.kind != PropertyKind::ObjectProperty
            {
                return Err(OntologyError::InvalidInverse(
                    "inverses relate object properties".into(),
                ));
            }
            if base_def.inverse_of.is_some() {
                return Err(OntologyError::InvalidInverse(format!(
                    "`{base}` is itself an inverse view"
                )));
            }
            if def.family() != PropertyFamily::Plain {
                return Err(OntologyError::InvalidInverse(
                    "inverse views carry no family of their own".into(),
                ));
            }
        }
        self.properties.insert(def.iri.clone(), def);
        self.revision += 1;
        Ok(())
    }

    // ---- A-Box edits ----

    pub fn assert_individual(&mut self, mut ind: Individual) -> Result<()> {
        self.check_new_iri(&ind.iri)?;
        if ind.labels.is_empty() {
            return Err(OntologyError::EmptyLabels);
        }
        if ind.classes.is_empty() {
            ind.classes.insert(THING.to_string());
        }
        if let Some(missing) = ind.classes.iter().find(|c| !self.classes.contains_key(*c)) {
            return Err(OntologyError::UnknownClass(missing.clone()));
        }
        self.individuals.insert(ind.iri.clone(), ind);
        self.revision += 1;
        Ok(())
    }

    /// Maps an assertion on an inverse view onto its base property.
    fn canonical(&self, subject: &str, property: &str, object: &Value) -> Result<Assertion> {
        let def = self
            .properties
            .get(property)
            .ok_or_else(|| OntologyError::UnknownProperty(property.to_string()))?;
        if let Some(base) = &def.inverse_of {
            let Value::Individual(obj) = object else {
                return Err(OntologyError::KindMismatch(format!(
                    "`{property}` takes an individual"
                )));
            };
            return Ok(Assertion {
                subject: obj.clone(),
                property: base.clone(),
                object: Value::Individual(subject.to_string()),
            });
        }
        Ok(Assertion {
            subject: subject.to_string(),
            property: property.to_string(),
            object: object.clone(),
        })
    }

    /// Every check `set_property_value` performs, without mutating.
    pub fn check_property_value(&self, subject: &str, property: &str, object: &Value) -> Result<Assertion> {
        if !self.individuals.contains_key(subject) {
            return Err(OntologyError::UnknownIndividual(subject.to_string()));
        }
        let assertion = self.canonical(subject, property, object)?;
        let def = &self.properties[&assertion.property];
        let (s, p) = (assertion.subject.as_str(), assertion.property.as_str());

        match (&def.range, &assertion.object) {
            (Range::Class(range), Value::Individual(o)) => {
                if !self.individuals.contains_key(o) {
                    return Err(OntologyError::UnknownIndividual(o.clone()));
                }
                if !self.individuals.contains_key(s) {
                    return Err(OntologyError::UnknownIndividual(s.to_string()));
                }
                if !self.is_instance_of(o, range) {
                    return Err(OntologyError::RangeViolation {
                        property: p.to_string(),
                        object: o.clone(),
                        expected: def.range.to_string(),
                    });
                }
            }
            (Range::Primitive(ty), Value::Literal(lit)) => {
                if !lit.datatype.accepts(&lit.value) {
                    return Err(OntologyError::InvalidLiteral {
                        datatype: lit.datatype,
                        value: lit.value.clone(),
                    });
                }
                if lit.datatype != *ty {
                    return Err(OntologyError::RangeViolation {
                        property: p.to_string(),
                        object: assertion.object.describe(),
                        expected: def.range.to_string(),
                    });
                }
            }
            (Range::Class(_), Value::Literal(_)) => {
                return Err(OntologyError::KindMismatch(format!(
                    "`{p}` is an object property and takes an individual"
                )))
            }
            (Range::Primitive(_), Value::Individual(_)) => {
                return Err(OntologyError::KindMismatch(format!(
                    "`{p}` is a datatype property and takes a literal"
                )))
            }
        }
        if let Some(domain) = &def.domain {
            if !self.is_instance_of(s, domain) {
                return Err(OntologyError::DomainViolation {
                    property: p.to_string(),
                    subject: s.to_string(),
                    expected: domain.clone(),
                });
            }
        }
        if self.assertions.contains(&assertion) {
            return Err(OntologyError::DuplicateAssertion);
        }
        if let Value::Individual(o) = &assertion.object {
            match def.family() {
                PropertyFamily::Hierarchical => {
                    if s == o {
                        return Err(OntologyError::WouldCreateCycle {
                            property: p.to_string(),
                            path: vec![s.to_string(), s.to_string()],
                        });
                    }
                    if let Some(existing) = self.targets(s, p).next() {
                        return Err(OntologyError::SecondFather {
                            property: p.to_string(),
                            individual: s.to_string(),
                            existing: existing.to_string(),
                        });
                    }
                    if let Some(path) = self.forward_path(o, s, p) {
                        let mut cycle = vec![s.to_string()];
                        cycle.extend(path);
                        return Err(OntologyError::WouldCreateCycle {
                            property: p.to_string(),
                            path: cycle,
                        });
                    }
                }
                PropertyFamily::TotalOrder => {
                    if s == o {
                        return Err(OntologyError::WouldCreateCycle {
                            property: p.to_string(),
                            path: vec![s.to_string(), s.to_string()],
                        });
                    }
                    if self.targets(s, p).next().is_some() {
                        return Err(OntologyError::ChainFork {
                            property: p.to_string(),
                            individual: s.to_string(),
                        });
                    }
                    if self.sources(o, p).next().is_some() {
                        return Err(OntologyError::ChainFork {
                            property: p.to_string(),
                            individual: o.clone(),
                        });
                    }
                    if let Some(path) = self.forward_path(o, s, p) {
                        let mut cycle = vec![s.to_string()];
                        cycle.extend(path);
                        return Err(OntologyError::WouldCreateCycle {
                            property: p.to_string(),
                            path: cycle,
                        });
                    }
                }
                PropertyFamily::Plain => {}
            }
        }
        if let Some(max) = def.max_card {
            let count = self
                .assertions
                .iter()
                .filter(|a| a.subject == s && a.property == p)
                .count();
            if count as u64 >= max as u64 {
                return Err(OntologyError::CardinalityExceeded {
                    property: p.to_string(),
                    subject: s.to_string(),
                    max,
                });
            }
        }
        Ok(assertion)
    }

    pub fn set_property_value(&mut self, subject: &str, property: &str, object: Value) -> Result<()> {
        let assertion = self.check_property_value(subject, property, &object)?;
        self.assertions.insert(assertion);
        self.revision += 1;
        Ok(())
    }

    pub fn remove_property_value(&mut self, subject: &str, property: &str, object: Value) -> Result<()> {
        let assertion = self.canonical(subject, property, &object)?;
        if !self.assertions.remove(&assertion) {
            return Err(OntologyError::UnknownAssertion);
        }
        self.revision += 1;
        Ok(())
    }

    /// Objects of `(subject, property, ?)` that are individuals.
    pub fn targets<'a>(&'a self, subject: &'a str, property: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.assertions
            .iter()
            .filter(move |a| a.subject == subject && a.property == property)
            .filter_map(|a| a.object.as_individual())
    }

    /// Subjects of `(?, property, object)`.
    pub fn sources<'a>(&'a self, object: &'a str, property: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.assertions
            .iter()
            .filter(move |a| a.property == property && a.object.as_individual() == Some(object))
            .map(|a| a.subject.as_str())
    }

    /// Path `from -> … -> to` following `property` edges, if any.
    fn forward_path(&self, from: &str, to: &str, property: &str) -> Option<Vec<String>> {
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut queue = std::collections::VecDeque::from([from.to_string()]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                let mut path = vec![node.clone()];
                let mut cur = node;
                while let Some(p) = parent.get(&cur) {
                    path.push(p.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            for next in self.targets(&node, property) {
                if seen.insert(next.to_string()) {
                    parent.insert(next.to_string(), node.clone());
                    queue.push_back(next.to_string());
                }
            }
        }
        None
    }

    fn family_of(&self, property: &str) -> Result<PropertyFamily> {
        self.properties
            .get(property)
            .map(PropertyDef::family)
            .ok_or_else(|| OntologyError::UnknownProperty(property.to_string()))
    }

    pub fn hierarchical_properties(&self) -> Vec<&str> {
        self.properties
            .values()
            .filter(|p| p.family() == PropertyFamily::Hierarchical)
            .map(|p| p.iri.as_str())
            .collect()
    }

    pub fn father_of(&self, individual: &str, property: &str) -> Result<Option<&str>> {
        if self.family_of(property)? != PropertyFamily::Hierarchical {
            return Err(OntologyError::NotHierarchical(property.to_string()));
        }
        if !self.individuals.contains_key(individual) {
            return Err(OntologyError::UnknownIndividual(individual.to_string()));
        }
        Ok(self
            .assertions
            .iter()
            .find(|a| a.subject == individual && a.property == property)
            .and_then(|a| a.object.as_individual()))
    }

    /// Individuals whose father via `property` is `individual`.
    pub fn children_of(&self, individual: &str, property: &str) -> Result<Vec<&str>> {
        if self.family_of(property)? != PropertyFamily::Hierarchical {
            return Err(OntologyError::NotHierarchical(property.to_string()));
        }
        Ok(self
            .assertions
            .iter()
            .filter(|a| a.property == property && a.object.as_individual() == Some(individual))
            .map(|a| a.subject.as_str())
            .collect())
    }

    /// All hierarchical descendants of `individual` under any hierarchical
    /// property, excluding itself.
    pub fn descendants(&self, individual: &str) -> BTreeSet<String> {
        let props = self.hierarchical_properties();
        let mut out = BTreeSet::new();
        let mut stack = vec![individual.to_string()];
        while let Some(node) = stack.pop() {
            for p in &props {
                for child in self.sources(&node, p) {
                    if child != individual && out.insert(child.to_string()) {
                        stack.push(child.to_string());
                    }
                }
            }
        }
        out
    }

    fn primary_label_key<'a>(&'a self, iri: &'a str) -> (&'a str, &'a str) {
        let label = self
            .individuals
            .get(iri)
            .map(|i| i.primary_label())
            .unwrap_or(iri);
        (label, iri)
    }

    /// Orders `individuals` along the successor chains of a total-order
    /// property. Chains come first (ordered by their head's label), loose
    /// individuals follow in label order.
    pub fn level_order(&self, individuals: &[String], property: &str) -> Result<Vec<String>> {
        if self.family_of(property)? != PropertyFamily::TotalOrder {
            return Err(OntologyError::NotTotalOrder(property.to_string()));
        }
        let members: BTreeSet<&str> = individuals.iter().map(String::as_str).collect();
        let mut next: BTreeMap<&str, &str> = BTreeMap::new();
        let mut has_pred: BTreeSet<&str> = BTreeSet::new();
        for a in &self.assertions {
            if a.property != property {
                continue;
            }
            let Some(o) = a.object.as_individual() else { continue };
            let s = a.subject.as_str();
            if !members.contains(s) || !members.contains(o) {
                continue;
            }
            if next.insert(s, o).is_some() || !has_pred.insert(o) {
                return Err(OntologyError::ChainInconsistent(property.to_string()));
            }
        }
        let mut heads: Vec<&str> = next
            .keys()
            .copied()
            .filter(|s| !has_pred.contains(s))
            .collect();
        heads.sort_by_key(|h| self.primary_label_key(h));
        let mut ordered = Vec::new();
        let mut placed = BTreeSet::new();
        for head in heads {
            let mut cur = Some(head);
            while let Some(node) = cur {
                if !placed.insert(node) {
                    return Err(OntologyError::ChainInconsistent(property.to_string()));
                }
                ordered.push(node.to_string());
                cur = next.get(node).copied();
            }
        }
        if next.keys().any(|k| !placed.contains(k)) {
            // headless cycle
            return Err(OntologyError::ChainInconsistent(property.to_string()));
        }
        let mut loose: Vec<&str> = members.iter().copied().filter(|m| !placed.contains(m)).collect();
        loose.sort_by_key(|m| self.primary_label_key(m));
        ordered.extend(loose.into_iter().map(str::to_string));
        Ok(ordered)
    }

    pub fn remove_individual(&mut self, iri: &str, mode: RemoveMode) -> Result<()> {
        if !self.individuals.contains_key(iri) {
            return Err(OntologyError::UnknownIndividual(iri.to_string()));
        }
        let doomed: BTreeSet<String> = match mode {
            RemoveMode::Splice => BTreeSet::from([iri.to_string()]),
            RemoveMode::Cascade => {
                let mut all = self.descendants(iri);
                all.insert(iri.to_string());
                all
            }
        };
        let mut reattach = Vec::new();
        if mode == RemoveMode::Splice {
            for prop in self.properties.values() {
                match prop.family() {
                    PropertyFamily::Hierarchical => {
                        if let Some(father) = self.targets(iri, &prop.iri).next() {
                            for child in self.sources(iri, &prop.iri) {
                                reattach.push(Assertion {
                                    subject: child.to_string(),
                                    property: prop.iri.clone(),
                                    object: Value::individual(father),
                                });
                            }
                        }
                    }
                    PropertyFamily::TotalOrder => {
                        let succ = self.targets(iri, &prop.iri).next();
                        let pred = self.sources(iri, &prop.iri).next();
                        if let (Some(p), Some(s)) = (pred, succ) {
                            reattach.push(Assertion {
                                subject: p.to_string(),
                                property: prop.iri.clone(),
                                object: Value::individual(s),
                            });
                        }
                    }
                    PropertyFamily::Plain => {}
                }
            }
        }
        self.assertions.retain(|a| {
            !doomed.contains(&a.subject)
                && !a.object.as_individual().is_some_and(|o| doomed.contains(o))
        });
        self.assertions.extend(reattach);
        for d in &doomed {
            self.individuals.remove(d);
        }
        self.revision += 1;
        Ok(())
    }

    pub fn apply(&mut self, edit: &Edit) -> Result<()> {
        match edit.clone() {
            Edit::DefineClass(def) => self.define_class(def),
            Edit::RedefineClass(def) => self.redefine_class(def),
            Edit::DefineProperty(def) => self.define_property(def),
            Edit::AssertIndividual(ind) => self.assert_individual(ind),
            Edit::SetPropertyValue {
                subject,
                property,
                object,
            } => self.set_property_value(&subject, &property, object),
            Edit::RemovePropertyValue {
                subject,
                property,
                object,
            } => self.remove_property_value(&subject, &property, object),
            Edit::RemoveIndividual { iri, mode } => self.remove_individual(&iri, mode),
        }
    }
}
