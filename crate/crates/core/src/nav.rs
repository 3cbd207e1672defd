//! Pie-chart navigation model built from a knowledge-base snapshot.
//!
//! Sector ids are paths: the root is `c:Thing` and a child appends
//! `>c:<iri>` (class) or `>i:<iri>` (individual). Result sectors holding a
//! literal use `>l:<lexical>`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elasticity::{region_color, ElasticityParams, Rgb};
use crate::fsn::FsnGraph;
use crate::ontology::{KnowledgeBase, OntologyError, THING};
use crate::query::{RdfTerm, ResultTable};
use crate::scalar::Real;

/// Percent resolution: hundredths.
const UNITS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "details")]
pub enum NavError {
    #[error("sector `{0}` cannot be expanded")]
    NotExpandable(String),
    #[error("unknown sector `{0}`")]
    UnknownSector(String),
    #[error("unknown FD tag `{0}`")]
    UnknownTag(String),
    #[error("focus needs at least one tag")]
    EmptyTagList,
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

impl NavError {
    pub fn code(&self) -> &'static str {
        match self {
            NavError::NotExpandable(_) => "NotExpandable",
            NavError::UnknownSector(_) => "UnknownSector",
            NavError::UnknownTag(_) => "UnknownTag",
            NavError::EmptyTagList => "EmptyTagList",
            NavError::Ontology(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SectorKind {
    Class,
    Individual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieSector {
    pub id: String,
    pub label: String,
    pub kind: SectorKind,
    pub percent: f64,
    pub color: Rgb,
    pub expandable: bool,
    pub children: Vec<PieSector>,
    /// `None` for result sectors that hold a literal.
    pub source_iri: Option<String>,
}

impl PieSector {
    pub fn find(&self, id: &str) -> Option<&PieSector> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut PieSector> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }

    fn for_each_mut(&mut self, f: &mut impl FnMut(&mut PieSector)) {
        f(self);
        for c in &mut self.children {
            c.for_each_mut(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieModel {
    pub root: PieSector,
    pub focus_tags: Vec<String>,
    pub revision: u64,
    /// Set when a focus or result has no members.
    pub empty: bool,
}

impl PieModel {
    pub fn sector(&self, id: &str) -> Option<&PieSector> {
        self.root.find(id)
    }
}

pub fn root_id() -> String {
    format!("c:{THING}")
}

fn child_id(parent: &str, kind: SectorKind, iri: &str) -> String {
    let tag = match kind {
        SectorKind::Class => 'c',
        SectorKind::Individual => 'i',
    };
    format!("{parent}>{tag}:{iri}")
}

/// Splits `weights` into hundredths of a percent summing to 100.00 with the
/// largest-remainder method. All-zero weights split uniformly, and no share
/// rounds down to zero while there is room.
pub fn largest_remainder(weights: &[u64]) -> Vec<u64> {
    if weights.is_empty() {
        return Vec::new();
    }
    let ones;
    let weights = if weights.iter().all(|&w| w == 0) {
        ones = vec![1u64; weights.len()];
        &ones[..]
    } else {
        weights
    };
    let sum: u128 = weights.iter().map(|&w| w as u128).sum();
    let total = UNITS as u128;
    let mut units: Vec<u64> = weights.iter().map(|&w| (w as u128 * total / sum) as u64).collect();
    let mut left = UNITS - units.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(weights[i] as u128 * total % sum), i));
    for &i in order.iter().cycle().take(left as usize) {
        units[i] += 1;
        left -= 1;
    }
    debug_assert_eq!(left, 0);
    if weights.len() as u64 <= UNITS {
        while let Some(z) = units.iter().position(|&u| u == 0) {
            let big = (0..units.len()).max_by_key(|&i| (units[i], std::cmp::Reverse(i))).unwrap();
            units[big] -= 1;
            units[z] += 1;
        }
    }
    units
}

fn apply_percents(children: &mut [PieSector], weights: &[u64]) {
    for (c, u) in children.iter_mut().zip(largest_remainder(weights)) {
        c.percent = u as f64 / 100.0;
    }
}

fn class_weight(kb: &KnowledgeBase, class: &str) -> u64 {
    kb.instances_of(class).len() as u64
}

fn individual_weight(kb: &KnowledgeBase, iri: &str) -> u64 {
    1 + kb.descendants(iri).len() as u64
}

fn hierarchical_children(kb: &KnowledgeBase, iri: &str) -> BTreeSet<String> {
    kb.hierarchical_properties()
        .into_iter()
        .flat_map(|p| kb.sources(iri, p).map(str::to_string).collect::<Vec<_>>())
        .collect()
}

fn class_sector(kb: &KnowledgeBase, parent: &str, iri: &str) -> PieSector {
    let label = kb.class(iri).map_or(iri, |c| c.label.as_str()).to_string();
    PieSector {
        id: child_id(parent, SectorKind::Class, iri),
        label,
        kind: SectorKind::Class,
        percent: 0.0,
        color: Rgb::NEUTRAL,
        expandable: !kb.direct_subclasses(iri).is_empty() || !kb.direct_members(iri).is_empty(),
        children: Vec::new(),
        source_iri: Some(iri.to_string()),
    }
}

fn individual_sector(kb: &KnowledgeBase, parent: &str, iri: &str) -> PieSector {
    let label = kb.individual(iri).map_or(iri, |i| i.primary_label()).to_string();
    PieSector {
        id: child_id(parent, SectorKind::Individual, iri),
        label,
        kind: SectorKind::Individual,
        percent: 0.0,
        color: Rgb::NEUTRAL,
        expandable: !hierarchical_children(kb, iri).is_empty(),
        children: Vec::new(),
        source_iri: Some(iri.to_string()),
    }
}

fn weight_of(kb: &KnowledgeBase, s: &PieSector) -> u64 {
    match (&s.kind, &s.source_iri) {
        (SectorKind::Class, Some(iri)) => class_weight(kb, iri),
        (SectorKind::Individual, Some(iri)) => individual_weight(kb, iri),
        (_, None) => 0,
    }
}

fn empty_root() -> PieSector {
    PieSector {
        id: root_id(),
        label: THING.to_string(),
        kind: SectorKind::Class,
        percent: 100.0,
        color: Rgb::NEUTRAL,
        expandable: false,
        children: Vec::new(),
        source_iri: Some(THING.to_string()),
    }
}

/// Root model: `Thing` expanded to its top-level classes.
pub fn build_root(kb: &KnowledgeBase) -> PieModel {
    let mut root = empty_root();
    let mut top: Vec<&str> = kb
        .direct_subclasses(THING)
        .into_iter()
        .map(|c| c.iri.as_str())
        .collect();
    top.sort_by_key(|c| (kb.class(c).map_or(*c, |d| d.label.as_str()), *c));
    root.children = top.iter().map(|c| class_sector(kb, &root.id, c)).collect();
    let weights: Vec<u64> = top.iter().map(|c| class_weight(kb, c)).collect();
    apply_percents(&mut root.children, &weights);
    root.expandable = !root.children.is_empty() || !kb.direct_members(THING).is_empty();
    PieModel {
        root,
        focus_tags: Vec::new(),
        revision: kb.revision(),
        empty: false,
    }
}

/// Sorts sectors: classes first by label, then individuals either along
/// `order_property` chains or by label.
pub fn order_children(
    kb: &KnowledgeBase,
    children: Vec<PieSector>,
    order_property: Option<&str>,
) -> Result<Vec<PieSector>, NavError> {
    let (mut classes, individuals): (Vec<_>, Vec<_>) =
        children.into_iter().partition(|s| s.kind == SectorKind::Class);
    classes.sort_by(|a, b| (&a.label, &a.id).cmp(&(&b.label, &b.id)));
    let mut individuals = individuals;
    match order_property {
        Some(p) => {
            let iris: Vec<String> = individuals.iter().filter_map(|s| s.source_iri.clone()).collect();
            let order = kb.level_order(&iris, p)?;
            let rank: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            individuals.sort_by_key(|s| {
                (
                    s.source_iri.as_deref().and_then(|i| rank.get(i).copied()).unwrap_or(usize::MAX),
                    s.label.clone(),
                )
            });
        }
        None => individuals.sort_by(|a, b| (&a.label, &a.id).cmp(&(&b.label, &b.id))),
    }
    classes.extend(individuals);
    Ok(classes)
}

/// Fills in the children of `sector` from the snapshot.
pub fn expand(
    kb: &KnowledgeBase,
    sector: &PieSector,
    order_property: Option<&str>,
) -> Result<PieSector, NavError> {
    let iri = sector
        .source_iri
        .as_deref()
        .ok_or_else(|| NavError::NotExpandable(sector.id.clone()))?;
    let children: Vec<PieSector> = match sector.kind {
        SectorKind::Class => {
            if iri != THING && kb.class(iri).is_none() {
                return Err(NavError::UnknownSector(sector.id.clone()));
            }
            kb.direct_subclasses(iri)
                .into_iter()
                .map(|c| class_sector(kb, &sector.id, &c.iri))
                .chain(
                    kb.direct_members(iri)
                        .into_iter()
                        .map(|i| individual_sector(kb, &sector.id, &i.iri)),
                )
                .collect()
        }
        SectorKind::Individual => {
            if kb.individual(iri).is_none() {
                return Err(NavError::UnknownSector(sector.id.clone()));
            }
            hierarchical_children(kb, iri)
                .iter()
                .map(|c| individual_sector(kb, &sector.id, c))
                .collect()
        }
    };
    let mut children = order_children(kb, children, order_property)?;
    let weights: Vec<u64> = children.iter().map(|c| weight_of(kb, c)).collect();
    apply_percents(&mut children, &weights);
    let mut out = sector.clone();
    out.expandable = !children.is_empty();
    out.children = children;
    Ok(out)
}

/// Rebuilds a sector from its id alone. Percent is 100 since siblings are
/// not known.
pub fn resolve_sector(kb: &KnowledgeBase, id: &str) -> Result<PieSector, NavError> {
    let unknown = || NavError::UnknownSector(id.to_string());
    if id == root_id() {
        let mut root = build_root(kb).root;
        root.children.clear();
        return Ok(root);
    }
    let (parent, last) = id.rsplit_once('>').ok_or_else(unknown)?;
    if !parent.starts_with(&root_id()) {
        return Err(unknown());
    }
    let mut sector = match last.split_once(':') {
        Some(("c", iri)) if kb.class(iri).is_some() => class_sector(kb, parent, iri),
        Some(("i", iri)) if kb.individual(iri).is_some() => individual_sector(kb, parent, iri),
        Some(("l", _)) => return Err(NavError::NotExpandable(id.to_string())),
        _ => return Err(unknown()),
    };
    sector.percent = 100.0;
    Ok(sector)
}

/// Classes associated with an FD tag: a class iri, or any class whose label
/// matches.
fn tag_classes<'a>(kb: &'a KnowledgeBase, tag: &str) -> Vec<&'a str> {
    if let Some(c) = kb.class(tag) {
        return vec![c.iri.as_str()];
    }
    kb.classes()
        .values()
        .filter(|c| c.label == tag)
        .map(|c| c.iri.as_str())
        .collect()
}

/// Scopes the model to individuals in every tag's class.
pub fn combine_focus(
    kb: &KnowledgeBase,
    tags: &[String],
    order_property: Option<&str>,
) -> Result<PieModel, NavError> {
    let mut unique: Vec<String> = Vec::new();
    for t in tags {
        if !unique.contains(t) {
            unique.push(t.clone());
        }
    }
    if unique.is_empty() {
        return Err(NavError::EmptyTagList);
    }
    let mut members: Option<BTreeSet<String>> = None;
    for tag in &unique {
        let classes = tag_classes(kb, tag);
        if classes.is_empty() {
            return Err(NavError::UnknownTag(tag.clone()));
        }
        let these: BTreeSet<String> = classes
            .iter()
            .flat_map(|c| kb.instances_of(c))
            .map(|i| i.iri.clone())
            .collect();
        members = Some(match members {
            None => these,
            Some(m) => m.intersection(&these).cloned().collect(),
        });
    }
    let members = members.unwrap_or_default();
    let mut root = empty_root();
    let children = members
        .iter()
        .map(|i| individual_sector(kb, &root.id, i))
        .collect();
    root.children = order_children(kb, children, order_property)?;
    let weights: Vec<u64> = root.children.iter().map(|c| weight_of(kb, c)).collect();
    apply_percents(&mut root.children, &weights);
    root.expandable = !root.children.is_empty();
    Ok(PieModel {
        empty: root.children.is_empty(),
        root,
        focus_tags: unique,
        revision: kb.revision(),
    })
}

/// Colors sectors sourced from FD tags by the mean strain of the tag's
/// links. Everything else gets the neutral color.
pub fn colorize<T: Real>(mut model: PieModel, fsn: &FsnGraph<T>, params: &ElasticityParams<T>) -> PieModel {
    model.root.for_each_mut(&mut |s| {
        s.color = s
            .source_iri
            .as_deref()
            .and_then(|iri| fsn.mean_incident_strain(iri))
            .and_then(|strain| region_color(strain, params).ok())
            .unwrap_or(Rgb::NEUTRAL);
    });
    model
}

/// Groups a result table by its first column, weighting by row count.
pub fn table_to_pie(table: &ResultTable, revision: u64) -> PieModel {
    let mut root = empty_root();
    let mut groups: Vec<(&RdfTerm, u64)> = Vec::new();
    for row in &table.rows {
        let Some(first) = row.first() else { continue };
        match groups.iter_mut().find(|(t, _)| *t == first) {
            Some((_, n)) => *n += 1,
            None => groups.push((first, 1)),
        }
    }
    root.children = groups
        .iter()
        .map(|(term, _)| {
            let (id, source_iri) = match term {
                RdfTerm::Iri { value } => (child_id(&root.id, SectorKind::Individual, value), Some(value.clone())),
                RdfTerm::Literal { value, .. } => (format!("{}>l:{value}", root.id), None),
            };
            PieSector {
                id,
                label: term.lexical().to_string(),
                kind: SectorKind::Individual,
                percent: 0.0,
                color: Rgb::NEUTRAL,
                expandable: source_iri.is_some(),
                children: Vec::new(),
                source_iri,
            }
        })
        .collect();
    let weights: Vec<u64> = groups.iter().map(|(_, n)| *n).collect();
    apply_percents(&mut root.children, &weights);
    root.expandable = !root.children.is_empty();
    PieModel {
        empty: root.children.is_empty(),
        root,
        focus_tags: Vec::new(),
        revision,
    }
}

/// Builds a flat model from imported `(name, percent)` slices. Percents are
/// kept as given.
pub fn model_from_slices<'a>(
    slices: impl IntoIterator<Item = (&'a str, f64, Option<&'a str>)>,
    revision: u64,
) -> PieModel {
    let mut root = empty_root();
    for (i, (name, percent, iri)) in slices.into_iter().enumerate() {
        let id = match iri.map(|iri| child_id(&root.id, SectorKind::Individual, iri)) {
            Some(id) if root.children.iter().all(|c| c.id != id) => id,
            _ => format!("{}>s:{i}", root.id),
        };
        root.children.push(PieSector {
            id,
            label: name.to_string(),
            kind: SectorKind::Individual,
            percent,
            color: Rgb::NEUTRAL,
            expandable: false,
            children: Vec::new(),
            source_iri: iri.map(str::to_string),
        });
    }
    root.expandable = !root.children.is_empty();
    PieModel {
        empty: root.children.is_empty(),
        root,
        focus_tags: Vec::new(),
        revision,
    }
}
