//! Brute-force constraint checker: apply the edit naively, then revalidate
//! the whole knowledge base from scratch.

use std::collections::{BTreeMap, BTreeSet};

use fsn_core::ontology::{
    Edit, KnowledgeBase, PropertyDef, PropertyFamily, PropertyKind, Range, RemoveMode, Value, THING,
};

type Fact = (String, String, Value);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub classes: BTreeMap<String, (String, Vec<String>)>,
    pub properties: BTreeMap<String, PropertyDef>,
    pub individuals: BTreeMap<String, (Vec<String>, BTreeSet<String>)>,
    pub facts: BTreeSet<Fact>,
}

impl From<&KnowledgeBase> for State {
    fn from(kb: &KnowledgeBase) -> Self {
        Self {
            classes: kb
                .classes()
                .values()
                .map(|c| (c.iri.clone(), (c.label.clone(), c.parents.clone())))
                .collect(),
            properties: kb.properties().clone(),
            individuals: kb
                .individuals()
                .values()
                .map(|i| (i.iri.clone(), (i.labels.clone(), i.classes.clone())))
                .collect(),
            facts: kb
                .assertions()
                .iter()
                .map(|a| (a.subject.clone(), a.property.clone(), a.object.clone()))
                .collect(),
        }
    }
}

fn iri_ok(iri: &str) -> bool {
    !iri.is_empty()
        && iri
            .chars()
            .all(|c| !c.is_whitespace() && !c.is_control() && !"<>\"{}|^`\\".contains(c))
}

fn family(p: &PropertyDef) -> PropertyFamily {
    p.family.unwrap_or(PropertyFamily::Plain)
}

impl State {
    fn in_use(&self, iri: &str) -> bool {
        self.classes.contains_key(iri) || self.properties.contains_key(iri) || self.individuals.contains_key(iri)
    }

    fn ancestors(&self, class: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![class.to_string()];
        while let Some(c) = frontier.pop() {
            if let Some((_, parents)) = self.classes.get(&c) {
                for p in parents {
                    if seen.insert(p.clone()) {
                        frontier.push(p.clone());
                    }
                }
            }
        }
        seen
    }

    fn is_a(&self, individual: &str, class: &str) -> bool {
        self.individuals.get(individual).is_some_and(|(_, classes)| {
            classes
                .iter()
                .any(|c| c == class || self.ancestors(c).contains(class))
        })
    }

    fn canonical(&self, s: &str, p: &str, o: &Value) -> Option<Fact> {
        let def = self.properties.get(p)?;
        match &def.inverse_of {
            Some(base) => {
                let Value::Individual(o) = o else { return None };
                Some((o.clone(), base.clone(), Value::Individual(s.to_string())))
            }
            None => Some((s.to_string(), p.to_string(), o.clone())),
        }
    }

    fn edges(&self, p: &str) -> Vec<(String, String)> {
        self.facts
            .iter()
            .filter(|f| f.1 == p)
            .filter_map(|f| match &f.2 {
                Value::Individual(o) => Some((f.0.clone(), o.clone())),
                Value::Literal(_) => None,
            })
            .collect()
    }

    /// Applies the edit without any checks beyond what is needed to apply
    /// it at all. `false` when it cannot be applied.
    pub fn apply_naive(&mut self, edit: &Edit) -> bool {
        match edit {
            Edit::DefineClass(def) => {
                if self.in_use(&def.iri) {
                    return false;
                }
                let mut parents: Vec<String> = Vec::new();
                for p in &def.parents {
                    if !parents.contains(p) {
                        parents.push(p.clone());
                    }
                }
                if parents.is_empty() {
                    parents.push(THING.into());
                }
                self.classes.insert(def.iri.clone(), (def.label.clone(), parents));
            }
            Edit::RedefineClass(def) => {
                if def.iri == THING || !self.classes.contains_key(&def.iri) {
                    return false;
                }
                self.classes.remove(&def.iri);
                return self.apply_naive(&Edit::DefineClass(def.clone()));
            }
            Edit::DefineProperty(def) => {
                if self.in_use(&def.iri) {
                    return false;
                }
                self.properties.insert(def.iri.clone(), def.clone());
            }
            Edit::AssertIndividual(ind) => {
                if self.in_use(&ind.iri) {
                    return false;
                }
                let mut classes = ind.classes.clone();
                if classes.is_empty() {
                    classes.insert(THING.into());
                }
                self.individuals.insert(ind.iri.clone(), (ind.labels.clone(), classes));
            }
            Edit::SetPropertyValue { subject, property, object } => {
                if !self.individuals.contains_key(subject) {
                    return false;
                }
                let Some(fact) = self.canonical(subject, property, object) else {
                    return false;
                };
                if !self.facts.insert(fact) {
                    return false;
                }
            }
            Edit::RemovePropertyValue { subject, property, object } => {
                let Some(fact) = self.canonical(subject, property, object) else {
                    return false;
                };
                if !self.facts.remove(&fact) {
                    return false;
                }
            }
            Edit::RemoveIndividual { iri, mode } => {
                if !self.individuals.contains_key(iri) {
                    return false;
                }
                let mut doomed = BTreeSet::from([iri.clone()]);
                let mut added = Vec::new();
                let hierarchical: Vec<String> = self
                    .properties
                    .values()
                    .filter(|p| family(p) == PropertyFamily::Hierarchical)
                    .map(|p| p.iri.clone())
                    .collect();
                match mode {
                    RemoveMode::Cascade => loop {
                        let before = doomed.len();
                        for p in &hierarchical {
                            for (child, father) in self.edges(p) {
                                if doomed.contains(&father) {
                                    doomed.insert(child);
                                }
                            }
                        }
                        if doomed.len() == before {
                            break;
                        }
                    },
                    RemoveMode::Splice => {
                        for def in self.properties.values() {
                            let edges = self.edges(&def.iri);
                            let out: Vec<&String> = edges.iter().filter(|e| &e.0 == iri).map(|e| &e.1).collect();
                            let inc: Vec<&String> = edges.iter().filter(|e| &e.1 == iri).map(|e| &e.0).collect();
                            let joins = match family(def) {
                                PropertyFamily::Hierarchical | PropertyFamily::TotalOrder => !out.is_empty(),
                                PropertyFamily::Plain => false,
                            };
                            if joins {
                                for from in &inc {
                                    added.push(((*from).clone(), def.iri.clone(), Value::Individual(out[0].clone())));
                                }
                            }
                        }
                    }
                }
                self.facts.retain(|f| {
                    !doomed.contains(&f.0) && !matches!(&f.2, Value::Individual(o) if doomed.contains(o))
                });
                self.facts.extend(added);
                for d in &doomed {
                    self.individuals.remove(d);
                }
            }
        }
        true
    }

    fn path_exists(edges: &[(String, String)], from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(n) = stack.pop() {
            for (a, b) in edges {
                if *a == n {
                    if b == to {
                        return true;
                    }
                    if seen.insert(b.clone()) {
                        stack.push(b.clone());
                    }
                }
            }
        }
        false
    }

    /// Every invariant of the knowledge base, checked from scratch.
    pub fn is_valid(&self) -> bool {
        let all_iris: Vec<&String> = self
            .classes
            .keys()
            .chain(self.properties.keys())
            .chain(self.individuals.keys())
            .collect();
        let distinct: BTreeSet<&String> = all_iris.iter().copied().collect();
        if distinct.len() != all_iris.len() || !all_iris.iter().all(|i| iri_ok(i)) {
            return false;
        }
        // classes
        match self.classes.get(THING) {
            Some((_, parents)) if parents.is_empty() => {}
            _ => return false,
        }
        for (iri, (_, parents)) in &self.classes {
            if iri != THING && parents.is_empty() {
                return false;
            }
            if parents.iter().any(|p| !self.classes.contains_key(p)) {
                return false;
            }
            if self.ancestors(iri).contains(iri) {
                return false;
            }
        }
        // properties
        for def in self.properties.values() {
            if def.max_card.is_some_and(|m| m < def.min_card) {
                return false;
            }
            match (&def.kind, &def.range) {
                (PropertyKind::ObjectProperty, Range::Class(c)) if self.classes.contains_key(c) => {}
                (PropertyKind::DatatypeProperty, Range::Primitive(_)) => {}
                _ => return false,
            }
            if family(def) != PropertyFamily::Plain && def.kind != PropertyKind::ObjectProperty {
                return false;
            }
            if def.domain.as_ref().is_some_and(|d| !self.classes.contains_key(d)) {
                return false;
            }
            if let Some(base) = &def.inverse_of {
                let Some(b) = self.properties.get(base) else { return false };
                if def.kind != PropertyKind::ObjectProperty
                    || b.kind != PropertyKind::ObjectProperty
                    || b.inverse_of.is_some()
                    || family(def) != PropertyFamily::Plain
                {
                    return false;
                }
            }
        }
        // individuals
        for (labels, classes) in self.individuals.values() {
            if labels.is_empty() || classes.is_empty() || classes.iter().any(|c| !self.classes.contains_key(c)) {
                return false;
            }
        }
        // facts
        for (s, p, o) in &self.facts {
            let Some(def) = self.properties.get(p) else { return false };
            if def.inverse_of.is_some() || !self.individuals.contains_key(s) {
                return false;
            }
            match (&def.range, o) {
                (Range::Class(c), Value::Individual(o)) => {
                    if !self.individuals.contains_key(o) || !self.is_a(o, c) {
                        return false;
                    }
                }
                (Range::Primitive(t), Value::Literal(l)) => {
                    if l.datatype != *t || !t.accepts(&l.value) {
                        return false;
                    }
                }
                _ => return false,
            }
            if def.domain.as_ref().is_some_and(|d| !self.is_a(s, d)) {
                return false;
            }
        }
        for def in self.properties.values() {
            let mut per_subject: BTreeMap<&str, u32> = BTreeMap::new();
            for f in self.facts.iter().filter(|f| f.1 == def.iri) {
                *per_subject.entry(&f.0).or_default() += 1;
            }
            if let Some(max) = def.max_card {
                if per_subject.values().any(|&n| n > max) {
                    return false;
                }
            }
            let edges = self.edges(&def.iri);
            let mut indeg: BTreeMap<&str, u32> = BTreeMap::new();
            for (_, b) in &edges {
                *indeg.entry(b).or_default() += 1;
            }
            let acyclic = edges.iter().all(|(a, b)| a != b && !Self::path_exists(&edges, b, a));
            match family(def) {
                PropertyFamily::Hierarchical => {
                    if per_subject.values().any(|&n| n > 1) || !acyclic {
                        return false;
                    }
                }
                PropertyFamily::TotalOrder => {
                    if per_subject.values().any(|&n| n > 1) || indeg.values().any(|&n| n > 1) || !acyclic {
                        return false;
                    }
                }
                PropertyFamily::Plain => {}
            }
        }
        true
    }
}

/// The oracle's verdict on `edit` and the state it would produce.
pub fn decide(kb: &KnowledgeBase, edit: &Edit) -> Option<State> {
    let mut state = State::from(kb);
    (state.apply_naive(edit) && state.is_valid()).then_some(state)
}
