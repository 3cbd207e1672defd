//! FSN that recomputes every pair from scratch after each event.

use std::collections::{BTreeMap, BTreeSet};

use fsn_core::elasticity::Region;
use fsn_core::fsn::MorphologicalChange;
use fsn_core::tag::FolksodrivenTag;

const STRAIN_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
struct RawTag {
    attributes: BTreeSet<String>,
    incidence: u64,
    objects: u64,
    clicks: u64,
    impressions: u64,
    ordinal: u64,
}

impl RawTag {
    fn of(tag: &FolksodrivenTag<f64>) -> Self {
        let ctx = tag.context();
        Self {
            attributes: ctx.attributes().clone(),
            incidence: ctx.incidence().len() as u64,
            objects: ctx.objects().len() as u64,
            clicks: tag.exposition().clicks(),
            impressions: tag.exposition().impressions(),
            ordinal: tag.resource().ordinal(),
        }
    }

    fn coords(&self) -> [f64; 3] {
        let cells = self.objects * self.attributes.len() as u64;
        let c = if cells == 0 { 0.0 } else { self.incidence as f64 / cells as f64 };
        let r = self.ordinal as f64 / (self.ordinal + 1) as f64;
        let e = if self.impressions == 0 {
            0.0
        } else {
            self.clicks as f64 / self.impressions as f64
        };
        [c, r, e]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub weight: f64,
    pub rest: f64,
    pub strain: f64,
    pub region: Region,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub created: Vec<(String, String)>,
    pub broken: Vec<(String, String)>,
    pub region_changed: Vec<(String, String, Region, Region)>,
}

#[derive(Debug, Clone)]
pub struct RebuildOracle {
    theta: f64,
    yield_strain: f64,
    necking_strain: f64,
    tags: BTreeMap<String, RawTag>,
    links: BTreeMap<(String, String), Link>,
}

impl RebuildOracle {
    pub fn new(theta: f64, yield_strain: f64, necking_strain: f64) -> Self {
        Self {
            theta,
            yield_strain,
            necking_strain,
            tags: BTreeMap::new(),
            links: BTreeMap::new(),
        }
    }

    pub fn links(&self) -> &BTreeMap<(String, String), Link> {
        &self.links
    }

    fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
        let union = a.union(b).count();
        if union == 0 {
            return 0.0;
        }
        a.intersection(b).count() as f64 / union as f64
    }

    fn distance(a: &RawTag, b: &RawTag) -> f64 {
        let (x, y) = (a.coords(), b.coords());
        let (dc, dr, de) = (x[0] - y[0], x[1] - y[1], x[2] - y[2]);
        (dc * dc + dr * dr - de * de).abs().sqrt()
    }

    fn region(&self, strain: f64) -> Region {
        if strain >= self.necking_strain {
            Region::Necking
        } else if strain >= self.yield_strain {
            Region::Yield
        } else {
            Region::Elastic
        }
    }

    fn rebuild(&mut self) -> Report {
        let ids: Vec<&String> = self.tags.keys().collect();
        let mut next = BTreeMap::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let (a, b) = (&self.tags[ids[i]], &self.tags[ids[j]]);
                let weight = Self::jaccard(&a.attributes, &b.attributes);
                if weight < self.theta {
                    continue;
                }
                let key = (ids[i].clone(), ids[j].clone());
                let d = Self::distance(a, b);
                let rest = self.links.get(&key).map_or(d, |l| l.rest);
                let strain = (d - rest).abs() / rest.max(STRAIN_FLOOR);
                let region = self.region(strain);
                next.insert(key, Link { weight, rest, strain, region });
            }
        }
        let mut report = Report::default();
        for (k, l) in &next {
            match self.links.get(k) {
                None => report.created.push(k.clone()),
                Some(old) if old.region != l.region => {
                    report.region_changed.push((k.0.clone(), k.1.clone(), old.region, l.region))
                }
                Some(_) => {}
            }
        }
        for k in self.links.keys() {
            if !next.contains_key(k) {
                report.broken.push(k.clone());
            }
        }
        self.links = next;
        report
    }

    /// Applies `change` and rebuilds. `None` when the change is invalid, in
    /// which case nothing changes.
    pub fn apply(&mut self, change: &MorphologicalChange<f64>) -> Option<Report> {
        match change {
            MorphologicalChange::Add(tag) => {
                let raw = RawTag::of(tag);
                if self.tags.contains_key(tag.id()) || self.tags.values().any(|t| t.ordinal == raw.ordinal) {
                    return None;
                }
                self.tags.insert(tag.id().to_string(), raw);
            }
            MorphologicalChange::Remove(id) => {
                self.tags.remove(id)?;
            }
            MorphologicalChange::Relabel { id, .. } => {
                self.tags.get(id)?;
            }
            MorphologicalChange::ContextEdit { id, context } => {
                let t = self.tags.get_mut(id)?;
                t.attributes = context.attributes().clone();
                t.incidence = context.incidence().len() as u64;
                t.objects = context.objects().len() as u64;
            }
            MorphologicalChange::ExpositionEdit { id, exposition } => {
                let t = self.tags.get_mut(id)?;
                t.clicks = exposition.clicks();
                t.impressions = exposition.impressions();
            }
        }
        Some(self.rebuild())
    }
}
