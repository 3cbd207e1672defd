//! Folksodriven Structure Network: tags linked by attribute overlap, with
//! per-link strain measured against the interval distance at link creation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elasticity::{region_of, ElasticityParams, Region};
use crate::scalar::Real;
use crate::tag::{FolksodrivenTag, FormalContext, TimeExposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsnError {
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("tag `{0}` already exists")]
    DuplicateTag(String),
    #[error("resource ordinal {0} is already used by another tag")]
    DuplicateOrdinal(u64),
    #[error("link threshold must lie in (0, 1]")]
    InvalidTheta,
}

/// Jaccard similarity of the attribute sets; 0 when both are empty.
pub fn overlap<T: Real>(a: &FormalContext, b: &FormalContext) -> T {
    let union = a.attributes().union(b.attributes()).count() as u64;
    if union == 0 {
        return T::zero();
    }
    let shared = a.attributes().intersection(b.attributes()).count() as u64;
    T::ratio(shared, union)
}

/// Interval distance `sqrt(|s²|)` between two tags.
pub fn interval_distance<T: Real>(a: &FolksodrivenTag<T>, b: &FolksodrivenTag<T>) -> T {
    a.point().interval_to(b.point()).abs().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsnLink<T> {
    pub a: String,
    pub b: String,
    pub weight: T,
    pub rest_interval: T,
    pub strain: T,
    pub region: Region,
}

pub type LinkKey = (String, String);

fn key(x: &str, y: &str) -> LinkKey {
    if x < y {
        (x.to_string(), y.to_string())
    } else {
        (y.to_string(), x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MorphologicalChange<T> {
    Add(FolksodrivenTag<T>),
    Remove(String),
    Relabel { id: String, label: String },
    ContextEdit { id: String, context: FormalContext },
    ExpositionEdit { id: String, exposition: TimeExposition },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionChange {
    pub a: String,
    pub b: String,
    pub from: Region,
    pub to: Region,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlasticityReport {
    pub created: Vec<LinkKey>,
    pub broken: Vec<LinkKey>,
    pub region_changed: Vec<RegionChange>,
}

impl PlasticityReport {
    pub fn is_empty(&self) -> bool {
        self.created.is_empty() && self.broken.is_empty() && self.region_changed.is_empty()
    }

    fn normalize(&mut self) {
        self.created.sort();
        self.broken.sort();
        self.region_changed
            .sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    pub member_tags: BTreeSet<String>,
    pub subject_key: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainSummary<T> {
    pub elastic: usize,
    #[serde(rename = "yield")]
    pub yielded: usize,
    pub necking: usize,
    pub mean_strain: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FsnGraph<T> {
    tags: BTreeMap<String, FolksodrivenTag<T>>,
    links: BTreeMap<LinkKey, FsnLink<T>>,
    theta: T,
    params: ElasticityParams<T>,
    strain_floor: T,
}

impl<T: Real> FsnGraph<T> {
    pub const DEFAULT_THETA: (u64, u64) = (3, 10);

    pub fn new(theta: T, params: ElasticityParams<T>) -> Result<Self, FsnError> {
        if !(theta > T::zero() && theta <= T::one()) {
            return Err(FsnError::InvalidTheta);
        }
        Ok(Self {
            tags: BTreeMap::new(),
            links: BTreeMap::new(),
            theta,
            params,
            strain_floor: T::ratio(1, 1_000_000),
        })
    }

    pub fn with_defaults() -> Self {
        let (n, d) = Self::DEFAULT_THETA;
        Self::new(T::ratio(n, d), ElasticityParams::default()).expect("default theta is valid")
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn params(&self) -> &ElasticityParams<T> {
        &self.params
    }

    pub fn tags(&self) -> &BTreeMap<String, FolksodrivenTag<T>> {
        &self.tags
    }

    pub fn tag(&self, id: &str) -> Option<&FolksodrivenTag<T>> {
        self.tags.get(id)
    }

    pub fn links(&self) -> impl Iterator<Item = &FsnLink<T>> {
        self.links.values()
    }

    pub fn link(&self, a: &str, b: &str) -> Option<&FsnLink<T>> {
        self.links.get(&key(a, b))
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn incident_links<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a FsnLink<T>> + 'a {
        self.links.values().filter(move |l| l.a == id || l.b == id)
    }

    /// Mean strain over the links touching `id`, `None` when it has none.
    pub fn mean_incident_strain(&self, id: &str) -> Option<T> {
        let mut sum = T::zero();
        let mut n = 0u64;
        for link in self.incident_links(id) {
            sum = sum + link.strain;
            n += 1;
        }
        (n > 0).then(|| sum / T::from_count(n))
    }

    fn strain_of(&self, distance: T, rest: T) -> T {
        (distance - rest).abs() / rest.max(self.strain_floor)
    }

    fn measure(&self, a: &str, b: &str, rest: Option<T>) -> FsnLink<T> {
        let (a, b) = key(a, b);
        let ta = &self.tags[&a];
        let tb = &self.tags[&b];
        let weight = overlap(ta.context(), tb.context());
        let distance = interval_distance(ta, tb);
        let rest = rest.unwrap_or(distance);
        let strain = self.strain_of(distance, rest);
        let region = region_of(strain, &self.params).expect("strain is non-negative");
        FsnLink {
            a,
            b,
            weight,
            rest_interval: rest,
            strain,
            region,
        }
    }

    fn check_new_tag(&self, tag: &FolksodrivenTag<T>) -> Result<(), FsnError> {
        if self.tags.contains_key(tag.id()) {
            return Err(FsnError::DuplicateTag(tag.id().to_string()));
        }
        let ordinal = tag.resource().ordinal();
        if self.tags.values().any(|t| t.resource().ordinal() == ordinal) {
            return Err(FsnError::DuplicateOrdinal(ordinal));
        }
        Ok(())
    }

    /// Inserts a tag without touching the link set.
    pub fn insert_tag(&mut self, tag: FolksodrivenTag<T>) -> Result<(), FsnError> {
        self.check_new_tag(&tag)?;
        self.tags.insert(tag.id().to_string(), tag);
        Ok(())
    }

    /// Recomputes the link set over every pair of tags. Surviving links keep
    /// their rest interval; new links start unstrained.
    pub fn rebuild_links(&mut self) {
        let ids: Vec<String> = self.tags.keys().cloned().collect();
        let mut links = BTreeMap::new();
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                let weight: T = overlap(self.tags[a].context(), self.tags[b].context());
                if weight >= self.theta {
                    let k = key(a, b);
                    let rest = self.links.get(&k).map(|l| l.rest_interval);
                    links.insert(k, self.measure(a, b, rest));
                }
            }
        }
        self.links = links;
    }

    /// Re-evaluates every pair that involves `id`, recording the effect.
    fn refresh_tag(&mut self, id: &str, report: &mut PlasticityReport) {
        let others: Vec<String> = self.tags.keys().filter(|k| *k != id).cloned().collect();
        for other in others {
            let k = key(id, &other);
            let weight: T = overlap(self.tags[id].context(), self.tags[&other].context());
            let existing = self.links.get(&k).map(|l| (l.rest_interval, l.region));
            if weight >= self.theta {
                let link = self.measure(id, &other, existing.map(|(rest, _)| rest));
                match existing {
                    None => report.created.push(k.clone()),
                    Some((_, old)) if old != link.region => report.region_changed.push(RegionChange {
                        a: k.0.clone(),
                        b: k.1.clone(),
                        from: old,
                        to: link.region,
                    }),
                    Some(_) => {}
                }
                self.links.insert(k, link);
            } else if existing.is_some() {
                self.links.remove(&k);
                report.broken.push(k);
            }
        }
    }

    /// Applies one change, touching only the links incident to the affected
    /// tag. On error the graph is left unchanged.
    pub fn apply_morphological_change(
        &mut self,
        change: MorphologicalChange<T>,
    ) -> Result<PlasticityReport, FsnError> {
        let mut report = PlasticityReport::default();
        match change {
            MorphologicalChange::Add(tag) => {
                self.check_new_tag(&tag)?;
                let id = tag.id().to_string();
                self.tags.insert(id.clone(), tag);
                self.refresh_tag(&id, &mut report);
            }
            MorphologicalChange::Remove(id) => {
                if self.tags.remove(&id).is_none() {
                    return Err(FsnError::UnknownTag(id));
                }
                let broken: Vec<LinkKey> = self
                    .links
                    .keys()
                    .filter(|(a, b)| *a == id || *b == id)
                    .cloned()
                    .collect();
                for k in &broken {
                    self.links.remove(k);
                }
                report.broken = broken;
            }
            MorphologicalChange::Relabel { id, label } => {
                let tag = self.tags.get_mut(&id).ok_or(FsnError::UnknownTag(id))?;
                tag.set_label(label);
            }
            MorphologicalChange::ContextEdit { id, context } => {
                let tag = self.tags.get_mut(&id).ok_or_else(|| FsnError::UnknownTag(id.clone()))?;
                tag.set_context(context);
                self.refresh_tag(&id, &mut report);
            }
            MorphologicalChange::ExpositionEdit { id, exposition } => {
                let tag = self.tags.get_mut(&id).ok_or_else(|| FsnError::UnknownTag(id.clone()))?;
                tag.set_exposition(exposition);
                self.refresh_tag(&id, &mut report);
            }
        }
        report.normalize();
        Ok(report)
    }

    /// Connected components of the link graph.
    pub fn unit_cells(&self) -> Vec<UnitCell> {
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, b) in self.links.keys() {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut cells = Vec::new();
        for &start in adjacency.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut members = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(node) = stack.pop() {
                members.insert(node.to_string());
                for &next in &adjacency[node] {
                    if seen.insert(next) {
                        stack.push(next);
                    }
                }
            }
            let mut key_iter = members.iter().map(|m| self.tags[m].context().attributes());
            let first = key_iter.next().cloned().unwrap_or_default();
            let subject_key = key_iter.fold(first, |acc, attrs| acc.intersection(attrs).cloned().collect());
            cells.push(UnitCell {
                member_tags: members,
                subject_key,
            });
        }
        cells
    }

    pub fn network_strain_summary(&self) -> StrainSummary<T> {
        let mut summary = StrainSummary {
            elastic: 0,
            yielded: 0,
            necking: 0,
            mean_strain: T::zero(),
        };
        let mut total = T::zero();
        for link in self.links.values() {
            match link.region {
                Region::Elastic => summary.elastic += 1,
                Region::Yield => summary.yielded += 1,
                Region::Necking => summary.necking += 1,
            }
            total = total + link.strain;
        }
        if !self.links.is_empty() {
            summary.mean_strain = total / T::from_count(self.links.len() as u64);
        }
        summary
    }
}

impl<T: Real + std::fmt::Display> FsnGraph<T> {
    /// Tab-separated edge list: `a, b, weight, strain, region`, one link per
    /// LF-terminated line, in canonical link order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for link in self.links.values() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                link.a, link.b, link.weight, link.strain, link.region
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tag::Resource;

    fn ctx(attrs: &[&str]) -> FormalContext {
        FormalContext::full(["doc"], attrs.iter().copied())
    }

    fn tag(id: &str, ordinal: u64, attrs: &[&str]) -> FolksodrivenTag<f64> {
        FolksodrivenTag::new(
            id,
            id,
            ctx(attrs),
            TimeExposition::new(1, 4).unwrap(),
            Resource::new(format!("http://example.org/{id}"), ordinal).unwrap(),
        )
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap::<f64>(&ctx(&["x", "y"]), &ctx(&["y", "x"])), 1.0);
        assert_eq!(overlap::<f64>(&ctx(&["x"]), &ctx(&["y"])), 0.0);
        assert_eq!(overlap::<f64>(&ctx(&["x", "y", "z"]), &ctx(&["y", "z", "w"])), 0.5);
        assert_eq!(overlap::<f64>(&ctx(&[]), &ctx(&[])), 0.0);
    }

    #[test]
    fn theta_one_with_distinct_contexts_has_no_links() {
        let mut g = FsnGraph::new(1.0, ElasticityParams::default()).unwrap();
        g.insert_tag(tag("a", 0, &["x", "y"])).unwrap();
        g.insert_tag(tag("b", 1, &["y", "z"])).unwrap();
        g.insert_tag(tag("c", 2, &["z"])).unwrap();
        g.rebuild_links();
        assert_eq!(g.link_count(), 0);
    }

    #[test]
    fn rebuild_forms_links_at_threshold() {
        let mut g = FsnGraph::new(0.4, ElasticityParams::default()).unwrap();
        g.insert_tag(tag("a", 0, &["x", "y", "z"])).unwrap();
        g.insert_tag(tag("b", 1, &["y", "z", "w"])).unwrap();
        g.rebuild_links();
        assert_eq!(g.link_count(), 1);
        let link = g.link("b", "a").unwrap();
        assert_eq!((link.a.as_str(), link.b.as_str()), ("a", "b"));
        assert_eq!(link.strain, 0.0);
        assert_eq!(link.region, Region::Elastic);
    }

    #[test]
    fn invalid_theta() {
        assert_eq!(
            FsnGraph::<f64>::new(0.0, ElasticityParams::default()).unwrap_err(),
            FsnError::InvalidTheta
        );
        assert!(FsnGraph::<f64>::new(1.5, ElasticityParams::default()).is_err());
    }

    #[test]
    fn adding_a_tag_keeps_rest_intervals() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("a", 0, &["x", "y"])).unwrap();
        g.insert_tag(tag("b", 5, &["x", "y"])).unwrap();
        g.rebuild_links();
        let before = g.link("a", "b").unwrap().rest_interval;
        g.apply_morphological_change(MorphologicalChange::Add(tag("c", 9, &["x"])))
            .unwrap();
        assert_eq!(g.link("a", "b").unwrap().rest_interval, before);
    }

    #[test]
    fn relabel_to_same_label_is_empty() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("a", 0, &["x"])).unwrap();
        g.insert_tag(tag("b", 1, &["x"])).unwrap();
        g.rebuild_links();
        let report = g
            .apply_morphological_change(MorphologicalChange::Relabel {
                id: "a".into(),
                label: "a".into(),
            })
            .unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn removing_a_tag_breaks_its_links() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("hub", 0, &["x"])).unwrap();
        for (i, id) in ["p", "q", "r"].iter().enumerate() {
            g.insert_tag(tag(id, i as u64 + 1, &["x"])).unwrap();
        }
        g.rebuild_links();
        let k = g.incident_links("hub").count();
        assert_eq!(k, 3);
        let report = g
            .apply_morphological_change(MorphologicalChange::Remove("hub".into()))
            .unwrap();
        assert_eq!(report.broken.len(), k);
        assert!(report.created.is_empty());
    }

    #[test]
    fn unknown_tag_and_duplicates() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("a", 0, &["x"])).unwrap();
        assert_eq!(
            g.apply_morphological_change(MorphologicalChange::Remove("zz".into())),
            Err(FsnError::UnknownTag("zz".into()))
        );
        assert_eq!(
            g.insert_tag(tag("a", 1, &[])),
            Err(FsnError::DuplicateTag("a".into()))
        );
        assert_eq!(g.insert_tag(tag("b", 0, &[])), Err(FsnError::DuplicateOrdinal(0)));
    }

    #[test]
    fn context_edit_strains_links() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("a", 0, &["x", "y"])).unwrap();
        g.insert_tag(tag("b", 3, &["x", "y"])).unwrap();
        g.rebuild_links();
        // halve the density of `a`: one object without incidence
        let sparse = FormalContext::new(
            ["d1", "d2"],
            ["x", "y"],
            [("d1".to_string(), "x".to_string()), ("d1".to_string(), "y".to_string())],
        )
        .unwrap();
        g.apply_morphological_change(MorphologicalChange::ContextEdit {
            id: "a".into(),
            context: sparse,
        })
        .unwrap();
        let link = g.link("a", "b").unwrap();
        assert!(link.strain > 0.0);
    }

    #[test]
    fn unit_cells_and_summary() {
        let mut g = FsnGraph::<f64>::with_defaults();
        assert!(g.unit_cells().is_empty());
        let s = g.network_strain_summary();
        assert_eq!((s.elastic, s.yielded, s.necking, s.mean_strain), (0, 0, 0, 0.0));

        g.insert_tag(tag("a", 0, &["x", "y"])).unwrap();
        g.insert_tag(tag("b", 1, &["x", "z"])).unwrap();
        g.insert_tag(tag("c", 2, &["x", "y", "z"])).unwrap();
        g.insert_tag(tag("lone", 3, &["q"])).unwrap();
        g.rebuild_links();
        let cells = g.unit_cells();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].member_tags.len(), 3);
        assert_eq!(cells[0].subject_key, BTreeSet::from(["x".to_string()]));
        let s = g.network_strain_summary();
        assert_eq!(s.elastic, 3);
        assert_eq!(s.mean_strain, 0.0);
    }

    #[test]
    fn edge_list_format() {
        let mut g = FsnGraph::with_defaults();
        g.insert_tag(tag("a", 0, &["x"])).unwrap();
        g.insert_tag(tag("b", 1, &["x"])).unwrap();
        g.rebuild_links();
        assert_eq!(g.to_edge_list(), "a\tb\t1\t0\tElastic\n");
    }
}
