//! The news fixture: a small KB about sinkings and passenger transport, a
//! matching set of FD tags and the predefined queries over it.

use crate::elasticity::ElasticityParams;
use crate::fsn::{FsnError, FsnGraph};
use crate::ontology::{
    ClassDef, Edit, Individual, KnowledgeBase, OntologyError, PrimitiveType, PropertyDef, PropertyFamily, Value,
    THING,
};
use crate::query::{parse_skeleton, Prefixes, QueryTemplate, TemplateParam, TemplateRegistry};
use crate::scalar::Real;
use crate::tag::{FolksodrivenTag, FormalContext, Resource, TimeExposition};

pub const PART_OF: &str = "PartOf";
pub const IS_COMPOSED_OF: &str = "isComposedOf";
pub const IS_FOLLOWED_BY: &str = "isFollowedBy";
pub const BUILT_OF: &str = "builtOf";
pub const HEADLINE: &str = "headline";

/// Selects every individual typed `Ship`.
pub const SHIP_QUERY: &str = "SELECT ?x WHERE { ?x a :Ship }";

fn class(iri: &str, parents: &[&str]) -> Edit {
    Edit::DefineClass(ClassDef::new(iri, iri, parents.iter().copied()))
}

fn individual(iri: &str, classes: &[&str]) -> Edit {
    Edit::AssertIndividual(Individual::new(iri, [iri], classes.iter().copied()))
}

fn link(subject: &str, property: &str, object: &str) -> Edit {
    Edit::SetPropertyValue {
        subject: subject.into(),
        property: property.into(),
        object: Value::individual(object),
    }
}

/// The fixture as a list of edits, so it can be journaled like any other
/// change.
pub fn news_edits() -> Vec<Edit> {
    vec![
        class("sinking", &[THING]),
        class("passenger", &[THING]),
        class("TypologyOfNewsObject", &[THING]),
        class("Ship", &[THING]),
        class("SunkPassengerShip", &["sinking", "passenger", "Ship"]),
        Edit::DefineProperty(PropertyDef::object(PART_OF, THING).with_family(PropertyFamily::Hierarchical)),
        Edit::DefineProperty(PropertyDef::object(IS_COMPOSED_OF, THING).inverse_of(PART_OF)),
        Edit::DefineProperty(PropertyDef::object(IS_FOLLOWED_BY, THING).with_family(PropertyFamily::TotalOrder)),
        Edit::DefineProperty(PropertyDef::object(BUILT_OF, "Ship").with_domain("TypologyOfNewsObject")),
        Edit::DefineProperty(PropertyDef::datatype(HEADLINE, PrimitiveType::String).with_cardinality(0, Some(1))),
        individual("ship", &["sinking", "passenger"]),
        individual("captain", &["sinking"]),
        individual("rescue", &["sinking"]),
        individual("plane", &["passenger"]),
        individual("train", &["passenger"]),
        individual("ferry", &["SunkPassengerShip"]),
        individual("titanic", &["SunkPassengerShip"]),
        individual("Sinking", &["TypologyOfNewsObject"]),
        Edit::AssertIndividual(Individual::new("Passenger", ["Passenger", "passenger ship"], ["Ship"])),
        link("ship", PART_OF, "Sinking"),
        link("captain", PART_OF, "ship"),
        link("Sinking", BUILT_OF, "Passenger"),
        link("ship", IS_FOLLOWED_BY, "ferry"),
        link("ferry", IS_FOLLOWED_BY, "titanic"),
    ]
}

pub fn news_kb() -> Result<KnowledgeBase, OntologyError> {
    let mut kb = KnowledgeBase::new();
    for edit in news_edits() {
        kb.apply(&edit)?;
    }
    Ok(kb)
}

fn tag<T: Real>(id: &str, attributes: &[&str], clicks: u64, impressions: u64, ordinal: u64) -> FolksodrivenTag<T> {
    let objects = [format!("news/{id}/1"), format!("news/{id}/2")];
    let context = FormalContext::full(objects, attributes.iter().copied());
    FolksodrivenTag::new(
        id,
        id,
        context,
        TimeExposition::new(clicks, impressions).expect("fixture exposition"),
        Resource::new(format!("http://example.org/news/{id}"), ordinal).expect("fixture uri"),
    )
}

/// One FD tag per top-level class. `TypologyOfNewsObject` shares no
/// attributes with the others and stays unlinked.
pub fn news_tags<T: Real>() -> Vec<FolksodrivenTag<T>> {
    vec![
        tag("sinking", &["sea", "disaster", "ship"], 30, 100, 1),
        tag("passenger", &["ship", "travel", "sea"], 45, 150, 2),
        tag("Ship", &["ship", "vessel", "sea"], 12, 80, 3),
        tag("TypologyOfNewsObject", &["news", "category"], 5, 50, 4),
    ]
}

pub fn news_fsn<T: Real>(theta: T, params: ElasticityParams<T>) -> Result<FsnGraph<T>, FsnError> {
    let mut fsn = FsnGraph::new(theta, params)?;
    for t in news_tags() {
        fsn.insert_tag(t)?;
    }
    fsn.rebuild_links();
    Ok(fsn)
}

pub fn news_templates() -> TemplateRegistry {
    let prefixes = Prefixes::default();
    let mut reg = TemplateRegistry::new();
    let templates = [
        (
            "news-about",
            "news about {Typology}",
            "SELECT ?x WHERE { ?x :PartOf $Typology }",
            TemplateParam::instance("Typology", "TypologyOfNewsObject"),
        ),
        (
            "built-of",
            "typologies built of {Vessel}",
            "SELECT ?t WHERE { ?t :builtOf $Vessel }",
            TemplateParam::instance("Vessel", "Ship"),
        ),
        (
            "labelled",
            "individuals labelled {Label}",
            "SELECT ?x WHERE { ?x rdfs:label ?l FILTER(?l = $Label) }",
            TemplateParam::literal("Label", PrimitiveType::String),
        ),
    ];
    for (id, description, skeleton, param) in templates {
        reg.register(QueryTemplate {
            id: id.into(),
            description: description.into(),
            skeleton: parse_skeleton(skeleton, &prefixes).expect("fixture skeleton"),
            params: vec![param],
        })
        .expect("fixture template");
    }
    reg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_loads() {
        let kb = news_kb().unwrap();
        assert_eq!(kb.revision(), news_edits().len() as u64);
        assert_eq!(news_templates().list().count(), 3);
        let fsn = news_fsn::<f64>(0.3, ElasticityParams::default()).unwrap();
        assert_eq!(fsn.link_count(), 3);
        assert!(fsn.mean_incident_strain("TypologyOfNewsObject").is_none());
    }
}
