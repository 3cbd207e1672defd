use std::collections::{BTreeMap, BTreeSet};

use fsn_core::elasticity::{region_color, ElasticityParams, Rgb};
use fsn_core::nav::{build_root, colorize, combine_focus, expand, table_to_pie, SectorKind};
use fsn_core::ontology::KnowledgeBase;
use fsn_core::query::{evaluate, parse_query, QueryError, RdfTerm};
use fsn_core::seed::{self, IS_FOLLOWED_BY};
use fsn_core::tag::FormalContext;
use fsn_core::fsn::MorphologicalChange;

fn kb() -> KnowledgeBase {
    seed::news_kb().unwrap()
}

fn individuals(s: &fsn_core::nav::PieSector) -> BTreeSet<String> {
    s.children
        .iter()
        .filter(|c| c.kind == SectorKind::Individual)
        .map(|c| c.label.clone())
        .collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn root_lists_top_level_classes() {
    let model = build_root(&kb());
    let labels: Vec<&str> = model.root.children.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["Ship", "TypologyOfNewsObject", "passenger", "sinking"]);
    let sum: f64 = model.root.children.iter().map(|c| c.percent).sum();
    assert!((sum - 100.0).abs() <= 0.5);
}

#[test]
fn sinking_and_passenger_members() {
    let kb = kb();
    let root = build_root(&kb).root;
    let by_label = |l: &str| root.children.iter().find(|c| c.label == l).unwrap().clone();
    let sinking = expand(&kb, &by_label("sinking"), None).unwrap();
    assert_eq!(individuals(&sinking), set(&["ship", "captain", "rescue"]));
    let passenger = expand(&kb, &by_label("passenger"), None).unwrap();
    assert_eq!(individuals(&passenger), set(&["ship", "plane", "train"]));
    // subclasses come before individuals
    assert_eq!(sinking.children[0].kind, SectorKind::Class);
    assert_eq!(sinking.children[0].label, "SunkPassengerShip");
}

#[test]
fn combined_focus_is_chain_ordered() {
    let kb = kb();
    let tags = ["sinking".to_string(), "passenger".to_string()];
    let model = combine_focus(&kb, &tags, Some(IS_FOLLOWED_BY)).unwrap();
    let order: Vec<&str> = model.root.children.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(order, ["ship", "ferry", "titanic"]);
    assert!(!model.empty);
    // without an order property, labels sort lexicographically
    let plain = combine_focus(&kb, &tags, None).unwrap();
    let order: Vec<&str> = plain.root.children.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(order, ["ferry", "ship", "titanic"]);
}

#[test]
fn single_tag_focus_and_hierarchy() {
    let kb = kb();
    let model = combine_focus(&kb, &["sinking".to_string()], None).unwrap();
    let labels: BTreeSet<String> = model.root.children.iter().map(|c| c.label.clone()).collect();
    assert_eq!(labels, set(&["captain", "ferry", "rescue", "ship", "titanic"]));
    let ship = model.root.children.iter().find(|c| c.label == "ship").unwrap();
    assert!(ship.expandable);
    let expanded = expand(&kb, ship, None).unwrap();
    assert_eq!(individuals(&expanded), set(&["captain"]));
    assert_eq!(kb.father_of("ship", seed::PART_OF).unwrap(), Some("Sinking"));
}

#[test]
fn ship_type_query() {
    let kb = kb();
    let table = evaluate(&parse_query(seed::SHIP_QUERY).unwrap(), &kb).unwrap();
    let got: Vec<&str> = table.rows.iter().map(|r| r[0].as_iri().unwrap()).collect();
    assert_eq!(got, ["Passenger", "ferry", "titanic"]);
    // brute-force scan of the asserted types
    let scan: Vec<String> = kb
        .individuals()
        .values()
        .filter(|i| i.classes.iter().any(|c| kb.superclasses(c).contains("Ship")))
        .map(|i| i.iri.clone())
        .collect();
    assert_eq!(got, scan);
    let model = table_to_pie(&table, kb.revision());
    assert_eq!(model.root.children.len(), 3);
    assert_eq!(model.root.children[0].id, "c:Thing>i:Passenger");
}

#[test]
fn templates_against_fixture() {
    let kb = kb();
    let reg = seed::news_templates();
    let bind = |v: &str| BTreeMap::from([("Typology".to_string(), v.to_string())]);
    let ast = reg.instantiate("news-about", &bind("Sinking"), &kb).unwrap();
    let table = evaluate(&ast, &kb).unwrap();
    assert_eq!(table.rows, vec![vec![RdfTerm::iri("ship")]]);
    assert!(matches!(
        reg.instantiate("news-about", &bind("titanic"), &kb),
        Err(QueryError::RestrictionViolation { .. })
    ));
}

#[test]
fn colorize_matches_recomputation() {
    let kb = kb();
    let params = ElasticityParams::<f64>::default();
    let mut fsn = seed::news_fsn(0.3, params).unwrap();
    // fresh network: every linked tag sector is red, unlinked ones gray
    let model = colorize(build_root(&kb), &fsn, &params);
    for s in &model.root.children {
        let expected = if s.label == "TypologyOfNewsObject" { Rgb::NEUTRAL } else { Rgb::RED };
        assert_eq!(s.color, expected, "{}", s.label);
    }
    // deform one tag and recompute colours independently
    fsn.apply_morphological_change(MorphologicalChange::ContextEdit {
        id: "Ship".into(),
        context: FormalContext::new(
            ["n1", "n2", "n3"],
            ["ship", "vessel", "sea"],
            [("n1".to_string(), "ship".to_string()), ("n2".to_string(), "sea".to_string())],
        )
        .unwrap(),
    })
    .unwrap();
    let model = colorize(build_root(&kb), &fsn, &params);
    for s in &model.root.children {
        let iri = s.source_iri.as_deref().unwrap();
        let strains: Vec<f64> = fsn
            .links()
            .filter(|l| l.a == iri || l.b == iri)
            .map(|l| l.strain)
            .collect();
        let expected = if strains.is_empty() {
            Rgb::NEUTRAL
        } else {
            region_color(strains.iter().sum::<f64>() / strains.len() as f64, &params).unwrap()
        };
        assert_eq!(s.color, expected, "{}", s.label);
    }
    assert!(model.root.children.iter().any(|s| s.color != Rgb::RED && s.color != Rgb::NEUTRAL));
}
