mod common;

#[test]
fn replay_at_every_prefix() {
    // 26 clean cuts plus 25 torn ones
    assert_eq!(common::check_replay_every_prefix().unwrap(), 51);
}

#[test]
fn export_matches_golden_bytes() {
    common::check_golden().unwrap();
}

#[test]
fn document_round_trips() {
    assert_eq!(common::check_document_round_trips(17, 300).unwrap(), 300);
}

#[test]
fn golden_reimports_to_the_same_slices() {
    let doc = fsn_service::import_pie_document(common::GOLDEN_SHIP_QUERY).unwrap();
    let got: Vec<(&str, f64, Option<&str>)> =
        doc.slices.iter().map(|s| (s.name.as_str(), s.percent, s.iri.as_deref())).collect();
    assert_eq!(
        got,
        [
            ("Passenger", 33.34, Some("Passenger")),
            ("ferry", 33.33, Some("ferry")),
            ("titanic", 33.33, Some("titanic")),
        ]
    );
}
