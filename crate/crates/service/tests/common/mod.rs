#![allow(dead_code)]

use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use fsn_core::nav::NavError;
use fsn_core::ontology::{OntologyError, PrimitiveType};
use fsn_core::query::QueryError;
use fsn_service::{router, ApiError, AppState, Config, PieDocError};
use http_body_util::BodyExt;
use tempfile::TempDir;
use tower::ServiceExt;

pub struct App {
    pub dir: TempDir,
    pub state: Arc<AppState>,
    pub router: Router,
}

pub fn config(dir: &std::path::Path, seed: bool) -> Config {
    Config {
        data_dir: dir.to_path_buf(),
        seed_fixture: seed,
        ..Config::default()
    }
}

pub fn app(seed: bool) -> App {
    let dir = tempfile::tempdir().unwrap();
    let state = Arc::new(AppState::open(&config(dir.path(), seed)).unwrap());
    let router = router(state.clone());
    App { dir, state, router }
}

pub struct Reply {
    pub status: StatusCode,
    pub bytes: Bytes,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|e| panic!("{e}: {:?}", String::from_utf8_lossy(&self.bytes)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.bytes.to_vec()).unwrap()
    }
}

pub async fn call(router: &Router, method: Method, uri: &str, body: Option<&str>, headers: &[(&str, &str)]) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let body = body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty);
    let resp = router.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply { status, bytes }
}

pub async fn get(router: &Router, uri: &str) -> Reply {
    call(router, Method::GET, uri, None, &[]).await
}

pub async fn post(router: &Router, uri: &str, body: &str) -> Reply {
    call(router, Method::POST, uri, Some(body), &[]).await
}

// Adding an engine error variant breaks these matches until the sample list
// below covers it.
fn ontology_guard(e: &OntologyError) {
    use OntologyError::*;
    match e {
        DuplicateIri(_) | InvalidIri(_) | BuiltIn(_) | UnknownParent(_) | IsACycle(_) | UnknownClass(_)
        | UnknownProperty(_) | UnknownIndividual(_) | BadCardinality { .. } | KindMismatch(_) | EmptyLabels
        | InvalidLiteral { .. } | RangeViolation { .. } | DomainViolation { .. } | CardinalityExceeded { .. }
        | DuplicateAssertion | UnknownAssertion | WouldCreateCycle { .. } | SecondFather { .. } | ChainFork { .. }
        | NotHierarchical(_) | NotTotalOrder(_) | ChainInconsistent(_) | InvalidInverse(_) => {}
    }
}

fn query_guard(e: &QueryError) {
    use QueryError::*;
    match e {
        Syntax { .. } | UnsupportedFeature { .. } | UnknownPrefix { .. } | UnboundSelectVar(_) | UnboundFilterVar(_)
        | RowLimitExceeded(_) | DuplicateId(_) | SlotMismatch(_) | UnknownTemplate(_) | MissingParam(_)
        | RestrictionViolation { .. } => {}
    }
}

fn nav_guard(e: &NavError) {
    match e {
        NavError::NotExpandable(_)
        | NavError::UnknownSector(_)
        | NavError::UnknownTag(_)
        | NavError::EmptyTagList
        | NavError::Ontology(_) => {}
    }
}

fn piedoc_guard(e: &PieDocError) {
    match e {
        PieDocError::MalformedDocument { .. } | PieDocError::BadPercent { .. } => {}
    }
}

/// One instance of every engine error variant, with its engine code.
pub fn all_engine_errors() -> Vec<(String, ApiError)> {
    let s = || "x".to_string();
    let ontology = vec![
        OntologyError::DuplicateIri(s()),
        OntologyError::InvalidIri(s()),
        OntologyError::BuiltIn(s()),
        OntologyError::UnknownParent(s()),
        OntologyError::IsACycle(vec![s(), s()]),
        OntologyError::UnknownClass(s()),
        OntologyError::UnknownProperty(s()),
        OntologyError::UnknownIndividual(s()),
        OntologyError::BadCardinality { min: 2, max: 1 },
        OntologyError::KindMismatch(s()),
        OntologyError::EmptyLabels,
        OntologyError::InvalidLiteral { datatype: PrimitiveType::Integer, value: s() },
        OntologyError::RangeViolation { property: s(), object: s(), expected: s() },
        OntologyError::DomainViolation { property: s(), subject: s(), expected: s() },
        OntologyError::CardinalityExceeded { property: s(), subject: s(), max: 1 },
        OntologyError::DuplicateAssertion,
        OntologyError::UnknownAssertion,
        OntologyError::WouldCreateCycle { property: s(), path: vec![s()] },
        OntologyError::SecondFather { property: s(), individual: s(), existing: s() },
        OntologyError::ChainFork { property: s(), individual: s() },
        OntologyError::NotHierarchical(s()),
        OntologyError::NotTotalOrder(s()),
        OntologyError::ChainInconsistent(s()),
        OntologyError::InvalidInverse(s()),
    ];
    let query = vec![
        QueryError::Syntax { line: 1, col: 1, expected: s() },
        QueryError::UnsupportedFeature { feature: "OPTIONAL".into(), line: 1, col: 1 },
        QueryError::UnknownPrefix { prefix: s(), line: 1, col: 1 },
        QueryError::UnboundSelectVar(s()),
        QueryError::UnboundFilterVar(s()),
        QueryError::RowLimitExceeded(1),
        QueryError::DuplicateId(s()),
        QueryError::SlotMismatch(s()),
        QueryError::UnknownTemplate(s()),
        QueryError::MissingParam(s()),
        QueryError::RestrictionViolation { param: s(), required: s() },
    ];
    let nav = vec![
        NavError::NotExpandable(s()),
        NavError::UnknownSector(s()),
        NavError::UnknownTag(s()),
        NavError::EmptyTagList,
        NavError::Ontology(OntologyError::UnknownClass(s())),
    ];
    let piedoc = vec![
        PieDocError::MalformedDocument { line: 1, reason: s() },
        PieDocError::BadPercent { line: 1, value: s() },
    ];
    let mut out = Vec::new();
    for e in ontology {
        ontology_guard(&e);
        out.push((e.code().to_string(), e.into()));
    }
    for e in query {
        query_guard(&e);
        out.push((e.code().to_string(), e.into()));
    }
    for e in nav {
        nav_guard(&e);
        out.push((e.code().to_string(), e.into()));
    }
    for e in piedoc {
        piedoc_guard(&e);
        out.push((e.code().to_string(), e.into()));
    }
    out
}

/// Checks every engine error against the documented table. Returns the
/// number of variants checked.
pub fn check_error_mapping() -> Result<usize, String> {
    let mut seen = std::collections::BTreeMap::new();
    let all = all_engine_errors();
    for (code, api) in &all {
        if api.error_code != code {
            return Err(format!("{code} is reported as {}", api.error_code));
        }
        let documented: Vec<u16> = fsn_service::ERROR_TABLE
            .iter()
            .filter(|(c, _)| c == code)
            .map(|(_, s)| *s)
            .collect();
        if documented.len() != 1 {
            return Err(format!("{code} has {} table entries", documented.len()));
        }
        if api.status.as_u16() != documented[0] {
            return Err(format!("{code} maps to {} but is documented as {}", api.status, documented[0]));
        }
        if let Some(prev) = seen.insert(code.clone(), api.status) {
            if prev != api.status {
                return Err(format!("{code} maps to both {prev} and {}", api.status));
            }
        }
        let body = serde_json::to_value(api).unwrap();
        let keys: Vec<&str> = body.as_object().unwrap().keys().map(String::as_str).collect();
        if keys != ["details", "error_code", "message"] {
            return Err(format!("{code} body has keys {keys:?}"));
        }
    }
    Ok(all.len())
}

// ---- persistence ----

pub const GOLDEN_SHIP_QUERY: &[u8] = include_bytes!("../golden/ship_query.xml");

/// Runs the 25-edit script, then restarts from every prefix of the journal,
/// both cut cleanly at a record boundary and torn halfway through the next
/// record. Returns the number of restarts checked.
pub fn check_replay_every_prefix() -> Result<usize, String> {
    use fsn_core::ontology::KnowledgeBase;
    let dir = tempfile::tempdir().unwrap();
    let live = AppState::open(&config(dir.path(), false)).map_err(|e| e.to_string())?;
    let script = fsn_oracles::cases::edit_script();
    let mut expected: Vec<KnowledgeBase> = vec![live.snapshot().kb.clone()];
    for edit in script {
        live.commit(edit.clone(), "script", None).map_err(|e| format!("{edit:?}: {e}"))?;
        expected.push(live.snapshot().kb.clone());
    }
    let bytes = std::fs::read(live.journal_path()).unwrap();
    let mut ends = vec![0];
    ends.extend(bytes.iter().enumerate().filter(|(_, b)| **b == b'\n').map(|(i, _)| i + 1));
    if ends.len() != expected.len() {
        return Err(format!("journal has {} records for {} edits", ends.len() - 1, expected.len() - 1));
    }
    let mut restarts = 0;
    for (k, want) in expected.iter().enumerate() {
        let mut cuts = vec![ends[k]];
        if k + 1 < ends.len() {
            cuts.push((ends[k] + ends[k + 1]) / 2);
        }
        for cut in cuts {
            let crash = tempfile::tempdir().unwrap();
            std::fs::write(crash.path().join(fsn_service::journal::JOURNAL_FILE), &bytes[..cut]).unwrap();
            let st = AppState::open(&config(crash.path(), false)).map_err(|e| format!("prefix {k}, cut {cut}: {e}"))?;
            let got = st.snapshot().kb.clone();
            if &got != want || serde_json::to_vec(&got).unwrap() != serde_json::to_vec(want).unwrap() {
                return Err(format!("prefix {k}, cut {cut}: replayed state differs"));
            }
            let on_disk = std::fs::metadata(st.journal_path()).unwrap().len() as usize;
            if on_disk != ends[k] {
                return Err(format!("prefix {k}, cut {cut}: torn tail not truncated"));
            }
            restarts += 1;
        }
    }
    Ok(restarts)
}

pub fn golden_model() -> fsn_core::nav::PieModel {
    let kb = fsn_core::seed::news_kb().unwrap();
    let table = fsn_core::query::evaluate(&fsn_core::query::parse_query(fsn_core::seed::SHIP_QUERY).unwrap(), &kb).unwrap();
    fsn_core::nav::table_to_pie(&table, kb.revision())
}

pub fn check_golden() -> Result<(), String> {
    let got = fsn_service::export_pie_document(&golden_model());
    if got != GOLDEN_SHIP_QUERY {
        return Err(format!("export differs from golden:\n{}", String::from_utf8_lossy(&got)));
    }
    if fsn_service::export_pie_document(&fsn_core::nav::model_from_slices([], 0)) != b"<piechart/>\n" {
        return Err("empty model is not `<piechart/>`".into());
    }
    Ok(())
}

fn names_and_percents(m: &fsn_core::nav::PieModel) -> Vec<(String, f64, Option<String>)> {
    m.root.children.iter().map(|s| (s.label.clone(), s.percent, s.source_iri.clone())).collect()
}

/// import(export(m)) keeps names and percents; export(import(d)) keeps the
/// bytes of a canonical document. Models come from random weights.
pub fn check_document_round_trips(seed: u64, n: usize) -> Result<usize, String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let alphabet = ['a', 'z', '&', '<', '>', '"', '\'', ' ', 'é', '中'];
    for i in 0..n {
        let k = rng.gen_range(0..8);
        let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(0..50)).collect();
        let units = fsn_core::nav::largest_remainder(&weights);
        let names: Vec<String> = (0..k)
            .map(|_| (0..rng.gen_range(1..6)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect::<String>())
            .map(|s| if s.trim().is_empty() { "blank".to_string() } else { s.trim().to_string() })
            .collect();
        let iris: Vec<Option<String>> = (0..k).map(|j| rng.gen_bool(0.5).then(|| format!("http://example.org/{i}/{j}"))).collect();
        let model = fsn_core::nav::model_from_slices(
            (0..k).map(|j| (names[j].as_str(), units[j] as f64 / 100.0, iris[j].as_deref())),
            i as u64,
        );
        let bytes = fsn_service::export_pie_document(&model);
        let doc = fsn_service::import_pie_document(&bytes).map_err(|e| format!("case {i}: {e}"))?;
        let back = doc.to_model(model.revision);
        if names_and_percents(&back) != names_and_percents(&model) {
            return Err(format!("case {i}: import(export(m)) differs"));
        }
        if doc.to_bytes() != bytes {
            return Err(format!("case {i}: export(import(d)) differs"));
        }
    }
    Ok(n)
}

// ---- concurrency ----

pub struct HarnessReport {
    pub accepted: usize,
    pub rejected: usize,
}

/// Eight clients push 100 edits between them against one service: clashing
/// class and individual iris and competing `PartOf` fathers. Checks that the
/// revision advances by exactly the accepted count, that every rejection is a
/// clean 422, and that the journal replays to the live state.
pub async fn concurrent_harness(seed: u64) -> Result<HarnessReport, String> {
    use rand::{Rng, SeedableRng};
    let a = app(false);
    post(&a.router, "/api/kb/class", r#"{"iri":"Node","label":"Node"}"#).await;
    post(
        &a.router,
        "/api/kb/property",
        r#"{"iri":"PartOf","kind":"ObjectProperty","range":{"class":"Node"},"family":"Hierarchical"}"#,
    )
    .await;
    for i in 0..12 {
        let r = post(&a.router, "/api/kb/individual", &format!(r#"{{"iri":"n{i}","labels":["n{i}"],"classes":["Node"]}}"#)).await;
        if r.status != StatusCode::OK {
            return Err(format!("setup failed: {}", r.text()));
        }
    }
    let base = a.state.snapshot().revision();

    let mut handles = Vec::new();
    for client in 0..8u64 {
        let router = a.router.clone();
        let share = if client < 4 { 13 } else { 12 };
        handles.push(tokio::spawn(async move {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed * 100 + client);
            let mut outcomes = Vec::new();
            let actor = format!("client-{client}");
            for _ in 0..share {
                let (uri, method, body) = match rng.gen_range(0..4) {
                    0 => ("/api/kb/class", Method::POST, format!(r#"{{"iri":"K{}","label":"k"}}"#, rng.gen_range(0..10))),
                    1 => (
                        "/api/kb/individual",
                        Method::POST,
                        format!(r#"{{"iri":"m{}","labels":["m"],"classes":["Node"]}}"#, rng.gen_range(0..10)),
                    ),
                    _ => (
                        "/api/kb/assertion",
                        Method::PUT,
                        format!(
                            r#"{{"subject":"n{}","property":"PartOf","object":{{"individual":"n{}"}}}}"#,
                            rng.gen_range(0..12),
                            rng.gen_range(0..12)
                        ),
                    ),
                };
                let r = call(&router, method, uri, Some(&body), &[("x-actor", &actor)]).await;
                outcomes.push((r.status, r.json()));
            }
            outcomes
        }));
    }
    let mut accepted = 0;
    let mut rejected = 0;
    for h in handles {
        for (status, body) in h.await.map_err(|e| e.to_string())? {
            match status {
                StatusCode::OK => accepted += 1,
                StatusCode::UNPROCESSABLE_ENTITY if body["error_code"].is_string() && body["message"].is_string() => {
                    rejected += 1
                }
                other => return Err(format!("unexpected {other}: {body}")),
            }
        }
    }
    if accepted + rejected != 100 {
        return Err(format!("{} outcomes for 100 edits", accepted + rejected));
    }
    let snap = a.state.snapshot();
    if snap.revision() != base + accepted as u64 {
        return Err(format!("revision {} after {accepted} accepted edits from {base}", snap.revision()));
    }
    let bytes = std::fs::read(a.state.journal_path()).unwrap();
    let (records, intact) = fsn_service::journal::parse(&bytes).map_err(|e| e.to_string())?;
    if intact != bytes.len() || records.len() as u64 != snap.revision() {
        return Err("journal length does not match the revision".into());
    }
    let replayed = fsn_service::journal::replay(&records).map_err(|e| e.to_string())?;
    if replayed != snap.kb {
        return Err("journal replay differs from live state".into());
    }
    if !fsn_oracles::kb::State::from(&snap.kb).is_valid() {
        return Err("final state violates a constraint".into());
    }
    Ok(HarnessReport { accepted, rejected })
}

/// Two clients race to give `n0` different fathers; exactly one must win.
pub async fn conflicting_pair(round: usize) -> Result<(), String> {
    let a = app(false);
    post(&a.router, "/api/kb/class", r#"{"iri":"Node","label":"Node"}"#).await;
    post(
        &a.router,
        "/api/kb/property",
        r#"{"iri":"PartOf","kind":"ObjectProperty","range":{"class":"Node"},"family":"Hierarchical"}"#,
    )
    .await;
    for i in 0..3 {
        post(&a.router, "/api/kb/individual", &format!(r#"{{"iri":"n{i}","labels":["n{i}"],"classes":["Node"]}}"#)).await;
    }
    let base = a.state.snapshot().revision();
    let edit = |father: usize| format!(r#"{{"subject":"n0","property":"PartOf","object":{{"individual":"n{father}"}}}}"#);
    let race = |body: String| {
        let router = a.router.clone();
        tokio::spawn(async move { call(&router, Method::PUT, "/api/kb/assertion", Some(&body), &[]).await })
    };
    let (h1, h2) = (race(edit(1)), race(edit(2)));
    let (r1, r2) = (h1.await.unwrap(), h2.await.unwrap());
    let mut statuses = [r1.status.as_u16(), r2.status.as_u16()];
    statuses.sort();
    if statuses != [200, 422] {
        return Err(format!("round {round}: statuses {statuses:?}"));
    }
    let loser = if r1.status == StatusCode::OK { r2 } else { r1 };
    if loser.json()["error_code"] != "SecondFather" {
        return Err(format!("round {round}: loser got {}", loser.text()));
    }
    if a.state.snapshot().revision() != base + 1 {
        return Err(format!("round {round}: revision moved by more than one"));
    }
    Ok(())
}
