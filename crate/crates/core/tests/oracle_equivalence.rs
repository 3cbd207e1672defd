use std::collections::BTreeSet;

use fsn_core::elasticity::{region_color, region_of, stress_at, ElasticityParams, Region, Rgb};
use fsn_core::fsn::{FsnGraph, MorphologicalChange};
use fsn_core::query::{evaluate_with, parse_query, EvalOptions};
use fsn_core::tag::{embed, FolksodrivenTag, FormalContext, Resource, TimeExposition};
use fsn_core::Exact;
use fsn_oracles::{cases, elasticity as eo, embed as emb, fsn as fo, kb as ko, query as qo, union_find};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn bigq(n: i64, d: i64) -> BigRational {
    emb::ratio(n, d)
}

fn exact_to_big(x: Exact) -> BigRational {
    bigq(*x.numer(), *x.denom())
}

// ---- embedding ----

fn example_tag<T: fsn_core::Scalar>() -> FolksodrivenTag<T> {
    // |T|=4, |D|=5, |I|=7, ordinal 3, 7/40 clickthrough
    let objects: Vec<String> = (0..4).map(|i| format!("o{i}")).collect();
    let attrs: Vec<String> = (0..5).map(|i| format!("d{i}")).collect();
    let incidence: Vec<(String, String)> = (0..7).map(|k| (objects[k % 4].clone(), attrs[k % 5].clone())).collect();
    FolksodrivenTag::new(
        "t",
        "t",
        FormalContext::new(objects, attrs, incidence).unwrap(),
        TimeExposition::new(7, 40).unwrap(),
        Resource::new("http://example.org/t", 3).unwrap(),
    )
}

#[test]
fn embed_example_against_big_rational() {
    let (c, r, e) = emb::point(7, 4, 5, 7, 40, 3);
    assert_eq!((c.clone(), r.clone(), e.clone()), (bigq(7, 20), bigq(3, 4), bigq(7, 40)));
    let s2 = emb::interval(&c, &r, &e);
    // 0.35² + 0.75² − 0.175² = 1047/1600
    assert_eq!(s2, bigq(1047, 1600));
    assert_eq!(s2.to_f64().unwrap(), 0.654375);

    let exact = embed(&example_tag::<Exact>());
    assert_eq!(exact_to_big(exact.interval()), s2);
    let float = embed(&example_tag::<f64>());
    assert!((float.interval() - 0.654375).abs() < 1e-12);
    assert_eq!((float.c, float.r, float.e), (0.35, 0.75, 0.175));
}

#[test]
fn embed_random_tuples_exact() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let objects = rng.gen_range(0..4u64);
        let attrs = rng.gen_range(0..4u64);
        let impressions = rng.gen_range(0..50u64);
        let clicks = if impressions == 0 { 0 } else { rng.gen_range(0..=impressions) };
        let ordinal = rng.gen_range(0..1000u64);
        let os: Vec<String> = (0..objects).map(|i| format!("o{i}")).collect();
        let ds: Vec<String> = (0..attrs).map(|i| format!("d{i}")).collect();
        let incidence: Vec<(String, String)> = os
            .iter()
            .flat_map(|o| ds.iter().map(move |d| (o.clone(), d.clone())))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let n_inc = incidence.len() as u64;
        let tag = FolksodrivenTag::<Exact>::new(
            "t",
            "t",
            FormalContext::new(os, ds, incidence).unwrap(),
            TimeExposition::new(clicks, impressions).unwrap(),
            Resource::new("http://example.org/t", ordinal).unwrap(),
        );
        let p = embed(&tag);
        let (c, r, e) = emb::point(n_inc, objects, attrs, clicks, impressions, ordinal);
        assert_eq!(exact_to_big(p.c), c);
        assert_eq!(exact_to_big(p.r), r);
        assert_eq!(exact_to_big(p.e), e);
        let s2 = emb::interval(&c, &r, &e);
        assert_eq!(exact_to_big(p.interval()), s2);
        // time-like exactly when e² exceeds c² + r²
        let timelike = &e * &e > &c * &c + &r * &r;
        assert_eq!(timelike, s2 < bigq(0, 1));
    }
}

// ---- elasticity ----

#[test]
fn stress_matches_exact_curve() {
    let params = ElasticityParams::<Exact>::default();
    let p = eo::Params::default();
    for k in 0..=1300i64 {
        let strain = Exact::new(k, 1000);
        assert_eq!(exact_to_big(stress_at(strain, &params).unwrap()), eo::stress(&bigq(k, 1000), &p));
        let rank = match region_of(strain, &params).unwrap() {
            Region::Elastic => 0,
            Region::Yield => 1,
            Region::Necking => 2,
        };
        assert_eq!(rank, eo::region_rank(&bigq(k, 1000), &p));
    }
}

#[test]
fn colors_match_exact_ramp() {
    let params = ElasticityParams::<Exact>::default();
    let fparams = ElasticityParams::<f64>::default();
    let p = eo::Params::default();
    for k in 0..=1300i64 {
        let expected = eo::color(&bigq(k, 1000), &p);
        let Rgb(r, g, b) = region_color(Exact::new(k, 1000), &params).unwrap();
        assert_eq!((r, g, b), expected, "strain {k}/1000");
        let Rgb(r, g, b) = region_color(k as f64 / 1000.0, &fparams).unwrap();
        // f64 may land on the other side of a .5 only at exact midpoints
        let close = |x: u8, y: u8| (x as i32 - y as i32).abs() <= 1;
        assert!(close(r, expected.0) && close(g, expected.1) && close(b, expected.2));
    }
    assert_eq!(region_color(0.1, &fparams).unwrap(), Rgb(128, 80, 0));
}

// ---- FSN ----

fn compare(graph: &FsnGraph<f64>, oracle: &fo::RebuildOracle) {
    let keys: BTreeSet<(String, String)> = graph.links().map(|l| (l.a.clone(), l.b.clone())).collect();
    let oracle_keys: BTreeSet<(String, String)> = oracle.links().keys().cloned().collect();
    assert_eq!(keys, oracle_keys);
    for l in graph.links() {
        let o = &oracle.links()[&(l.a.clone(), l.b.clone())];
        assert_eq!(l.weight, o.weight);
        assert!((l.strain - o.strain).abs() <= 1e-9, "strain {} vs {}", l.strain, o.strain);
        assert!((l.rest_interval - o.rest).abs() <= 1e-9);
        assert_eq!(l.region, o.region);
    }
}

#[test]
fn incremental_fsn_matches_rebuild() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let theta = [0.2, 0.3, 0.5][rng.gen_range(0..3)];
        let mut graph = FsnGraph::new(theta, ElasticityParams::default()).unwrap();
        let mut oracle = fo::RebuildOracle::new(theta, 0.2, 0.6);
        let len = rng.gen_range(1..=20);
        for ev in cases::random_events(&mut rng, len, 10) {
            let got = graph.apply_morphological_change(ev.clone());
            let want = oracle.apply(&ev);
            match (got, want) {
                (Ok(report), Some(w)) => {
                    assert_eq!(report.created, w.created);
                    assert_eq!(report.broken, w.broken);
                    let changed: Vec<_> = report
                        .region_changed
                        .iter()
                        .map(|c| (c.a.clone(), c.b.clone(), c.from, c.to))
                        .collect();
                    assert_eq!(changed, w.region_changed);
                }
                (Err(_), None) => {}
                (got, want) => panic!("engine {got:?} vs oracle {want:?} on {ev:?}"),
            }
            compare(&graph, &oracle);
        }
    }
}

#[test]
fn scripted_six_tag_stream() {
    let tag = |id: &str, n: u64, attrs: &[&str]| {
        FolksodrivenTag::new(
            id,
            id,
            FormalContext::full(["doc"], attrs.iter().copied()),
            TimeExposition::new(n, 10).unwrap(),
            Resource::new(format!("http://example.org/{id}"), n).unwrap(),
        )
    };
    let events = vec![
        MorphologicalChange::Add(tag("a", 1, &["x", "y"])),
        MorphologicalChange::Add(tag("b", 2, &["x", "y", "z"])),
        MorphologicalChange::Add(tag("c", 3, &["z"])),
        MorphologicalChange::Add(tag("d", 4, &["x"])),
        MorphologicalChange::Add(tag("e", 5, &["y", "z"])),
        MorphologicalChange::Add(tag("f", 6, &["w"])),
        MorphologicalChange::ExpositionEdit { id: "a".into(), exposition: TimeExposition::new(9, 10).unwrap() },
        MorphologicalChange::ContextEdit { id: "f".into(), context: FormalContext::full(["doc"], ["w", "z"]) },
        MorphologicalChange::Relabel { id: "b".into(), label: "b".into() },
        MorphologicalChange::Remove("b".into()),
    ];
    let mut graph = FsnGraph::new(0.3, ElasticityParams::default()).unwrap();
    let mut oracle = fo::RebuildOracle::new(0.3, 0.2, 0.6);
    for ev in events {
        let is_noop_relabel = matches!(ev, MorphologicalChange::Relabel { .. });
        let r = graph.apply_morphological_change(ev.clone()).unwrap();
        let w = oracle.apply(&ev).unwrap();
        assert_eq!(r.created, w.created);
        assert_eq!(r.broken, w.broken);
        if is_noop_relabel {
            assert!(r.is_empty());
        }
        compare(&graph, &oracle);
    }
}

#[test]
fn unit_cells_match_union_find() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let mut graph = FsnGraph::new(0.3, ElasticityParams::default()).unwrap();
        for i in 0..8u64 {
            let t = FolksodrivenTag::new(
                format!("t{i}"),
                format!("t{i}"),
                cases::random_context(&mut rng),
                cases::random_exposition(&mut rng),
                Resource::new(format!("http://example.org/{i}"), i).unwrap(),
            );
            graph.insert_tag(t).unwrap();
        }
        graph.rebuild_links();
        let edges: Vec<(String, String)> = graph.links().map(|l| (l.a.clone(), l.b.clone())).collect();
        let cells: BTreeSet<BTreeSet<String>> = graph.unit_cells().into_iter().map(|c| c.member_tags).collect();
        assert_eq!(cells, union_find::components(&edges));
        for cell in graph.unit_cells() {
            let key = cell
                .member_tags
                .iter()
                .map(|m| graph.tag(m).unwrap().context().attributes().clone())
                .reduce(|a, b| a.intersection(&b).cloned().collect())
                .unwrap();
            assert_eq!(cell.subject_key, key);
        }
    }
}

// ---- ontology ----

#[test]
fn constraint_matrix_matches_brute_force() {
    let matrix = cases::constraint_matrix();
    assert_eq!(matrix.len(), 40);
    for case in matrix {
        let base = (case.base)();
        let verdict = ko::decide(&base, &case.edit);
        let mut kb = base.clone();
        let result = kb.apply(&case.edit);
        assert_eq!(result.is_ok(), verdict.is_some(), "{}: engine {result:?}", case.name);
        assert_eq!(result.is_ok(), case.accept, "{}: hand label", case.name);
        match verdict {
            Some(state) => assert_eq!(ko::State::from(&kb), state, "{}", case.name),
            None => assert_eq!(kb, base, "{}: rejected edit changed the KB", case.name),
        }
    }
}

#[test]
fn random_edit_sequences_match_brute_force() {
    use fsn_core::ontology::{Edit, RemoveMode, Value};
    let mut rng = StdRng::seed_from_u64(5);
    let names = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
    let props = ["PartOf", "next", "rel", "tag"];
    for _ in 0..100 {
        let mut kb = cases::chain_kb();
        for n in &names[5..] {
            kb.assert_individual(fsn_core::ontology::Individual::new(*n, [*n], ["Node"])).unwrap();
        }
        let len = rng.gen_range(1..=50);
        for _ in 0..len {
            let s = names[rng.gen_range(0..10)];
            let o = names[rng.gen_range(0..10)];
            let p = props[rng.gen_range(0..4)];
            let edit = match rng.gen_range(0..10) {
                0 => Edit::RemoveIndividual {
                    iri: s.into(),
                    mode: if rng.gen_bool(0.5) { RemoveMode::Splice } else { RemoveMode::Cascade },
                },
                1 => Edit::RemovePropertyValue { subject: s.into(), property: p.into(), object: Value::individual(o) },
                _ if p == "tag" => Edit::SetPropertyValue {
                    subject: s.into(),
                    property: p.into(),
                    object: Value::Literal(fsn_core::ontology::Literal::string(o)),
                },
                _ => Edit::SetPropertyValue { subject: s.into(), property: p.into(), object: Value::individual(o) },
            };
            let verdict = ko::decide(&kb, &edit);
            let before = kb.clone();
            let result = kb.apply(&edit);
            assert_eq!(result.is_ok(), verdict.is_some(), "{edit:?}: {result:?}");
            match verdict {
                Some(state) => assert_eq!(ko::State::from(&kb), state),
                None => assert_eq!(kb, before),
            }
        }
    }
}

// ---- query ----

#[test]
fn random_queries_match_nested_loop() {
    let mut rng = StdRng::seed_from_u64(13);
    let opts = EvalOptions { row_limit: 1_000_000 };
    for _ in 0..300 {
        let case = cases::random_query_case(&mut rng);
        let view: Vec<qo::Triple> = qo::view(&case.kb).into_iter().collect();
        assert!(view.len() <= 30);
        let engine_view: BTreeSet<qo::Triple> = fsn_core::query::kb_triples(&case.kb).into_iter().collect();
        assert_eq!(engine_view, view.iter().cloned().collect());
        let table = evaluate_with(&case.ast, &case.kb, opts).unwrap();
        let rows: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        assert_eq!(rows, qo::nested_loop(&case.ast, &view), "{}", case.ast);
        // printer output reparses to the same AST
        assert_eq!(parse_query(&case.ast.to_string()).unwrap(), case.ast);
    }
}
