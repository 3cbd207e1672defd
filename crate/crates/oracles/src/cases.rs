//! Fixtures and random generators shared by the test suites.

use std::collections::BTreeSet;

use fsn_core::fsn::MorphologicalChange;
use fsn_core::ontology::{
    ClassDef, Edit, Individual, KnowledgeBase, Literal, PrimitiveType, PropertyDef, PropertyFamily, RemoveMode, Value,
    THING,
};
use fsn_core::query::{Filter, FilterOp, QueryAst, Term, TriplePattern, RDFS_LABEL, RDF_TYPE};
use fsn_core::seed;
use fsn_core::tag::{FolksodrivenTag, FormalContext, Resource, TimeExposition};
use rand::seq::SliceRandom;
use rand::Rng;

// ---- constraint matrix ----

/// Five `Node` individuals `a..e` with `b PartOf a`, `c PartOf b`,
/// `a next b`, `a tag "t"`, `d rel e` and `d rel a`.
pub fn chain_kb() -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    let edits = [
        Edit::DefineClass(ClassDef::new("Node", "Node", [THING])),
        Edit::DefineProperty(PropertyDef::object("PartOf", "Node").with_family(PropertyFamily::Hierarchical)),
        Edit::DefineProperty(PropertyDef::object("next", "Node").with_family(PropertyFamily::TotalOrder)),
        Edit::DefineProperty(PropertyDef::datatype("tag", PrimitiveType::String).with_cardinality(0, Some(1))),
        Edit::DefineProperty(PropertyDef::object("rel", "Node").with_cardinality(0, Some(2))),
    ];
    for e in edits {
        kb.apply(&e).unwrap();
    }
    for n in ["a", "b", "c", "d", "e"] {
        kb.assert_individual(Individual::new(n, [n], ["Node"])).unwrap();
    }
    for (s, p, o) in [("b", "PartOf", "a"), ("c", "PartOf", "b"), ("a", "next", "b"), ("d", "rel", "e"), ("d", "rel", "a")] {
        kb.set_property_value(s, p, Value::individual(o)).unwrap();
    }
    kb.set_property_value("a", "tag", Value::Literal(Literal::string("t"))).unwrap();
    kb
}

pub struct ConstraintCase {
    pub name: &'static str,
    pub base: fn() -> KnowledgeBase,
    pub edit: Edit,
    /// Hand-labelled verdict.
    pub accept: bool,
}

fn news() -> KnowledgeBase {
    seed::news_kb().expect("news fixture")
}

fn set(s: &str, p: &str, o: &str) -> Edit {
    Edit::SetPropertyValue {
        subject: s.into(),
        property: p.into(),
        object: Value::individual(o),
    }
}

fn set_lit(s: &str, p: &str, datatype: PrimitiveType, v: &str) -> Edit {
    Edit::SetPropertyValue {
        subject: s.into(),
        property: p.into(),
        object: Value::Literal(Literal { datatype, value: v.into() }),
    }
}

fn remove(iri: &str, mode: RemoveMode) -> Edit {
    Edit::RemoveIndividual { iri: iri.into(), mode }
}

pub fn constraint_matrix() -> Vec<ConstraintCase> {
    use PrimitiveType::{Integer, String as Str};
    let c = |name, base, edit, accept| ConstraintCase { name, base, edit, accept };
    vec![
        c("builtOf subclass instance in range", news as fn() -> _, set("Sinking", "builtOf", "titanic"), true),
        c("builtOf duplicate", news, set("Sinking", "builtOf", "Passenger"), false),
        c("builtOf person out of range", news, set("Sinking", "builtOf", "captain"), false),
        c("builtOf plane out of range", news, set("Sinking", "builtOf", "plane"), false),
        c("builtOf outside domain", news, set("ship", "builtOf", "Passenger"), false),
        c("headline string", news, set_lit("Sinking", "headline", Str, "Titanic sinks"), true),
        c("headline integer", news, set_lit("Sinking", "headline", Integer, "5"), false),
        c("second father", news, set("captain", "PartOf", "Sinking"), false),
        c("PartOf 3-cycle", news, set("Sinking", "PartOf", "captain"), false),
        c("PartOf new child", news, set("rescue", "PartOf", "ship"), true),
        c("PartOf self loop", news, set("ship", "PartOf", "ship"), false),
        c("isComposedOf inverse", news, set("Sinking", "isComposedOf", "rescue"), true),
        c("isComposedOf duplicate", news, set("ship", "isComposedOf", "captain"), false),
        c("isFollowedBy cycle", news, set("titanic", "isFollowedBy", "ship"), false),
        c("isFollowedBy fork out", news, set("ship", "isFollowedBy", "plane"), false),
        c("isFollowedBy fork in", news, set("plane", "isFollowedBy", "ferry"), false),
        c("isFollowedBy extend chain", news, set("titanic", "isFollowedBy", "plane"), true),
        c("unknown subject", news, set("ghost", "builtOf", "Passenger"), false),
        c("class duplicate", news, Edit::DefineClass(ClassDef::new("Ship", "Ship", [THING])), false),
        c("class under Ship", news, Edit::DefineClass(ClassDef::new("Ferry", "Ferry", ["Ship"])), true),
        c("class unknown parent", news, Edit::DefineClass(ClassDef::new("X", "X", ["NoSuch"])), false),
        c(
            "hierarchical datatype property",
            news,
            Edit::DefineProperty(PropertyDef::datatype("when", Str).with_family(PropertyFamily::Hierarchical)),
            false,
        ),
        c(
            "bad cardinality",
            news,
            Edit::DefineProperty(PropertyDef::object("crew", "Ship").with_cardinality(1, Some(0))),
            false,
        ),
        c("individual of Ship", news, Edit::AssertIndividual(Individual::new("lifeboat", ["lifeboat"], ["Ship"])), true),
        c(
            "individual without labels",
            news,
            Edit::AssertIndividual(Individual::new("x", Vec::<String>::new(), ["Ship"])),
            false,
        ),
        c(
            "isA cycle by redefinition",
            news,
            Edit::RedefineClass(ClassDef::new("sinking", "sinking", ["SunkPassengerShip"])),
            false,
        ),
        c("remove mid-hierarchy", news, remove("ship", RemoveMode::Splice), true),
        c("remove mid-chain", news, remove("ferry", RemoveMode::Splice), true),
        c("remove unknown", news, remove("ghost", RemoveMode::Splice), false),
        c("five-node second father", chain_kb, set("c", "PartOf", "a"), false),
        c("five-node cycle", chain_kb, set("a", "PartOf", "c"), false),
        c("five-node new father", chain_kb, set("d", "PartOf", "c"), true),
        c("datatype max 1 exceeded", chain_kb, set_lit("a", "tag", Str, "u"), false),
        c("datatype max 1 first value", chain_kb, set_lit("b", "tag", Str, "u"), true),
        c("object max 2 exceeded", chain_kb, set("d", "rel", "b"), false),
        c("object max 2 first value", chain_kb, set("e", "rel", "d"), true),
        c("chain append", chain_kb, set("b", "next", "c"), true),
        c("chain fork in", chain_kb, set("c", "next", "b"), false),
        c("splice removal", chain_kb, remove("b", RemoveMode::Splice), true),
        c("cascade removal", chain_kb, remove("b", RemoveMode::Cascade), true),
    ]
}

// ---- random KBs and queries ----

pub struct QueryCase {
    pub kb: KnowledgeBase,
    pub ast: QueryAst,
}

const IND: [&str; 4] = ["i0", "i1", "i2", "i3"];
const CLASSES: [&str; 3] = ["K0", "K1", "K2"];
const PROPS: [&str; 2] = ["p0", "p1"];

/// A KB whose triple view has at most `max_triples` triples.
pub fn random_kb(rng: &mut impl Rng, max_triples: usize) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    kb.define_class(ClassDef::new("K0", "K0", [THING])).unwrap();
    kb.define_class(ClassDef::new("K1", "K1", ["K0"])).unwrap();
    kb.define_class(ClassDef::new("K2", "K2", [THING])).unwrap();
    for p in PROPS {
        kb.define_property(PropertyDef::object(p, THING)).unwrap();
    }
    kb.define_property(PropertyDef::datatype("d0", PrimitiveType::Integer)).unwrap();
    for i in IND {
        let class = *CLASSES.choose(rng).unwrap();
        let label = if rng.gen_bool(0.3) { "same" } else { i };
        kb.assert_individual(Individual::new(i, [label], [class])).unwrap();
    }
    let size = |kb: &KnowledgeBase| crate::query::view(kb).len();
    for _ in 0..40 {
        if size(&kb) >= max_triples {
            break;
        }
        let s = *IND.choose(rng).unwrap();
        let mut trial = kb.clone();
        let res = if rng.gen_bool(0.2) {
            trial.set_property_value(s, "d0", Value::Literal(Literal::new(PrimitiveType::Integer, rng.gen_range(0..3).to_string()).unwrap()))
        } else {
            trial.set_property_value(s, PROPS.choose(rng).unwrap(), Value::individual(*IND.choose(rng).unwrap()))
        };
        if res.is_ok() && size(&trial) <= max_triples {
            kb = trial;
        }
    }
    kb
}

fn random_constant(rng: &mut impl Rng, position: usize) -> Term {
    match position {
        0 => Term::Iri((*IND.choose(rng).unwrap()).into()),
        1 => {
            let options = ["p0", "p1", "d0", RDF_TYPE, RDFS_LABEL, "nope"];
            Term::Iri((*options.choose(rng).unwrap()).into())
        }
        _ => match rng.gen_range(0..4) {
            0 => Term::Iri((*IND.choose(rng).unwrap()).into()),
            1 => Term::Iri((*[CLASSES[0], CLASSES[1], CLASSES[2], THING].choose(rng).unwrap()).into()),
            2 => Term::Literal(Literal::new(PrimitiveType::Integer, rng.gen_range(0..3).to_string()).unwrap()),
            _ => Term::Literal(Literal::string(*["same", "i0", "i2"].choose(rng).unwrap())),
        },
    }
}

pub fn random_query(rng: &mut impl Rng) -> QueryAst {
    let vars = ["x", "y", "z"];
    let n = rng.gen_range(1..=3);
    let mut patterns = Vec::new();
    for _ in 0..n {
        let mut terms = [0, 1, 2].map(|pos| {
            if rng.gen_bool(if pos == 1 { 0.25 } else { 0.55 }) {
                Term::Var((*vars.choose(rng).unwrap()).into())
            } else {
                random_constant(rng, pos)
            }
        });
        if patterns.is_empty() && terms.iter().all(|t| t.var().is_none()) {
            terms[0] = Term::Var("x".into());
        }
        let [s, p, o] = terms;
        patterns.push(TriplePattern::new(s, p, o));
    }
    let mut ast = QueryAst {
        select_vars: Vec::new(),
        patterns,
        filters: Vec::new(),
    };
    let in_use: Vec<String> = ast.pattern_vars().into_iter().map(str::to_string).collect();
    let mut select: Vec<String> = in_use.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    if select.is_empty() {
        select.push(in_use.choose(rng).unwrap().clone());
    }
    select.shuffle(rng);
    ast.select_vars = select;
    if rng.gen_bool(0.5) {
        let position = rng.gen_range(0..3);
        ast.filters.push(Filter {
            var: in_use.choose(rng).unwrap().clone(),
            op: if rng.gen_bool(0.5) { FilterOp::Eq } else { FilterOp::Ne },
            value: random_constant(rng, position),
        });
    }
    ast
}

pub fn random_query_case(rng: &mut impl Rng) -> QueryCase {
    QueryCase {
        kb: random_kb(rng, 30),
        ast: random_query(rng),
    }
}

// ---- FSN event sequences ----

const ATTRS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn random_context(rng: &mut impl Rng) -> FormalContext {
    let objects: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("o{i}")).collect();
    let attributes: Vec<&str> = ATTRS.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let incidence: Vec<(String, String)> = objects
        .iter()
        .flat_map(|o| attributes.iter().map(move |a| (o.clone(), a.to_string())))
        .filter(|_| rng.gen_bool(0.7))
        .collect();
    FormalContext::new(objects, attributes, incidence).expect("incidence within T x D")
}

pub fn random_exposition(rng: &mut impl Rng) -> TimeExposition {
    let impressions = rng.gen_range(0..20);
    let clicks = if impressions == 0 { 0 } else { rng.gen_range(0..=impressions) };
    TimeExposition::new(clicks, impressions).unwrap()
}

/// Events over at most `max_tags` live tags. Some events are invalid on
/// purpose (unknown tag, reused id).
pub fn random_events(rng: &mut impl Rng, len: usize, max_tags: usize) -> Vec<MorphologicalChange<f64>> {
    let mut live: BTreeSet<String> = BTreeSet::new();
    let mut next_id = 0u64;
    let mut events = Vec::new();
    for _ in 0..len {
        let pick = |rng: &mut dyn rand::RngCore, live: &BTreeSet<String>| -> String {
            if live.is_empty() || rng.gen_bool(0.05) {
                "ghost".into()
            } else {
                live.iter().nth(rng.gen_range(0..live.len())).unwrap().clone()
            }
        };
        let roll = rng.gen_range(0..10);
        let ev = if roll < 4 && live.len() < max_tags {
            let reuse = !live.is_empty() && rng.gen_bool(0.05);
            let id = if reuse {
                live.iter().next().unwrap().clone()
            } else {
                next_id += 1;
                format!("t{next_id}")
            };
            let tag = FolksodrivenTag::new(
                id.clone(),
                id.clone(),
                random_context(rng),
                random_exposition(rng),
                Resource::new(format!("http://example.org/r/{next_id}"), next_id).unwrap(),
            );
            live.insert(id);
            MorphologicalChange::Add(tag)
        } else if roll < 5 {
            let id = pick(rng, &live);
            live.remove(&id);
            MorphologicalChange::Remove(id)
        } else if roll < 6 {
            let id = pick(rng, &live);
            MorphologicalChange::Relabel { label: format!("{id}-label"), id }
        } else if roll < 8 {
            MorphologicalChange::ContextEdit {
                id: pick(rng, &live),
                context: random_context(rng),
            }
        } else {
            MorphologicalChange::ExpositionEdit {
                id: pick(rng, &live),
                exposition: random_exposition(rng),
            }
        };
        events.push(ev);
    }
    events
}

// ---- persistence script ----

/// 25 edits that are all accepted in order from an empty base.
pub fn edit_script() -> Vec<Edit> {
    let mut edits = seed::news_edits();
    edits.push(Edit::SetPropertyValue {
        subject: "Sinking".into(),
        property: seed::HEADLINE.into(),
        object: Value::Literal(Literal::string("Titanic lost")),
    });
    edits
}
