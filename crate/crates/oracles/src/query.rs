//! Nested-loop query evaluation over an independently built triple view.

use std::collections::{BTreeMap, BTreeSet};

use fsn_core::ontology::{KnowledgeBase, Literal, Value};
use fsn_core::query::{FilterOp, QueryAst, RdfTerm, Term, RDFS_LABEL, RDF_TYPE};

pub type Triple = (RdfTerm, RdfTerm, RdfTerm);

fn iri(s: &str) -> RdfTerm {
    RdfTerm::Iri { value: s.to_string() }
}

fn value_term(v: &Value) -> RdfTerm {
    match v {
        Value::Individual(i) => iri(i),
        Value::Literal(l) => RdfTerm::Literal {
            value: l.value.clone(),
            datatype: l.datatype,
        },
    }
}

/// Assertions, inverse views, `rdf:type` over the class closure and labels.
pub fn view(kb: &KnowledgeBase) -> BTreeSet<Triple> {
    // class closure by fixpoint iteration
    let mut up: BTreeMap<&str, BTreeSet<&str>> = kb
        .classes()
        .values()
        .map(|c| (c.iri.as_str(), std::iter::once(c.iri.as_str()).collect()))
        .collect();
    loop {
        let mut changed = false;
        for c in kb.classes().values() {
            let mut grown = up[c.iri.as_str()].clone();
            for p in &c.parents {
                grown.extend(up[p.as_str()].iter().copied());
            }
            if grown.len() != up[c.iri.as_str()].len() {
                up.insert(c.iri.as_str(), grown);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for ind in kb.individuals().values() {
        for c in &ind.classes {
            for sup in &up[c.as_str()] {
                out.insert((iri(&ind.iri), iri(RDF_TYPE), iri(sup)));
            }
        }
        for l in &ind.labels {
            out.insert((iri(&ind.iri), iri(RDFS_LABEL), value_term(&Value::Literal(Literal::string(l.clone())))));
        }
    }
    for a in kb.assertions() {
        out.insert((iri(&a.subject), iri(&a.property), value_term(&a.object)));
        for p in kb.properties().values() {
            if p.inverse_of.as_deref() == Some(a.property.as_str()) {
                out.insert((value_term(&a.object), iri(&p.iri), iri(&a.subject)));
            }
        }
    }
    out
}

fn constant(t: &Term) -> Option<RdfTerm> {
    match t {
        Term::Iri(i) => Some(iri(i)),
        Term::Literal(l) => Some(RdfTerm::Literal {
            value: l.value.clone(),
            datatype: l.datatype,
        }),
        Term::Var(_) | Term::Param(_) => None,
    }
}

fn unify(term: &Term, value: &RdfTerm, binding: &mut BTreeMap<String, RdfTerm>) -> bool {
    match term {
        Term::Var(v) => match binding.get(v) {
            Some(bound) => bound == value,
            None => {
                binding.insert(v.clone(), value.clone());
                true
            }
        },
        other => constant(other).as_ref() == Some(value),
    }
}

fn walk(
    ast: &QueryAst,
    triples: &[Triple],
    depth: usize,
    binding: &BTreeMap<String, RdfTerm>,
    out: &mut BTreeSet<Vec<String>>,
) {
    if depth == ast.patterns.len() {
        let pass = ast.filters.iter().all(|f| {
            let bound = &binding[&f.var];
            let c = constant(&f.value).expect("filter constant");
            match f.op {
                FilterOp::Eq => *bound == c,
                FilterOp::Ne => *bound != c,
            }
        });
        if pass {
            out.insert(ast.select_vars.iter().map(|v| binding[v].to_string()).collect());
        }
        return;
    }
    let p = &ast.patterns[depth];
    for (s, pr, o) in triples {
        let mut b = binding.clone();
        if unify(&p.subject, s, &mut b) && unify(&p.property, pr, &mut b) && unify(&p.object, o, &mut b) {
            walk(ast, triples, depth + 1, &b, out);
        }
    }
}

/// Rows as stringified bindings, deduplicated and sorted.
pub fn nested_loop(ast: &QueryAst, triples: &[Triple]) -> Vec<Vec<String>> {
    let mut out = BTreeSet::new();
    walk(ast, triples, 0, &BTreeMap::new(), &mut out);
    out.into_iter().collect()
}
