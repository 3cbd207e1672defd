//! Evaluation of a [`QueryAst`] against a knowledge-base snapshot.
//!
//! The base is exposed as a set of RDF-style triples: explicit assertions,
//! their inverse views, `rdf:type` closed under `isA`, and `rdfs:label`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::{KnowledgeBase, Literal, Value};
use crate::query::ast::*;
use crate::query::QueryError;

/// A bound value: an iri or a literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RdfTerm {
    Iri { value: String },
    Literal {
        value: String,
        datatype: crate::ontology::PrimitiveType,
    },
}

impl RdfTerm {
    pub fn iri(value: impl Into<String>) -> Self {
        RdfTerm::Iri {
            value: value.into(),
        }
    }

    pub fn literal(lit: &Literal) -> Self {
        RdfTerm::Literal {
            value: lit.value.clone(),
            datatype: lit.datatype,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            RdfTerm::Iri { value } => Some(value),
            RdfTerm::Literal { .. } => None,
        }
    }

    /// Display text: the iri itself or the literal's lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            RdfTerm::Iri { value } | RdfTerm::Literal { value, .. } => value,
        }
    }

    fn from_constant(term: &Term) -> Option<Self> {
        match term {
            Term::Iri(i) => Some(RdfTerm::iri(i.clone())),
            Term::Literal(l) => Some(RdfTerm::literal(l)),
            Term::Var(_) | Term::Param(_) => None,
        }
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri { value } => write!(f, "<{value}>"),
            RdfTerm::Literal { value, datatype } => write_literal(
                f,
                &Literal {
                    datatype: *datatype,
                    value: value.clone(),
                },
            ),
        }
    }
}

pub type Triple = (RdfTerm, RdfTerm, RdfTerm);

/// Materializes the triple view of a knowledge base.
pub fn kb_triples(kb: &KnowledgeBase) -> Vec<Triple> {
    let mut out = BTreeSet::new();
    let type_iri = RdfTerm::iri(RDF_TYPE);
    let label_iri = RdfTerm::iri(RDFS_LABEL);
    for ind in kb.individuals().values() {
        let subject = RdfTerm::iri(ind.iri.clone());
        for class in kb.types_of(&ind.iri) {
            out.insert((subject.clone(), type_iri.clone(), RdfTerm::iri(class)));
        }
        for label in &ind.labels {
            out.insert((
                subject.clone(),
                label_iri.clone(),
                RdfTerm::literal(&Literal::string(label.clone())),
            ));
        }
    }
    let inverses: Vec<(&str, &str)> = kb
        .properties()
        .values()
        .filter_map(|p| p.inverse_of.as_deref().map(|base| (p.iri.as_str(), base)))
        .collect();
    for a in kb.assertions() {
        let object = match &a.object {
            Value::Individual(i) => RdfTerm::iri(i.clone()),
            Value::Literal(l) => RdfTerm::literal(l),
        };
        let subject = RdfTerm::iri(a.subject.clone());
        for (inverse, base) in &inverses {
            if *base == a.property {
                out.insert((object.clone(), RdfTerm::iri(*inverse), subject.clone()));
            }
        }
        out.insert((subject, RdfTerm::iri(a.property.clone()), object));
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Cap on result rows. Intermediate bindings are capped at ten times
    /// this value.
    pub row_limit: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { row_limit: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<RdfTerm>>,
}

impl ResultTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Deduplicates and sorts rows by their stringified bindings.
    pub fn from_rows(columns: Vec<String>, rows: impl IntoIterator<Item = Vec<RdfTerm>>) -> Self {
        let mut keyed: Vec<(Vec<String>, Vec<RdfTerm>)> = rows
            .into_iter()
            .map(|r| (r.iter().map(ToString::to_string).collect(), r))
            .collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.0 == b.0);
        Self {
            columns,
            rows: keyed.into_iter().map(|(_, r)| r).collect(),
        }
    }
}

struct Compiled {
    slots: Vec<Option<usize>>,
    constants: Vec<Option<RdfTerm>>,
}

type Binding = Vec<Option<RdfTerm>>;

pub fn evaluate(ast: &QueryAst, kb: &KnowledgeBase) -> Result<ResultTable, QueryError> {
    evaluate_with(ast, kb, EvalOptions::default())
}

pub fn evaluate_with(
    ast: &QueryAst,
    kb: &KnowledgeBase,
    options: EvalOptions,
) -> Result<ResultTable, QueryError> {
    if let Some(p) = ast.params().into_iter().next() {
        return Err(QueryError::MissingParam(p.to_string()));
    }
    let triples = kb_triples(kb);
    evaluate_triples(ast, &triples, options)
}

/// Evaluates against an explicit triple set.
pub fn evaluate_triples(
    ast: &QueryAst,
    triples: &[Triple],
    options: EvalOptions,
) -> Result<ResultTable, QueryError> {
    let mut var_ids: HashMap<&str, usize> = HashMap::new();
    for p in &ast.patterns {
        for v in p.terms().into_iter().filter_map(Term::var) {
            let next = var_ids.len();
            var_ids.entry(v).or_insert(next);
        }
    }
    let mut by_property: HashMap<&RdfTerm, Vec<usize>> = HashMap::new();
    for (i, t) in triples.iter().enumerate() {
        by_property.entry(&t.1).or_default().push(i);
    }
    let compiled: Vec<Compiled> = ast
        .patterns
        .iter()
        .map(|p| Compiled {
            slots: p.terms().iter().map(|t| t.var().map(|v| var_ids[v])).collect(),
            constants: p.terms().iter().map(|t| RdfTerm::from_constant(t)).collect(),
        })
        .collect();
    let filters: Vec<(usize, FilterOp, RdfTerm)> = ast
        .filters
        .iter()
        .map(|f| {
            let value = RdfTerm::from_constant(&f.value)
                .ok_or_else(|| QueryError::MissingParam(f.value.param().unwrap_or("?").to_string()))?;
            Ok((var_ids[f.var.as_str()], f.op, value))
        })
        .collect::<Result<_, QueryError>>()?;

    let passes = |b: &Binding| {
        filters.iter().all(|(slot, op, value)| match &b[*slot] {
            None => true,
            Some(bound) => match op {
                FilterOp::Eq => bound == value,
                FilterOp::Ne => bound != value,
            },
        })
    };

    let mut bindings: Vec<Binding> = vec![vec![None; var_ids.len()]];
    let mut bound: BTreeSet<usize> = BTreeSet::new();
    let mut remaining: Vec<&Compiled> = compiled.iter().collect();
    while !remaining.is_empty() {
        // most-constrained pattern first
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(i, c)| {
                let fixed = (0..3)
                    .filter(|k| c.constants[*k].is_some() || c.slots[*k].is_some_and(|s| bound.contains(&s)))
                    .count();
                (fixed, std::cmp::Reverse(*i))
            })
            .expect("non-empty");
        let step = remaining.remove(idx);
        let mut next = Vec::new();
        for b in &bindings {
            let resolved: Vec<Option<&RdfTerm>> = (0..3)
                .map(|k| step.constants[k].as_ref().or_else(|| step.slots[k].and_then(|s| b[s].as_ref())))
                .collect();
            let candidates: Box<dyn Iterator<Item = &Triple>> = match resolved[1] {
                Some(p) => Box::new(
                    by_property
                        .get(p)
                        .into_iter()
                        .flatten()
                        .map(|&i| &triples[i]),
                ),
                None => Box::new(triples.iter()),
            };
            'triples: for t in candidates {
                let parts = [&t.0, &t.1, &t.2];
                let mut extended = b.clone();
                for k in 0..3 {
                    if let Some(r) = resolved[k] {
                        if r != parts[k] {
                            continue 'triples;
                        }
                    } else if let Some(slot) = step.slots[k] {
                        match &extended[slot] {
                            // same variable twice in one pattern
                            Some(existing) if existing != parts[k] => continue 'triples,
                            Some(_) => {}
                            None => extended[slot] = Some(parts[k].clone()),
                        }
                    }
                }
                if passes(&extended) {
                    next.push(extended);
                    if next.len() > options.row_limit.saturating_mul(10) {
                        return Err(QueryError::RowLimitExceeded(options.row_limit));
                    }
                }
            }
        }
        bound.extend(step.slots.iter().flatten().copied());
        bindings = next;
    }

    let projection: Vec<usize> = ast.select_vars.iter().map(|v| var_ids[v.as_str()]).collect();
    let table = ResultTable::from_rows(
        ast.select_vars.clone(),
        bindings.into_iter().map(|b| {
            projection
                .iter()
                .map(|&s| b[s].clone().expect("select vars are bound by patterns"))
                .collect()
        }),
    );
    if table.rows.len() > options.row_limit {
        return Err(QueryError::RowLimitExceeded(options.row_limit));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{ClassDef, Individual, PropertyDef, THING};
    use crate::query::parse_query;

    fn kb() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.define_class(ClassDef::new("Ship", "Ship", [THING])).unwrap();
        kb.define_class(ClassDef::new("Ferry", "Ferry", ["Ship"])).unwrap();
        kb.define_property(PropertyDef::object("near", THING)).unwrap();
        kb.define_property(PropertyDef::object("farFrom", THING).inverse_of("near")).unwrap();
        kb.assert_individual(Individual::new("p", ["Passenger"], ["Ship"])).unwrap();
        kb.assert_individual(Individual::new("f", ["ferry"], ["Ferry"])).unwrap();
        kb.assert_individual(Individual::new("x", ["x"], [THING])).unwrap();
        kb.set_property_value("p", "near", Value::individual("x")).unwrap();
        kb
    }

    #[test]
    fn type_query_uses_isa_closure() {
        let table = evaluate(&parse_query("SELECT ?s WHERE { ?s a :Ship }").unwrap(), &kb()).unwrap();
        assert_eq!(table.columns, ["s"]);
        assert_eq!(table.rows, [[RdfTerm::iri("f")], [RdfTerm::iri("p")]]);
    }

    #[test]
    fn empty_kb_gives_empty_table() {
        let table = evaluate(
            &parse_query("SELECT ?s WHERE { ?s a :Ship }").unwrap(),
            &KnowledgeBase::new(),
        )
        .unwrap();
        assert!(table.is_empty());
    }

    #[test]
    fn inverse_view_and_filters() {
        let kb = kb();
        let t = evaluate(&parse_query("SELECT ?a ?b WHERE { ?a :farFrom ?b }").unwrap(), &kb).unwrap();
        assert_eq!(t.rows, [[RdfTerm::iri("x"), RdfTerm::iri("p")]]);
        let t = evaluate(
            &parse_query("SELECT ?s WHERE { ?s a :Thing FILTER(?s != :x) }").unwrap(),
            &kb,
        )
        .unwrap();
        assert_eq!(t.rows.len(), 2);
        let t = evaluate(
            &parse_query("SELECT ?l WHERE { :p rdfs:label ?l }").unwrap(),
            &kb,
        )
        .unwrap();
        assert_eq!(t.rows, [[RdfTerm::literal(&Literal::string("Passenger"))]]);
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let t = evaluate(&parse_query("SELECT ?a WHERE { ?a ?p ?a }").unwrap(), &kb()).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn row_limit() {
        let err = evaluate_with(
            &parse_query("SELECT ?s ?p ?o WHERE { ?s ?p ?o }").unwrap(),
            &kb(),
            EvalOptions { row_limit: 2 },
        )
        .unwrap_err();
        assert_eq!(err, QueryError::RowLimitExceeded(2));
    }
}
