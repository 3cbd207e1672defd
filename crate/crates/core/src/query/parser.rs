//! Recursive-descent parser for the supported query subset:
//!
//! ```text
//! query   := SELECT DISTINCT? var+ WHERE '{' (triple | filter)* '}'
//! triple  := term term term '.'?
//! filter  := FILTER '(' var ('=' | '!=') constant ')' '.'?
//! term    := var | 'a' | <iri> | prefix:local | literal
//! ```
//!
//! Prefixes are supplied by the caller. Recognised SPARQL constructs outside
//! the subset are reported as unsupported rather than as syntax errors.

use std::collections::BTreeMap;

use crate::ontology::{Literal, PrimitiveType};
use crate::query::ast::*;
use crate::query::QueryError;

/// Prefix table used to expand `prefix:local` names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prefixes {
    map: BTreeMap<String, String>,
}

impl Default for Prefixes {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        map.insert(String::new(), String::new());
        map.insert("rdf".into(), RDF_NS.into());
        map.insert("rdfs".into(), RDFS_NS.into());
        map.insert("xsd".into(), XSD_NS.into());
        Self { map }
    }
}

impl Prefixes {
    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.map.get(prefix).map(|ns| format!("{ns}{local}"))
    }
}

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "ORDER", "GROUP", "LIMIT",
    "OFFSET", "HAVING", "PREFIX", "BASE", "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE",
    "REDUCED", "FROM", "NOT", "EXISTS", "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "AS",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Dollar(String),
    IriRef(String),
    PName(String, String),
    Str(String),
    Number(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Eq,
    Ne,
    DataType,
    Other(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == '.' {
                // a trailing dot ends a triple, not a name
                if c == '.' {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if !ahead.next().is_some_and(is_name_char) {
                        break;
                    }
                }
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn err(&self, line: usize, col: usize, expected: &str) -> QueryError {
        QueryError::Syntax {
            line,
            col,
            expected: expected.to_string(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>, QueryError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Token {
                    tok: Tok::Eof,
                    line,
                    col,
                });
                return Ok(out);
            };
            let tok = match c {
                '{' => {
                    self.bump();
                    Tok::LBrace
                }
                '}' => {
                    self.bump();
                    Tok::RBrace
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                '=' => {
                    self.bump();
                    Tok::Eq
                }
                '!' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Tok::Ne
                    } else {
                        Tok::Other('!')
                    }
                }
                '^' => {
                    self.bump();
                    if self.peek() == Some('^') {
                        self.bump();
                        Tok::DataType
                    } else {
                        Tok::Other('^')
                    }
                }
                '?' | '$' => {
                    self.bump();
                    let name = self.name();
                    if name.is_empty() || name.contains('.') {
                        return Err(self.err(line, col + 1, "variable name"));
                    }
                    if c == '?' {
                        Tok::Var(name)
                    } else {
                        Tok::Dollar(name)
                    }
                }
                '<' => {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    let mut iri = String::new();
                    let mut closed = false;
                    for a in ahead {
                        if a == '>' {
                            closed = true;
                            break;
                        }
                        if a.is_whitespace() || "<\"{}|^`\\".contains(a) {
                            break;
                        }
                        iri.push(a);
                    }
                    if closed {
                        for _ in 0..iri.chars().count() + 2 {
                            self.bump();
                        }
                        Tok::IriRef(iri)
                    } else {
                        self.bump();
                        Tok::Other('<')
                    }
                }
                '"' | '\'' => {
                    let quote = c;
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => return Err(self.err(line, col, "closing quote")),
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some('r') => s.push('\r'),
                                Some(e @ ('"' | '\'' | '\\')) => s.push(e),
                                _ => return Err(self.err(self.line, self.col, "escape sequence")),
                            },
                            Some(q) if q == quote => break,
                            Some(other) => s.push(other),
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' => {
                    let mut s = String::new();
                    s.push(c);
                    self.bump();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            s.push(d);
                            self.bump();
                        } else if d == '.' {
                            let mut ahead = self.chars.clone();
                            ahead.next();
                            if ahead.next().is_some_and(|x| x.is_ascii_digit()) && !s.contains('.') {
                                s.push(d);
                                self.bump();
                            } else {
                                break;
                            }
                        } else {
                            break;
                        }
                    }
                    if !s.bytes().any(|b| b.is_ascii_digit()) {
                        Tok::Other(c)
                    } else {
                        Tok::Number(s)
                    }
                }
                c if is_name_start(c) || c == ':' => {
                    let prefix = if c == ':' { String::new() } else { self.name() };
                    if self.peek() == Some(':') {
                        self.bump();
                        let local = self.name();
                        Tok::PName(prefix, local)
                    } else {
                        Tok::Word(prefix)
                    }
                }
                other => {
                    self.bump();
                    Tok::Other(other)
                }
            };
            out.push(Token { tok, line, col });
        }
    }
}

struct Parser<'p> {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: &'p Prefixes,
    allow_params: bool,
}

fn unsupported(feature: &str, t: &Token) -> QueryError {
    QueryError::UnsupportedFeature {
        feature: feature.to_string(),
        line: t.line,
        col: t.col,
    }
}

impl<'p> Parser<'p> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, t: &Token, expected: &str) -> QueryError {
        // name unsupported constructs rather than just failing
        if let Tok::Word(w) = &t.tok {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED_KEYWORDS.contains(&upper.as_str()) {
                return unsupported(&upper, t);
            }
        }
        match &t.tok {
            Tok::Other(';') => unsupported("predicate-object lists (;)", t),
            Tok::Other(',') => unsupported("object lists (,)", t),
            Tok::Other('/' | '|' | '^' | '+') => unsupported("property paths", t),
            Tok::Other('[') | Tok::Other(']') => unsupported("blank nodes", t),
            Tok::Other('_') => unsupported("blank nodes", t),
            Tok::PName(p, _) if p == "_" => unsupported("blank nodes", t),
            _ => QueryError::Syntax {
                line: t.line,
                col: t.col,
                expected: expected.to_string(),
            },
        }
    }

    fn is_word(t: &Token, word: &str) -> bool {
        matches!(&t.tok, Tok::Word(w) if w.eq_ignore_ascii_case(word))
    }

    fn expect_word(&mut self, word: &str) -> Result<(), QueryError> {
        let t = self.next();
        if Self::is_word(&t, word) {
            Ok(())
        } else {
            Err(self.syntax(&t, word))
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), QueryError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.syntax(&t, expected))
        }
    }

    fn query(&mut self) -> Result<QueryAst, QueryError> {
        self.expect_word("SELECT")?;
        if Self::is_word(self.peek(), "DISTINCT") {
            self.next();
        }
        let mut select_vars = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Var(v) | Tok::Dollar(v) if matches!(t.tok, Tok::Var(_)) || !self.allow_params => {
                    self.next();
                    if !select_vars.contains(v) {
                        select_vars.push(v.clone());
                    }
                }
                Tok::Other('*') => return Err(unsupported("SELECT *", &t)),
                Tok::LParen => return Err(unsupported("projection expressions", &t)),
                _ if select_vars.is_empty() => return Err(self.syntax(&t, "variable")),
                _ => break,
            }
        }
        self.expect_word("WHERE")?;
        self.expect(Tok::LBrace, "'{'")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            let t = self.peek().clone();
            if t.tok == Tok::RBrace {
                self.next();
                break;
            }
            if Self::is_word(&t, "FILTER") {
                self.next();
                filters.push(self.filter()?);
            } else if t.tok == Tok::LBrace {
                return Err(unsupported("nested groups", &t));
            } else {
                let subject = self.term("subject")?;
                let property = self.term("property")?;
                let object = self.term("object")?;
                patterns.push(TriplePattern::new(subject, property, object));
            }
            let t = self.peek().clone();
            match t.tok {
                Tok::Dot => {
                    self.next();
                }
                Tok::RBrace => {}
                Tok::Word(ref w) if w.eq_ignore_ascii_case("FILTER") => {}
                _ => return Err(self.syntax(&t, "'.' or '}'")),
            }
        }
        let t = self.next();
        if t.tok != Tok::Eof {
            return Err(self.syntax(&t, "end of query"));
        }
        let ast = QueryAst {
            select_vars,
            patterns,
            filters,
        };
        let bound = ast.pattern_vars();
        if let Some(v) = ast.select_vars.iter().find(|v| !bound.contains(v.as_str())) {
            return Err(QueryError::UnboundSelectVar(v.clone()));
        }
        if let Some(f) = ast.filters.iter().find(|f| !bound.contains(f.var.as_str())) {
            return Err(QueryError::UnboundFilterVar(f.var.clone()));
        }
        Ok(ast)
    }

    fn filter(&mut self) -> Result<Filter, QueryError> {
        self.expect(Tok::LParen, "'('")?;
        let t = self.next();
        let Tok::Var(var) = t.tok else {
            return match t.tok {
                Tok::Word(ref w) if w.chars().all(|c| c.is_ascii_alphabetic()) && !Self::is_word(&t, "true") && !Self::is_word(&t, "false") => {
                    Err(unsupported("FILTER functions", &t))
                }
                _ => Err(self.syntax(&t, "variable")),
            };
        };
        let t = self.next();
        let op = match t.tok {
            Tok::Eq => FilterOp::Eq,
            Tok::Ne => FilterOp::Ne,
            Tok::Other('<' | '>') => return Err(unsupported("FILTER comparisons other than = and !=", &t)),
            _ => return Err(self.syntax(&t, "'=' or '!='")),
        };
        let t = self.peek().clone();
        let value = self.term("constant")?;
        if matches!(value, Term::Var(_)) {
            return Err(unsupported("FILTER between variables", &t));
        }
        if value == Term::Iri(RDF_TYPE.into()) && Self::is_word(&t, "a") {
            return Err(self.syntax(&t, "constant"));
        }
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(Filter { var, op, value }),
            Tok::Other('&') | Tok::Other('|') => Err(unsupported("boolean FILTER expressions", &t)),
            _ => Err(self.syntax(&t, "')'")),
        }
    }

    fn term(&mut self, expected: &str) -> Result<Term, QueryError> {
        let t = self.next();
        match t.tok.clone() {
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Dollar(p) if self.allow_params => Ok(Term::Param(p)),
            Tok::Dollar(v) => Ok(Term::Var(v)),
            Tok::IriRef(iri) => Ok(Term::Iri(iri)),
            Tok::PName(prefix, local) => {
                if prefix == "_" {
                    return Err(unsupported("blank nodes", &t));
                }
                self.prefixes
                    .expand(&prefix, &local)
                    .map(Term::Iri)
                    .ok_or(QueryError::UnknownPrefix {
                        prefix,
                        line: t.line,
                        col: t.col,
                    })
            }
            Tok::Word(w) if w == "a" => Ok(Term::Iri(RDF_TYPE.into())),
            Tok::Word(w) if w == "true" || w == "false" => {
                Ok(Term::Literal(Literal::new(PrimitiveType::Boolean, w).expect("boolean")))
            }
            Tok::Number(n) => {
                let datatype = if n.contains('.') {
                    PrimitiveType::Decimal
                } else {
                    PrimitiveType::Integer
                };
                Literal::new(datatype, n)
                    .map(Term::Literal)
                    .map_err(|_| self.syntax(&t, "number"))
            }
            Tok::Str(s) => {
                if self.peek().tok == Tok::DataType {
                    self.next();
                    let dt = self.next();
                    let iri = match &dt.tok {
                        Tok::IriRef(iri) => iri.clone(),
                        Tok::PName(p, l) => self.prefixes.expand(p, l).ok_or(
                            QueryError::UnknownPrefix {
                                prefix: p.clone(),
                                line: dt.line,
                                col: dt.col,
                            },
                        )?,
                        _ => return Err(self.syntax(&dt, "datatype iri")),
                    };
                    let datatype = iri
                        .strip_prefix(XSD_NS)
                        .and_then(datatype_from_xsd)
                        .ok_or_else(|| unsupported("datatype outside string/integer/decimal/boolean/anyURI", &dt))?;
                    Literal::new(datatype, s)
                        .map(Term::Literal)
                        .map_err(|_| self.syntax(&t, "well-formed literal"))
                } else if let Tok::Other('@') = self.peek().tok {
                    Err(unsupported("language tags", &self.peek().clone()))
                } else {
                    Ok(Term::Literal(Literal::string(s)))
                }
            }
            _ => Err(self.syntax(&t, expected)),
        }
    }
}

fn parse_with(text: &str, prefixes: &Prefixes, allow_params: bool) -> Result<QueryAst, QueryError> {
    let tokens = Lexer::new(text).tokens()?;
    Parser {
        tokens,
        pos: 0,
        prefixes,
        allow_params,
    }
    .query()
}

/// Parses a query with the default prefixes (`:`, `rdf:`, `rdfs:`, `xsd:`).
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    parse_with(text, &Prefixes::default(), false)
}

pub fn parse_query_with(text: &str, prefixes: &Prefixes) -> Result<QueryAst, QueryError> {
    parse_with(text, prefixes, false)
}

/// Parses a template skeleton, where `$name` marks a parameter hole.
pub fn parse_skeleton(text: &str, prefixes: &Prefixes) -> Result<QueryAst, QueryError> {
    parse_with(text, prefixes, true)
}
