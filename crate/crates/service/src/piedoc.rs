//! The `<piechart>` XML document: an ordered list of `<slice>` elements,
//! each with one `<name>` and one `<percent>`.

use fsn_core::nav::{model_from_slices, PieModel};
use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "details")]
pub enum PieDocError {
    #[error("line {line}: {reason}")]
    MalformedDocument { line: usize, reason: String },
    #[error("line {line}: bad percent `{value}`")]
    BadPercent { line: usize, value: String },
}

impl PieDocError {
    pub fn code(&self) -> &'static str {
        match self {
            PieDocError::MalformedDocument { .. } => "MalformedDocument",
            PieDocError::BadPercent { .. } => "BadPercent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub name: String,
    /// In (0, 100], with at most two fraction digits.
    pub percent: f64,
    pub iri: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PieDocument {
    pub slices: Vec<Slice>,
}

impl PieDocument {
    /// The top level of `model`; percents are rounded to hundredths.
    pub fn from_model(model: &PieModel) -> Self {
        let slices = model
            .root
            .children
            .iter()
            .map(|s| Slice {
                name: s.label.clone(),
                percent: (s.percent * 100.0).round() / 100.0,
                iri: s.source_iri.clone(),
            })
            .collect();
        Self { slices }
    }

    pub fn to_model(&self, revision: u64) -> PieModel {
        model_from_slices(
            self.slices.iter().map(|s| (s.name.as_str(), s.percent, s.iri.as_deref())),
            revision,
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        if self.slices.is_empty() {
            return b"<piechart/>\n".to_vec();
        }
        let mut out = String::from("<piechart>\n");
        for s in &self.slices {
            match &s.iri {
                Some(iri) => out.push_str(&format!("  <slice iri=\"{}\">\n", escape(iri.as_str()))),
                None => out.push_str("  <slice>\n"),
            }
            out.push_str(&format!("    <name>{}</name>\n", escape(s.name.as_str())));
            out.push_str(&format!("    <percent>{:.2}</percent>\n", s.percent));
            out.push_str("  </slice>\n");
        }
        out.push_str("</piechart>\n");
        out.into_bytes()
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, PieDocError> {
        let text = std::str::from_utf8(bytes).map_err(|e| PieDocError::MalformedDocument {
            line: line_at(bytes, e.valid_up_to()),
            reason: "not UTF-8".into(),
        })?;
        Parser::new(text).document()
    }
}

pub fn export_pie_document(model: &PieModel) -> Vec<u8> {
    PieDocument::from_model(model).to_bytes()
}

pub fn import_pie_document(bytes: &[u8]) -> Result<PieDocument, PieDocError> {
    PieDocument::parse(bytes)
}

fn line_at(bytes: &[u8], offset: usize) -> usize {
    1 + bytes[..offset.min(bytes.len())].iter().filter(|&&b| b == b'\n').count()
}

/// `d+` or `d+.d` or `d+.dd`, in (0, 100].
fn parse_percent(raw: &str) -> Option<f64> {
    let (int, frac) = raw.split_once('.').unwrap_or((raw, ""));
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() || int.len() > 3 || !digits(int) || !digits(frac) || frac.len() > 2 {
        return None;
    }
    if raw.contains('.') && frac.is_empty() {
        return None;
    }
    let hundredths = int.parse::<u32>().ok()? * 100 + format!("{frac:0<2}").parse::<u32>().ok()?;
    (1..=10_000).contains(&hundredths).then(|| hundredths as f64 / 100.0)
}

enum Item {
    Open(String, Vec<(String, String)>),
    Leaf(String, Vec<(String, String)>),
    Close(String),
    Text(String),
    End,
}

struct Parser<'a> {
    reader: Reader<&'a [u8]>,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let mut reader = Reader::from_str(text);
        reader.config_mut().trim_text(true);
        Self { reader, text }
    }

    fn line(&self) -> usize {
        line_at(self.text.as_bytes(), self.reader.buffer_position() as usize)
    }

    fn malformed(&self, reason: impl Into<String>) -> PieDocError {
        PieDocError::MalformedDocument {
            line: self.line(),
            reason: reason.into(),
        }
    }

    fn attrs(&self, e: &BytesStart) -> Result<Vec<(String, String)>, PieDocError> {
        let mut out = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|err| self.malformed(err.to_string()))?;
            let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
            let value = a.unescape_value().map_err(|err| self.malformed(err.to_string()))?;
            out.push((key, value.into_owned()));
        }
        Ok(out)
    }

    fn next(&mut self) -> Result<Item, PieDocError> {
        loop {
            let event = match self.reader.read_event() {
                Ok(e) => e,
                Err(err) => {
                    return Err(PieDocError::MalformedDocument {
                        line: line_at(self.text.as_bytes(), self.reader.error_position() as usize),
                        reason: err.to_string(),
                    })
                }
            };
            let name = |raw: &[u8]| String::from_utf8_lossy(raw).into_owned();
            return Ok(match event {
                Event::Start(e) => Item::Open(name(e.name().as_ref()), self.attrs(&e)?),
                Event::Empty(e) => Item::Leaf(name(e.name().as_ref()), self.attrs(&e)?),
                Event::End(e) => Item::Close(name(e.name().as_ref())),
                Event::Text(t) => Item::Text(t.unescape().map_err(|err| self.malformed(err.to_string()))?.into_owned()),
                Event::CData(c) => Item::Text(String::from_utf8_lossy(&c).into_owned()),
                Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => continue,
                Event::Eof => Item::End,
            });
        }
    }

    fn no_attrs(&self, element: &str, attrs: &[(String, String)]) -> Result<(), PieDocError> {
        match attrs.first() {
            Some((k, _)) => Err(self.malformed(format!("unexpected attribute `{k}` on <{element}>"))),
            None => Ok(()),
        }
    }

    fn document(mut self) -> Result<PieDocument, PieDocError> {
        let mut doc = PieDocument::default();
        match self.next()? {
            Item::Leaf(n, a) if n == "piechart" => self.no_attrs(&n, &a)?,
            Item::Open(n, a) if n == "piechart" => {
                self.no_attrs(&n, &a)?;
                loop {
                    match self.next()? {
                        Item::Open(n, a) if n == "slice" => doc.slices.push(self.slice(a)?),
                        Item::Close(n) if n == "piechart" => break,
                        Item::End => return Err(self.malformed("unclosed <piechart>")),
                        _ => return Err(self.malformed("expected <slice> or </piechart>")),
                    }
                }
            }
            Item::End => return Err(self.malformed("empty document")),
            _ => return Err(self.malformed("root element must be <piechart>")),
        }
        match self.next()? {
            Item::End => Ok(doc),
            _ => Err(self.malformed("content after </piechart>")),
        }
    }

    fn slice(&mut self, attrs: Vec<(String, String)>) -> Result<Slice, PieDocError> {
        let mut iri = None;
        for (k, v) in attrs {
            match k.as_str() {
                "iri" if !v.is_empty() => iri = Some(v),
                "iri" => return Err(self.malformed("empty iri attribute")),
                _ => return Err(self.malformed(format!("unexpected attribute `{k}` on <slice>"))),
            }
        }
        let mut name = None;
        let mut percent = None;
        loop {
            match self.next()? {
                Item::Open(n, a) if n == "name" || n == "percent" => {
                    self.no_attrs(&n, &a)?;
                    let line = self.line();
                    let text = self.leaf_text(&n)?;
                    let slot = if n == "name" { &mut name } else { &mut percent };
                    if slot.replace((line, text)).is_some() {
                        return Err(self.malformed(format!("more than one <{n}> in <slice>")));
                    }
                }
                Item::Leaf(n, _) if n == "name" || n == "percent" => {
                    return Err(self.malformed(format!("empty <{n}>")));
                }
                Item::Close(n) if n == "slice" => break,
                _ => return Err(self.malformed("expected <name>, <percent> or </slice>")),
            }
        }
        let (_, name) = name.ok_or_else(|| self.malformed("<slice> without <name>"))?;
        let (line, raw) = percent.ok_or_else(|| self.malformed("<slice> without <percent>"))?;
        let percent = parse_percent(raw.trim()).ok_or(PieDocError::BadPercent { line, value: raw })?;
        Ok(Slice { name, percent, iri })
    }

    fn leaf_text(&mut self, element: &str) -> Result<String, PieDocError> {
        let text = match self.next()? {
            Item::Text(t) => t,
            Item::Close(n) if n == element => return Err(self.malformed(format!("empty <{element}>"))),
            _ => return Err(self.malformed(format!("<{element}> must hold text only"))),
        };
        match self.next()? {
            Item::Close(n) if n == element => Ok(text),
            _ => Err(self.malformed(format!("<{element}> must hold text only"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "<piechart>\n  <slice>\n    <name>sinking</name>\n    <percent>60.00</percent>\n  </slice>\n  <slice>\n    <name>passenger</name>\n    <percent>40.00</percent>\n  </slice>\n</piechart>\n";

    #[test]
    fn two_slices() {
        let doc = import_pie_document(TWO.as_bytes()).unwrap();
        let got: Vec<(&str, f64)> = doc.slices.iter().map(|s| (s.name.as_str(), s.percent)).collect();
        assert_eq!(got, [("sinking", 60.0), ("passenger", 40.0)]);
        assert_eq!(doc.to_bytes(), TWO.as_bytes());
    }

    #[test]
    fn empty_chart() {
        assert!(import_pie_document(b"<piechart/>").unwrap().slices.is_empty());
        assert!(import_pie_document(b"<?xml version=\"1.0\"?>\n<piechart></piechart>").unwrap().slices.is_empty());
        assert_eq!(PieDocument::default().to_bytes(), b"<piechart/>\n");
    }

    #[test]
    fn percents() {
        for ok in ["1", "0.01", "99.5", "100", "100.00", " 7.25 "] {
            assert!(parse_percent(ok.trim()).is_some(), "{ok}");
        }
        for bad in ["0", "0.00", "120", "100.01", "1.234", "-3", "1e2", "abc", "", ".5", "5."] {
            assert!(parse_percent(bad).is_none(), "{bad}");
        }
        let doc = "<piechart>\n<slice><name>a</name><percent>120</percent></slice></piechart>";
        assert_eq!(
            import_pie_document(doc.as_bytes()),
            Err(PieDocError::BadPercent { line: 2, value: "120".into() })
        );
    }

    #[test]
    fn malformed_documents() {
        let cases = [
            "",
            "<chart/>",
            "<piechart>",
            "<piechart><slice><name>a</name></slice></piechart>",
            "<piechart><slice><percent>5</percent></slice></piechart>",
            "<piechart><slice><name>a</name><name>b</name><percent>5</percent></slice></piechart>",
            "<piechart><slice><name>a</name><percent>5</percent><colour/></slice></piechart>",
            "<piechart><slice><name><b>a</b></name><percent>5</percent></slice></piechart>",
            "<piechart><slice x=\"1\"><name>a</name><percent>5</percent></slice></piechart>",
            "<piechart/><piechart/>",
            "<piechart><slice><name>a</name><percent>5</percent></slice>",
        ];
        for c in cases {
            assert!(
                matches!(import_pie_document(c.as_bytes()), Err(PieDocError::MalformedDocument { .. })),
                "{c:?}"
            );
        }
        let err = import_pie_document(b"<piechart>\n<slice>\n<bogus/>\n</slice></piechart>").unwrap_err();
        assert!(matches!(err, PieDocError::MalformedDocument { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn escaping_and_iri_round_trip() {
        let doc = PieDocument {
            slices: vec![
                Slice { name: "a & <b>".into(), percent: 33.33, iri: Some("x\"y".into()) },
                Slice { name: "c".into(), percent: 66.67, iri: None },
            ],
        };
        assert_eq!(import_pie_document(&doc.to_bytes()).unwrap(), doc);
        let model = doc.to_model(4);
        assert_eq!(PieDocument::from_model(&model), doc);
    }
}
