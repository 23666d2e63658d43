//! Line formats of the collection directory and the module protocol.
//!
//! ```text
//! manifest.gate   gate-collection 1 / name=<n> / doc=<id>... / attr.<k>=<v>...
//! <doc>.attrs     <key>=<value>
//! <doc>.prov      <producer>\t<label>
//! <doc>.ann       <id>\t<type>\t<producer>\t<s>:<e>[,<s>:<e>...]\t<k>=<v>[;<k>=<v>...]
//! <doc>.meta      next_id=<n>
//! ```

use std::fmt::Write as _;

use gate_core::{Annotation, Attributes, Document, ProvenanceIndex, Span};

use crate::escape::{escape, unescape};

pub const MANIFEST_HEADER: &str = "gate-collection 1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct FormatError {
    pub line: usize,
    pub reason: String,
}

fn bad(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError {
        line,
        reason: reason.into(),
    }
}

fn unesc(s: &str, line: usize) -> Result<String, FormatError> {
    unescape(s).map(|c| c.into_owned()).map_err(|r| bad(line, r))
}

/// Named group of documents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CollectionManifest {
    pub name: String,
    pub doc_ids: Vec<String>,
    pub attributes: Attributes,
}

pub fn write_manifest(m: &CollectionManifest) -> String {
    let mut out = format!("{MANIFEST_HEADER}\nname={}\n", escape(&m.name));
    for id in &m.doc_ids {
        let _ = writeln!(out, "doc={}", escape(id));
    }
    for (k, v) in &m.attributes {
        let _ = writeln!(out, "attr.{}={}", escape(k), escape(v));
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<CollectionManifest, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, MANIFEST_HEADER)) => {}
        _ => return Err(bad(1, format!("expected {MANIFEST_HEADER:?}"))),
    }
    let name = match lines.next() {
        Some((n, l)) => unesc(l.strip_prefix("name=").ok_or_else(|| bad(n, "expected name="))?, n)?,
        None => return Err(bad(2, "missing name line")),
    };
    let mut m = CollectionManifest {
        name,
        ..Default::default()
    };
    for (n, line) in lines {
        if let Some(id) = line.strip_prefix("doc=") {
            let id = unesc(id, n)?;
            if m.doc_ids.contains(&id) {
                return Err(bad(n, format!("duplicate document {id:?}")));
            }
            m.doc_ids.push(id);
        } else if let Some(kv) = line.strip_prefix("attr.") {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(n, "expected attr.<key>=<value>"))?;
            m.attributes.insert(unesc(k, n)?, unesc(v, n)?);
        } else {
            return Err(bad(n, "unrecognised manifest line"));
        }
    }
    Ok(m)
}

pub fn write_attrs(attrs: &Attributes) -> String {
    let mut out = String::new();
    for (k, v) in attrs {
        let _ = writeln!(out, "{}={}", escape(k), escape(v));
    }
    out
}

pub fn parse_attrs(text: &str) -> Result<Attributes, FormatError> {
    let mut out = Attributes::new();
    for (i, line) in text.lines().enumerate() {
        let (k, v) = line.split_once('=').ok_or_else(|| bad(i + 1, "expected <key>=<value>"))?;
        out.insert(unesc(k, i + 1)?, unesc(v, i + 1)?);
    }
    Ok(out)
}

pub fn write_prov(prov: &ProvenanceIndex) -> String {
    let mut out = String::new();
    for (p, l) in prov.iter() {
        let _ = writeln!(out, "{}\t{}", escape(p), escape(l));
    }
    out
}

pub fn parse_prov(text: &str) -> Result<ProvenanceIndex, FormatError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let (p, l) = line
                .split_once('\t')
                .ok_or_else(|| bad(i + 1, "expected <producer>\\t<label>"))?;
            Ok((unesc(p, i + 1)?, unesc(l, i + 1)?))
        })
        .collect()
}

fn write_attr_field(out: &mut String, attrs: &Attributes) {
    for (i, (k, v)) in attrs.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        let _ = write!(out, "{}={}", escape(k), escape(v));
    }
}

/// `k=v;k=v`, empty string for no attributes.
pub fn parse_attr_field(field: &str, line: usize) -> Result<Attributes, FormatError> {
    let mut attrs = Attributes::new();
    if field.is_empty() {
        return Ok(attrs);
    }
    for pair in field.split(';') {
        let (k, v) = pair.split_once('=').ok_or_else(|| bad(line, "expected <key>=<value>"))?;
        let k = unesc(k, line)?;
        if attrs.contains_key(&k) {
            return Err(bad(line, format!("duplicate attribute {k:?}")));
        }
        attrs.insert(k, unesc(v, line)?);
    }
    Ok(attrs)
}

pub fn write_ann_line(out: &mut String, id: u64, ann: &Annotation) {
    let _ = write!(out, "{id}\t{}\t{}\t", escape(&ann.type_name), escape(&ann.producer));
    for (i, s) in ann.spans.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:{}", s.start, s.end);
    }
    out.push('\t');
    write_attr_field(out, &ann.attributes);
    out.push('\n');
}

/// All annotations of `doc` in id order.
pub fn write_anns(doc: &Document) -> String {
    let mut out = String::new();
    for ann in doc.annotations() {
        write_ann_line(&mut out, ann.id, ann);
    }
    out
}

pub fn parse_spans(field: &str, line: usize) -> Result<Vec<Span>, FormatError> {
    field
        .split(',')
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| bad(line, "expected <start>:<end>"))?;
            let num = |x: &str| x.parse::<usize>().map_err(|_| bad(line, format!("bad offset {x:?}")));
            Ok(Span::new(num(a)?, num(b)?))
        })
        .collect()
}

pub fn parse_ann_line(line: &str, n: usize) -> Result<Annotation, FormatError> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [id, ty, producer, spans, attrs] = fields[..] else {
        return Err(bad(n, format!("expected 5 tab-separated fields, found {}", fields.len())));
    };
    Ok(Annotation {
        id: id.parse().map_err(|_| bad(n, format!("bad id {id:?}")))?,
        type_name: unesc(ty, n)?,
        producer: unesc(producer, n)?,
        spans: parse_spans(spans, n)?,
        attributes: parse_attr_field(attrs, n)?,
    })
}

pub fn parse_anns(text: &str) -> Result<Vec<Annotation>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| parse_ann_line(l, i + 1))
        .collect()
}

pub fn write_meta(doc: &Document) -> String {
    format!("next_id={}\n", doc.next_id())
}

pub fn parse_meta(text: &str) -> Result<u64, FormatError> {
    let line = text.lines().next().unwrap_or_default();
    line.strip_prefix("next_id=")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| bad(1, "expected next_id=<n>"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ann_line_layout() {
        let mut doc = Document::new("d", &b"Sarah savored"[..], Attributes::new()).unwrap();
        let mut attrs = Attributes::new();
        attrs.insert("pos".into(), "NP".into());
        attrs.insert("note".into(), "a=b;c".into());
        doc.add_annotation("token", vec![Span::new(0, 5)], attrs, "tokenizer-0.1")
            .unwrap();
        doc.add_annotation("pair", vec![Span::new(0, 5), Span::new(6, 13)], Attributes::new(), "m-1")
            .unwrap();
        let text = write_anns(&doc);
        assert_eq!(
            text,
            "1\ttoken\ttokenizer-0.1\t0:5\tnote=a%3Db%3Bc;pos=NP\n2\tpair\tm-1\t0:5,6:13\t\n"
        );
        let back = parse_anns(&text).unwrap();
        let orig: Vec<Annotation> = doc.annotations().cloned().collect();
        assert_eq!(back, orig);
    }

    #[test]
    fn manifest_errors_carry_line() {
        let ok = "gate-collection 1\nname=muc6\ndoc=sarah\nattr.k=v\n";
        let m = parse_manifest(ok).unwrap();
        assert_eq!(m.doc_ids, ["sarah"]);
        assert_eq!(write_manifest(&m), ok);
        assert_eq!(parse_manifest("gate-collection 2\n").unwrap_err().line, 1);
        assert_eq!(parse_manifest("gate-collection 1\nname=x\nbogus\n").unwrap_err().line, 3);
        assert_eq!(parse_manifest("gate-collection 1\nname=x\ndoc=a\ndoc=a\n").unwrap_err().line, 4);
    }

    #[test]
    fn bad_ann_lines() {
        assert!(parse_ann_line("1\ttoken\tt-1\t0:5", 1).is_err());
        assert!(parse_ann_line("x\ttoken\tt-1\t0:5\t", 1).is_err());
        assert!(parse_ann_line("1\ttoken\tt-1\t0-5\t", 1).is_err());
        assert!(parse_ann_line("1\ttoken\tt-1\t0:5\tk", 1).is_err());
        assert!(parse_ann_line("1\ttoken\tt-1\t0:5\tk=1;k=2", 1).is_err());
    }
}
