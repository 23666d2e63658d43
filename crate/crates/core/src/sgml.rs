//! Conversion between inline SGML markup and standoff annotations.
//!
//! Supported subset: explicit open and close tags, attributes with quoted
//! values, and the entities `&amp;`, `&lt;`, `&gt;` (plus `&quot;` inside
//! attribute values). No DTDs, comments, processing instructions, CDATA or
//! tag omission.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use crate::annotation::{Annotation, Attributes};
use crate::document::Document;
use crate::selector::AnnotationSelector;
use crate::span::Span;

pub const IMPORT_PRODUCER: &str = "sgml-import-1.0";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SgmlError {
    #[error("malformed SGML at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: &'static str },
    #[error("annotations {0} and {1} partially overlap and cannot be nested as tags")]
    OverlapNotRepresentable(u64, u64),
    #[error("annotation {0} has more than one span")]
    MultiSpanNotRepresentable(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    Open,
    Close,
}

/// One tag in the markup stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgmlElementEvent {
    pub tag_name: String,
    pub attributes: Vec<(String, String)>,
    pub kind: TagKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SgmlEvent {
    /// Character data with entities decoded.
    Text(Vec<u8>),
    Tag(SgmlElementEvent),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportResult {
    pub text: Vec<u8>,
    /// One single-span annotation per element, ids 1.. in open-tag order.
    pub annotations: Vec<Annotation>,
}

impl ImportResult {
    /// Builds a document holding the stripped text and the element
    /// annotations, recording `(sgml-import-1.0, sgml)` as provenance.
    pub fn into_document(self, doc_id: &str, attributes: Attributes) -> Result<Document, crate::DocError> {
        let mut doc = Document::new(doc_id, self.text, attributes)?;
        for ann in self.annotations {
            doc.add_annotation(&ann.type_name, ann.spans, ann.attributes, &ann.producer)?;
        }
        doc.record_result(IMPORT_PRODUCER, "sgml");
        Ok(doc)
    }
}

fn malformed(offset: usize, reason: &'static str) -> SgmlError {
    SgmlError::Malformed { offset, reason }
}

fn is_name_start(b: u8) -> bool {
    b.is_ascii_alphabetic()
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b':')
}

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn name(&mut self) -> Result<String, SgmlError> {
        let start = self.pos;
        if !self.peek().is_some_and(is_name_start) {
            return Err(malformed(start, "expected a name"));
        }
        while self.peek().is_some_and(is_name_byte) {
            self.pos += 1;
        }
        // name bytes are ASCII
        Ok(String::from_utf8_lossy(&self.input[start..self.pos]).into_owned())
    }

    fn entity(&mut self, in_attribute: bool) -> Result<u8, SgmlError> {
        let at = self.pos;
        let rest = &self.input[at..];
        for (ent, byte) in [(&b"&amp;"[..], b'&'), (b"&lt;", b'<'), (b"&gt;", b'>'), (b"&quot;", b'"')] {
            if rest.starts_with(ent) && (in_attribute || byte != b'"') {
                self.pos += ent.len();
                return Ok(byte);
            }
        }
        Err(malformed(at, "unsupported entity"))
    }

    fn tag(&mut self) -> Result<SgmlElementEvent, SgmlError> {
        let open = self.pos;
        self.pos += 1;
        let kind = if self.peek() == Some(b'/') {
            self.pos += 1;
            TagKind::Close
        } else {
            TagKind::Open
        };
        let tag_name = self.name()?;
        let mut attributes: Vec<(String, String)> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'>') => {
                    self.pos += 1;
                    break;
                }
                None => return Err(malformed(open, "unterminated tag")),
                Some(_) if kind == TagKind::Close => {
                    return Err(malformed(self.pos, "attributes on a close tag"))
                }
                Some(_) => {
                    let key_at = self.pos;
                    let key = self.name()?;
                    self.skip_ws();
                    if self.peek() != Some(b'=') {
                        return Err(malformed(self.pos, "expected '=' after attribute name"));
                    }
                    self.pos += 1;
                    self.skip_ws();
                    let quote = match self.peek() {
                        Some(q @ (b'"' | b'\'')) => q,
                        _ => return Err(malformed(self.pos, "attribute value must be quoted")),
                    };
                    self.pos += 1;
                    let mut value = Vec::new();
                    loop {
                        match self.peek() {
                            None => return Err(malformed(key_at, "unterminated attribute value")),
                            Some(b) if b == quote => {
                                self.pos += 1;
                                break;
                            }
                            Some(b'&') => value.push(self.entity(true)?),
                            Some(b) => {
                                value.push(b);
                                self.pos += 1;
                            }
                        }
                    }
                    let value = String::from_utf8(value)
                        .map_err(|_| malformed(key_at, "attribute value is not UTF-8"))?;
                    if attributes.iter().any(|(k, _)| *k == key) {
                        return Err(malformed(key_at, "duplicate attribute"));
                    }
                    attributes.push((key, value));
                }
            }
        }
        Ok(SgmlElementEvent {
            tag_name,
            attributes,
            kind,
        })
    }
}

/// Splits markup into tags and decoded character data, each paired with
/// its byte offset in the input.
pub fn events(input: &[u8]) -> Result<Vec<(usize, SgmlEvent)>, SgmlError> {
    let mut lx = Lexer { input, pos: 0 };
    let mut out = Vec::new();
    let mut text = Vec::new();
    let mut text_at = 0;
    while let Some(b) = lx.peek() {
        match b {
            b'<' => {
                if !text.is_empty() {
                    out.push((text_at, SgmlEvent::Text(core::mem::take(&mut text))));
                }
                let at = lx.pos;
                let tag = lx.tag()?;
                out.push((at, SgmlEvent::Tag(tag)));
                text_at = lx.pos;
            }
            b'&' => text.push(lx.entity(false)?),
            _ => {
                text.push(b);
                lx.pos += 1;
            }
        }
    }
    if !text.is_empty() {
        out.push((text_at, SgmlEvent::Text(text)));
    }
    Ok(out)
}

/// Strips markup, producing the text and one annotation per element.
pub fn sgml_import(input: &[u8]) -> Result<ImportResult, SgmlError> {
    let mut text = Vec::with_capacity(input.len());
    let mut annotations: Vec<Annotation> = Vec::new();
    // (annotation index, lowercased name, tag offset)
    let mut open: Vec<(usize, String, usize)> = Vec::new();
    for (at, ev) in events(input)? {
        match ev {
            SgmlEvent::Text(bytes) => text.extend_from_slice(&bytes),
            SgmlEvent::Tag(tag) => {
                let name = tag.tag_name.to_ascii_lowercase();
                match tag.kind {
                    TagKind::Open => {
                        let id = annotations.len() as u64 + 1;
                        annotations.push(Annotation {
                            id,
                            type_name: name.clone(),
                            spans: alloc::vec![Span::new(text.len(), text.len())],
                            attributes: tag.attributes.into_iter().collect(),
                            producer: IMPORT_PRODUCER.to_owned(),
                        });
                        open.push((annotations.len() - 1, name, at));
                    }
                    TagKind::Close => match open.pop() {
                        Some((idx, open_name, _)) if open_name == name => {
                            annotations[idx].spans[0].end = text.len();
                        }
                        Some(_) => return Err(malformed(at, "close tag does not match innermost open tag")),
                        None => return Err(malformed(at, "close tag without open tag")),
                    },
                }
            }
        }
    }
    if let Some((_, _, at)) = open.pop() {
        return Err(malformed(at, "unclosed tag"));
    }
    Ok(ImportResult { text, annotations })
}

fn push_escaped(out: &mut Vec<u8>, bytes: &[u8], in_attribute: bool) {
    for &b in bytes {
        match b {
            b'&' => out.extend_from_slice(b"&amp;"),
            b'<' => out.extend_from_slice(b"&lt;"),
            b'>' => out.extend_from_slice(b"&gt;"),
            b'"' if in_attribute => out.extend_from_slice(b"&quot;"),
            _ => out.push(b),
        }
    }
}

fn push_open(out: &mut Vec<u8>, ann: &Annotation) {
    out.push(b'<');
    out.extend(ann.type_name.bytes().map(|b| b.to_ascii_uppercase()));
    for (k, v) in &ann.attributes {
        out.push(b' ');
        out.extend_from_slice(k.as_bytes());
        out.extend_from_slice(b"=\"");
        push_escaped(out, v.as_bytes(), true);
        out.push(b'"');
    }
    out.push(b'>');
}

fn push_close(out: &mut Vec<u8>, ann: &Annotation) {
    out.extend_from_slice(b"</");
    out.extend(ann.type_name.bytes().map(|b| b.to_ascii_uppercase()));
    out.push(b'>');
}

/// Orders annotations for tag emission: by start, longer spans first, then
/// ascending id (lower ids are outer when spans coincide). Fails when the
/// spans cannot be nested.
fn nesting_order<'a>(anns: &[&'a Annotation]) -> Result<Vec<(&'a Annotation, Span)>, SgmlError> {
    let mut items = Vec::with_capacity(anns.len());
    for ann in anns {
        let span = ann
            .single_span()
            .ok_or(SgmlError::MultiSpanNotRepresentable(ann.id))?;
        items.push((*ann, span));
    }
    items.sort_by(|(a, sa), (b, sb)| {
        sa.start
            .cmp(&sb.start)
            .then(sb.end.cmp(&sa.end))
            .then(a.id.cmp(&b.id))
    });
    Ok(items)
}

/// Re-inlines annotations over `content` as SGML tags.
pub fn export_annotations(content: &[u8], anns: &[&Annotation]) -> Result<Vec<u8>, SgmlError> {
    let items = nesting_order(anns)?;
    let mut out = Vec::with_capacity(content.len() + items.len() * 16);
    let mut cursor = 0;
    let mut stack: Vec<(&Annotation, Span)> = Vec::new();
    for (ann, span) in items {
        while let Some(&(top, top_span)) = stack.last() {
            if top_span.contains(&span) {
                break;
            }
            if top_span.end > span.start {
                return Err(SgmlError::OverlapNotRepresentable(top.id, ann.id));
            }
            push_escaped(&mut out, &content[cursor..top_span.end], false);
            cursor = top_span.end;
            push_close(&mut out, top);
            stack.pop();
        }
        push_escaped(&mut out, &content[cursor..span.start], false);
        cursor = span.start;
        push_open(&mut out, ann);
        stack.push((ann, span));
    }
    while let Some((top, top_span)) = stack.pop() {
        push_escaped(&mut out, &content[cursor..top_span.end], false);
        cursor = top_span.end;
        push_close(&mut out, top);
    }
    push_escaped(&mut out, &content[cursor..], false);
    Ok(out)
}

/// Exports the document content with the selected annotations inlined.
pub fn sgml_export(doc: &Document, sel: &AnnotationSelector) -> Result<Vec<u8>, SgmlError> {
    let anns = doc.get_annotations(sel);
    export_annotations(doc.content(), &anns)
}
