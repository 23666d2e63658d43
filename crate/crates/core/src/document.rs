use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::annotation::{valid_producer_id, valid_type_name, Annotation, Attributes};
use crate::provenance::ProvenanceIndex;
use crate::selector::AnnotationSelector;
use crate::span::{spans_well_ordered, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocError {
    #[error("invalid document id {0:?}")]
    InvalidDocId(String),
    #[error("span {span} out of bounds for document of {len} bytes")]
    SpanOutOfBounds { span: Span, len: usize },
    #[error("spans must be non-empty, sorted by start and mutually non-overlapping")]
    MalformedSpans,
    #[error("invalid annotation type name {0:?}")]
    InvalidTypeName(String),
    #[error("invalid producer id {0:?} (expected name-version)")]
    InvalidProducer(String),
    #[error("no annotation with id {0}")]
    NoSuchAnnotation(u64),
    #[error("inconsistent document state: {0}")]
    Inconsistent(&'static str),
}

/// Document ids are non-empty and never contain path separators or NUL.
pub fn valid_doc_id(id: &str) -> bool {
    !id.is_empty() && !id.bytes().any(|b| matches!(b, b'/' | b'\\' | 0))
}

/// A document: immutable content bytes plus its standoff annotation table.
///
/// Annotation ids are allocated from `next_id` and never handed out twice,
/// deletions included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    doc_id: String,
    content: Arc<[u8]>,
    pub attributes: Attributes,
    annotations: BTreeMap<u64, Annotation>,
    provenance: ProvenanceIndex,
    next_id: u64,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        content: impl Into<Vec<u8>>,
        attributes: Attributes,
    ) -> Result<Self, DocError> {
        let doc_id = doc_id.into();
        if !valid_doc_id(&doc_id) {
            return Err(DocError::InvalidDocId(doc_id));
        }
        Ok(Document {
            doc_id,
            content: Arc::from(content.into()),
            attributes,
            annotations: BTreeMap::new(),
            provenance: ProvenanceIndex::new(),
            next_id: 1,
        })
    }

    /// Rebuilds a document from persisted parts, checking every invariant.
    pub fn from_parts(
        doc_id: impl Into<String>,
        content: Vec<u8>,
        attributes: Attributes,
        annotations: Vec<Annotation>,
        provenance: ProvenanceIndex,
        next_id: u64,
    ) -> Result<Self, DocError> {
        let mut doc = Document::new(doc_id, content, attributes)?;
        doc.provenance = provenance;
        doc.next_id = next_id;
        for ann in annotations {
            doc.validate(&ann.type_name, &ann.spans, &ann.producer)?;
            if ann.id == 0 || doc.annotations.insert(ann.id, ann).is_some() {
                return Err(DocError::Inconsistent("duplicate or zero annotation id"));
            }
        }
        doc.check_invariants()?;
        Ok(doc)
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn content(&self) -> &[u8] {
        &self.content
    }

    pub fn len(&self) -> usize {
        self.content.len()
    }

    pub fn is_empty(&self) -> bool {
        self.content.is_empty()
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn provenance(&self) -> &ProvenanceIndex {
        &self.provenance
    }

    /// Exactly `content[start..end)`.
    pub fn get_text(&self, span: Span) -> Result<&[u8], DocError> {
        if !span.fits(self.content.len()) {
            return Err(DocError::SpanOutOfBounds {
                span,
                len: self.content.len(),
            });
        }
        Ok(&self.content[span.start..span.end])
    }

    fn validate(&self, type_name: &str, spans: &[Span], producer: &str) -> Result<(), DocError> {
        if !valid_type_name(type_name) {
            return Err(DocError::InvalidTypeName(type_name.to_owned()));
        }
        if !valid_producer_id(producer) {
            return Err(DocError::InvalidProducer(producer.to_owned()));
        }
        if let Some(bad) = spans.iter().find(|s| s.start <= s.end && !s.fits(self.len())) {
            return Err(DocError::SpanOutOfBounds {
                span: *bad,
                len: self.len(),
            });
        }
        if !spans_well_ordered(spans) {
            return Err(DocError::MalformedSpans);
        }
        Ok(())
    }

    pub fn add_annotation(
        &mut self,
        type_name: &str,
        spans: Vec<Span>,
        attributes: Attributes,
        producer: &str,
    ) -> Result<&Annotation, DocError> {
        self.validate(type_name, &spans, producer)?;
        let id = self.next_id;
        self.next_id += 1;
        let ann = Annotation {
            id,
            type_name: type_name.to_owned(),
            spans,
            attributes,
            producer: producer.to_owned(),
        };
        Ok(self.annotations.entry(id).or_insert(ann))
    }

    /// Merges `attributes` into annotation `id`, overwriting colliding keys.
    pub fn set_attributes(&mut self, id: u64, attributes: Attributes) -> Result<&Annotation, DocError> {
        let ann = self
            .annotations
            .get_mut(&id)
            .ok_or(DocError::NoSuchAnnotation(id))?;
        ann.attributes.extend(attributes);
        Ok(ann)
    }

    pub fn annotation(&self, id: u64) -> Option<&Annotation> {
        self.annotations.get(&id)
    }

    /// All annotations in id order.
    pub fn annotations(&self) -> impl Iterator<Item = &Annotation> + '_ {
        self.annotations.values()
    }

    pub fn annotation_count(&self) -> usize {
        self.annotations.len()
    }

    /// Matching annotations ordered by (first span start, id).
    pub fn get_annotations(&self, sel: &AnnotationSelector) -> Vec<&Annotation> {
        let mut out: Vec<&Annotation> = self.annotations.values().filter(|a| sel.matches(a)).collect();
        out.sort_by_key(|a| (a.start(), a.id));
        out
    }

    /// Removes matching annotations. Provenance and `next_id` are untouched.
    pub fn delete_annotations(&mut self, sel: &AnnotationSelector) -> usize {
        let before = self.annotations.len();
        self.annotations.retain(|_, a| !sel.matches(a));
        before - self.annotations.len()
    }

    /// Idempotent insert of a `(producer, label)` provenance pair.
    pub fn record_result(&mut self, producer: &str, label: &str) {
        self.provenance.insert(producer, label);
    }

    /// Drops a provenance pair. Used when a module is re-run.
    pub fn clear_result(&mut self, producer: &str, label: &str) -> bool {
        self.provenance.remove(producer, label)
    }

    pub fn check_invariants(&self) -> Result<(), DocError> {
        if self.annotations.keys().any(|&id| id >= self.next_id) {
            return Err(DocError::Inconsistent("annotation id not below next_id"));
        }
        for ann in self.annotations.values() {
            if !spans_well_ordered(&ann.spans) || !ann.spans.iter().all(|s| s.fits(self.len())) {
                return Err(DocError::Inconsistent("annotation spans invalid"));
            }
        }
        Ok(())
    }

    /// Producers that appear on annotations but have no provenance entry.
    pub fn unrecorded_producers(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .annotations
            .values()
            .map(|a| a.producer.as_str())
            .filter(|p| !self.provenance.has_producer(p))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
