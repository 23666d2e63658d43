use alloc::string::String;

use crate::annotation::Annotation;
use crate::pattern::{PatternError, ProducerPattern};
use crate::span::Span;

/// Conjunctive filter over a document's annotations. Absent fields match
/// everything, so the default selector selects every annotation. An empty
/// `overlapping` span matches nothing.
#[derive(Debug, Clone, Default)]
pub struct AnnotationSelector {
    pub type_name: Option<String>,
    pub producer: Option<ProducerPattern>,
    pub overlapping: Option<Span>,
}

impl AnnotationSelector {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn of_type(type_name: impl Into<String>) -> Self {
        AnnotationSelector {
            type_name: Some(type_name.into()),
            ..Self::default()
        }
    }

    /// Compiles `pattern` as the producer filter.
    pub fn with_producer_pattern(mut self, pattern: &str) -> Result<Self, PatternError> {
        self.producer = Some(ProducerPattern::parse(pattern)?);
        Ok(self)
    }

    pub fn with_exact_producer(mut self, producer: &str) -> Self {
        self.producer = Some(ProducerPattern::exact(producer));
        self
    }

    pub fn with_overlap(mut self, span: Span) -> Self {
        self.overlapping = Some(span);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.type_name.is_none() && self.producer.is_none() && self.overlapping.is_none()
    }

    pub fn matches(&self, ann: &Annotation) -> bool {
        self.type_name.as_ref().is_none_or(|t| *t == ann.type_name)
            && self.producer.as_ref().is_none_or(|p| p.matches(&ann.producer))
            && self
                .overlapping
                .is_none_or(|q| !q.is_empty() && ann.spans.iter().any(|s| s.overlaps(&q)))
    }
}
