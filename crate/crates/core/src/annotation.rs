use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::span::Span;

/// Attribute map of an annotation, document or collection. Keys are unique
/// and iterate in sorted order, which keeps serialization deterministic.
pub type Attributes = BTreeMap<String, String>;

/// A typed, attributed record over one or more spans of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub id: u64,
    pub type_name: String,
    pub spans: Vec<Span>,
    pub attributes: Attributes,
    /// Producer id of the form `name-version`.
    pub producer: String,
}

impl Annotation {
    /// Start of the first span; the primary sort key for queries.
    pub fn start(&self) -> usize {
        self.spans.first().map_or(0, |s| s.start)
    }

    /// The single span, if the annotation has exactly one.
    pub fn single_span(&self) -> Option<Span> {
        match self.spans.as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }

    /// Same type, spans and (optionally) attributes. Ids and producers are
    /// ignored.
    pub fn same_content(&self, other: &Annotation, with_attrs: bool) -> bool {
        self.type_name == other.type_name
            && self.spans == other.spans
            && (!with_attrs || self.attributes == other.attributes)
    }
}

/// Type names are non-empty and free of whitespace and control bytes.
pub fn valid_type_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b > b' ' && b != 0x7f)
}

/// Producer ids look like `name-version`: both halves non-empty, no
/// whitespace or control bytes.
pub fn valid_producer_id(id: &str) -> bool {
    match id.rfind('-') {
        Some(dash) => dash > 0 && dash + 1 < id.len() && valid_type_name(id),
        None => false,
    }
}

/// Joins a module name and version into a producer id.
pub fn producer_id(name: &str, version: &str) -> String {
    let mut id = String::with_capacity(name.len() + version.len() + 1);
    id.push_str(name);
    id.push('-');
    id.push_str(version);
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn producer_ids() {
        assert!(valid_producer_id("tokenizer-0.1"));
        assert!(valid_producer_id("sgml-import-1.0"));
        assert!(!valid_producer_id("tokenizer"));
        assert!(!valid_producer_id("-0.1"));
        assert!(!valid_producer_id("x-"));
        assert!(!valid_producer_id("a b-1"));
    }
}
