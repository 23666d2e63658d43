use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::String;

/// Per-document set of `(producer-id, result-label)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProvenanceIndex {
    entries: BTreeSet<(String, String)>,
}

impl ProvenanceIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the pair was already present.
    pub fn insert(&mut self, producer: &str, label: &str) -> bool {
        self.entries.insert((producer.to_owned(), label.to_owned()))
    }

    pub fn remove(&mut self, producer: &str, label: &str) -> bool {
        self.entries.remove(&(producer.to_owned(), label.to_owned()))
    }

    pub fn contains(&self, producer: &str, label: &str) -> bool {
        self.entries.contains(&(producer.to_owned(), label.to_owned()))
    }

    pub fn has_producer(&self, producer: &str) -> bool {
        self.entries.iter().any(|(p, _)| p == producer)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.entries.iter().map(|(p, l)| (p.as_str(), l.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<P: Into<String>, L: Into<String>> FromIterator<(P, L)> for ProvenanceIndex {
    fn from_iter<T: IntoIterator<Item = (P, L)>>(iter: T) -> Self {
        ProvenanceIndex {
            entries: iter.into_iter().map(|(p, l)| (p.into(), l.into())).collect(),
        }
    }
}
