use alloc::collections::BTreeMap;
use alloc::string::String;

use super::tokenizer::is_word_byte;

/// Word to part-of-speech tag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, String>,
}

impl Lexicon {
    /// Entries with empty words are dropped.
    pub fn new<I, K, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Lexicon {
            entries: entries
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .filter(|(k, _)| !k.is_empty())
                .collect(),
        }
    }

    /// Parses `word<TAB>TAG` lines. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self, usize> {
        Ok(Lexicon {
            entries: super::parse_tab_lines(text)?,
        })
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(word).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tag for one token: exact lexicon entry, then the lowercased entry, then
/// `NP` for capitalised words and `NN` otherwise. Single punctuation bytes
/// get no tag.
pub fn pos_for<'a>(token: &[u8], lexicon: &'a Lexicon) -> Option<&'a str> {
    match token {
        [] => return None,
        [b] if !is_word_byte(*b) => return None,
        _ => {}
    }
    if let Ok(word) = core::str::from_utf8(token) {
        if let Some(tag) = lexicon.get(word) {
            return Some(tag);
        }
        if let Some(tag) = lexicon.get(&word.to_ascii_lowercase()) {
            return Some(tag);
        }
    }
    Some(if token[0].is_ascii_uppercase() { "NP" } else { "NN" })
}
