use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::tokenizer::tokenize;
use crate::span::Span;

/// Name to category list. Names may contain single spaces between words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    entries: BTreeMap<String, String>,
    longest: usize,
}

impl Gazetteer {
    /// Rejects empty names and names with leading or trailing whitespace.
    pub fn new<I, K, V>(entries: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut gaz = Gazetteer::default();
        for (k, v) in entries {
            let k = k.into();
            if k.is_empty() || k.trim() != k {
                return Err(k);
            }
            gaz.longest = gaz.longest.max(tokenize(k.as_bytes()).len());
            gaz.entries.insert(k, v.into());
        }
        Ok(gaz)
    }

    /// Parses `name<TAB>category` lines. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self, usize> {
        let entries = super::parse_tab_lines(text)?;
        Gazetteer::new(entries).map_err(|bad| {
            text.lines()
                .position(|l| l.split('\t').next() == Some(bad.as_str()))
                .map_or(0, |i| i + 1)
        })
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Longest-match scan over sorted token spans. At each token the longest
/// run of tokens whose texts, joined by single spaces, equal a gazetteer
/// name wins; scanning resumes after the match.
pub fn find_names(content: &[u8], tokens: &[Span], gazetteer: &Gazetteer) -> Vec<(Span, String)> {
    let mut out = Vec::new();
    let mut i = 0;
    let mut joined = Vec::new();
    while i < tokens.len() {
        let max_k = gazetteer.longest.min(tokens.len() - i);
        let hit = (1..=max_k).rev().find_map(|k| {
            joined.clear();
            for (n, t) in tokens[i..i + k].iter().enumerate() {
                if n > 0 {
                    joined.push(b' ');
                }
                joined.extend_from_slice(&content[t.start..t.end]);
            }
            let name = core::str::from_utf8(&joined).ok()?;
            gazetteer.get(name).map(|cat| (k, cat.to_owned()))
        });
        match hit {
            Some((k, category)) => {
                out.push((Span::new(tokens[i].start, tokens[i + k - 1].end), category));
                i += k;
            }
            None => i += 1,
        }
    }
    out
}
