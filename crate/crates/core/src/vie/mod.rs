//! A small set of reference language modules: tokenizer, sentence
//! splitter, lexicon tagger, gazetteer name finder, and an annotation
//! scorer.

mod gazetteer;
mod score;
mod sentences;
mod tagger;
mod tokenizer;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use gazetteer::{find_names, Gazetteer};
pub use num_rational::Ratio;
pub use score::{score, score_annotations, ScoreReport};
pub use sentences::split_sentences;
pub use tagger::{pos_for, Lexicon};
pub use tokenizer::{is_whitespace, is_word_byte, tokenize};

use crate::annotation::Attributes;
use crate::creole::{EngineError, Execution, ModuleDescriptor, ModuleFailure, Registry, TightExecutor};
use crate::document::Document;
use crate::selector::AnnotationSelector;
use crate::span::Span;

pub const TOKENIZER: &str = "tokenizer-0.1";
pub const SENTENCER: &str = "sentencer-0.1";
pub const TAGGER: &str = "tagger-0.1";
pub const GAZETTEER: &str = "gazetteer-0.1";

/// Spans of every `token` annotation, sorted by start.
pub fn token_spans(doc: &Document) -> Vec<(u64, Span)> {
    doc.get_annotations(&AnnotationSelector::of_type("token"))
        .into_iter()
        .filter_map(|a| Some((a.id, a.single_span()?)))
        .collect()
}

fn fail(e: crate::DocError) -> ModuleFailure {
    ModuleFailure::new(alloc::format!("{e}"))
}

fn run_tokenizer(doc: &mut Document, producer: &str) -> Result<Execution, ModuleFailure> {
    for span in tokenize(doc.content()) {
        doc.add_annotation("token", alloc::vec![span], Attributes::new(), producer)
            .map_err(fail)?;
    }
    Ok(Execution::default())
}

fn run_sentencer(doc: &mut Document, producer: &str) -> Result<Execution, ModuleFailure> {
    let tokens: Vec<Span> = token_spans(doc).into_iter().map(|(_, s)| s).collect();
    for span in split_sentences(doc.content(), &tokens) {
        doc.add_annotation("sentence", alloc::vec![span], Attributes::new(), producer)
            .map_err(fail)?;
    }
    Ok(Execution::default())
}

fn run_tagger(lexicon: &Lexicon, doc: &mut Document) -> Result<Execution, ModuleFailure> {
    let mut updates = Vec::new();
    for (id, span) in token_spans(doc) {
        let text = doc.get_text(span).map_err(fail)?;
        if let Some(tag) = pos_for(text, lexicon) {
            updates.push((id, String::from(tag)));
        }
    }
    let attributes_set = updates.len();
    for (id, tag) in updates {
        let mut attrs = Attributes::new();
        attrs.insert("pos".into(), tag);
        doc.set_attributes(id, attrs).map_err(fail)?;
    }
    Ok(Execution {
        attributes_set,
        ..Execution::default()
    })
}

fn run_gazetteer(gazetteer: &Gazetteer, doc: &mut Document, producer: &str) -> Result<Execution, ModuleFailure> {
    let tokens: Vec<Span> = token_spans(doc).into_iter().map(|(_, s)| s).collect();
    for (span, category) in find_names(doc.content(), &tokens, gazetteer) {
        let mut attrs = Attributes::new();
        attrs.insert("name_type".into(), category);
        doc.add_annotation("name", alloc::vec![span], attrs, producer)
            .map_err(fail)?;
    }
    Ok(Execution::default())
}

/// Descriptors of the built-in modules, in registration order.
pub fn builtin_descriptors() -> Vec<ModuleDescriptor> {
    alloc::vec![
        ModuleDescriptor::tight("tokenizer", "0.1")
            .produces("tokens")
            .with_viewer(Some("token"), "#4a90d9"),
        ModuleDescriptor::tight("sentencer", "0.1")
            .requires("tokenizer-* tokens")
            .produces("sentences")
            .with_viewer(Some("sentence"), "#b0b0b0"),
        ModuleDescriptor::tight("tagger", "0.1")
            .requires("tokenizer-* tokens")
            .produces("pos_tags")
            .with_viewer(Some("token"), "#d98c4a"),
        ModuleDescriptor::tight("gazetteer", "0.1")
            .requires("tokenizer-* tokens")
            .produces("names")
            .with_viewer(Some("name"), "#2e8b57"),
    ]
}

/// Registers the built-in modules and binds their implementations.
pub fn register_builtins(
    registry: &mut Registry,
    executor: &mut TightExecutor,
    lexicon: Lexicon,
    gazetteer: Gazetteer,
) -> Result<(), EngineError> {
    for desc in builtin_descriptors() {
        registry.register(desc)?;
    }
    executor.insert(TOKENIZER, Box::new(run_tokenizer));
    executor.insert(SENTENCER, Box::new(run_sentencer));
    executor.insert(
        TAGGER,
        Box::new(move |doc: &mut Document, _: &str| run_tagger(&lexicon, doc)),
    );
    executor.insert(
        GAZETTEER,
        Box::new(move |doc: &mut Document, producer: &str| run_gazetteer(&gazetteer, doc, producer)),
    );
    Ok(())
}

/// Word-to-tag or name-to-category entries from `key<TAB>value` lines.
/// Blank lines are skipped; the line number of the first bad line is
/// reported on error.
pub(crate) fn parse_tab_lines(text: &str) -> Result<BTreeMap<String, String>, usize> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once('\t').ok_or(no + 1)?;
        if k.is_empty() || v.is_empty() {
            return Err(no + 1);
        }
        out.insert(k.into(), v.into());
    }
    Ok(out)
}
