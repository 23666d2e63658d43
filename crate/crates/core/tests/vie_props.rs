use gate_core::creole::{run_module, Registry, TightExecutor};
use gate_core::vie::{self, score_annotations, Gazetteer, Lexicon, Ratio};
use gate_core::{Annotation, AnnotationSelector, Attributes, Document, Span};
use proptest::prelude::*;

fn text() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(
        prop_oneof![
            Just(b' '),
            Just(b'\n'),
            Just(b'.'),
            Just(b'?'),
            Just(b','),
            b'a'..=b'e',
            b'A'..=b'C',
            Just(0xc3u8),
        ],
        0..60,
    )
}

fn pipeline(content: &[u8]) -> Document {
    let mut reg = Registry::new();
    let mut exec = TightExecutor::new();
    vie::register_builtins(
        &mut reg,
        &mut exec,
        Lexicon::new([("a", "DT")]),
        Gazetteer::new([("A", "x"), ("A b", "y"), ("ab cd", "z")]).unwrap(),
    )
    .unwrap();
    let mut doc = Document::new("d", content.to_vec(), Attributes::new()).unwrap();
    for m in [vie::TOKENIZER, vie::TAGGER, vie::GAZETTEER, vie::SENTENCER] {
        run_module(&reg, &exec, &mut doc, m).unwrap();
    }
    doc
}

fn spans_of(doc: &Document, ty: &str) -> Vec<Span> {
    doc.get_annotations(&AnnotationSelector::of_type(ty))
        .into_iter()
        .map(|a| a.spans[0])
        .collect()
}

fn content_of(doc: &Document) -> Vec<(String, Vec<Span>, Attributes)> {
    doc.annotations()
        .map(|a| (a.type_name.clone(), a.spans.clone(), a.attributes.clone()))
        .collect()
}

fn ann(id: u64, ty: usize, s: usize, l: usize) -> Annotation {
    Annotation {
        id,
        type_name: ["a", "b"][ty].into(),
        spans: vec![Span::new(s, s + l)],
        attributes: Attributes::new(),
        producer: "t-1".into(),
    }
}

fn anns() -> impl Strategy<Value = Vec<Annotation>> {
    prop::collection::vec((0usize..2, 0usize..6, 0usize..3), 0..8).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (t, s, l))| ann(i as u64 + 1, t, s, l))
            .collect()
    })
}

proptest! {
    #[test]
    fn tokens_cover_exactly_non_whitespace(content in text()) {
        let tokens = vie::tokenize(&content);
        let mut covered = vec![false; content.len()];
        for w in tokens.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        for t in &tokens {
            prop_assert!(!t.is_empty());
            for c in &mut covered[t.start..t.end] {
                *c = true;
            }
        }
        for (b, c) in content.iter().zip(covered) {
            prop_assert_eq!(c, !vie::is_whitespace(*b));
        }
    }

    #[test]
    fn pipeline_is_deterministic_and_well_formed(content in text()) {
        let doc = pipeline(&content);
        prop_assert_eq!(content_of(&doc), content_of(&pipeline(&content)));
        let sentences = spans_of(&doc, "sentence");
        for (i, a) in sentences.iter().enumerate() {
            for b in &sentences[i + 1..] {
                prop_assert!(!a.overlaps(b));
            }
        }
        let tokens = spans_of(&doc, "token");
        for name in spans_of(&doc, "name") {
            prop_assert!(tokens.iter().any(|t| t.start == name.start));
            prop_assert!(tokens.iter().any(|t| t.end == name.end));
        }
    }

    #[test]
    fn score_properties(x in anns(), y in anns(), strict in any::<bool>()) {
        let xr: Vec<&Annotation> = x.iter().collect();
        let yr: Vec<&Annotation> = y.iter().collect();
        let one = Ratio::from_integer(1);
        let zero = Ratio::from_integer(0);
        let same = score_annotations(&xr, &xr, strict);
        prop_assert_eq!((same.precision, same.recall, same.f1), (one, one, one));
        let fwd = score_annotations(&xr, &yr, strict);
        let back = score_annotations(&yr, &xr, strict);
        prop_assert_eq!(fwd.precision, back.recall);
        prop_assert_eq!(fwd.recall, back.precision);
        for v in [fwd.precision, fwd.recall, fwd.f1] {
            prop_assert!(v >= zero && v <= one);
        }
        prop_assert!(fwd.f1 <= fwd.precision.max(fwd.recall));
    }
}
