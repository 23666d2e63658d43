use std::collections::BTreeSet;
use std::io;
use std::path::PathBuf;

use gate::api::{ApiError, ErrorCode};
use gate::format::FormatError;
use gate::store::StoreError;
use gate_core::creole::EngineError;
use gate_core::sgml::SgmlError;
use gate_core::{DocError, PatternError, ProducerPattern, Span};

fn pattern_error() -> PatternError {
    ProducerPattern::parse("((x").unwrap_err()
}

fn store_errors() -> Vec<StoreError> {
    let p = PathBuf::from("/x");
    vec![
        StoreError::PathOccupied(p.clone()),
        StoreError::NotACollection(p.clone()),
        StoreError::CorruptManifest {
            path: p.clone(),
            source: FormatError {
                line: 2,
                reason: "bad".into(),
            },
        },
        StoreError::CorruptDocument {
            path: p.clone(),
            reason: "bad".into(),
        },
        StoreError::NoSuchCollection("c".into()),
        StoreError::DuplicateDocId("d".into()),
        StoreError::NoSuchDocument("d".into()),
        StoreError::InvalidName("".into()),
        StoreError::Io {
            path: p,
            source: io::Error::other("disk"),
        },
    ]
}

fn doc_errors() -> Vec<DocError> {
    vec![
        DocError::InvalidDocId("a/b".into()),
        DocError::SpanOutOfBounds {
            span: Span::new(0, 9),
            len: 3,
        },
        DocError::MalformedSpans,
        DocError::InvalidTypeName("".into()),
        DocError::InvalidProducer("x".into()),
        DocError::NoSuchAnnotation(4),
        DocError::Inconsistent("ids"),
    ]
}

fn sgml_errors() -> Vec<SgmlError> {
    vec![
        SgmlError::Malformed {
            offset: 3,
            reason: "unclosed",
        },
        SgmlError::OverlapNotRepresentable(1, 2),
        SgmlError::MultiSpanNotRepresentable(1),
    ]
}

fn engine_errors() -> Vec<EngineError> {
    let mut all = vec![
        EngineError::NoSuchModule("m".into()),
        EngineError::DuplicateModule("m".into()),
        EngineError::BadPattern(pattern_error()),
        EngineError::InvalidDescriptor("no results".into()),
        EngineError::PreconditionUnsatisfied {
            module: "m".into(),
            unmet: vec!["tokenizer-* tokens".into()],
        },
        EngineError::ModuleFailed {
            module: "m".into(),
            status: Some(3),
            message: "exit".into(),
            log: "stderr".into(),
        },
        EngineError::AmbiguousPrerequisite {
            module: "m".into(),
            pattern: "p l".into(),
            candidates: vec![],
        },
        EngineError::NotInChain("m".into()),
    ];
    all.extend(doc_errors().into_iter().map(EngineError::Document));
    all
}

fn mapped() -> Vec<(String, ApiError)> {
    let mut out = Vec::new();
    out.extend(store_errors().into_iter().map(|e| (format!("{e:?}"), ApiError::from(e))));
    out.extend(doc_errors().into_iter().map(|e| (format!("{e:?}"), ApiError::from(e))));
    out.extend(sgml_errors().into_iter().map(|e| (format!("{e:?}"), ApiError::from(e))));
    out.extend(engine_errors().into_iter().map(|e| (format!("{e:?}"), ApiError::from(e))));
    out.push(("pattern".into(), ApiError::from(pattern_error())));
    out
}

#[test]
fn every_variant_maps_to_a_documented_code() {
    for (what, e) in mapped() {
        assert!(ErrorCode::ALL.contains(&e.code), "{what}");
        assert_eq!(e.status(), e.code.status(), "{what}");
        assert!(!e.message.is_empty(), "{what}");
    }
}

#[test]
fn only_storage_faults_are_server_errors() {
    for (what, e) in mapped() {
        let storage = matches!(e.code, ErrorCode::IoFailure | ErrorCode::CorruptCollection);
        assert_eq!(e.status() == 500, storage, "{what} -> {}", e.code);
    }
}

#[test]
fn codes_are_distinct_and_serialize_as_tokens() {
    let names: BTreeSet<&str> = ErrorCode::ALL.iter().map(|c| c.as_str()).collect();
    assert_eq!(names.len(), ErrorCode::ALL.len());
    for c in ErrorCode::ALL {
        assert_eq!(serde_json::to_value(c).unwrap(), c.as_str());
        assert!(matches!(c.status(), 400 | 404 | 409 | 422 | 500 | 502));
    }
}

#[test]
fn specific_mappings() {
    let cases: Vec<(ApiError, ErrorCode, u16)> = vec![
        (StoreError::NoSuchDocument("d".into()).into(), ErrorCode::NoSuchDoc, 404),
        (
            EngineError::PreconditionUnsatisfied {
                module: "m".into(),
                unmet: vec!["a b".into()],
            }
            .into(),
            ErrorCode::PreconditionUnsatisfied,
            409,
        ),
        (
            EngineError::ModuleFailed {
                module: "m".into(),
                status: Some(3),
                message: "x".into(),
                log: "err".into(),
            }
            .into(),
            ErrorCode::ModuleFailed,
            502,
        ),
        (EngineError::NoSuchModule("m".into()).into(), ErrorCode::NoSuchModule, 404),
        (EngineError::BadPattern(pattern_error()).into(), ErrorCode::BadPattern, 422),
        (EngineError::Document(DocError::MalformedSpans).into(), ErrorCode::MalformedSpans, 422),
    ];
    for (e, code, status) in cases {
        assert_eq!((e.code, e.status()), (code, status));
    }
}

#[test]
fn detail_carries_structured_payload() {
    let e = ApiError::from(EngineError::PreconditionUnsatisfied {
        module: "m".into(),
        unmet: vec!["tokenizer-* tokens".into()],
    });
    assert_eq!(e.detail["unmet"][0], "tokenizer-* tokens");
    let e = ApiError::from(SgmlError::Malformed {
        offset: 7,
        reason: "x",
    });
    assert_eq!(e.detail["offset"], 7);
}
