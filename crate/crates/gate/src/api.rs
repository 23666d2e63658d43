//! Operations shared by the HTTP service and the command line, with their
//! JSON shapes and error codes.

use std::sync::Arc;

use gate_core::creole::{self, ChainError, EngineError, RunResult};
use gate_core::sgml::{self, SgmlError};
use gate_core::vie::{score_annotations, Ratio, ScoreReport};
use gate_core::{Annotation, AnnotationSelector, Attributes, DocError, Document, PatternError, Span};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::Engine;
use crate::store::{Collection, StoreError, Workspace};

/// Producer recorded on annotations added by hand when none is given.
pub const MANUAL_PRODUCER: &str = "manual-1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    InvalidId,
    NoSuchCollection,
    NoSuchDoc,
    NoSuchModule,
    NoSuchAnnotation,
    DuplicateCollection,
    DuplicateDocId,
    DuplicateModule,
    SpanOutOfBounds,
    MalformedSpans,
    InvalidAnnotation,
    InvalidDescriptor,
    BadPattern,
    MalformedSgml,
    OverlapNotRepresentable,
    MultiSpanNotRepresentable,
    PreconditionUnsatisfied,
    AmbiguousPrerequisite,
    NotInChain,
    ModuleFailed,
    CorruptCollection,
    IoFailure,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 24] = [
        ErrorCode::BadRequest,
        ErrorCode::NotFound,
        ErrorCode::InvalidId,
        ErrorCode::NoSuchCollection,
        ErrorCode::NoSuchDoc,
        ErrorCode::NoSuchModule,
        ErrorCode::NoSuchAnnotation,
        ErrorCode::DuplicateCollection,
        ErrorCode::DuplicateDocId,
        ErrorCode::DuplicateModule,
        ErrorCode::SpanOutOfBounds,
        ErrorCode::MalformedSpans,
        ErrorCode::InvalidAnnotation,
        ErrorCode::InvalidDescriptor,
        ErrorCode::BadPattern,
        ErrorCode::MalformedSgml,
        ErrorCode::OverlapNotRepresentable,
        ErrorCode::MultiSpanNotRepresentable,
        ErrorCode::PreconditionUnsatisfied,
        ErrorCode::AmbiguousPrerequisite,
        ErrorCode::NotInChain,
        ErrorCode::ModuleFailed,
        ErrorCode::CorruptCollection,
        ErrorCode::IoFailure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "BAD_REQUEST",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::InvalidId => "INVALID_ID",
            ErrorCode::NoSuchCollection => "NO_SUCH_COLLECTION",
            ErrorCode::NoSuchDoc => "NO_SUCH_DOC",
            ErrorCode::NoSuchModule => "NO_SUCH_MODULE",
            ErrorCode::NoSuchAnnotation => "NO_SUCH_ANNOTATION",
            ErrorCode::DuplicateCollection => "DUPLICATE_COLLECTION",
            ErrorCode::DuplicateDocId => "DUPLICATE_DOC_ID",
            ErrorCode::DuplicateModule => "DUPLICATE_MODULE",
            ErrorCode::SpanOutOfBounds => "SPAN_OUT_OF_BOUNDS",
            ErrorCode::MalformedSpans => "MALFORMED_SPANS",
            ErrorCode::InvalidAnnotation => "INVALID_ANNOTATION",
            ErrorCode::InvalidDescriptor => "INVALID_DESCRIPTOR",
            ErrorCode::BadPattern => "BAD_PATTERN",
            ErrorCode::MalformedSgml => "MALFORMED_SGML",
            ErrorCode::OverlapNotRepresentable => "OVERLAP_NOT_REPRESENTABLE",
            ErrorCode::MultiSpanNotRepresentable => "MULTI_SPAN_NOT_REPRESENTABLE",
            ErrorCode::PreconditionUnsatisfied => "PRECONDITION_UNSATISFIED",
            ErrorCode::AmbiguousPrerequisite => "AMBIGUOUS_PREREQUISITE",
            ErrorCode::NotInChain => "NOT_IN_CHAIN",
            ErrorCode::ModuleFailed => "MODULE_FAILED",
            ErrorCode::CorruptCollection => "CORRUPT_COLLECTION",
            ErrorCode::IoFailure => "IO_FAILURE",
        }
    }

    pub fn status(self) -> u16 {
        use ErrorCode::*;
        match self {
            BadRequest | InvalidId | NotInChain => 400,
            NotFound | NoSuchCollection | NoSuchDoc | NoSuchModule | NoSuchAnnotation => 404,
            DuplicateCollection | DuplicateDocId | DuplicateModule | PreconditionUnsatisfied
            | AmbiguousPrerequisite => 409,
            SpanOutOfBounds | MalformedSpans | InvalidAnnotation | InvalidDescriptor | BadPattern
            | MalformedSgml | OverlapNotRepresentable | MultiSpanNotRepresentable => 422,
            ModuleFailed => 502,
            CorruptCollection | IoFailure => 500,
        }
    }
}

impl std::fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::BadRequest, message)
    }

    pub fn status(&self) -> u16 {
        self.code.status()
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        let (code, detail) = match &e {
            StoreError::PathOccupied(p) => (ErrorCode::DuplicateCollection, json!({ "path": p })),
            StoreError::NotACollection(p) => (ErrorCode::NoSuchCollection, json!({ "path": p })),
            StoreError::CorruptManifest { path, source } => (
                ErrorCode::CorruptCollection,
                json!({ "path": path, "line": source.line }),
            ),
            StoreError::CorruptDocument { path, .. } => (ErrorCode::CorruptCollection, json!({ "path": path })),
            StoreError::NoSuchCollection(_) => (ErrorCode::NoSuchCollection, Value::Null),
            StoreError::DuplicateDocId(_) => (ErrorCode::DuplicateDocId, Value::Null),
            StoreError::NoSuchDocument(_) => (ErrorCode::NoSuchDoc, Value::Null),
            StoreError::InvalidName(_) => (ErrorCode::InvalidId, Value::Null),
            StoreError::Io { path, .. } => (ErrorCode::IoFailure, json!({ "path": path })),
        };
        ApiError { code, message, detail }
    }
}

impl From<DocError> for ApiError {
    fn from(e: DocError) -> Self {
        let message = e.to_string();
        let (code, detail) = match &e {
            DocError::InvalidDocId(_) => (ErrorCode::InvalidId, Value::Null),
            DocError::SpanOutOfBounds { span, len } => (
                ErrorCode::SpanOutOfBounds,
                json!({ "span": [span.start, span.end], "length": len }),
            ),
            DocError::MalformedSpans => (ErrorCode::MalformedSpans, Value::Null),
            DocError::InvalidTypeName(_) | DocError::InvalidProducer(_) | DocError::Inconsistent(_) => {
                (ErrorCode::InvalidAnnotation, Value::Null)
            }
            DocError::NoSuchAnnotation(id) => (ErrorCode::NoSuchAnnotation, json!({ "id": id })),
        };
        ApiError { code, message, detail }
    }
}

impl From<PatternError> for ApiError {
    fn from(e: PatternError) -> Self {
        ApiError::new(ErrorCode::BadPattern, e.to_string())
            .with_detail(json!({ "pattern": e.pattern, "reason": e.reason }))
    }
}

impl From<SgmlError> for ApiError {
    fn from(e: SgmlError) -> Self {
        let message = e.to_string();
        let (code, detail) = match &e {
            SgmlError::Malformed { offset, reason } => {
                (ErrorCode::MalformedSgml, json!({ "offset": offset, "reason": reason }))
            }
            SgmlError::OverlapNotRepresentable(a, b) => (ErrorCode::OverlapNotRepresentable, json!({ "ids": [a, b] })),
            SgmlError::MultiSpanNotRepresentable(id) => (ErrorCode::MultiSpanNotRepresentable, json!({ "id": id })),
        };
        ApiError { code, message, detail }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        let (code, detail) = match e {
            EngineError::NoSuchModule(m) => (ErrorCode::NoSuchModule, json!({ "module": m })),
            EngineError::DuplicateModule(m) => (ErrorCode::DuplicateModule, json!({ "module": m })),
            EngineError::BadPattern(p) => return p.into(),
            EngineError::InvalidDescriptor(_) => (ErrorCode::InvalidDescriptor, Value::Null),
            EngineError::PreconditionUnsatisfied { module, unmet } => (
                ErrorCode::PreconditionUnsatisfied,
                json!({ "module": module, "unmet": unmet }),
            ),
            EngineError::ModuleFailed {
                module,
                status,
                message,
                log,
            } => (
                ErrorCode::ModuleFailed,
                json!({ "module": module, "status": status, "reason": message, "log": log }),
            ),
            EngineError::AmbiguousPrerequisite {
                module,
                pattern,
                candidates,
            } => (
                ErrorCode::AmbiguousPrerequisite,
                json!({ "module": module, "pattern": pattern, "candidates": candidates }),
            ),
            EngineError::NotInChain(m) => (ErrorCode::NotInChain, json!({ "module": m })),
            EngineError::Document(d) => return d.into(),
        };
        ApiError { code, message, detail }
    }
}

impl From<ChainError> for ApiError {
    fn from(e: ChainError) -> Self {
        let mut err = ApiError::from(e.error);
        let completed: Vec<RunResultDto> = e.completed.into_iter().map(RunResultDto::from).collect();
        let mut detail = serde_json::Map::new();
        if let Value::Object(m) = err.detail.take() {
            detail = m;
        }
        detail.insert("completed".into(), json!(completed));
        err.detail = Value::Object(detail);
        err
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

/// Selector fields as they appear in query strings and JSON bodies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorQuery {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub type_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<usize>,
}

impl SelectorQuery {
    pub fn to_selector(&self) -> ApiResult<AnnotationSelector> {
        let mut sel = AnnotationSelector::all();
        sel.type_name = self.type_name.clone();
        if let Some(p) = &self.producer {
            sel = sel.with_producer_pattern(p)?;
        }
        match (self.start, self.end) {
            (None, None) => {}
            (Some(s), Some(e)) => sel = sel.with_overlap(Span::new(s, e)),
            _ => return Err(ApiError::bad_request("start and end must be given together")),
        }
        Ok(sel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationDto {
    pub id: u64,
    #[serde(rename = "type")]
    pub type_name: String,
    pub spans: Vec<[usize; 2]>,
    pub attributes: Attributes,
    pub producer: String,
}

impl From<&Annotation> for AnnotationDto {
    fn from(a: &Annotation) -> Self {
        AnnotationDto {
            id: a.id,
            type_name: a.type_name.clone(),
            spans: a.spans.iter().map(|s| [s.start, s.end]).collect(),
            attributes: a.attributes.clone(),
            producer: a.producer.clone(),
        }
    }
}

fn spans_of(raw: &[[usize; 2]]) -> Vec<Span> {
    raw.iter().map(|[s, e]| Span::new(*s, *e)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewAnnotation {
    #[serde(rename = "type")]
    pub type_name: String,
    pub spans: Vec<[usize; 2]>,
    #[serde(default)]
    pub attributes: Attributes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionInfo {
    pub name: String,
    pub doc_ids: Vec<String>,
    pub attributes: Attributes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentInfo {
    pub doc_id: String,
    pub length: usize,
    pub annotations: usize,
    pub attributes: Attributes,
}

impl From<&Document> for DocumentInfo {
    fn from(d: &Document) -> Self {
        DocumentInfo {
            doc_id: d.doc_id().into(),
            length: d.len(),
            annotations: d.annotation_count(),
            attributes: d.attributes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeleteResult {
    pub deleted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewerDto {
    #[serde(rename = "type")]
    pub type_name: Option<String>,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDto {
    pub id: String,
    pub name: String,
    pub version: String,
    pub coupling: String,
    pub preconditions: Vec<String>,
    pub results: Vec<String>,
    pub viewer: Option<ViewerDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prerequisite {
    pub pattern: String,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleStateDto {
    pub id: String,
    pub state: String,
    pub unmet: Vec<Prerequisite>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatesDto {
    pub doc_id: String,
    pub modules: Vec<ModuleStateDto>,
    pub edges: Vec<[String; 2]>,
}

impl StatesDto {
    pub fn state_of(&self, module: &str) -> Option<&str> {
        self.modules.iter().find(|m| m.id == module).map(|m| m.state.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResultDto {
    pub module: String,
    pub doc_id: String,
    pub annotations_added: usize,
    pub attributes_set: usize,
    pub labels_recorded: Vec<String>,
    pub duration_ms: u64,
    pub log: String,
}

impl From<RunResult> for RunResultDto {
    fn from(r: RunResult) -> Self {
        RunResultDto {
            module: r.module,
            doc_id: r.doc_id,
            annotations_added: r.annotations_added,
            attributes_set: r.attributes_set,
            labels_recorded: r.labels_recorded,
            duration_ms: r.duration_ms,
            log: r.log,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainRequest {
    pub chain: Vec<String>,
    pub start: String,
}

/// One document's outcome in a collection run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchEntry {
    pub doc_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<RunResultDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
}

/// A key given either as a selector over the document or as literal
/// annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KeySpec {
    Annotations(Vec<NewAnnotation>),
    Selector(SelectorQuery),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRequest {
    #[serde(default)]
    pub response: SelectorQuery,
    pub key: KeySpec,
    #[serde(default)]
    pub strict_attrs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactScores {
    pub precision: String,
    pub recall: String,
    pub f1: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDto {
    pub matches: u64,
    pub response_size: u64,
    pub key_size: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub exact: ExactScores,
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl From<ScoreReport> for ScoreDto {
    fn from(r: ScoreReport) -> Self {
        ScoreDto {
            matches: r.matches,
            response_size: r.response_size,
            key_size: r.key_size,
            precision: to_f64(r.precision),
            recall: to_f64(r.recall),
            f1: to_f64(r.f1),
            exact: ExactScores {
                precision: r.precision.to_string(),
                recall: r.recall.to_string(),
                f1: r.f1.to_string(),
            },
        }
    }
}

/// The workspace and module engine behind every front end.
pub struct Gateway {
    workspace: Workspace,
    engine: Engine,
}

impl Gateway {
    pub fn new(workspace: Workspace, engine: Engine) -> Self {
        Gateway { workspace, engine }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn collection(&self, c: &str) -> ApiResult<Arc<Collection>> {
        Ok(self.workspace.collection(c)?)
    }

    /// Runs `f` on the document under its write lock and persists it
    /// before the lock is released.
    fn mutate<T>(&self, c: &str, d: &str, f: impl FnOnce(&Collection, &mut Document) -> ApiResult<T>) -> ApiResult<T> {
        let coll = self.collection(c)?;
        let handle = coll.document(d)?;
        let mut doc = handle.write();
        let out = f(&coll, &mut doc);
        coll.persist(&doc)?;
        out
    }

    fn read<T>(&self, c: &str, d: &str, f: impl FnOnce(&Document) -> ApiResult<T>) -> ApiResult<T> {
        let coll = self.collection(c)?;
        let handle = coll.document(d)?;
        let doc = handle.read();
        f(&doc)
    }

    pub fn list_collections(&self) -> ApiResult<Vec<String>> {
        Ok(self.workspace.list()?)
    }

    pub fn create_collection(&self, name: &str) -> ApiResult<CollectionInfo> {
        let coll = self.workspace.create_collection(name)?;
        let m = coll.manifest();
        Ok(CollectionInfo {
            name: m.name,
            doc_ids: m.doc_ids,
            attributes: m.attributes,
        })
    }

    pub fn list_documents(&self, c: &str) -> ApiResult<Vec<String>> {
        Ok(self.collection(c)?.doc_ids())
    }

    /// Stores `body` as document `d`; with `sgml` the body is markup whose
    /// elements become annotations.
    pub fn add_document(&self, c: &str, d: &str, body: Vec<u8>, sgml: bool) -> ApiResult<DocumentInfo> {
        let coll = self.collection(c)?;
        let doc = if sgml {
            sgml::sgml_import(&body)?.into_document(d, Attributes::new())?
        } else {
            Document::new(d, body, Attributes::new())?
        };
        let handle = coll.add_document(doc)?;
        let info = DocumentInfo::from(&*handle.read());
        Ok(info)
    }

    pub fn text(&self, c: &str, d: &str, start: Option<usize>, end: Option<usize>) -> ApiResult<Vec<u8>> {
        self.read(c, d, |doc| {
            let span = Span::new(start.unwrap_or(0), end.unwrap_or(doc.len()));
            Ok(doc.get_text(span)?.to_vec())
        })
    }

    pub fn annotations(&self, c: &str, d: &str, q: &SelectorQuery) -> ApiResult<Vec<AnnotationDto>> {
        let sel = q.to_selector()?;
        self.read(c, d, |doc| Ok(doc.get_annotations(&sel).into_iter().map(AnnotationDto::from).collect()))
    }

    /// Adds an annotation and records `(producer, type)` so that every
    /// producer on the document stays accounted for.
    pub fn add_annotation(&self, c: &str, d: &str, new: NewAnnotation) -> ApiResult<AnnotationDto> {
        let producer = new.producer.unwrap_or_else(|| MANUAL_PRODUCER.into());
        self.mutate(c, d, |_, doc| {
            let dto = AnnotationDto::from(doc.add_annotation(
                &new.type_name,
                spans_of(&new.spans),
                new.attributes,
                &producer,
            )?);
            doc.record_result(&producer, &new.type_name);
            Ok(dto)
        })
    }

    pub fn delete_annotations(&self, c: &str, d: &str, q: &SelectorQuery) -> ApiResult<DeleteResult> {
        let sel = q.to_selector()?;
        self.mutate(c, d, |_, doc| {
            Ok(DeleteResult {
                deleted: doc.delete_annotations(&sel),
            })
        })
    }

    pub fn modules(&self) -> Vec<ModuleDto> {
        self.engine
            .registry()
            .modules()
            .map(|m| {
                let desc = &m.descriptor;
                ModuleDto {
                    id: m.id.clone(),
                    name: desc.name.clone(),
                    version: desc.version.clone(),
                    coupling: match desc.coupling {
                        creole::Coupling::Tight => "tight".into(),
                        creole::Coupling::Loose { .. } => "loose".into(),
                    },
                    preconditions: desc.preconditions.clone(),
                    results: desc.results.clone(),
                    viewer: desc.viewer_hint.as_ref().map(|v| ViewerDto {
                        type_name: v.type_name.clone(),
                        color: v.color.clone(),
                    }),
                }
            })
            .collect()
    }

    pub fn states(&self, c: &str, d: &str) -> ApiResult<StatesDto> {
        let reg = self.engine.registry();
        self.read(c, d, |doc| {
            let mut modules = Vec::new();
            for (id, state) in reg.states(doc) {
                let unmet = reg
                    .resolve_prerequisites(doc, &id)?
                    .into_iter()
                    .map(|(pattern, candidates)| Prerequisite { pattern, candidates })
                    .collect();
                modules.push(ModuleStateDto {
                    id,
                    state: state.as_str().into(),
                    unmet,
                });
            }
            let edges = reg.build_graph().edges.into_iter().map(|(a, b)| [a, b]).collect();
            Ok(StatesDto {
                doc_id: doc.doc_id().into(),
                modules,
                edges,
            })
        })
    }

    pub fn run(&self, c: &str, d: &str, module: &str) -> ApiResult<RunResultDto> {
        self.engine.registry().require(module)?;
        self.mutate(c, d, |coll, doc| {
            let exec = self.engine.executor(Some(coll));
            Ok(creole::run_module(self.engine.registry(), &exec, doc, module)?.into())
        })
    }

    pub fn run_chain(&self, c: &str, d: &str, req: &ChainRequest) -> ApiResult<Vec<RunResultDto>> {
        self.mutate(c, d, |coll, doc| {
            let exec = self.engine.executor(Some(coll));
            let results = creole::run_chain(self.engine.registry(), &exec, doc, &req.chain, &req.start)?;
            Ok(results.into_iter().map(RunResultDto::from).collect())
        })
    }

    /// Runs `module` on every document in manifest order. Failures are
    /// reported per document.
    pub fn run_collection(&self, c: &str, module: &str) -> ApiResult<Vec<BatchEntry>> {
        self.engine.registry().require(module)?;
        let coll = self.collection(c)?;
        Ok(coll
            .doc_ids()
            .into_iter()
            .map(|d| match self.run(c, &d, module) {
                Ok(r) => BatchEntry {
                    doc_id: d,
                    result: Some(r),
                    error: None,
                },
                Err(e) => BatchEntry {
                    doc_id: d,
                    result: None,
                    error: Some(e),
                },
            })
            .collect())
    }

    pub fn export_sgml(&self, c: &str, d: &str, q: &SelectorQuery) -> ApiResult<Vec<u8>> {
        let sel = q.to_selector()?;
        self.read(c, d, |doc| Ok(sgml::sgml_export(doc, &sel)?))
    }

    pub fn score(&self, c: &str, d: &str, req: &ScoreRequest) -> ApiResult<ScoreDto> {
        let response = req.response.to_selector()?;
        self.read(c, d, |doc| {
            let resp = doc.get_annotations(&response);
            let report = match &req.key {
                KeySpec::Selector(q) => score_annotations(&resp, &doc.get_annotations(&q.to_selector()?), req.strict_attrs),
                KeySpec::Annotations(list) => {
                    let owned: Vec<Annotation> = list
                        .iter()
                        .map(|a| Annotation {
                            id: 0,
                            type_name: a.type_name.clone(),
                            spans: spans_of(&a.spans),
                            attributes: a.attributes.clone(),
                            producer: a.producer.clone().unwrap_or_default(),
                        })
                        .collect();
                    let key: Vec<&Annotation> = owned.iter().collect();
                    score_annotations(&resp, &key, req.strict_attrs)
                }
            };
            Ok(report.into())
        })
    }
}

