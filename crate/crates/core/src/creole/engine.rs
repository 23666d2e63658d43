use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::descriptor::ModuleDescriptor;
use super::registry::{EngineError, ModuleState, Registry};
use crate::document::Document;
use crate::selector::AnnotationSelector;

/// What a module reports back after writing to the document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Execution {
    pub attributes_set: usize,
    pub log: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleFailure {
    /// Exit status for external modules.
    pub status: Option<i32>,
    pub message: String,
    pub log: String,
}

impl ModuleFailure {
    pub fn new(message: impl Into<String>) -> Self {
        ModuleFailure {
            status: None,
            message: message.into(),
            log: String::new(),
        }
    }
}

/// Runs one module against a document. Implementations dispatch on the
/// descriptor's coupling.
pub trait Executor {
    fn execute(&self, module: &ModuleDescriptor, doc: &mut Document) -> Result<Execution, ModuleFailure>;

    /// Monotonic milliseconds, used for run durations.
    fn now_ms(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub module: String,
    pub doc_id: String,
    pub annotations_added: usize,
    pub attributes_set: usize,
    pub labels_recorded: Vec<String>,
    pub duration_ms: u64,
    pub log: String,
}

/// Runs `module` on `doc`.
///
/// Amber modules are refused. A red module is re-run: its annotations and
/// result labels are removed first. A failed run leaves `doc` exactly as it
/// was before the call.
pub fn run_module(
    registry: &Registry,
    executor: &dyn Executor,
    doc: &mut Document,
    module: &str,
) -> Result<RunResult, EngineError> {
    let m = registry.require(module)?;
    let state = registry.module_state(doc, module)?;
    if state == ModuleState::Amber {
        let unmet = registry
            .unmet_preconditions(doc, module)?
            .iter()
            .map(|p| p.to_string())
            .collect();
        return Err(EngineError::PreconditionUnsatisfied {
            module: module.to_owned(),
            unmet,
        });
    }

    let snapshot = doc.clone();
    if state == ModuleState::Red {
        doc.delete_annotations(&AnnotationSelector::all().with_exact_producer(&m.id));
        for label in &m.descriptor.results {
            doc.clear_result(&m.id, label);
        }
    }
    let first_new = doc.next_id();
    let started = executor.now_ms();
    let outcome = executor.execute(&m.descriptor, doc).and_then(|exec| {
        let foreign = doc
            .annotations()
            .filter(|a| a.id >= first_new && a.producer != m.id)
            .count();
        if foreign > 0 {
            Err(ModuleFailure::new("module wrote annotations under another producer id"))
        } else {
            Ok(exec)
        }
    });
    let exec = match outcome {
        Ok(exec) => exec,
        Err(failure) => {
            *doc = snapshot;
            return Err(EngineError::ModuleFailed {
                module: module.to_owned(),
                status: failure.status,
                message: failure.message,
                log: failure.log,
            });
        }
    };
    for label in &m.descriptor.results {
        doc.record_result(&m.id, label);
    }
    Ok(RunResult {
        module: m.id.clone(),
        doc_id: doc.doc_id().to_owned(),
        annotations_added: doc.annotations().filter(|a| a.id >= first_new).count(),
        attributes_set: exec.attributes_set,
        labels_recorded: m.descriptor.results.clone(),
        duration_ms: executor.now_ms().saturating_sub(started),
        log: exec.log,
    })
}

/// Results of the chain modules that completed before `error`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainError {
    pub completed: Vec<RunResult>,
    pub error: EngineError,
}

/// Runs every chain member from `start` to the end, in order. Before each
/// one, unmet preconditions are satisfied by running the single earlier
/// chain member able to provide them.
pub fn run_chain(
    registry: &Registry,
    executor: &dyn Executor,
    doc: &mut Document,
    chain: &[String],
    start: &str,
) -> Result<Vec<RunResult>, ChainError> {
    let mut completed = Vec::new();
    let fail = |completed, error| ChainError { completed, error };
    for id in chain {
        if let Err(e) = registry.require(id) {
            return Err(fail(completed, e));
        }
    }
    let Some(first) = chain.iter().position(|m| m == start) else {
        return Err(fail(completed, EngineError::NotInChain(start.to_owned())));
    };
    for idx in first..chain.len() {
        let step = prepare(registry, executor, doc, chain, idx, &mut completed)
            .and_then(|()| run_module(registry, executor, doc, &chain[idx]));
        match step {
            Ok(r) => completed.push(r),
            Err(e) => return Err(fail(completed, e)),
        }
    }
    Ok(completed)
}

fn prepare(
    registry: &Registry,
    executor: &dyn Executor,
    doc: &mut Document,
    chain: &[String],
    idx: usize,
    completed: &mut Vec<RunResult>,
) -> Result<(), EngineError> {
    let module = &chain[idx];
    if registry.module_state(doc, module)? != ModuleState::Amber {
        return Ok(());
    }
    let unmet: Vec<_> = registry
        .unmet_preconditions(doc, module)?
        .into_iter()
        .cloned()
        .collect();
    for pattern in unmet {
        // a precondition may already be met by a prerequisite run for an
        // earlier pattern
        if doc.provenance().iter().any(|(p, l)| pattern.matches(p, l)) {
            continue;
        }
        let mut candidates: Vec<(usize, &String)> = chain[..idx]
            .iter()
            .enumerate()
            .filter(|(_, id)| registry.get(id).is_some_and(|m| m.satisfies(&pattern)))
            .collect();
        candidates.dedup_by(|a, b| a.1 == b.1);
        let [(pos, provider)] = candidates.as_slice() else {
            return Err(EngineError::AmbiguousPrerequisite {
                module: module.clone(),
                pattern: pattern.to_string(),
                candidates: candidates.iter().map(|(_, id)| (*id).clone()).collect(),
            });
        };
        let (pos, provider) = (*pos, (*provider).clone());
        prepare(registry, executor, doc, chain, pos, completed)?;
        completed.push(run_module(registry, executor, doc, &provider)?);
    }
    Ok(())
}
