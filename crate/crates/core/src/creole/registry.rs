use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::descriptor::ModuleDescriptor;
use crate::annotation::valid_producer_id;
use crate::decl::valid_color;
use crate::document::{DocError, Document};
use crate::pattern::{PatternError, PreconditionPattern};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("no module {0:?} registered")]
    NoSuchModule(String),
    #[error("module {0:?} already registered")]
    DuplicateModule(String),
    #[error(transparent)]
    BadPattern(#[from] PatternError),
    #[error("invalid module descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("preconditions of {module} unsatisfied: {}", unmet.join(", "))]
    PreconditionUnsatisfied { module: String, unmet: Vec<String> },
    #[error("module {module} failed: {message}")]
    ModuleFailed {
        module: String,
        status: Option<i32>,
        message: String,
        log: String,
    },
    #[error("no unique in-chain satisfier for {pattern:?} required by {module} (candidates: {candidates:?})")]
    AmbiguousPrerequisite {
        module: String,
        pattern: String,
        candidates: Vec<String>,
    },
    #[error("module {0:?} is not part of the chain")]
    NotInChain(String),
    #[error(transparent)]
    Document(#[from] DocError),
}

/// Per-document module state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuleState {
    /// Runnable, results not present.
    Green,
    /// Waiting on data from an earlier stage.
    Amber,
    /// Results present.
    Red,
}

impl ModuleState {
    pub fn as_str(self) -> &'static str {
        match self {
            ModuleState::Green => "green",
            ModuleState::Amber => "amber",
            ModuleState::Red => "red",
        }
    }
}

impl fmt::Display for ModuleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RegisteredModule {
    pub descriptor: ModuleDescriptor,
    pub id: String,
    pub preconditions: Vec<PreconditionPattern>,
}

impl RegisteredModule {
    /// Some declared result of this module satisfies `p`.
    pub fn satisfies(&self, p: &PreconditionPattern) -> bool {
        self.descriptor.results.iter().any(|r| p.matches(&self.id, r))
    }
}

/// Nodes in registration order; an edge `a -> b` whenever some result of
/// `a` satisfies some precondition of `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModuleGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    modules: Vec<RegisteredModule>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, desc: ModuleDescriptor) -> Result<(), EngineError> {
        let id = desc.producer_id();
        if !valid_producer_id(&id) || desc.name.contains(char::is_whitespace) {
            return Err(EngineError::InvalidDescriptor(alloc::format!("bad producer id {id:?}")));
        }
        if desc.results.is_empty() {
            return Err(EngineError::InvalidDescriptor(alloc::format!(
                "{id} declares no results"
            )));
        }
        if let Some(hint) = &desc.viewer_hint {
            if !valid_color(&hint.color) {
                return Err(EngineError::InvalidDescriptor(alloc::format!(
                    "{id}: bad colour {:?}",
                    hint.color
                )));
            }
        }
        if self.get(&id).is_some() {
            return Err(EngineError::DuplicateModule(id));
        }
        let preconditions = desc
            .preconditions
            .iter()
            .map(|p| PreconditionPattern::parse(p))
            .collect::<Result<Vec<_>, _>>()?;
        self.modules.push(RegisteredModule {
            descriptor: desc,
            id,
            preconditions,
        });
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&RegisteredModule> {
        self.modules.iter().find(|m| m.id == id)
    }

    pub fn require(&self, id: &str) -> Result<&RegisteredModule, EngineError> {
        self.get(id).ok_or_else(|| EngineError::NoSuchModule(id.to_owned()))
    }

    /// Registration order.
    pub fn modules(&self) -> impl Iterator<Item = &RegisteredModule> + '_ {
        self.modules.iter()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// Preconditions of `module` with no matching provenance entry on `doc`.
    pub fn unmet_preconditions<'a>(
        &'a self,
        doc: &Document,
        module: &str,
    ) -> Result<Vec<&'a PreconditionPattern>, EngineError> {
        let m = self.require(module)?;
        Ok(m
            .preconditions
            .iter()
            .filter(|p| !doc.provenance().iter().any(|(prod, label)| p.matches(prod, label)))
            .collect())
    }

    /// Red when every declared result is recorded under this exact producer
    /// id; otherwise amber when some precondition is unmet; otherwise green.
    pub fn module_state(&self, doc: &Document, module: &str) -> Result<ModuleState, EngineError> {
        let m = self.require(module)?;
        if m
            .descriptor
            .results
            .iter()
            .all(|r| doc.provenance().contains(&m.id, r))
        {
            return Ok(ModuleState::Red);
        }
        if self.unmet_preconditions(doc, module)?.is_empty() {
            Ok(ModuleState::Green)
        } else {
            Ok(ModuleState::Amber)
        }
    }

    /// States of all modules in registration order.
    pub fn states(&self, doc: &Document) -> Vec<(String, ModuleState)> {
        self.modules
            .iter()
            .filter_map(|m| Some((m.id.clone(), self.module_state(doc, &m.id).ok()?)))
            .collect()
    }

    pub fn build_graph(&self) -> ModuleGraph {
        let mut graph = ModuleGraph {
            nodes: self.modules.iter().map(|m| m.id.clone()).collect(),
            edges: Vec::new(),
        };
        for from in &self.modules {
            for to in &self.modules {
                if to.preconditions.iter().any(|p| from.satisfies(p)) {
                    graph.edges.push((from.id.clone(), to.id.clone()));
                }
            }
        }
        graph
    }

    /// Registered modules able to satisfy `p`, in registration order.
    pub fn satisfiers(&self, p: &PreconditionPattern) -> Vec<String> {
        self.modules
            .iter()
            .filter(|m| m.satisfies(p))
            .map(|m| m.id.clone())
            .collect()
    }

    /// For each unmet precondition of `module`, the modules that could
    /// satisfy it.
    pub fn resolve_prerequisites(
        &self,
        doc: &Document,
        module: &str,
    ) -> Result<Vec<(String, Vec<String>)>, EngineError> {
        Ok(self
            .unmet_preconditions(doc, module)?
            .into_iter()
            .map(|p| (p.to_string(), self.satisfiers(p)))
            .collect())
    }
}
