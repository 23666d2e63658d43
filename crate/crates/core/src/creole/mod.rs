//! Module registry and pipeline engine.
//!
//! Modules declare what they produce (result labels) and what they need
//! (precondition patterns over the provenance of a document). The registry
//! derives per-document states and the module graph from those
//! declarations alone; the engine runs modules through an [`Executor`].

mod descriptor;
mod engine;
mod registry;
mod tight;

pub use descriptor::{Coupling, ModuleDescriptor, ViewerHint};
pub use engine::{run_chain, run_module, ChainError, Execution, Executor, ModuleFailure, RunResult};
pub use registry::{EngineError, ModuleGraph, ModuleState, RegisteredModule, Registry};
pub use tight::{TightExecutor, TightModule};
