use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;

use super::descriptor::{Coupling, ModuleDescriptor};
use super::engine::{Execution, Executor, ModuleFailure};
use crate::document::Document;

/// An in-process module. Every annotation it adds must carry `producer`.
pub trait TightModule: Send + Sync {
    fn run(&self, doc: &mut Document, producer: &str) -> Result<Execution, ModuleFailure>;
}

impl<F> TightModule for F
where
    F: Fn(&mut Document, &str) -> Result<Execution, ModuleFailure> + Send + Sync,
{
    fn run(&self, doc: &mut Document, producer: &str) -> Result<Execution, ModuleFailure> {
        self(doc, producer)
    }
}

/// Executor for tight modules only, keyed by producer id.
#[derive(Default)]
pub struct TightExecutor {
    modules: BTreeMap<String, Box<dyn TightModule>>,
}

impl TightExecutor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, producer_id: &str, module: Box<dyn TightModule>) {
        self.modules.insert(producer_id.to_owned(), module);
    }

    pub fn get(&self, producer_id: &str) -> Option<&dyn TightModule> {
        self.modules.get(producer_id).map(|m| &**m)
    }
}

impl Executor for TightExecutor {
    fn execute(&self, module: &ModuleDescriptor, doc: &mut Document) -> Result<Execution, ModuleFailure> {
        if module.coupling != Coupling::Tight {
            return Err(ModuleFailure::new("loose modules need a process executor"));
        }
        let id = module.producer_id();
        let m = self
            .get(&id)
            .ok_or_else(|| ModuleFailure::new("no implementation bound to tight module"))?;
        m.run(doc, &id)
    }
}
