//! Module registry bootstrap and the executor binding tight modules to
//! their in-process implementations and loose modules to child processes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gate_core::creole::{
    Coupling, EngineError, Execution, Executor, ModuleDescriptor, ModuleFailure, Registry, TightExecutor,
};
use gate_core::vie::{self, Gazetteer, Lexicon};
use gate_core::Document;

use crate::descriptor::{self, DataResource, Descriptor, DescriptorError};
use crate::process;
use crate::store::Collection;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {what} directory does not exist", path.display())]
    MissingDir { path: PathBuf, what: &'static str },
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error("{}: {reason}", path.display())]
    Resource { path: PathBuf, reason: String },
    #[error("registering {id}: {source}")]
    Register { id: String, source: EngineError },
}

#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    /// Directory of `*.creole` descriptor files.
    pub descriptor_dir: Option<PathBuf>,
    /// Directory holding `lexicon.tsv` and `gazetteer.tsv`.
    pub resource_dir: Option<PathBuf>,
    pub timeout: Option<Duration>,
}

pub struct Engine {
    registry: Registry,
    tight: TightExecutor,
    data: Vec<DataResource>,
    timeout: Duration,
    epoch: Instant,
}

fn read_resource(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Resource {
        path: path.into(),
        reason: e.to_string(),
    })
}

fn resource_error(path: &Path, line: usize) -> LoadError {
    LoadError::Resource {
        path: path.into(),
        reason: format!("malformed entry on line {line}"),
    }
}

impl Engine {
    /// Built-in modules only, with the given resources.
    pub fn with_resources(lexicon: Lexicon, gazetteer: Gazetteer) -> Self {
        let mut registry = Registry::new();
        let mut tight = TightExecutor::new();
        vie::register_builtins(&mut registry, &mut tight, lexicon, gazetteer)
            .expect("built-in descriptors are valid");
        Engine {
            registry,
            tight,
            data: Vec::new(),
            timeout: DEFAULT_TIMEOUT,
            epoch: Instant::now(),
        }
    }

    /// Built-ins plus everything found through `config`. Data resources
    /// declared in the descriptor directory win over files in the resource
    /// directory.
    pub fn load(config: &EngineConfig) -> Result<Self, LoadError> {
        let mut descriptors = Vec::new();
        if let Some(dir) = &config.descriptor_dir {
            if !dir.is_dir() {
                return Err(LoadError::MissingDir {
                    path: dir.clone(),
                    what: "module descriptor",
                });
            }
            descriptors = descriptor::load_dir(dir)?;
        }
        let mut lexicon_path = None;
        let mut gazetteer_path = None;
        if let Some(dir) = &config.resource_dir {
            if !dir.is_dir() {
                return Err(LoadError::MissingDir {
                    path: dir.clone(),
                    what: "resource",
                });
            }
            lexicon_path = Some(dir.join("lexicon.tsv")).filter(|p| p.is_file());
            gazetteer_path = Some(dir.join("gazetteer.tsv")).filter(|p| p.is_file());
        }
        let mut modules = Vec::new();
        let mut data = Vec::new();
        for d in descriptors {
            match d {
                Descriptor::Module(m) => modules.push(m),
                Descriptor::Data(r) => {
                    match r.label.as_str() {
                        "lexicon" => lexicon_path = Some(r.path.clone()),
                        "gazetteer" => gazetteer_path = Some(r.path.clone()),
                        _ => {}
                    }
                    data.push(r);
                }
            }
        }
        let lexicon = match lexicon_path {
            Some(p) => Lexicon::parse(&read_resource(&p)?).map_err(|l| resource_error(&p, l))?,
            None => Lexicon::default(),
        };
        let gazetteer = match gazetteer_path {
            Some(p) => Gazetteer::parse(&read_resource(&p)?).map_err(|l| resource_error(&p, l))?,
            None => Gazetteer::default(),
        };
        let mut engine = Engine::with_resources(lexicon, gazetteer);
        engine.data = data;
        if let Some(t) = config.timeout {
            engine.timeout = t;
        }
        for m in modules {
            let id = m.producer_id();
            engine
                .register_loose(m)
                .map_err(|source| LoadError::Register { id, source })?;
        }
        Ok(engine)
    }

    pub fn register_loose(&mut self, desc: ModuleDescriptor) -> Result<(), EngineError> {
        if desc.coupling == Coupling::Tight {
            return Err(EngineError::InvalidDescriptor(
                "tight modules need an in-process implementation".into(),
            ));
        }
        self.registry.register(desc)
    }

    pub fn set_timeout(&mut self, timeout: Duration) {
        self.timeout = timeout;
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn data_resources(&self) -> &[DataResource] {
        &self.data
    }

    /// Executor for documents of `collection`; loose modules read the
    /// collection's content files.
    pub fn executor<'a>(&'a self, collection: Option<&'a Collection>) -> BoundExecutor<'a> {
        BoundExecutor {
            engine: self,
            collection,
        }
    }
}

pub struct BoundExecutor<'a> {
    engine: &'a Engine,
    collection: Option<&'a Collection>,
}

impl Executor for BoundExecutor<'_> {
    fn execute(&self, module: &ModuleDescriptor, doc: &mut Document) -> Result<Execution, ModuleFailure> {
        let Coupling::Loose { executable } = &module.coupling else {
            return self.engine.tight.execute(module, doc);
        };
        let on_disk = self
            .collection
            .map(|c| c.raw_path(doc.doc_id()))
            .filter(|p| p.is_file());
        let producer = module.producer_id();
        match on_disk {
            Some(raw) => process::run_loose(Path::new(executable), &raw, doc, &producer, self.engine.timeout),
            None => {
                let mut tmp = tempfile::NamedTempFile::new()
                    .map_err(|e| ModuleFailure::new(format!("temporary content file: {e}")))?;
                tmp.write_all(doc.content())
                    .map_err(|e| ModuleFailure::new(format!("temporary content file: {e}")))?;
                process::run_loose(Path::new(executable), tmp.path(), doc, &producer, self.engine.timeout)
            }
        }
    }

    fn now_ms(&self) -> u64 {
        self.engine.epoch.elapsed().as_millis() as u64
    }
}
