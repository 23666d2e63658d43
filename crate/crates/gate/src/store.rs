//! On-disk collections.
//!
//! ```text
//! <collection>/manifest.gate
//! <collection>/docs/<doc_id>.raw     content bytes, verbatim
//! <collection>/docs/<doc_id>.attrs
//! <collection>/docs/<doc_id>.prov
//! <collection>/docs/<doc_id>.ann
//! <collection>/docs/<doc_id>.meta    id counter
//! ```
//!
//! A collection may be opened with an overlay directory. Reads prefer the
//! overlay and fall back to the base directory; all writes go to the
//! overlay, so collections on read-only media can still be annotated.
//!
//! Each document sits behind its own lock: readers share it, writers are
//! serialized. Manifest changes take the manifest lock.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gate_core::document::valid_doc_id;
use gate_core::{Attributes, DocError, Document};
use parking_lot::{Mutex, RwLock};

use crate::escape::escape;
use crate::format::{self, CollectionManifest, FormatError};

const MANIFEST: &str = "manifest.gate";
const DOCS: &str = "docs";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: path is occupied", .0.display())]
    PathOccupied(PathBuf),
    #[error("{}: not a collection", .0.display())]
    NotACollection(PathBuf),
    #[error("{}: corrupt manifest, {source}", path.display())]
    CorruptManifest { path: PathBuf, source: FormatError },
    #[error("{}: corrupt document file, {reason}", path.display())]
    CorruptDocument { path: PathBuf, reason: String },
    #[error("no collection named {0:?}")]
    NoSuchCollection(String),
    #[error("document {0:?} already exists")]
    DuplicateDocId(String),
    #[error("no document {0:?}")]
    NoSuchDocument(String),
    #[error("invalid name {0:?}")]
    InvalidName(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub type DocHandle = Arc<RwLock<Document>>;

pub struct Collection {
    base: PathBuf,
    overlay: Option<PathBuf>,
    manifest: RwLock<CollectionManifest>,
    docs: Mutex<HashMap<String, DocHandle>>,
}

impl std::fmt::Debug for Collection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Collection")
            .field("base", &self.base)
            .field("overlay", &self.overlay)
            .finish_non_exhaustive()
    }
}

fn doc_rel(doc_id: &str, ext: &str) -> PathBuf {
    Path::new(DOCS).join(format!("{}.{ext}", escape(doc_id)))
}

/// Writes `bytes` unless the file already holds exactly them.
fn write_if_changed(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    match fs::read(path) {
        Ok(existing) if existing == bytes => return Ok(()),
        _ => {}
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

impl Collection {
    /// Creates the directory layout at `path`, which must be absent or an
    /// empty directory.
    pub fn create(path: &Path, name: &str) -> Result<Collection, StoreError> {
        if !valid_doc_id(name) {
            return Err(StoreError::InvalidName(name.into()));
        }
        if path.exists() {
            let empty = path.is_dir()
                && fs::read_dir(path)
                    .map_err(io_err(path))?
                    .next()
                    .is_none();
            if !empty {
                return Err(StoreError::PathOccupied(path.into()));
            }
        }
        let docs = path.join(DOCS);
        fs::create_dir_all(&docs).map_err(io_err(&docs))?;
        let coll = Collection {
            base: path.into(),
            overlay: None,
            manifest: RwLock::new(CollectionManifest {
                name: name.into(),
                ..Default::default()
            }),
            docs: Mutex::new(HashMap::new()),
        };
        coll.write_manifest()?;
        Ok(coll)
    }

    pub fn open(path: &Path) -> Result<Collection, StoreError> {
        Self::open_inner(path, None)
    }

    /// Opens `path` read-only; every write lands under `overlay`.
    pub fn open_with_overlay(path: &Path, overlay: &Path) -> Result<Collection, StoreError> {
        Self::open_inner(path, Some(overlay.into()))
    }

    fn open_inner(path: &Path, overlay: Option<PathBuf>) -> Result<Collection, StoreError> {
        let mut coll = Collection {
            base: path.into(),
            overlay,
            manifest: RwLock::new(CollectionManifest::default()),
            docs: Mutex::new(HashMap::new()),
        };
        let manifest_path = coll.read_path(Path::new(MANIFEST));
        let text = match fs::read(&manifest_path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotACollection(path.into()))
            }
            Err(e) if e.kind() == io::ErrorKind::NotADirectory => {
                return Err(StoreError::NotACollection(path.into()))
            }
            Err(e) => return Err(io_err(&manifest_path)(e)),
        };
        let text = String::from_utf8(text).map_err(|_| StoreError::CorruptManifest {
            path: manifest_path.clone(),
            source: FormatError {
                line: 1,
                reason: "not UTF-8".into(),
            },
        })?;
        *coll.manifest.get_mut() = format::parse_manifest(&text).map_err(|source| {
            StoreError::CorruptManifest {
                path: manifest_path,
                source,
            }
        })?;
        Ok(coll)
    }

    pub fn path(&self) -> &Path {
        &self.base
    }

    pub fn manifest(&self) -> CollectionManifest {
        self.manifest.read().clone()
    }

    pub fn name(&self) -> String {
        self.manifest.read().name.clone()
    }

    pub fn doc_ids(&self) -> Vec<String> {
        self.manifest.read().doc_ids.clone()
    }

    fn read_path(&self, rel: &Path) -> PathBuf {
        if let Some(over) = &self.overlay {
            let p = over.join(rel);
            if p.exists() {
                return p;
            }
        }
        self.base.join(rel)
    }

    fn write_path(&self, rel: &Path) -> PathBuf {
        self.overlay.as_deref().unwrap_or(&self.base).join(rel)
    }

    fn read_opt(&self, rel: &Path) -> Result<Option<(PathBuf, Vec<u8>)>, StoreError> {
        let path = self.read_path(rel);
        match fs::read(&path) {
            Ok(bytes) => Ok(Some((path, bytes))),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    /// Location of the verbatim content file handed to external modules.
    pub fn raw_path(&self, doc_id: &str) -> PathBuf {
        self.read_path(&doc_rel(doc_id, "raw"))
    }

    fn write_manifest(&self) -> Result<(), StoreError> {
        let text = format::write_manifest(&self.manifest.read());
        write_if_changed(&self.write_path(Path::new(MANIFEST)), text.as_bytes())
    }

    /// Writes the files of `doc`, which the caller may hold locked.
    pub fn persist(&self, doc: &Document) -> Result<(), StoreError> {
        let id = doc.doc_id();
        let files = [
            ("attrs", format::write_attrs(&doc.attributes)),
            ("prov", format::write_prov(doc.provenance())),
            ("ann", format::write_anns(doc)),
            ("meta", format::write_meta(doc)),
        ];
        for (ext, text) in files {
            write_if_changed(&self.write_path(&doc_rel(id, ext)), text.as_bytes())?;
        }
        Ok(())
    }

    /// Adds and persists a new document.
    pub fn add_document(&self, doc: Document) -> Result<DocHandle, StoreError> {
        let mut manifest = self.manifest.write();
        let id = doc.doc_id().to_owned();
        if manifest.doc_ids.contains(&id) {
            return Err(StoreError::DuplicateDocId(id));
        }
        write_if_changed(&self.write_path(&doc_rel(&id, "raw")), doc.content())?;
        self.persist(&doc)?;
        manifest.doc_ids.push(id.clone());
        let text = format::write_manifest(&manifest);
        if let Err(e) = write_if_changed(&self.write_path(Path::new(MANIFEST)), text.as_bytes()) {
            manifest.doc_ids.pop();
            return Err(e);
        }
        let handle = Arc::new(RwLock::new(doc));
        self.docs.lock().insert(id, handle.clone());
        Ok(handle)
    }

    /// Shortcut for a fresh document from raw bytes.
    pub fn add_raw(&self, doc_id: &str, content: Vec<u8>, attributes: Attributes) -> Result<DocHandle, StoreError> {
        let doc = Document::new(doc_id, content, attributes).map_err(|_| StoreError::InvalidName(doc_id.into()))?;
        self.add_document(doc)
    }

    /// The document, loaded on first access.
    pub fn document(&self, doc_id: &str) -> Result<DocHandle, StoreError> {
        if !self.manifest.read().doc_ids.iter().any(|d| d == doc_id) {
            return Err(StoreError::NoSuchDocument(doc_id.into()));
        }
        let mut cache = self.docs.lock();
        if let Some(h) = cache.get(doc_id) {
            return Ok(h.clone());
        }
        let handle = Arc::new(RwLock::new(self.load_document(doc_id)?));
        cache.insert(doc_id.into(), handle.clone());
        Ok(handle)
    }

    fn load_document(&self, doc_id: &str) -> Result<Document, StoreError> {
        let corrupt = |path: PathBuf, reason: String| StoreError::CorruptDocument { path, reason };
        let text = |ext: &str| -> Result<Option<(PathBuf, String)>, StoreError> {
            match self.read_opt(&doc_rel(doc_id, ext))? {
                None => Ok(None),
                Some((path, bytes)) => match String::from_utf8(bytes) {
                    Ok(s) => Ok(Some((path, s))),
                    Err(_) => Err(corrupt(path, "not UTF-8".into())),
                },
            }
        };
        let fmt = |path: &Path, e: FormatError| corrupt(path.into(), e.to_string());
        let (_, content) = self
            .read_opt(&doc_rel(doc_id, "raw"))?
            .ok_or_else(|| corrupt(self.raw_path(doc_id), "content file missing".into()))?;
        let attributes = match text("attrs")? {
            Some((p, t)) => format::parse_attrs(&t).map_err(|e| fmt(&p, e))?,
            None => Attributes::new(),
        };
        let provenance = match text("prov")? {
            Some((p, t)) => format::parse_prov(&t).map_err(|e| fmt(&p, e))?,
            None => Default::default(),
        };
        let (ann_path, annotations) = match text("ann")? {
            Some((p, t)) => {
                let anns = format::parse_anns(&t).map_err(|e| fmt(&p, e))?;
                (p, anns)
            }
            None => (self.read_path(&doc_rel(doc_id, "ann")), Vec::new()),
        };
        let next_id = match text("meta")? {
            Some((p, t)) => format::parse_meta(&t).map_err(|e| fmt(&p, e))?,
            None => annotations.iter().map(|a| a.id).max().unwrap_or(0) + 1,
        };
        Document::from_parts(doc_id, content, attributes, annotations, provenance, next_id)
            .map_err(|e: DocError| corrupt(ann_path, e.to_string()))
    }

    /// Persists one loaded document.
    pub fn flush_document(&self, doc_id: &str) -> Result<(), StoreError> {
        let handle = self.docs.lock().get(doc_id).cloned();
        match handle {
            Some(h) => self.persist(&h.read()),
            None => Ok(()),
        }
    }

    /// Persists the manifest and every loaded document. Files whose
    /// content is unchanged are not rewritten.
    pub fn flush(&self) -> Result<(), StoreError> {
        self.write_manifest()?;
        let handles: Vec<DocHandle> = self.docs.lock().values().cloned().collect();
        for h in handles {
            self.persist(&h.read())?;
        }
        Ok(())
    }
}

/// Directory holding one subdirectory per collection.
#[derive(Debug)]
pub struct Workspace {
    root: PathBuf,
    open: Mutex<HashMap<String, Arc<Collection>>>,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace {
            root: root.into(),
            open: Mutex::new(HashMap::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir_for(&self, name: &str) -> Result<PathBuf, StoreError> {
        if !valid_doc_id(name) || name == "." || name == ".." {
            return Err(StoreError::InvalidName(name.into()));
        }
        Ok(self.root.join(escape(name).as_ref()))
    }

    pub fn create_collection(&self, name: &str) -> Result<Arc<Collection>, StoreError> {
        let mut open = self.open.lock();
        let coll = Arc::new(Collection::create(&self.dir_for(name)?, name)?);
        open.insert(name.into(), coll.clone());
        Ok(coll)
    }

    pub fn collection(&self, name: &str) -> Result<Arc<Collection>, StoreError> {
        let mut open = self.open.lock();
        if let Some(c) = open.get(name) {
            return Ok(c.clone());
        }
        let coll = match Collection::open(&self.dir_for(name)?) {
            Ok(c) => Arc::new(c),
            Err(StoreError::NotACollection(_)) => return Err(StoreError::NoSuchCollection(name.into())),
            Err(e) => return Err(e),
        };
        open.insert(name.into(), coll.clone());
        Ok(coll)
    }

    /// Names of all collections under the root, sorted.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut names = Vec::new();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(names),
            Err(e) => return Err(io_err(&self.root)(e)),
        };
        for entry in entries {
            let entry = entry.map_err(io_err(&self.root))?;
            let manifest = entry.path().join(MANIFEST);
            if let Ok(text) = fs::read_to_string(&manifest) {
                if let Ok(m) = format::parse_manifest(&text) {
                    names.push(m.name);
                }
            }
        }
        names.sort();
        Ok(names)
    }
}
