//! Module descriptor files (`*.creole`), one per module:
//!
//! ```text
//! name=pos-filter
//! version=1.0
//! pre=tokenizer-* tokens
//! result=filtered
//! exec=bin/pos-filter
//! color=#aa3300
//! ```
//!
//! A file with `data=<path>` instead of `exec=` declares a data resource
//! (a lexicon or gazetteer); its `result=` names the resource kind.
//! Relative paths resolve against the descriptor directory.

use std::fs;
use std::path::{Path, PathBuf};

use gate_core::creole::ModuleDescriptor;

pub const EXTENSION: &str = "creole";

#[derive(Debug, thiserror::Error)]
pub enum DescriptorError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {reason}", path.display())]
    Invalid {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataResource {
    pub name: String,
    pub version: String,
    /// Resource kind, e.g. `lexicon` or `gazetteer`.
    pub label: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descriptor {
    Module(ModuleDescriptor),
    Data(DataResource),
}

pub fn parse_descriptor(text: &str, base: &Path, path: &Path) -> Result<Descriptor, DescriptorError> {
    let invalid = |line: usize, reason: &str| DescriptorError::Invalid {
        path: path.into(),
        line,
        reason: reason.into(),
    };
    let (mut name, mut version, mut exec, mut data, mut color, mut view) = (None, None, None, None, None, None);
    let mut pre = Vec::new();
    let mut results = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(invalid(i + 1, "expected key=value"));
        };
        let value = value.trim().to_string();
        match key.trim() {
            "name" => name = Some(value),
            "version" => version = Some(value),
            "pre" => pre.push(value),
            "result" => results.push(value),
            "exec" => exec = Some(value),
            "data" => data = Some(value),
            "color" => color = Some(value),
            "type" => view = Some(value),
            other => return Err(invalid(i + 1, &format!("unknown key {other:?}"))),
        }
    }
    let last = text.lines().count().max(1);
    let name = name.ok_or_else(|| invalid(last, "missing name="))?;
    let version = version.ok_or_else(|| invalid(last, "missing version="))?;
    let resolve = |p: String| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    match (exec, data) {
        (Some(exec), None) => {
            let mut desc = ModuleDescriptor::loose(&name, &version, &resolve(exec).to_string_lossy());
            desc.preconditions = pre;
            desc.results = results;
            if let Some(color) = color {
                desc = desc.with_viewer(view.as_deref(), &color);
            }
            Ok(Descriptor::Module(desc))
        }
        (None, Some(data)) => {
            let [label] = <[String; 1]>::try_from(results)
                .map_err(|_| invalid(last, "data resources declare exactly one result="))?;
            Ok(Descriptor::Data(DataResource {
                name,
                version,
                label,
                path: resolve(data),
            }))
        }
        _ => Err(invalid(last, "exactly one of exec= or data= is required")),
    }
}

/// All `*.creole` files in `dir`, in file name order.
pub fn load_dir(dir: &Path) -> Result<Vec<Descriptor>, DescriptorError> {
    let io = |source| DescriptorError::Io {
        path: dir.into(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == EXTENSION))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|source| DescriptorError::Io {
                path: p.clone(),
                source,
            })?;
            parse_descriptor(&text, dir, p)
        })
        .collect()
}
