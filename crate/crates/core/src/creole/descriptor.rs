use alloc::string::String;
use alloc::vec::Vec;

use crate::annotation::producer_id;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coupling {
    /// In-process module.
    Tight,
    /// External executable speaking the line protocol.
    Loose { executable: String },
}

/// How results of a module are displayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewerHint {
    pub type_name: Option<String>,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDescriptor {
    pub name: String,
    pub version: String,
    /// Precondition sources, `<producer-pattern> <label>`; all must hold.
    pub preconditions: Vec<String>,
    pub results: Vec<String>,
    pub coupling: Coupling,
    pub viewer_hint: Option<ViewerHint>,
}

impl ModuleDescriptor {
    pub fn tight(name: &str, version: &str) -> Self {
        ModuleDescriptor {
            name: name.into(),
            version: version.into(),
            preconditions: Vec::new(),
            results: Vec::new(),
            coupling: Coupling::Tight,
            viewer_hint: None,
        }
    }

    pub fn loose(name: &str, version: &str, executable: &str) -> Self {
        ModuleDescriptor {
            coupling: Coupling::Loose {
                executable: executable.into(),
            },
            ..Self::tight(name, version)
        }
    }

    pub fn requires(mut self, pattern: &str) -> Self {
        self.preconditions.push(pattern.into());
        self
    }

    pub fn produces(mut self, label: &str) -> Self {
        self.results.push(label.into());
        self
    }

    pub fn with_viewer(mut self, type_name: Option<&str>, color: &str) -> Self {
        self.viewer_hint = Some(ViewerHint {
            type_name: type_name.map(Into::into),
            color: color.into(),
        });
        self
    }

    /// `name-version`
    pub fn producer_id(&self) -> String {
        producer_id(&self.name, &self.version)
    }
}
