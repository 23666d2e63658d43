//! Annotation type declarations: which attributes a type carries and the
//! colour used to display it.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    String,
    Integer,
    Enumeration(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationTypeDeclaration {
    pub type_name: String,
    pub attribute_keys: Vec<(String, ValueKind)>,
    /// `#rrggbb`
    pub display_color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeclError {
    #[error("type {0:?} already declared")]
    DuplicateType(String),
    #[error("invalid display colour {0:?}")]
    BadColor(String),
}

/// `#rrggbb` with hex digits.
pub fn valid_color(c: &str) -> bool {
    c.len() == 7 && c.starts_with('#') && c[1..].bytes().all(|b| b.is_ascii_hexdigit())
}

/// A set of declarations with unique type names, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeDeclarations {
    decls: Vec<AnnotationTypeDeclaration>,
}

impl TypeDeclarations {
    pub fn declare(&mut self, decl: AnnotationTypeDeclaration) -> Result<(), DeclError> {
        if !valid_color(&decl.display_color) {
            return Err(DeclError::BadColor(decl.display_color));
        }
        if self.get(&decl.type_name).is_some() {
            return Err(DeclError::DuplicateType(decl.type_name));
        }
        self.decls.push(decl);
        Ok(())
    }

    pub fn get(&self, type_name: &str) -> Option<&AnnotationTypeDeclaration> {
        self.decls.iter().find(|d| d.type_name == type_name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AnnotationTypeDeclaration> + '_ {
        self.decls.iter()
    }
}
