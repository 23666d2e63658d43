//! Core of the text-engineering workbench.
//!
//! Documents are immutable byte strings carrying standoff annotations over
//! half-open byte spans. Processing modules register descriptors with the
//! [`creole::Registry`]; preconditions over a document's provenance decide
//! whether a module is runnable (green), blocked (amber) or already done
//! (red). Everything here is free of IO and only needs `alloc`, so the same
//! model can back the on-disk store, the HTTP gateway and the CLI.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotation;
pub mod creole;
pub mod decl;
pub mod document;
pub mod pattern;
pub mod provenance;
pub mod selector;
pub mod sgml;
pub mod span;
pub mod vie;

pub use annotation::{Annotation, Attributes};
pub use document::{DocError, Document};
pub use pattern::{PatternError, PreconditionPattern, ProducerPattern};
pub use provenance::ProvenanceIndex;
pub use selector::AnnotationSelector;
pub use span::Span;
