//! A compiler toolchain for a subset of UIML.
//!
//! The pipeline runs in stages, each producing an ordinary value:
//!
//! 1. [`logical::lower`] turns an abstract interaction model into generic UIML.
//! 2. [`parser::parse_uiml`] reads UIML text; [`vocabulary::validate_document`]
//!    checks it against a widget vocabulary.
//! 3. [`transform::split`] maps the generic document onto one platform
//!    document per family, honoring developer mapping hints.
//! 4. [`emit`] compiles platform documents to HTML, WML decks or voice dialogs.
//!
//! [`behavior`] interprets the behavior rules of a document without a display.

pub mod behavior;
pub mod cli;
pub mod diag;
pub mod emit;
pub mod logical;
pub mod model;
pub mod parser;
pub mod transform;
pub mod vocabulary;

pub use diag::{Diagnostic, Severity};
pub use model::UimlDocument;
pub use vocabulary::FamilyId;
