//! Diagnostics shared by every stage of the toolchain.

use std::fmt;

/// Maximum number of diagnostics a single parse reports before giving up.
pub const MAX_DIAGNOSTICS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Stable diagnostic codes.
pub mod code {
    pub const MALFORMED_XML: &str = "UIML001";
    pub const DUPLICATE_PART: &str = "UIML002";
    pub const MISSING_ATTRIBUTE: &str = "UIML003";
    pub const DUPLICATE_INTERFACE: &str = "UIML004";
    pub const DUPLICATE_CONSTANT: &str = "UIML005";
    pub const INVALID_ATTRIBUTE: &str = "UIML006";
    pub const EMPTY_ACTION_LIST: &str = "UIML007";
    pub const MISSING_CONDITION: &str = "UIML008";
    pub const UNKNOWN_ELEMENT: &str = "UIML010";
    pub const UNEXPECTED_TEXT: &str = "UIML011";
    pub const IGNORED_ELEMENT: &str = "UIML012";
    pub const NOT_UIML: &str = "UIML013";

    pub const UNKNOWN_CLASS: &str = "UIML020";
    pub const NON_CONTAINER_HAS_CHILDREN: &str = "UIML021";
    pub const UNKNOWN_PROPERTY: &str = "UIML022";
    pub const UNKNOWN_EVENT: &str = "UIML023";
    pub const UNRESOLVED_PART: &str = "UIML024";
    pub const DANGLING_CONTENT_REF: &str = "UIML025";
    pub const UNKNOWN_DATA_KEY: &str = "UIML026";
    pub const BAD_PROPERTY_VALUE: &str = "UIML027";

    pub const UNKNOWN_FAMILY: &str = "UIML030";
    pub const ILLEGAL_MAPPING: &str = "UIML031";
    pub const MALFORMED_HINT: &str = "UIML032";
    pub const AMBIGUOUS_PART: &str = "UIML033";
    pub const HINT_UNKNOWN_PART: &str = "UIML034";
    pub const INCOMPLETE_MAPPING: &str = "UIML035";

    pub const VOCAB_SCHEMA: &str = "VOC001";
    pub const VOCAB_DUPLICATE_CLASS: &str = "VOC002";
    pub const VOCAB_DUPLICATE_MEMBER: &str = "VOC003";
    pub const MAPPING_SCHEMA: &str = "MAP001";
    pub const MAPPING_NO_OPTIONS: &str = "MAP002";
    pub const MAPPING_DEFAULTS: &str = "MAP003";
    pub const MAPPING_UNKNOWN_TARGET: &str = "MAP004";
    pub const MAPPING_UNKNOWN_GENERIC: &str = "MAP005";

    pub const EVENTS_SCHEMA: &str = "EVT001";

    pub const LOGICAL_SCHEMA: &str = "LOG001";
    pub const LOGICAL_DUPLICATE_NAME: &str = "LOG002";
    pub const LOGICAL_EMPTY_CHOICE: &str = "LOG003";
    pub const LOGICAL_LEAF_CHILDREN: &str = "LOG004";
    pub const LOGICAL_EMPTY_NAME: &str = "LOG005";
}

/// A single finding. `line`/`column` are 1-based when anchored to input and
/// 0 otherwise; `anchor` names the model element a later stage can map back
/// to a source position (see [`crate::parser::SourceMap`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub anchor: Option<String>,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            line: 0,
            column: 0,
            anchor: None,
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, message)
        }
    }

    pub fn at(mut self, line: usize, column: usize) -> Self {
        self.line = line;
        self.column = column;
        self
    }

    pub fn anchored(mut self, anchor: impl Into<String>) -> Self {
        self.anchor = Some(anchor.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} {}", self.line, self.column, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Element anchors used to tie model-level diagnostics back to positions.
pub mod anchor {
    pub fn interface(iface: &str) -> String {
        format!("{iface}/interface")
    }

    pub fn part(iface: &str, part: &str) -> String {
        format!("{iface}/part/{part}")
    }

    pub fn binding(iface: &str, style: usize, index: usize) -> String {
        format!("{iface}/style/{style}/{index}")
    }

    pub fn constant(iface: &str, section: usize, index: usize) -> String {
        format!("{iface}/content/{section}/{index}")
    }

    pub fn rule(iface: &str, behavior: usize, index: usize) -> String {
        format!("{iface}/rule/{behavior}/{index}")
    }
}
