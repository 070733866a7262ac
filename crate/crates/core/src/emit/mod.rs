//! Compilers from platform UIML to target markup.
//!
//! Each emitter reads the first structure of the document's first interface
//! and resolves properties through the style cascade. Output is deterministic
//! and ends with a newline.

mod html;
mod voice;
mod wml;

use thiserror::Error;

use crate::model::{Interface, Part, UimlDocument};
use crate::parser::{escape_attr, escape_text};
use crate::vocabulary::FamilyId;

pub use html::emit_html;
pub use voice::emit_voice;
pub use wml::{emit_wml, WML_CARD_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TitleSource {
    /// Content of the named `<meta>` entry.
    Meta(String),
    /// `text` property of the named part, or the part name itself.
    Part(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("indent of {0} exceeds the maximum of 8")]
pub struct IndentTooLarge(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    indent: usize,
    pub title_source: TitleSource,
    pub include_prolog: bool,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            indent: 2,
            title_source: TitleSource::Meta("Purpose".to_owned()),
            include_prolog: true,
        }
    }
}

impl EmitOptions {
    pub fn with_indent(mut self, indent: usize) -> Result<Self, IndentTooLarge> {
        if indent > 8 {
            return Err(IndentTooLarge(indent));
        }
        self.indent = indent;
        Ok(self)
    }

    pub fn indent(&self) -> usize {
        self.indent
    }
}

/// Compiles a platform document with the emitter that belongs to `family`.
pub fn emit(family: FamilyId, doc: &UimlDocument, opts: &EmitOptions) -> String {
    match family {
        FamilyId::HtmlDesktop => emit_html(doc, opts),
        FamilyId::WmlPhone => emit_wml(doc, opts),
        FamilyId::Voice => emit_voice(doc, opts),
    }
}

/// The part of a document an emitter works on.
struct View<'d> {
    iface: Option<&'d Interface>,
    roots: &'d [Part],
}

impl<'d> View<'d> {
    fn new(doc: &'d UimlDocument) -> Self {
        let iface = doc.interfaces.first();
        let roots = iface
            .and_then(Interface::primary_structure)
            .map_or(&[][..], |s| s.roots.as_slice());
        View { iface, roots }
    }

    fn prop(&self, part: &Part, name: &str) -> Option<String> {
        self.iface?.cascade(&part.name, &part.widget_class, name).ok().flatten()
    }

    /// `text` property, falling back to the part name.
    fn text(&self, part: &Part) -> String {
        self.prop(part, "text").unwrap_or_else(|| part.name.clone())
    }

    fn visible(&self, part: &Part) -> bool {
        self.prop(part, "visible").as_deref() != Some("false")
    }

    fn enabled(&self, part: &Part) -> bool {
        self.prop(part, "enabled").as_deref() != Some("false")
    }

    /// Newline-separated list property split into entries.
    fn items(&self, part: &Part, name: &str) -> Vec<String> {
        self.prop(part, name)
            .map(|s| s.lines().map(str::to_owned).filter(|l| !l.is_empty()).collect())
            .unwrap_or_default()
    }

    fn title(&self, doc: &UimlDocument, source: &TitleSource) -> String {
        let found = match source {
            TitleSource::Meta(name) => doc.meta(name).map(str::to_owned),
            TitleSource::Part(name) => self
                .roots
                .iter()
                .find_map(|r| r.find(name))
                .map(|p| self.text(p)),
        };
        found
            .or_else(|| self.iface.map(|i| i.name.clone()))
            .unwrap_or_default()
    }
}

struct Out {
    buf: String,
    indent: usize,
}

impl Out {
    fn new(opts: &EmitOptions) -> Self {
        Out {
            buf: String::new(),
            indent: opts.indent,
        }
    }

    fn line(&mut self, depth: usize, text: &str) {
        self.buf.extend(std::iter::repeat_n(' ', depth * self.indent));
        self.buf.push_str(text);
        self.buf.push('\n');
    }
}

fn attr(name: &str, value: &str) -> String {
    format!(" {name}=\"{}\"", escape_attr(value))
}

fn text(s: &str) -> String {
    escape_text(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indent_is_bounded() {
        assert!(EmitOptions::default().with_indent(8).is_ok());
        assert_eq!(EmitOptions::default().with_indent(9), Err(IndentTooLarge(9)));
        assert_eq!(EmitOptions::default().indent(), 2);
    }
}
