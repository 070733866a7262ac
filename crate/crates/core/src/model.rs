//! Typed in-memory UIML documents.
//!
//! A document is immutable once built; every stage of the pipeline produces a
//! new value instead of mutating its input.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UimlDocument {
    pub head: Vec<MetaEntry>,
    pub interfaces: Vec<Interface>,
    /// Raw `<peers>` elements, kept byte-for-byte.
    pub preserved_peers: Vec<String>,
    /// Raw `<template>` elements, kept byte-for-byte.
    pub preserved_templates: Vec<String>,
    /// Where the document came from. Not part of the serialized form.
    pub source_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaEntry {
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interface {
    pub name: String,
    pub structures: Vec<Structure>,
    pub styles: Vec<Style>,
    pub contents: Vec<ContentSection>,
    pub behaviors: Vec<Behavior>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Structure {
    pub roots: Vec<Part>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub name: String,
    pub widget_class: String,
    pub children: Vec<Part>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Style {
    pub bindings: Vec<PropertyBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    PartName(String),
    ClassName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyValue {
    Literal(String),
    ContentRef(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyBinding {
    pub selector: Selector,
    pub property_name: String,
    pub value: PropertyValue,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContentSection {
    pub constants: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Behavior {
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub condition: Condition,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    EventOccurs {
        source_part: Option<String>,
        event_class: String,
    },
    EventDataEquals {
        source_part: Option<String>,
        event_class: String,
        data_key: String,
        expected: String,
    },
}

impl Condition {
    pub fn event_class(&self) -> &str {
        match self {
            Condition::EventOccurs { event_class, .. }
            | Condition::EventDataEquals { event_class, .. } => event_class,
        }
    }

    pub fn source_part(&self) -> Option<&str> {
        match self {
            Condition::EventOccurs { source_part, .. }
            | Condition::EventDataEquals { source_part, .. } => source_part.as_deref(),
        }
    }

    pub(crate) fn event_class_mut(&mut self) -> &mut String {
        match self {
            Condition::EventOccurs { event_class, .. }
            | Condition::EventDataEquals { event_class, .. } => event_class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgRef {
    Literal(String),
    PropertyRef { part: String, property_name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RestructureOp {
    AddChild { parent: String, subtree: Part },
    Remove { part: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    SetProperty {
        part: String,
        property_name: String,
        value: String,
    },
    CallExternal {
        function: String,
        args: Vec<ArgRef>,
    },
    FireEvent {
        event_class: String,
        source_part: String,
        data: Vec<(String, String)>,
    },
    Restructure(RestructureOp),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown interface `{0}`")]
    UnknownInterface(String),
    #[error("unknown part `{0}`")]
    UnknownPart(String),
    #[error("property value refers to missing content constant `{0}`")]
    DanglingContentRef(String),
}

impl Part {
    pub fn new(name: impl Into<String>, widget_class: impl Into<String>) -> Self {
        Part {
            name: name.into(),
            widget_class: widget_class.into(),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<Part>) -> Self {
        self.children = children;
        self
    }

    /// Pre-order traversal, the part itself first.
    pub fn walk(&self) -> PartIter<'_> {
        PartIter { stack: vec![self] }
    }

    pub fn find(&self, name: &str) -> Option<&Part> {
        self.walk().find(|p| p.name == name)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

pub struct PartIter<'a> {
    stack: Vec<&'a Part>,
}

impl<'a> Iterator for PartIter<'a> {
    type Item = &'a Part;

    fn next(&mut self) -> Option<&'a Part> {
        let part = self.stack.pop()?;
        self.stack.extend(part.children.iter().rev());
        Some(part)
    }
}

impl Structure {
    /// Pre-order traversal across all roots.
    pub fn parts(&self) -> impl Iterator<Item = &Part> {
        self.roots.iter().flat_map(Part::walk)
    }

    pub fn find(&self, name: &str) -> Option<&Part> {
        self.parts().find(|p| p.name == name)
    }
}

impl Interface {
    pub fn new(name: impl Into<String>) -> Self {
        Interface {
            name: name.into(),
            ..Interface::default()
        }
    }

    /// The structure the pipeline compiles; further structures are carried along.
    pub fn primary_structure(&self) -> Option<&Structure> {
        self.structures.first()
    }

    pub fn bindings(&self) -> impl Iterator<Item = &PropertyBinding> {
        self.styles.iter().flat_map(|s| s.bindings.iter())
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.behaviors.iter().flat_map(|b| b.rules.iter())
    }

    /// Content constant lookup; later sections override earlier ones.
    pub fn constant(&self, name: &str) -> Option<&str> {
        self.contents
            .iter()
            .rev()
            .flat_map(|c| c.constants.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn resolve_value<'a>(&'a self, value: &'a PropertyValue) -> Result<&'a str, ModelError> {
        match value {
            PropertyValue::Literal(v) => Ok(v),
            PropertyValue::ContentRef(name) => self
                .constant(name)
                .ok_or_else(|| ModelError::DanglingContentRef(name.clone())),
        }
    }

    /// Cascade lookup for one property of a part with the given class.
    ///
    /// Part selectors beat class selectors; within one selector kind the
    /// binding that appears last in document order wins.
    pub fn cascade(
        &self,
        part_name: &str,
        widget_class: &str,
        property_name: &str,
    ) -> Result<Option<String>, ModelError> {
        let mut by_part = None;
        let mut by_class = None;
        for binding in self.bindings() {
            if binding.property_name != property_name {
                continue;
            }
            match &binding.selector {
                Selector::PartName(p) if p == part_name => by_part = Some(&binding.value),
                Selector::ClassName(c) if c == widget_class => by_class = Some(&binding.value),
                _ => {}
            }
        }
        match by_part.or(by_class) {
            Some(value) => self.resolve_value(value).map(|v| Some(v.to_owned())),
            None => Ok(None),
        }
    }

    /// Every property a part receives from the style cascade.
    pub fn cascaded_properties(
        &self,
        part_name: &str,
        widget_class: &str,
    ) -> Result<BTreeMap<String, String>, ModelError> {
        let mut names: Vec<&str> = self
            .bindings()
            .filter(|b| match &b.selector {
                Selector::PartName(p) => p == part_name,
                Selector::ClassName(c) => c == widget_class,
            })
            .map(|b| b.property_name.as_str())
            .collect();
        names.sort_unstable();
        names.dedup();
        let mut out = BTreeMap::new();
        for name in names {
            if let Some(v) = self.cascade(part_name, widget_class, name)? {
                out.insert(name.to_owned(), v);
            }
        }
        Ok(out)
    }
}

impl UimlDocument {
    pub fn interface(&self, name: &str) -> Result<&Interface, ModelError> {
        self.interfaces
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| ModelError::UnknownInterface(name.to_owned()))
    }

    pub fn meta(&self, name: &str) -> Option<&str> {
        self.head
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.content.as_str())
    }
}

/// Looks a part up in the first structure of the named interface.
pub fn find_part<'a>(
    doc: &'a UimlDocument,
    interface_name: &str,
    part_name: &str,
) -> Result<Option<&'a Part>, ModelError> {
    let iface = doc.interface(interface_name)?;
    Ok(iface.primary_structure().and_then(|s| s.find(part_name)))
}

/// Resolves a property for a part through the style cascade and content
/// constants.
pub fn resolve_property(
    doc: &UimlDocument,
    interface_name: &str,
    part_name: &str,
    property_name: &str,
) -> Result<Option<String>, ModelError> {
    let iface = doc.interface(interface_name)?;
    let part = iface
        .primary_structure()
        .and_then(|s| s.find(part_name))
        .ok_or_else(|| ModelError::UnknownPart(part_name.to_owned()))?;
    iface.cascade(&part.name, &part.widget_class, property_name)
}

pub fn count_parts(structure: &Structure) -> usize {
    structure.parts().count()
}
