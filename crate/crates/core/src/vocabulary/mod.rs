//! Widget vocabularies, platform families and generic→target mapping tables.
//!
//! Vocabularies and mapping tables are plain data that can be loaded from
//! JSON, so a family's target widget set can be extended without code
//! changes.

mod builtin;
pub(crate) mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{code, Diagnostic};

pub use builtin::{builtin_family, builtin_generic_vocabulary, builtin_mapping, builtin_target_vocabulary};
pub use validate::validate_document;

/// Properties whose name starts with this prefix carry mapping hints rather
/// than rendering data.
pub const HINT_PREFIX: &str = "g:map-to:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "html-desktop")]
    HtmlDesktop,
    #[serde(rename = "wml-phone")]
    WmlPhone,
    #[serde(rename = "voice")]
    Voice,
}

impl FamilyId {
    pub const ALL: [FamilyId; 3] = [FamilyId::HtmlDesktop, FamilyId::WmlPhone, FamilyId::Voice];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::HtmlDesktop => "html-desktop",
            FamilyId::WmlPhone => "wml-phone",
            FamilyId::Voice => "voice",
        }
    }

    /// File extension of the markup the family compiles to.
    pub fn extension(self) -> &'static str {
        match self {
            FamilyId::HtmlDesktop => "html",
            FamilyId::WmlPhone => "wml",
            FamilyId::Voice => "vxml.txt",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown family `{0}` (expected html-desktop, wml-phone or voice)")]
pub struct UnknownFamily(pub String);

impl FromStr for FamilyId {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownFamily(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Text,
    Number,
    Boolean,
}

impl PropertyKind {
    pub fn accepts(self, value: &str) -> bool {
        match self {
            PropertyKind::Text => true,
            PropertyKind::Number => value.trim().parse::<f64>().is_ok(),
            PropertyKind::Boolean => matches!(value, "true" | "false"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyDef {
    pub name: String,
    pub kind: PropertyKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDef {
    pub class: String,
    #[serde(rename = "dataKeys", default)]
    pub data_keys: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidgetClassDef {
    pub name: String,
    #[serde(default)]
    pub container: bool,
    #[serde(default)]
    pub properties: Vec<PropertyDef>,
    #[serde(default)]
    pub events: Vec<EventDef>,
}

impl WidgetClassDef {
    pub fn property(&self, name: &str) -> Option<&PropertyDef> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn event(&self, class: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.class == class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vocabulary {
    pub name: String,
    pub classes: Vec<WidgetClassDef>,
}

impl Vocabulary {
    pub fn class(&self, name: &str) -> Option<&WidgetClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Event definition for `event_class` on any class of the vocabulary.
    pub fn any_event(&self, event_class: &str) -> Option<&EventDef> {
        self.classes.iter().find_map(|c| c.event(event_class))
    }

    /// Checks the vocabulary's own invariants.
    pub fn check(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for class in &self.classes {
            if class.name.is_empty() {
                diags.push(Diagnostic::error(code::VOCAB_SCHEMA, "widget class with empty name"));
            }
            if !seen.insert(class.name.as_str()) {
                diags.push(Diagnostic::error(
                    code::VOCAB_DUPLICATE_CLASS,
                    format!("duplicate widget class `{}`", class.name),
                ));
            }
            let mut props = std::collections::HashSet::new();
            for p in &class.properties {
                if !props.insert(p.name.as_str()) {
                    diags.push(Diagnostic::error(
                        code::VOCAB_DUPLICATE_MEMBER,
                        format!("class `{}` declares property `{}` twice", class.name, p.name),
                    ));
                }
            }
            let mut events = std::collections::HashSet::new();
            for e in &class.events {
                if !events.insert(e.class.as_str()) {
                    diags.push(Diagnostic::error(
                        code::VOCAB_DUPLICATE_MEMBER,
                        format!("class `{}` declares event `{}` twice", class.name, e.class),
                    ));
                }
            }
        }
        diags
    }
}

fn json_error(code: &'static str, err: &serde_json::Error) -> Diagnostic {
    Diagnostic::error(code, format!("schema violation: {err}")).at(err.line(), err.column())
}

pub fn load_vocabulary(text: &str) -> Result<Vocabulary, Vec<Diagnostic>> {
    let vocab: Vocabulary = serde_json::from_str(text).map_err(|e| vec![json_error(code::VOCAB_SCHEMA, &e)])?;
    let diags = vocab.check();
    if diags.is_empty() {
        Ok(vocab)
    } else {
        Err(diags)
    }
}

pub fn save_vocabulary(vocab: &Vocabulary) -> String {
    let mut s = serde_json::to_string_pretty(vocab).expect("vocabulary serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetOption {
    #[serde(rename = "target")]
    pub target_class: String,
    #[serde(default)]
    pub default: bool,
    /// Generic property name → target property name.
    #[serde(rename = "renames", default)]
    pub property_renames: BTreeMap<String, String>,
}

impl TargetOption {
    pub fn new(target_class: impl Into<String>, default: bool) -> Self {
        TargetOption {
            target_class: target_class.into(),
            default,
            property_renames: BTreeMap::new(),
        }
    }

    pub fn rename<'a>(&'a self, property: &'a str) -> &'a str {
        self.property_renames.get(property).map_or(property, String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingTable {
    pub family: FamilyId,
    pub entries: BTreeMap<String, Vec<TargetOption>>,
    /// Generic event class → target event class; unlisted events keep their name.
    #[serde(rename = "events", default)]
    pub event_renames: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("unknown widget class `{0}`")]
    UnknownClass(String),
}

impl MappingTable {
    /// Options for a generic class, default first, then in declared order.
    pub fn options(&self, generic_class: &str) -> Result<Vec<TargetOption>, VocabError> {
        let opts = self
            .entries
            .get(generic_class)
            .filter(|o| !o.is_empty())
            .ok_or_else(|| VocabError::UnknownClass(generic_class.to_owned()))?;
        let mut out: Vec<TargetOption> = opts.iter().filter(|o| o.default).cloned().collect();
        out.extend(opts.iter().filter(|o| !o.default).cloned());
        Ok(out)
    }

    pub fn default_option(&self, generic_class: &str) -> Option<&TargetOption> {
        self.entries.get(generic_class)?.iter().find(|o| o.default)
    }

    pub fn option(&self, generic_class: &str, target_class: &str) -> Option<&TargetOption> {
        self.entries
            .get(generic_class)?
            .iter()
            .find(|o| o.target_class == target_class)
    }

    pub fn rename_event<'a>(&'a self, event_class: &'a str) -> &'a str {
        self.event_renames.get(event_class).map_or(event_class, String::as_str)
    }

    /// Generic→generic table over every class of `vocab`.
    pub fn identity(vocab: &Vocabulary, family: FamilyId) -> Self {
        MappingTable {
            family,
            entries: vocab
                .classes
                .iter()
                .map(|c| (c.name.clone(), vec![TargetOption::new(c.name.clone(), true)]))
                .collect(),
            event_renames: BTreeMap::new(),
        }
    }

    /// Checks totality over `generic` and legality against `target`.
    pub fn check(&self, generic: &Vocabulary, target: &Vocabulary) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for class in &generic.classes {
            match self.entries.get(&class.name) {
                Some(opts) if !opts.is_empty() => {
                    let defaults = opts.iter().filter(|o| o.default).count();
                    if defaults != 1 {
                        diags.push(Diagnostic::error(
                            code::MAPPING_DEFAULTS,
                            format!(
                                "{}: `{}` has {defaults} default options, expected exactly one",
                                self.family, class.name
                            ),
                        ));
                    }
                }
                _ => diags.push(Diagnostic::error(
                    code::MAPPING_NO_OPTIONS,
                    format!("{}: no mapping options for `{}`", self.family, class.name),
                )),
            }
        }
        for (generic_class, opts) in &self.entries {
            if generic.class(generic_class).is_none() {
                diags.push(Diagnostic::error(
                    code::MAPPING_UNKNOWN_GENERIC,
                    format!("{}: `{generic_class}` is not a generic class", self.family),
                ));
            }
            for opt in opts {
                let Some(target_def) = target.class(&opt.target_class) else {
                    diags.push(Diagnostic::error(
                        code::MAPPING_UNKNOWN_TARGET,
                        format!(
                            "{}: target class `{}` for `{generic_class}` is not in vocabulary `{}`",
                            self.family, opt.target_class, target.name
                        ),
                    ));
                    continue;
                };
                for renamed in opt.property_renames.values() {
                    if target_def.property(renamed).is_none() {
                        diags.push(Diagnostic::error(
                            code::MAPPING_UNKNOWN_TARGET,
                            format!(
                                "{}: `{}` has no property `{renamed}`",
                                self.family, opt.target_class
                            ),
                        ));
                    }
                }
            }
        }
        diags
    }
}

pub fn load_mapping(text: &str) -> Result<MappingTable, Vec<Diagnostic>> {
    serde_json::from_str(text).map_err(|e| vec![json_error(code::MAPPING_SCHEMA, &e)])
}

pub fn save_mapping(table: &MappingTable) -> String {
    let mut s = serde_json::to_string_pretty(table).expect("mapping serializes");
    s.push('\n');
    s
}

/// Mapping options for a generic class in one of the built-in families.
pub fn mapping_options(generic_class: &str, family: FamilyId) -> Result<Vec<TargetOption>, VocabError> {
    builtin_mapping(family).options(generic_class)
}

/// A family's target vocabulary together with the table that maps onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub id: FamilyId,
    pub vocabulary: Vocabulary,
    pub mapping: MappingTable,
}

/// The generic vocabulary plus every family the toolchain can target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub generic: Vocabulary,
    families: BTreeMap<FamilyId, Family>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry {
            generic: builtin_generic_vocabulary(),
            families: FamilyId::ALL.into_iter().map(|id| (id, builtin_family(id))).collect(),
        }
    }

    pub fn with_generic(mut self, generic: Vocabulary) -> Self {
        self.generic = generic;
        self
    }

    /// Replaces a family after checking its table against both vocabularies.
    pub fn set_family(&mut self, family: Family) -> Result<(), Vec<Diagnostic>> {
        let diags = family.mapping.check(&self.generic, &family.vocabulary);
        if !diags.is_empty() {
            return Err(diags);
        }
        self.families.insert(family.id, family);
        Ok(())
    }

    pub fn family(&self, id: FamilyId) -> &Family {
        &self.families[&id]
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_ids_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(f.as_str().parse::<FamilyId>().unwrap(), f);
        }
        assert!("palm".parse::<FamilyId>().is_err());
    }

    #[test]
    fn load_single_class() {
        let v = load_vocabulary(r#"{"name":"t","classes":[{"name":"X","container":false,"properties":[{"name":"a","kind":"number"}],"events":[{"class":"E","dataKeys":["k"]}]}]}"#).unwrap();
        assert_eq!(v.classes.len(), 1);
        assert_eq!(v.class("X").unwrap().property("a").unwrap().kind, PropertyKind::Number);
        assert_eq!(load_vocabulary(&save_vocabulary(&v)).unwrap(), v);
    }

    #[test]
    fn load_rejects_duplicates_and_bad_schema() {
        let dup = load_vocabulary(r#"{"name":"t","classes":[{"name":"X"},{"name":"X"}]}"#).unwrap_err();
        assert_eq!(dup[0].code, code::VOCAB_DUPLICATE_CLASS);
        let bad = load_vocabulary(r#"{"name":"t","classes":[{"name":"X","kind":1}]}"#).unwrap_err();
        assert_eq!(bad[0].code, code::VOCAB_SCHEMA);
        assert!(bad[0].line >= 1);
        let prop = load_vocabulary(
            r#"{"name":"t","classes":[{"name":"X","properties":[{"name":"a","kind":"text"},{"name":"a","kind":"text"}]}]}"#,
        )
        .unwrap_err();
        assert_eq!(prop[0].code, code::VOCAB_DUPLICATE_MEMBER);
    }

    #[test]
    fn property_kinds() {
        assert!(PropertyKind::Number.accepts("3.5"));
        assert!(!PropertyKind::Number.accepts("three"));
        assert!(PropertyKind::Boolean.accepts("false"));
        assert!(!PropertyKind::Boolean.accepts("yes"));
    }

    #[test]
    fn mapping_table_checks() {
        let generic = builtin_generic_vocabulary();
        let target = builtin_target_vocabulary(FamilyId::HtmlDesktop);
        let mut table = builtin_mapping(FamilyId::HtmlDesktop);
        assert!(table.check(&generic, &target).is_empty());

        table.entries.get_mut("GArea").unwrap()[1].default = true;
        table.entries.get_mut("GLabel").unwrap()[0].target_class = "marquee".into();
        table.entries.remove("GList");
        let codes: Vec<_> = table.check(&generic, &target).iter().map(|d| d.code).collect();
        assert!(codes.contains(&code::MAPPING_DEFAULTS));
        assert!(codes.contains(&code::MAPPING_UNKNOWN_TARGET));
        assert!(codes.contains(&code::MAPPING_NO_OPTIONS));
    }

    #[test]
    fn mapping_file_round_trip() {
        let table = builtin_mapping(FamilyId::Voice);
        assert_eq!(load_mapping(&save_mapping(&table)).unwrap(), table);
        let err = load_mapping(r#"{"family":"pager","entries":{}}"#).unwrap_err();
        assert_eq!(err[0].code, code::MAPPING_SCHEMA);
    }

    #[test]
    fn registry_rejects_inconsistent_family() {
        let mut reg = Registry::builtin();
        let mut fam = builtin_family(FamilyId::WmlPhone);
        fam.mapping.entries.remove("GText");
        assert!(reg.set_family(fam).is_err());
    }
}
