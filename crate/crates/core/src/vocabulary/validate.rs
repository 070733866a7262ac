use std::collections::HashMap;

use super::{Vocabulary, WidgetClassDef, HINT_PREFIX};
use crate::diag::{anchor, code, Diagnostic};
use crate::model::*;

/// Checks a document against a vocabulary. An empty result means every
/// class, property, event and part reference is legal.
pub fn validate_document(doc: &UimlDocument, vocab: &Vocabulary) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for iface in &doc.interfaces {
        InterfaceCheck::new(iface, vocab, &mut diags).run();
    }
    diags
}

struct InterfaceCheck<'a> {
    iface: &'a Interface,
    vocab: &'a Vocabulary,
    /// Every part the interface can ever contain, structures first.
    parts: HashMap<&'a str, &'a str>,
    diags: &'a mut Vec<Diagnostic>,
}

impl<'a> InterfaceCheck<'a> {
    fn new(iface: &'a Interface, vocab: &'a Vocabulary, diags: &'a mut Vec<Diagnostic>) -> Self {
        let mut parts = HashMap::new();
        let structural = iface.structures.iter().flat_map(|s| s.parts());
        for part in structural.chain(added_parts(iface)) {
            parts.entry(part.name.as_str()).or_insert(part.widget_class.as_str());
        }
        InterfaceCheck {
            iface,
            vocab,
            parts,
            diags,
        }
    }

    fn push(&mut self, code: &'static str, anchor: String, msg: String) {
        self.diags.push(Diagnostic::error(code, msg).anchored(anchor));
    }

    fn run(&mut self) {
        let name = &self.iface.name;
        for structure in &self.iface.structures {
            for root in &structure.roots {
                self.check_tree(root, &anchor::part(name, &root.name));
            }
        }
        for (si, style) in self.iface.styles.iter().enumerate() {
            for (bi, binding) in style.bindings.iter().enumerate() {
                self.check_binding(binding, anchor::binding(name, si, bi));
            }
        }
        for (bi, behavior) in self.iface.behaviors.iter().enumerate() {
            for (ri, rule) in behavior.rules.iter().enumerate() {
                let at = anchor::rule(name, bi, ri);
                self.check_condition(&rule.condition, &at);
                for action in &rule.actions {
                    self.check_action(action, &at);
                }
            }
        }
    }

    fn check_tree(&mut self, part: &Part, at: &str) {
        for p in part.walk() {
            let anchor = if p.name == part.name {
                at.to_owned()
            } else {
                anchor::part(&self.iface.name, &p.name)
            };
            match self.vocab.class(&p.widget_class) {
                None => self.push(
                    code::UNKNOWN_CLASS,
                    anchor,
                    format!("part `{}` has unknown class `{}`", p.name, p.widget_class),
                ),
                Some(def) if !def.container && !p.children.is_empty() => self.push(
                    code::NON_CONTAINER_HAS_CHILDREN,
                    anchor,
                    format!("part `{}` of non-container class `{}` has children", p.name, p.widget_class),
                ),
                Some(_) => {}
            }
        }
    }

    /// Resolves a part reference to its class definition, reporting failures.
    fn part_class(&mut self, part: &str, at: &str) -> Option<&'a WidgetClassDef> {
        let Some(class) = self.parts.get(part).copied() else {
            self.push(code::UNRESOLVED_PART, at.to_owned(), format!("reference to unknown part `{part}`"));
            return None;
        };
        // unknown classes are reported once, by check_tree
        self.vocab.class(class)
    }

    fn check_property(&mut self, def: &WidgetClassDef, property: &str, value: Option<&str>, at: &str) {
        match def.property(property) {
            None => self.push(
                code::UNKNOWN_PROPERTY,
                at.to_owned(),
                format!("class `{}` has no property `{property}`", def.name),
            ),
            Some(p) => {
                if let Some(v) = value {
                    if !p.kind.accepts(v) {
                        self.push(
                            code::BAD_PROPERTY_VALUE,
                            at.to_owned(),
                            format!("`{v}` is not a valid {:?} value for `{}.{property}`", p.kind, def.name),
                        );
                    }
                }
            }
        }
    }

    fn check_binding(&mut self, binding: &PropertyBinding, at: String) {
        let value = match &binding.value {
            PropertyValue::Literal(v) => Some(v.as_str()),
            PropertyValue::ContentRef(c) => match self.iface.constant(c) {
                Some(v) => Some(v),
                None => {
                    self.push(
                        code::DANGLING_CONTENT_REF,
                        at.clone(),
                        format!("reference to missing content constant `{c}`"),
                    );
                    None
                }
            },
        };
        let def = match &binding.selector {
            Selector::PartName(p) => self.part_class(p, &at),
            Selector::ClassName(c) => {
                let def = self.vocab.class(c);
                if def.is_none() {
                    self.push(code::UNKNOWN_CLASS, at.clone(), format!("style selects unknown class `{c}`"));
                }
                def
            }
        };
        if binding.property_name.starts_with(HINT_PREFIX) {
            return;
        }
        if let Some(def) = def {
            self.check_property(def, &binding.property_name, value, &at);
        }
    }

    fn check_event(&mut self, source: Option<&str>, event_class: &str, keys: &[&str], at: &str) {
        let allowed = match source {
            Some(part) => {
                let Some(def) = self.part_class(part, at) else { return };
                match def.event(event_class) {
                    Some(e) => e,
                    None => {
                        self.push(
                            code::UNKNOWN_EVENT,
                            at.to_owned(),
                            format!("class `{}` does not raise `{event_class}`", def.name),
                        );
                        return;
                    }
                }
            }
            None => match self.vocab.any_event(event_class) {
                Some(e) => e,
                None => {
                    self.push(
                        code::UNKNOWN_EVENT,
                        at.to_owned(),
                        format!("no class in `{}` raises `{event_class}`", self.vocab.name),
                    );
                    return;
                }
            },
        };
        for key in keys {
            if !allowed.data_keys.iter().any(|k| k == key) {
                self.push(
                    code::UNKNOWN_DATA_KEY,
                    at.to_owned(),
                    format!("event `{event_class}` carries no data key `{key}`"),
                );
            }
        }
    }

    fn check_condition(&mut self, cond: &Condition, at: &str) {
        let keys: Vec<&str> = match cond {
            Condition::EventOccurs { .. } => vec![],
            Condition::EventDataEquals { data_key, .. } => vec![data_key.as_str()],
        };
        self.check_event(cond.source_part(), cond.event_class(), &keys, at);
    }

    fn check_action(&mut self, action: &Action, at: &str) {
        match action {
            Action::SetProperty { part, property_name, value } => {
                if let Some(def) = self.part_class(part, at) {
                    self.check_property(def, property_name, Some(value), at);
                }
            }
            Action::CallExternal { args, .. } => {
                for arg in args {
                    if let ArgRef::PropertyRef { part, property_name } = arg {
                        if let Some(def) = self.part_class(part, at) {
                            self.check_property(def, property_name, None, at);
                        }
                    }
                }
            }
            Action::FireEvent { event_class, source_part, data } => {
                let keys: Vec<&str> = data.iter().map(|(k, _)| k.as_str()).collect();
                self.check_event(Some(source_part), event_class, &keys, at);
            }
            Action::Restructure(RestructureOp::AddChild { parent, subtree }) => {
                if let Some(def) = self.part_class(parent, at) {
                    if !def.container {
                        self.push(
                            code::NON_CONTAINER_HAS_CHILDREN,
                            at.to_owned(),
                            format!("cannot add children to `{parent}` of non-container class `{}`", def.name),
                        );
                    }
                }
                self.check_tree(subtree, at);
            }
            Action::Restructure(RestructureOp::Remove { part }) => {
                self.part_class(part, at);
            }
        }
    }
}

/// Parts introduced by restructure actions.
pub(crate) fn added_parts(iface: &Interface) -> impl Iterator<Item = &Part> {
    iface.rules().flat_map(|r| r.actions.iter()).flat_map(|a| match a {
        Action::Restructure(RestructureOp::AddChild { subtree, .. }) => Some(subtree.walk()),
        _ => None,
    })
    .flatten()
}
