//! Logical interaction models and their lowering to generic UIML.
//!
//! The node kinds are a small provisional set: enough to describe form-style
//! interfaces. Lowering is fixed: each kind maps onto a generic widget, and
//! inputs get a label sibling placed immediately before them.

use std::collections::HashSet;

use serde::Deserialize;

use crate::diag::{code, Diagnostic};
use crate::model::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Group,
    TextInput,
    Choice { options: Vec<String> },
    Trigger { action: String },
    Caption,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalNode {
    pub kind: NodeKind,
    pub name: String,
    pub label: String,
    pub children: Vec<LogicalNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalModel {
    pub title: String,
    pub root: LogicalNode,
}

impl LogicalNode {
    pub fn leaf(kind: NodeKind, name: impl Into<String>, label: impl Into<String>) -> Self {
        LogicalNode {
            kind,
            name: name.into(),
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn group(name: impl Into<String>, children: Vec<LogicalNode>) -> Self {
        LogicalNode {
            kind: NodeKind::Group,
            name: name.into(),
            label: String::new(),
            children,
        }
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a LogicalNode>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    title: String,
    root: RawNode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    kind: String,
    name: String,
    #[serde(default)]
    label: String,
    options: Option<Vec<String>>,
    action: Option<String>,
    #[serde(default)]
    children: Vec<RawNode>,
}

/// Reads a logical model file:
/// `{"title": …, "root": {"kind", "name", "label", "options"?, "action"?, "children"?}}`.
pub fn parse_logical(text: &str) -> Result<LogicalModel, Vec<Diagnostic>> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic::error(code::LOGICAL_SCHEMA, format!("logical model: {e}")).at(e.line(), e.column())]
    })?;
    let mut diags = Vec::new();
    if raw.title.trim().is_empty() {
        diags.push(Diagnostic::error(code::LOGICAL_SCHEMA, "model title must not be empty"));
    }
    let mut seen = HashSet::new();
    let root = convert(raw.root, &mut seen, &mut diags);
    if diags.is_empty() {
        Ok(LogicalModel {
            title: raw.title,
            root: root.expect("valid node when no diagnostics"),
        })
    } else {
        Err(diags)
    }
}

fn convert(raw: RawNode, seen: &mut HashSet<String>, diags: &mut Vec<Diagnostic>) -> Option<LogicalNode> {
    let err = |code, msg: String| Diagnostic::error(code, msg);
    if raw.name.is_empty() {
        diags.push(err(code::LOGICAL_EMPTY_NAME, format!("{} node without a name", raw.kind)));
    } else if !seen.insert(raw.name.clone()) {
        diags.push(err(code::LOGICAL_DUPLICATE_NAME, format!("duplicate node name `{}`", raw.name)));
    }
    let name = &raw.name;
    if raw.options.is_some() && raw.kind != "choice" {
        diags.push(err(code::LOGICAL_SCHEMA, format!("`{name}`: only choice nodes take options")));
    }
    if raw.action.is_some() && raw.kind != "trigger" {
        diags.push(err(code::LOGICAL_SCHEMA, format!("`{name}`: only trigger nodes take an action")));
    }
    if raw.kind != "group" && !raw.children.is_empty() {
        diags.push(err(code::LOGICAL_LEAF_CHILDREN, format!("`{name}`: {} nodes cannot have children", raw.kind)));
    }
    let kind = match raw.kind.as_str() {
        "group" => Some(NodeKind::Group),
        "text-input" => Some(NodeKind::TextInput),
        "caption" => Some(NodeKind::Caption),
        "choice" => match raw.options {
            Some(options) if !options.is_empty() => Some(NodeKind::Choice { options }),
            _ => {
                diags.push(err(code::LOGICAL_EMPTY_CHOICE, format!("choice `{name}` has no options")));
                None
            }
        },
        "trigger" => match raw.action {
            Some(action) if !action.is_empty() => Some(NodeKind::Trigger { action }),
            _ => {
                diags.push(err(code::LOGICAL_SCHEMA, format!("trigger `{name}` needs an action")));
                None
            }
        },
        other => {
            diags.push(err(
                code::LOGICAL_SCHEMA,
                format!("`{name}`: unknown node kind `{other}` (expected group, text-input, choice, trigger or caption)"),
            ));
            None
        }
    };
    let children: Vec<_> = raw
        .children
        .into_iter()
        .filter_map(|c| convert(c, seen, diags))
        .collect();
    Some(LogicalNode {
        kind: kind?,
        name: raw.name,
        label: raw.label,
        children,
    })
}

struct Lowering {
    bindings: Vec<PropertyBinding>,
    rules: Vec<Rule>,
}

impl Lowering {
    fn text(&mut self, part: &str, property: &str, value: &str) {
        if value.is_empty() {
            return;
        }
        self.bindings.push(PropertyBinding {
            selector: Selector::PartName(part.to_owned()),
            property_name: property.to_owned(),
            value: PropertyValue::Literal(value.to_owned()),
        });
    }

    fn label_for(&mut self, node: &LogicalNode) -> Part {
        let name = format!("{}Label", node.name);
        self.text(&name, "text", &node.label);
        Part::new(name, "GLabel")
    }

    fn node(&mut self, node: &LogicalNode) -> Vec<Part> {
        match &node.kind {
            NodeKind::Group => {
                self.text(&node.name, "text", &node.label);
                let children = node.children.iter().flat_map(|c| self.node(c)).collect();
                vec![Part::new(&node.name, "GArea").with_children(children)]
            }
            NodeKind::Caption => {
                self.text(&node.name, "text", &node.label);
                vec![Part::new(&node.name, "GLabel")]
            }
            NodeKind::TextInput => vec![self.label_for(node), Part::new(&node.name, "GText")],
            NodeKind::Choice { options } => {
                let label = self.label_for(node);
                self.text(&node.name, "items", &options.join("\n"));
                vec![label, Part::new(&node.name, "GList")]
            }
            NodeKind::Trigger { action } => {
                self.text(&node.name, "text", &node.label);
                self.rules.push(Rule {
                    condition: Condition::EventOccurs {
                        source_part: Some(node.name.clone()),
                        event_class: "GActionEvent".to_owned(),
                    },
                    actions: vec![Action::CallExternal {
                        function: action.clone(),
                        args: Vec::new(),
                    }],
                });
                vec![Part::new(&node.name, "GButton")]
            }
        }
    }
}

/// Lowers a logical model into a generic-vocabulary document.
pub fn lower(model: &LogicalModel) -> Result<UimlDocument, Vec<Diagnostic>> {
    let mut nodes = Vec::new();
    model.root.walk(&mut nodes);
    let mut lowering = Lowering {
        bindings: Vec::new(),
        rules: Vec::new(),
    };
    let window = Part::new(format!("{}Window", model.title), "GTopContainer")
        .with_children(lowering.node(&model.root));

    let mut seen = HashSet::new();
    let diags: Vec<Diagnostic> = window
        .walk()
        .filter(|p| !seen.insert(p.name.as_str()))
        .map(|p| {
            Diagnostic::error(
                code::LOGICAL_DUPLICATE_NAME,
                format!("generated part name `{}` is not unique", p.name),
            )
        })
        .collect();
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut iface = Interface::new(model.title.clone());
    iface.structures.push(Structure { roots: vec![window] });
    if !lowering.bindings.is_empty() {
        iface.styles.push(Style {
            bindings: lowering.bindings,
        });
    }
    if !lowering.rules.is_empty() {
        iface.behaviors.push(Behavior { rules: lowering.rules });
    }
    Ok(UimlDocument {
        head: vec![MetaEntry {
            name: "Purpose".to_owned(),
            content: model.title.clone(),
        }],
        interfaces: vec![iface],
        ..UimlDocument::default()
    })
}
