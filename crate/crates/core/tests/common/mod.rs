//! Shared helpers for the integration tests: seeded document generators and
//! a small tag-balance checker for emitted markup.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uimlc::model::*;
use uimlc::vocabulary::{mapping_options, FamilyId, HINT_PREFIX};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ALPHABET: &[char] = &[
    'a', 'b', 'Z', '0', ' ', ' ', '\n', '\t', '\r', '&', '<', '>', '"', '\'', ';', '#', ']', 'é', '中', '🙂',
];

/// Text drawn from an alphabet heavy in characters that need escaping.
pub fn text(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(0..12);
    (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn nonempty_text(rng: &mut ChaCha8Rng) -> String {
    let mut t = text(rng);
    if t.is_empty() {
        t.push('x');
    }
    t
}

struct Names {
    next: usize,
}

impl Names {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }
}

const LEAVES: [&str; 4] = ["GLabel", "GText", "GList", "GButton"];

fn generic_tree(rng: &mut ChaCha8Rng, names: &mut Names, depth: usize, class: &str) -> Part {
    let mut part = Part::new(names.fresh("P"), class);
    if class == "GTopContainer" || class == "GArea" {
        let n = if depth == 0 { 0 } else { rng.gen_range(0..6) };
        for _ in 0..n {
            let child = if rng.gen_bool(0.3) { "GArea" } else { LEAVES.choose(rng).unwrap() };
            part.children.push(generic_tree(rng, names, depth - 1, child));
        }
    }
    part
}

fn properties_of(class: &str) -> Vec<(&'static str, bool)> {
    // (name, boolean-valued)
    let mut props = vec![("text", false), ("visible", true), ("enabled", true)];
    match class {
        "GText" => props.push(("value", false)),
        "GList" => props.extend([("items", false), ("selected", false)]),
        _ => {}
    }
    props
}

fn value_for(rng: &mut ChaCha8Rng, boolean: bool) -> String {
    if boolean {
        ["true", "false"].choose(rng).unwrap().to_string()
    } else {
        text(rng)
    }
}

fn all_parts(structure: &Structure) -> Vec<Part> {
    structure.parts().cloned().collect()
}

/// A random document that validates against the built-in generic
/// vocabulary: one structure, style with part and class bindings, content
/// references, mapping hints, and rules that use every action kind.
pub fn generic_document(rng: &mut ChaCha8Rng) -> UimlDocument {
    let mut names = Names { next: 0 };
    let depth = rng.gen_range(1..6);
    let root = generic_tree(rng, &mut names, depth, "GTopContainer");
    let structure = Structure { roots: vec![root] };
    let parts = all_parts(&structure);

    let mut iface = Interface::new("Generated");
    let mut content = ContentSection::default();
    for i in 0..rng.gen_range(0..3) {
        content.constants.push((format!("c{i}"), text(rng)));
    }
    let mut style = Style::default();
    for _ in 0..rng.gen_range(0..8) {
        let part = parts.choose(rng).unwrap();
        let (prop, boolean) = *properties_of(&part.widget_class).choose(rng).unwrap();
        let value = if !boolean && !content.constants.is_empty() && rng.gen_bool(0.3) {
            PropertyValue::ContentRef(content.constants.choose(rng).unwrap().0.clone())
        } else {
            PropertyValue::Literal(value_for(rng, boolean))
        };
        let selector = if rng.gen_bool(0.25) {
            Selector::ClassName(part.widget_class.clone())
        } else {
            Selector::PartName(part.name.clone())
        };
        style.bindings.push(PropertyBinding {
            selector,
            property_name: prop.to_owned(),
            value,
        });
    }
    for _ in 0..rng.gen_range(0..3) {
        let part = parts.choose(rng).unwrap();
        let family = *FamilyId::ALL.choose(rng).unwrap();
        let options = mapping_options(&part.widget_class, family).unwrap();
        let target = options.choose(rng).unwrap();
        style.bindings.push(PropertyBinding {
            selector: Selector::PartName(part.name.clone()),
            property_name: format!("{HINT_PREFIX}{}", family.as_str()),
            value: PropertyValue::Literal(target.target_class.clone()),
        });
    }

    let mut behavior = Behavior::default();
    let buttons: Vec<&Part> = parts.iter().filter(|p| p.widget_class == "GButton").collect();
    let texts: Vec<&Part> = parts.iter().filter(|p| p.widget_class == "GText").collect();
    let containers: Vec<&Part> = parts
        .iter()
        .filter(|p| matches!(p.widget_class.as_str(), "GArea" | "GTopContainer"))
        .collect();
    for button in &buttons {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let mut actions = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let target = parts.choose(rng).unwrap();
            let action = match rng.gen_range(0..5) {
                0 => Action::SetProperty {
                    part: target.name.clone(),
                    property_name: "text".into(),
                    value: text(rng),
                },
                1 => Action::CallExternal {
                    function: "f".into(),
                    args: vec![
                        ArgRef::Literal(text(rng)),
                        ArgRef::PropertyRef {
                            part: target.name.clone(),
                            property_name: "text".into(),
                        },
                    ],
                },
                2 if !texts.is_empty() => Action::FireEvent {
                    event_class: "GChangedEvent".into(),
                    source_part: texts.choose(rng).unwrap().name.clone(),
                    data: vec![("value".into(), text(rng))],
                },
                3 => {
                    let parent = containers.choose(rng).unwrap();
                    let class = *LEAVES.choose(rng).unwrap();
                    Action::Restructure(RestructureOp::AddChild {
                        parent: parent.name.clone(),
                        subtree: Part::new(names.fresh("N"), class),
                    })
                }
                _ => Action::FireEvent {
                    event_class: "GActionEvent".into(),
                    source_part: button.name.clone(),
                    data: vec![],
                },
            };
            actions.push(action);
        }
        behavior.rules.push(Rule {
            condition: Condition::EventOccurs {
                source_part: Some(button.name.clone()),
                event_class: "GActionEvent".into(),
            },
            actions,
        });
    }
    for field in &texts {
        if rng.gen_bool(0.5) {
            behavior.rules.push(Rule {
                condition: Condition::EventDataEquals {
                    source_part: Some(field.name.clone()),
                    event_class: "GChangedEvent".into(),
                    data_key: "value".into(),
                    expected: text(rng),
                },
                actions: vec![Action::SetProperty {
                    part: field.name.clone(),
                    property_name: "value".into(),
                    value: text(rng),
                }],
            });
        }
    }

    iface.structures.push(structure);
    if !style.bindings.is_empty() {
        iface.styles.push(style);
    }
    if !content.constants.is_empty() {
        iface.contents.push(content);
    }
    if !behavior.rules.is_empty() {
        iface.behaviors.push(behavior);
    }
    UimlDocument {
        head: vec![MetaEntry {
            name: "Purpose".into(),
            content: "generated".into(),
        }],
        interfaces: vec![iface],
        ..UimlDocument::default()
    }
}

fn arbitrary_tree(rng: &mut ChaCha8Rng, names: &mut Names, depth: usize) -> Part {
    let mut part = Part::new(names.fresh("p"), nonempty_text(rng));
    if depth > 0 {
        for _ in 0..rng.gen_range(0..4) {
            part.children.push(arbitrary_tree(rng, names, depth - 1));
        }
    }
    part
}

fn arbitrary_action(rng: &mut ChaCha8Rng, names: &mut Names) -> Action {
    match rng.gen_range(0..5) {
        0 => Action::SetProperty {
            part: nonempty_text(rng),
            property_name: nonempty_text(rng),
            value: text(rng),
        },
        1 => Action::CallExternal {
            function: nonempty_text(rng),
            args: (0..rng.gen_range(0..3))
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        ArgRef::Literal(text(rng))
                    } else {
                        ArgRef::PropertyRef {
                            part: nonempty_text(rng),
                            property_name: nonempty_text(rng),
                        }
                    }
                })
                .collect(),
        },
        2 => Action::FireEvent {
            event_class: nonempty_text(rng),
            source_part: nonempty_text(rng),
            data: (0..rng.gen_range(0..3)).map(|i| (format!("k{i}"), text(rng))).collect(),
        },
        3 => Action::Restructure(RestructureOp::AddChild {
            parent: nonempty_text(rng),
            subtree: arbitrary_tree(rng, names, 2),
        }),
        _ => Action::Restructure(RestructureOp::Remove {
            part: nonempty_text(rng),
        }),
    }
}

/// A syntactically valid document with no regard for any vocabulary. Text
/// values are drawn from [`text`] so escaping is exercised everywhere.
pub fn arbitrary_document(rng: &mut ChaCha8Rng) -> UimlDocument {
    let mut names = Names { next: 0 };
    let mut doc = UimlDocument::default();
    for i in 0..rng.gen_range(0..3) {
        doc.head.push(MetaEntry {
            name: format!("m{i}"),
            content: text(rng),
        });
    }
    for i in 0..rng.gen_range(0..3) {
        let mut iface = Interface::new(if i == 0 && rng.gen_bool(0.3) { String::new() } else { format!("I{i}") });
        for _ in 0..rng.gen_range(0..3) {
            let roots = (0..rng.gen_range(0..3)).map(|_| arbitrary_tree(rng, &mut names, 3)).collect();
            iface.structures.push(Structure { roots });
        }
        for _ in 0..rng.gen_range(0..3) {
            let bindings = (0..rng.gen_range(0..4))
                .map(|_| PropertyBinding {
                    selector: if rng.gen_bool(0.5) {
                        Selector::PartName(nonempty_text(rng))
                    } else {
                        Selector::ClassName(nonempty_text(rng))
                    },
                    property_name: nonempty_text(rng),
                    value: if rng.gen_bool(0.7) {
                        PropertyValue::Literal(text(rng))
                    } else {
                        PropertyValue::ContentRef(nonempty_text(rng))
                    },
                })
                .collect();
            iface.styles.push(Style { bindings });
        }
        for _ in 0..rng.gen_range(0..3) {
            let constants = (0..rng.gen_range(0..4)).map(|j| (format!("c{j}"), text(rng))).collect();
            iface.contents.push(ContentSection { constants });
        }
        for _ in 0..rng.gen_range(0..3) {
            let rules = (0..rng.gen_range(0..3))
                .map(|_| {
                    let source_part = rng.gen_bool(0.7).then(|| nonempty_text(rng));
                    let event_class = nonempty_text(rng);
                    let condition = if rng.gen_bool(0.5) {
                        Condition::EventOccurs { source_part, event_class }
                    } else {
                        Condition::EventDataEquals {
                            source_part,
                            event_class,
                            data_key: nonempty_text(rng),
                            expected: text(rng),
                        }
                    };
                    let actions = (0..rng.gen_range(1..4)).map(|_| arbitrary_action(rng, &mut names)).collect();
                    Rule { condition, actions }
                })
                .collect();
            iface.behaviors.push(Behavior { rules });
        }
        doc.interfaces.push(iface);
    }
    if rng.gen_bool(0.3) {
        doc.preserved_peers
            .push("<peers>\n    <presentation name=\"x\">a &amp; b</presentation>\n  </peers>".into());
    }
    if rng.gen_bool(0.3) {
        doc.preserved_templates.push("<template name=\"t\"><part name=\"q\" class=\"c\"/></template>".into());
    }
    doc
}

/// Pre-order (class, child count) sequence of the first structure, with part
/// names. Two documents with equal shapes are tree-isomorphic.
pub fn shape(doc: &UimlDocument) -> Vec<(String, usize)> {
    doc.interfaces[0].structures[0]
        .parts()
        .map(|p| (p.name.clone(), p.children.len()))
        .collect()
}

pub fn class_sequence(doc: &UimlDocument) -> Vec<String> {
    doc.interfaces[0].structures[0].parts().map(|p| p.widget_class.clone()).collect()
}

/// Checks that every start tag has a matching end tag. Processing
/// instructions, declarations and comments are skipped.
pub fn check_balanced(markup: &str) -> Result<(), String> {
    let mut stack: Vec<&str> = Vec::new();
    let mut rest = markup;
    while let Some(i) = rest.find('<') {
        rest = &rest[i..];
        let end = rest.find('>').ok_or("unterminated tag")?;
        let tag = &rest[1..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == name.trim() => {}
                other => return Err(format!("</{name}> closes {other:?}")),
            }
        } else if !tag.ends_with('/') {
            let name = tag.split_whitespace().next().ok_or("empty tag")?;
            stack.push(name);
        }
    }
    if stack.is_empty() {
        Ok(())
    } else {
        Err(format!("unclosed: {stack:?}"))
    }
}
