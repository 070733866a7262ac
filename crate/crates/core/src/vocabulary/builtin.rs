//! The built-in generic vocabulary and the three family tables.

use std::collections::BTreeMap;

use super::*;

fn prop(name: &str, kind: PropertyKind) -> PropertyDef {
    PropertyDef {
        name: name.to_owned(),
        kind,
    }
}

fn event(class: &str, keys: &[&str]) -> EventDef {
    EventDef {
        class: class.to_owned(),
        data_keys: keys.iter().map(|k| (*k).to_owned()).collect(),
    }
}

/// `text`, `visible` and `enabled` plus the given extra text properties.
fn class(name: &str, container: bool, extra: &[&str], events: Vec<EventDef>) -> WidgetClassDef {
    let mut properties = vec![
        prop("text", PropertyKind::Text),
        prop("visible", PropertyKind::Boolean),
        prop("enabled", PropertyKind::Boolean),
    ];
    properties.extend(extra.iter().map(|p| prop(p, PropertyKind::Text)));
    WidgetClassDef {
        name: name.to_owned(),
        container,
        properties,
        events,
    }
}

pub fn builtin_generic_vocabulary() -> Vocabulary {
    Vocabulary {
        name: "generic".to_owned(),
        classes: vec![
            class("GTopContainer", true, &[], vec![]),
            class("GArea", true, &[], vec![]),
            class("GLabel", false, &[], vec![]),
            class("GText", false, &["value"], vec![event("GChangedEvent", &["value"])]),
            class("GList", false, &["items", "selected"], vec![event("GSelectEvent", &["item"])]),
            class("GButton", false, &[], vec![event("GActionEvent", &[])]),
        ],
    }
}

pub fn builtin_target_vocabulary(family: FamilyId) -> Vocabulary {
    let classes = match family {
        FamilyId::HtmlDesktop => vec![
            class("page", true, &[], vec![]),
            class("div", true, &[], vec![]),
            class("form", true, &[], vec![]),
            class("fieldset", true, &[], vec![]),
            class("label", false, &[], vec![]),
            class("input-text", false, &["value"], vec![event("onchange", &["value"])]),
            class("select", false, &["items", "selected"], vec![event("onselect", &["item"])]),
            class("button", false, &[], vec![event("onclick", &[])]),
            class("submit", false, &[], vec![event("onclick", &[])]),
            class("reset", false, &[], vec![event("onclick", &[])]),
        ],
        FamilyId::WmlPhone => vec![
            class("deck", true, &[], vec![]),
            class("card", true, &[], vec![]),
            class("text", false, &[], vec![]),
            class("input", false, &["value"], vec![event("change", &["value"])]),
            class("select", false, &["items", "selected"], vec![event("pick", &["item"])]),
            class("do-action", false, &[], vec![event("accept", &[])]),
        ],
        FamilyId::Voice => vec![
            class("dialog", true, &[], vec![]),
            class("voice-form", true, &[], vec![]),
            class("prompt", false, &[], vec![]),
            class("field-spoken", false, &["value"], vec![event("filled", &["value"])]),
            class("field-choice", false, &["choices", "selected"], vec![event("chosen", &["item"])]),
            class("confirm-action", false, &[], vec![event("confirmed", &[])]),
        ],
    };
    Vocabulary {
        name: family.as_str().to_owned(),
        classes,
    }
}

fn entry(options: &[&str]) -> Vec<TargetOption> {
    options
        .iter()
        .enumerate()
        .map(|(i, t)| TargetOption::new(*t, i == 0))
        .collect()
}

type Rows = Vec<(&'static str, Vec<TargetOption>)>;
type EventRenames = [(&'static str, &'static str); 3];

pub fn builtin_mapping(family: FamilyId) -> MappingTable {
    let (rows, events): (Rows, EventRenames) = match family {
        FamilyId::HtmlDesktop => (
            vec![
                ("GTopContainer", entry(&["page"])),
                ("GArea", entry(&["div", "form", "fieldset"])),
                ("GLabel", entry(&["label"])),
                ("GText", entry(&["input-text"])),
                ("GList", entry(&["select"])),
                ("GButton", entry(&["button", "submit", "reset"])),
            ],
            [("GActionEvent", "onclick"), ("GChangedEvent", "onchange"), ("GSelectEvent", "onselect")],
        ),
        FamilyId::WmlPhone => (
            vec![
                ("GTopContainer", entry(&["deck"])),
                ("GArea", entry(&["card"])),
                ("GLabel", entry(&["text"])),
                ("GText", entry(&["input"])),
                ("GList", entry(&["select"])),
                ("GButton", entry(&["do-action"])),
            ],
            [("GActionEvent", "accept"), ("GChangedEvent", "change"), ("GSelectEvent", "pick")],
        ),
        FamilyId::Voice => {
            let mut choice = entry(&["field-choice"]);
            choice[0].property_renames.insert("items".to_owned(), "choices".to_owned());
            (
                vec![
                    ("GTopContainer", entry(&["dialog"])),
                    ("GArea", entry(&["voice-form"])),
                    ("GLabel", entry(&["prompt"])),
                    ("GText", entry(&["field-spoken"])),
                    ("GList", choice),
                    ("GButton", entry(&["confirm-action"])),
                ],
                [("GActionEvent", "confirmed"), ("GChangedEvent", "filled"), ("GSelectEvent", "chosen")],
            )
        }
    };
    MappingTable {
        family,
        entries: rows.into_iter().map(|(g, o)| (g.to_owned(), o)).collect(),
        event_renames: events
            .iter()
            .map(|(g, t)| ((*g).to_owned(), (*t).to_owned()))
            .collect::<BTreeMap<_, _>>(),
    }
}

pub fn builtin_family(id: FamilyId) -> Family {
    Family {
        id,
        vocabulary: builtin_target_vocabulary(id),
        mapping: builtin_mapping(id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn targets(opts: Vec<TargetOption>) -> Vec<(String, bool)> {
        opts.into_iter().map(|o| (o.target_class, o.default)).collect()
    }

    #[test]
    fn generic_vocabulary_has_the_six_classes() {
        let v = builtin_generic_vocabulary();
        assert_eq!(v.classes.len(), 6);
        assert!(v.class("GList").is_some());
        assert!(v.check().is_empty());
        let containers: Vec<_> = v.classes.iter().filter(|c| c.container).map(|c| c.name.as_str()).collect();
        assert_eq!(containers, ["GTopContainer", "GArea"]);
    }

    #[test]
    fn option_lists() {
        assert_eq!(
            targets(mapping_options("GText", FamilyId::HtmlDesktop).unwrap()),
            [("input-text".to_owned(), true)]
        );
        assert_eq!(
            targets(mapping_options("GArea", FamilyId::HtmlDesktop).unwrap()),
            [("div".to_owned(), true), ("form".to_owned(), false), ("fieldset".to_owned(), false)]
        );
        assert_eq!(
            targets(mapping_options("GArea", FamilyId::WmlPhone).unwrap()),
            [("card".to_owned(), true)]
        );
        assert_eq!(
            mapping_options("GFoo", FamilyId::Voice),
            Err(VocabError::UnknownClass("GFoo".into()))
        );
    }

    #[test]
    fn every_family_is_total_and_legal() {
        let generic = builtin_generic_vocabulary();
        for f in FamilyId::ALL {
            let fam = builtin_family(f);
            assert!(fam.vocabulary.check().is_empty(), "{f}");
            assert!(fam.mapping.check(&generic, &fam.vocabulary).is_empty(), "{f}");
            for class in &generic.classes {
                assert!(fam.mapping.default_option(&class.name).is_some());
            }
        }
    }
}
