//! Generic UIML → platform UIML.
//!
//! Every generic part becomes exactly one target part, so the output tree has
//! the same shape, names and child order as the input. Which target class a
//! part gets is decided per family: an external hint wins over an in-document
//! `g:map-to:<family>` property, which wins over the table default.

use std::collections::{BTreeMap, HashMap};

use crate::diag::{anchor, code, has_errors, Diagnostic};
use crate::model::*;
use crate::vocabulary::validate::added_parts;
use crate::vocabulary::{
    validate_document, FamilyId, MappingTable, Registry, TargetOption, Vocabulary, HINT_PREFIX,
};

/// Requested target classes: part name → family → target class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HintSet {
    pub parts: BTreeMap<String, BTreeMap<FamilyId, String>>,
}

impl HintSet {
    pub fn get(&self, part: &str, family: FamilyId) -> Option<&str> {
        self.parts.get(part)?.get(&family).map(String::as_str)
    }

    pub fn insert(&mut self, part: impl Into<String>, family: FamilyId, target: impl Into<String>) {
        self.parts.entry(part.into()).or_default().insert(family, target.into());
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Reads a hints file: `{"parts": {"PartName": {"family": "target"}}}`.
pub fn load_hints(text: &str) -> Result<HintSet, Vec<Diagnostic>> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct File {
        parts: BTreeMap<String, BTreeMap<String, String>>,
    }
    let file: File = serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic::error(code::MALFORMED_HINT, format!("hints file: {e}")).at(e.line(), e.column())]
    })?;
    let mut hints = HintSet::default();
    let mut diags = Vec::new();
    for (part, per_family) in file.parts {
        for (family, target) in per_family {
            match family.parse::<FamilyId>() {
                Ok(f) => hints.insert(part.clone(), f, target),
                Err(e) => diags.push(Diagnostic::error(code::UNKNOWN_FAMILY, format!("hint for `{part}`: {e}"))),
            }
        }
    }
    if diags.is_empty() {
        Ok(hints)
    } else {
        Err(diags)
    }
}

/// Collects `g:map-to:<family>` bindings from every style of the document.
pub fn extract_hints(doc: &UimlDocument) -> Result<HintSet, Vec<Diagnostic>> {
    let mut hints = HintSet::default();
    let mut diags = Vec::new();
    for iface in &doc.interfaces {
        for (si, style) in iface.styles.iter().enumerate() {
            for (bi, binding) in style.bindings.iter().enumerate() {
                let Some(family) = binding.property_name.strip_prefix(HINT_PREFIX) else {
                    continue;
                };
                let at = anchor::binding(&iface.name, si, bi);
                let family = match family.parse::<FamilyId>() {
                    Ok(f) => f,
                    Err(e) => {
                        diags.push(Diagnostic::error(code::UNKNOWN_FAMILY, e.to_string()).anchored(at));
                        continue;
                    }
                };
                let Selector::PartName(part) = &binding.selector else {
                    diags.push(
                        Diagnostic::error(code::MALFORMED_HINT, "mapping hints must select a part by name")
                            .anchored(at),
                    );
                    continue;
                };
                match iface.resolve_value(&binding.value) {
                    Ok(target) if !target.trim().is_empty() => hints.insert(part.clone(), family, target.trim()),
                    Ok(_) => diags.push(
                        Diagnostic::error(code::MALFORMED_HINT, format!("empty mapping hint for `{part}`"))
                            .anchored(at),
                    ),
                    Err(e) => diags.push(Diagnostic::error(code::MALFORMED_HINT, e.to_string()).anchored(at)),
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(hints)
    } else {
        Err(diags)
    }
}

/// The resolved per-part mapping for one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingPlan {
    pub family: FamilyId,
    /// Part name → chosen option.
    pub choices: BTreeMap<String, TargetOption>,
    /// Generic class → options that class-selector style bindings expand to.
    pub class_choices: BTreeMap<String, Vec<TargetOption>>,
    pub event_renames: BTreeMap<String, String>,
    /// Non-fatal findings, e.g. hints naming parts that do not exist.
    pub warnings: Vec<Diagnostic>,
}

impl MappingPlan {
    pub fn target_class(&self, part: &str) -> Option<&str> {
        self.choices.get(part).map(|o| o.target_class.as_str())
    }

    fn rename_event(&self, class: &str) -> String {
        self.event_renames.get(class).cloned().unwrap_or_else(|| class.to_owned())
    }
}

/// All parts of the document in traversal order with their generic class.
fn document_parts(doc: &UimlDocument) -> Result<Vec<(&str, &str)>, Vec<Diagnostic>> {
    let mut classes: HashMap<&str, &str> = HashMap::new();
    let mut order = Vec::new();
    let mut diags = Vec::new();
    for iface in &doc.interfaces {
        let parts = iface.structures.iter().flat_map(|s| s.parts()).chain(added_parts(iface));
        for part in parts {
            match classes.get(part.name.as_str()) {
                None => {
                    classes.insert(&part.name, &part.widget_class);
                    order.push((part.name.as_str(), part.widget_class.as_str()));
                }
                Some(c) if *c == part.widget_class => {}
                Some(c) => diags.push(
                    Diagnostic::error(
                        code::AMBIGUOUS_PART,
                        format!(
                            "part name `{}` is used with classes `{c}` and `{}`; mapping needs one class per name",
                            part.name, part.widget_class
                        ),
                    )
                    .anchored(anchor::part(&iface.name, &part.name)),
                ),
            }
        }
    }
    if diags.is_empty() {
        Ok(order)
    } else {
        Err(diags)
    }
}

/// Chooses a target class for every part: external hint, then in-document
/// hint, then the table default.
pub fn plan(
    doc: &UimlDocument,
    table: &MappingTable,
    hints: &HintSet,
    external_hints: &HintSet,
) -> Result<MappingPlan, Vec<Diagnostic>> {
    let family = table.family;
    let parts = document_parts(doc)?;
    let mut diags = Vec::new();
    let mut choices = BTreeMap::new();
    let mut by_class: BTreeMap<String, Vec<TargetOption>> = BTreeMap::new();

    for (name, class) in &parts {
        let requested = external_hints.get(name, family).or_else(|| hints.get(name, family));
        let option = match requested {
            Some(target) => table.option(class, target).ok_or_else(|| {
                let allowed: Vec<String> = table
                    .options(class)
                    .map(|o| o.into_iter().map(|o| o.target_class).collect())
                    .unwrap_or_default();
                Diagnostic::error(
                    code::ILLEGAL_MAPPING,
                    format!(
                        "{family}: part `{name}` ({class}) cannot map to `{target}`; allowed: {}",
                        allowed.join(", ")
                    ),
                )
            }),
            None => table.default_option(class).ok_or_else(|| {
                Diagnostic::error(
                    code::INCOMPLETE_MAPPING,
                    format!("{family}: no default mapping for class `{class}` of part `{name}`"),
                )
            }),
        };
        match option {
            Ok(opt) => {
                let seen = by_class.entry((*class).to_owned()).or_default();
                if !seen.iter().any(|o| o.target_class == opt.target_class) {
                    seen.push(opt.clone());
                }
                choices.insert((*name).to_owned(), opt.clone());
            }
            Err(d) => diags.push(d),
        }
    }

    let mut class_choices = BTreeMap::new();
    for iface in &doc.interfaces {
        for binding in iface.bindings() {
            if let Selector::ClassName(class) = &binding.selector {
                if class_choices.contains_key(class) {
                    continue;
                }
                let opts = match by_class.get(class) {
                    Some(opts) => opts.clone(),
                    None => match table.default_option(class) {
                        Some(o) => vec![o.clone()],
                        None => {
                            diags.push(Diagnostic::error(
                                code::INCOMPLETE_MAPPING,
                                format!("{family}: no default mapping for styled class `{class}`"),
                            ));
                            continue;
                        }
                    },
                };
                class_choices.insert(class.clone(), opts);
            }
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    let warnings = hints
        .parts
        .keys()
        .chain(external_hints.parts.keys())
        .filter(|p| !choices.contains_key(*p))
        .map(|p| Diagnostic::warning(code::HINT_UNKNOWN_PART, format!("mapping hint names unknown part `{p}`")))
        .collect();
    Ok(MappingPlan {
        family,
        choices,
        class_choices,
        event_renames: table.event_renames.clone(),
        warnings,
    })
}

struct Mapper<'a> {
    plan: &'a MappingPlan,
    diags: Vec<Diagnostic>,
}

impl Mapper<'_> {
    fn option(&mut self, part: &str) -> Option<&TargetOption> {
        let opt = self.plan.choices.get(part);
        if opt.is_none() {
            self.diags.push(Diagnostic::error(
                code::INCOMPLETE_MAPPING,
                format!("{}: plan has no choice for part `{part}`", self.plan.family),
            ));
        }
        opt
    }

    fn rename_property(&mut self, part: &str, property: &str) -> String {
        self.option(part).map_or(property, |o| o.rename(property)).to_owned()
    }

    fn part(&mut self, part: &Part) -> Part {
        let widget_class = self
            .option(&part.name)
            .map_or_else(|| part.widget_class.clone(), |o| o.target_class.clone());
        Part {
            name: part.name.clone(),
            widget_class,
            children: part.children.iter().map(|c| self.part(c)).collect(),
        }
    }

    fn style(&mut self, style: &Style) -> Style {
        let mut bindings = Vec::new();
        for b in &style.bindings {
            if b.property_name.starts_with(HINT_PREFIX) {
                continue;
            }
            match &b.selector {
                Selector::PartName(p) => bindings.push(PropertyBinding {
                    selector: b.selector.clone(),
                    property_name: self.rename_property(p, &b.property_name),
                    value: b.value.clone(),
                }),
                Selector::ClassName(c) => match self.plan.class_choices.get(c) {
                    Some(opts) => bindings.extend(opts.iter().map(|o| PropertyBinding {
                        selector: Selector::ClassName(o.target_class.clone()),
                        property_name: o.rename(&b.property_name).to_owned(),
                        value: b.value.clone(),
                    })),
                    None => self.diags.push(Diagnostic::error(
                        code::INCOMPLETE_MAPPING,
                        format!("{}: plan has no choice for class `{c}`", self.plan.family),
                    )),
                },
            }
        }
        Style { bindings }
    }

    fn rule(&mut self, rule: &Rule) -> Rule {
        let mut condition = rule.condition.clone();
        let renamed = self.plan.rename_event(condition.event_class());
        *condition.event_class_mut() = renamed;
        let actions = rule
            .actions
            .iter()
            .map(|a| match a {
                Action::SetProperty { part, property_name, value } => Action::SetProperty {
                    part: part.clone(),
                    property_name: self.rename_property(part, property_name),
                    value: value.clone(),
                },
                Action::CallExternal { function, args } => Action::CallExternal {
                    function: function.clone(),
                    args: args
                        .iter()
                        .map(|arg| match arg {
                            ArgRef::Literal(_) => arg.clone(),
                            ArgRef::PropertyRef { part, property_name } => ArgRef::PropertyRef {
                                part: part.clone(),
                                property_name: self.rename_property(part, property_name),
                            },
                        })
                        .collect(),
                },
                Action::FireEvent { event_class, source_part, data } => Action::FireEvent {
                    event_class: self.plan.rename_event(event_class),
                    source_part: source_part.clone(),
                    data: data.clone(),
                },
                Action::Restructure(RestructureOp::AddChild { parent, subtree }) => {
                    Action::Restructure(RestructureOp::AddChild {
                        parent: parent.clone(),
                        subtree: self.part(subtree),
                    })
                }
                Action::Restructure(RestructureOp::Remove { .. }) => a.clone(),
            })
            .collect();
        Rule { condition, actions }
    }
}

/// Rewrites a generic document into the family's vocabulary according to
/// `plan`, then checks the result against `target_vocab`.
pub fn to_platform(
    doc: &UimlDocument,
    plan: &MappingPlan,
    target_vocab: &Vocabulary,
) -> Result<UimlDocument, Vec<Diagnostic>> {
    let mut mapper = Mapper {
        plan,
        diags: Vec::new(),
    };
    let interfaces = doc
        .interfaces
        .iter()
        .map(|iface| Interface {
            name: iface.name.clone(),
            structures: iface
                .structures
                .iter()
                .map(|s| Structure {
                    roots: s.roots.iter().map(|p| mapper.part(p)).collect(),
                })
                .collect(),
            styles: iface.styles.iter().map(|s| mapper.style(s)).collect(),
            contents: iface.contents.clone(),
            behaviors: iface
                .behaviors
                .iter()
                .map(|b| Behavior {
                    rules: b.rules.iter().map(|r| mapper.rule(r)).collect(),
                })
                .collect(),
        })
        .collect();
    if !mapper.diags.is_empty() {
        return Err(mapper.diags);
    }
    let out = UimlDocument {
        head: doc.head.clone(),
        interfaces,
        preserved_peers: doc.preserved_peers.clone(),
        preserved_templates: doc.preserved_templates.clone(),
        source_name: doc.source_name.clone(),
    };
    let diags = validate_document(&out, target_vocab);
    if has_errors(&diags) {
        return Err(diags);
    }
    Ok(out)
}

/// Produces one platform document per requested family. Duplicate families
/// are ignored; output follows the first occurrence order.
pub fn split(
    doc: &UimlDocument,
    families: &[FamilyId],
    external_hints: &HintSet,
    registry: &Registry,
) -> Result<Vec<(FamilyId, UimlDocument)>, Vec<Diagnostic>> {
    let hints = extract_hints(doc)?;
    let mut unique: Vec<FamilyId> = Vec::new();
    for f in families {
        if !unique.contains(f) {
            unique.push(*f);
        }
    }
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for family in unique {
        let fam = registry.family(family);
        let result = plan(doc, &fam.mapping, &hints, external_hints)
            .and_then(|p| to_platform(doc, &p, &fam.vocabulary));
        match result {
            Ok(platform) => out.push((family, platform)),
            Err(ds) => diags.extend(ds),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_uiml;
    use crate::vocabulary::{builtin_generic_vocabulary, builtin_mapping, builtin_target_vocabulary};

    fn doc(style: &str) -> UimlDocument {
        let src = format!(
            r#"<uiml><interface name="I"><structure>
            <part name="W" class="GTopContainer"><part name="A" class="GArea">
              <part name="L" class="GLabel"/><part name="S" class="GList"/>
              <part name="B" class="GButton"/><part name="C" class="GButton"/>
            </part></part></structure><style>{style}</style></interface></uiml>"#
        );
        parse_uiml(src.as_bytes()).unwrap()
    }

    #[test]
    fn hints_from_bindings() {
        let d = doc(r#"<property part-name="A" name="g:map-to:html-desktop">form</property>"#);
        let hints = extract_hints(&d).unwrap();
        assert_eq!(hints.get("A", FamilyId::HtmlDesktop), Some("form"));
        assert!(extract_hints(&doc("")).unwrap().is_empty());
    }

    #[test]
    fn hint_with_unknown_family() {
        let d = doc(r#"<property part-name="A" name="g:map-to:palm">form</property>"#);
        let err = extract_hints(&d).unwrap_err();
        assert_eq!(err[0].code, code::UNKNOWN_FAMILY);
        let d = doc(r#"<property class-name="GArea" name="g:map-to:voice">form</property>"#);
        assert_eq!(extract_hints(&d).unwrap_err()[0].code, code::MALFORMED_HINT);
    }

    #[test]
    fn plan_defaults_and_override() {
        let d = doc("");
        let table = builtin_mapping(FamilyId::HtmlDesktop);
        let p = plan(&d, &table, &HintSet::default(), &HintSet::default()).unwrap();
        assert_eq!(p.target_class("A"), Some("div"));
        assert_eq!(p.target_class("B"), Some("button"));

        let mut hints = HintSet::default();
        hints.insert("A", FamilyId::HtmlDesktop, "form");
        hints.insert("A", FamilyId::WmlPhone, "card");
        let p = plan(&d, &table, &hints, &HintSet::default()).unwrap();
        assert_eq!(p.target_class("A"), Some("form"));
        assert_eq!(p.target_class("W"), Some("page"));
        assert_eq!(p.target_class("L"), Some("label"));
    }

    #[test]
    fn external_hint_wins() {
        let d = doc(r#"<property part-name="B" name="g:map-to:html-desktop">submit</property>"#);
        let mut ext = HintSet::default();
        ext.insert("B", FamilyId::HtmlDesktop, "reset");
        let table = builtin_mapping(FamilyId::HtmlDesktop);
        let p = plan(&d, &table, &extract_hints(&d).unwrap(), &ext).unwrap();
        assert_eq!(p.target_class("B"), Some("reset"));
    }

    #[test]
    fn illegal_mapping() {
        let mut hints = HintSet::default();
        hints.insert("L", FamilyId::HtmlDesktop, "select");
        let err = plan(&doc(""), &builtin_mapping(FamilyId::HtmlDesktop), &hints, &HintSet::default())
            .unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, code::ILLEGAL_MAPPING);
        assert!(err[0].message.contains("`L`"));
        assert!(err[0].message.contains("label"));
    }

    #[test]
    fn hint_for_missing_part_warns() {
        let mut ext = HintSet::default();
        ext.insert("Ghost", FamilyId::Voice, "prompt");
        let p = plan(&doc(""), &builtin_mapping(FamilyId::Voice), &HintSet::default(), &ext).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.warnings[0].code, code::HINT_UNKNOWN_PART);
    }

    #[test]
    fn class_bindings_expand_per_chosen_target() {
        let d = doc(
            r#"<property class-name="GButton" name="text">Go</property>
               <property part-name="C" name="g:map-to:html-desktop">submit</property>
               <property class-name="GList" name="items">a</property>"#,
        );
        let table = builtin_mapping(FamilyId::HtmlDesktop);
        let p = plan(&d, &table, &extract_hints(&d).unwrap(), &HintSet::default()).unwrap();
        let out = to_platform(&d, &p, &builtin_target_vocabulary(FamilyId::HtmlDesktop)).unwrap();
        let sels: Vec<_> = out.interfaces[0].bindings().map(|b| b.selector.clone()).collect();
        assert_eq!(
            sels,
            [
                Selector::ClassName("button".into()),
                Selector::ClassName("submit".into()),
                Selector::ClassName("select".into())
            ]
        );
    }

    #[test]
    fn voice_renames_list_items() {
        let d = doc(r#"<property part-name="S" name="items">x</property>"#);
        let table = builtin_mapping(FamilyId::Voice);
        let p = plan(&d, &table, &HintSet::default(), &HintSet::default()).unwrap();
        let out = to_platform(&d, &p, &builtin_target_vocabulary(FamilyId::Voice)).unwrap();
        assert_eq!(out.interfaces[0].styles[0].bindings[0].property_name, "choices");
    }

    #[test]
    fn identity_table_drops_only_hints() {
        let d = doc(
            r#"<property part-name="A" name="g:map-to:html-desktop">form</property>
               <property part-name="L" name="text">Hi</property>"#,
        );
        let generic = builtin_generic_vocabulary();
        let table = MappingTable::identity(&generic, FamilyId::HtmlDesktop);
        let p = plan(&d, &table, &HintSet::default(), &HintSet::default()).unwrap();
        let out = to_platform(&d, &p, &generic).unwrap();
        let mut expected = d.clone();
        expected.interfaces[0].styles[0].bindings.remove(0);
        assert_eq!(out, expected);
    }

    #[test]
    fn ambiguous_part_names_across_interfaces() {
        let src = r#"<uiml>
            <interface name="I"><structure><part name="X" class="GLabel"/></structure></interface>
            <interface name="J"><structure><part name="X" class="GButton"/></structure></interface>
        </uiml>"#;
        let d = parse_uiml(src.as_bytes()).unwrap();
        let err = plan(&d, &builtin_mapping(FamilyId::Voice), &HintSet::default(), &HintSet::default())
            .unwrap_err();
        assert_eq!(err[0].code, code::AMBIGUOUS_PART);
    }

    #[test]
    fn split_families() {
        let d = doc("");
        let reg = Registry::builtin();
        let out = split(&d, &[FamilyId::HtmlDesktop, FamilyId::WmlPhone], &HintSet::default(), &reg).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].1.interfaces[0].structures[0].roots[0].widget_class, "page");
        assert_eq!(out[1].1.interfaces[0].structures[0].roots[0].widget_class, "deck");
        assert!(split(&d, &[], &HintSet::default(), &reg).unwrap().is_empty());
        let rev = split(&d, &[FamilyId::WmlPhone, FamilyId::HtmlDesktop], &HintSet::default(), &reg).unwrap();
        let mut a = out.clone();
        let mut b = rev;
        a.sort_by_key(|(f, _)| *f);
        b.sort_by_key(|(f, _)| *f);
        assert_eq!(a, b);
    }

    #[test]
    fn hints_file() {
        let h = load_hints(r#"{"parts":{"EBlock1":{"html-desktop":"form"}}}"#).unwrap();
        assert_eq!(h.get("EBlock1", FamilyId::HtmlDesktop), Some("form"));
        let err = load_hints(r#"{"parts":{"EBlock1":{"tv":"form"}}}"#).unwrap_err();
        assert_eq!(err[0].code, code::UNKNOWN_FAMILY);
        assert_eq!(load_hints("[]").unwrap_err()[0].code, code::MALFORMED_HINT);
    }
}
