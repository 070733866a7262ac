//! UIML reader and canonical writer.
//!
//! Reading happens in two passes: quick-xml events are folded into a small
//! element tree that remembers source offsets, then the tree is interpreted
//! into a [`UimlDocument`]. The offsets let `<peers>` and `<template>` be kept
//! verbatim and give every diagnostic a line and column.
//!
//! Accepted syntax beyond the `<structure>` section:
//!
//! ```text
//! <style>
//!   <property part-name="P" name="text">literal</property>
//!   <property class-name="GButton" name="text"><reference constant-name="c"/></property>
//! </style>
//! <content>
//!   <constant name="c">text</constant>
//! </content>
//! <behavior>
//!   <rule>
//!     <condition>
//!       <event class="GSelectEvent" part-name="P"/>
//!       <op name="equal"><data key="item"/><constant>VA</constant></op>
//!     </condition>
//!     <action>
//!       <property part-name="P" name="text">v</property>
//!       <call name="f"><param>literal</param><param part-name="P" property="value"/></call>
//!       <event class="E" part-name="P"><data key="k">v</data></event>
//!       <restructure op="add" parent="P"><part name="N" class="GLabel"/></restructure>
//!       <restructure op="remove" part-name="N"/>
//!     </action>
//!   </rule>
//! </behavior>
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::diag::{anchor, code, Diagnostic, MAX_DIAGNOSTICS};
use crate::model::*;

/// Positions of model elements in the parsed input, keyed by diagnostic anchor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    positions: BTreeMap<String, (usize, usize)>,
}

impl SourceMap {
    pub fn position(&self, anchor: &str) -> Option<(usize, usize)> {
        self.positions.get(anchor).copied()
    }

    /// Fills in line/column for diagnostics that only carry an anchor.
    pub fn locate(&self, diag: &mut Diagnostic) {
        if diag.line != 0 {
            return;
        }
        if let Some((line, col)) = diag.anchor.as_deref().and_then(|a| self.position(a)) {
            diag.line = line;
            diag.column = col;
        }
    }

    fn record(&mut self, anchor: String, pos: (usize, usize)) {
        self.positions.entry(anchor).or_insert(pos);
    }
}

#[derive(Debug, Default)]
pub struct ParseOutput {
    pub document: Option<UimlDocument>,
    pub diagnostics: Vec<Diagnostic>,
    pub source_map: SourceMap,
}

/// Parses UIML, failing if any error-level diagnostic was produced.
pub fn parse_uiml(input: &[u8]) -> Result<UimlDocument, Vec<Diagnostic>> {
    let out = parse_uiml_full(input, "");
    if crate::diag::has_errors(&out.diagnostics) {
        Err(out.diagnostics)
    } else {
        Ok(out.document.expect("document present when no errors"))
    }
}

/// Parses UIML and returns everything the parser learned, including warnings
/// and source positions.
pub fn parse_uiml_full(input: &[u8], source_name: &str) -> ParseOutput {
    let text = match std::str::from_utf8(input) {
        Ok(t) => t,
        Err(e) => {
            let lines = LineIndex::new(&input[..e.valid_up_to()]);
            let (line, col) = lines.position_bytes(&input[..e.valid_up_to()], e.valid_up_to());
            return ParseOutput {
                diagnostics: vec![Diagnostic::error(code::MALFORMED_XML, "input is not valid UTF-8")
                    .at(line, col)],
                ..ParseOutput::default()
            };
        }
    };
    let lines = LineIndex::new(text.as_bytes());
    let root = match build_tree(text, &lines) {
        Ok(root) => root,
        Err(diag) => {
            return ParseOutput {
                diagnostics: vec![diag],
                ..ParseOutput::default()
            }
        }
    };
    let mut interp = Interpreter {
        input: text,
        diags: Vec::new(),
        map: SourceMap::default(),
    };
    let mut doc = interp.document(&root);
    doc.source_name = source_name.to_owned();
    let mut diagnostics = interp.diags;
    diagnostics.truncate(MAX_DIAGNOSTICS);
    ParseOutput {
        document: Some(doc),
        diagnostics,
        source_map: interp.map,
    }
}

struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(bytes: &[u8]) -> Self {
        let mut starts = vec![0];
        starts.extend(bytes.iter().enumerate().filter(|(_, b)| **b == b'\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    fn position(&self, text: &str, offset: usize) -> (usize, usize) {
        self.position_bytes(text.as_bytes(), offset)
    }

    fn position_bytes(&self, bytes: &[u8], offset: usize) -> (usize, usize) {
        let offset = offset.min(bytes.len());
        let line = self.starts.partition_point(|&s| s <= offset);
        let start = self.starts[line - 1];
        let column = String::from_utf8_lossy(&bytes[start..offset]).chars().count() + 1;
        (line, column)
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
    start: usize,
    end: usize,
    pos: (usize, usize),
}

#[derive(Debug)]
enum Node {
    Element(Element),
    Text(String, (usize, usize)),
}

impl Element {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(..) => None,
        })
    }

    fn text(&self) -> String {
        self.children
            .iter()
            .filter_map(|n| match n {
                Node::Text(t, _) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect()
    }
}

fn malformed(lines: &LineIndex, text: &str, offset: usize, msg: impl Into<String>) -> Diagnostic {
    let (line, col) = lines.position(text, offset);
    Diagnostic::error(code::MALFORMED_XML, msg).at(line, col)
}

fn open_element(
    e: &BytesStart<'_>,
    start: usize,
    text: &str,
    lines: &LineIndex,
) -> Result<Element, Diagnostic> {
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let mut attrs = Vec::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| malformed(lines, text, start, format!("bad attribute on <{name}>: {err}")))?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|err| malformed(lines, text, start, format!("bad attribute value on <{name}>: {err}")))?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
        start,
        end: start,
        pos: lines.position(text, start),
    })
}

fn build_tree(text: &str, lines: &LineIndex) -> Result<Element, Diagnostic> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let attach = |stack: &mut Vec<Element>, root: &mut Option<Element>, el: Element| {
        if let Some(parent) = stack.last_mut() {
            parent.children.push(Node::Element(el));
            Ok(())
        } else if root.is_some() {
            Err(malformed(lines, text, el.start, format!("second root element <{}>", el.name)))
        } else {
            *root = Some(el);
            Ok(())
        }
    };

    loop {
        let start = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|err| {
            malformed(lines, text, reader.error_position() as usize, format!("malformed XML: {err}"))
        })?;
        match event {
            Event::Start(e) => {
                if stack.is_empty() && root.is_some() {
                    return Err(malformed(lines, text, start, "content after the root element"));
                }
                stack.push(open_element(&e, start, text, lines)?);
            }
            Event::Empty(e) => {
                let mut el = open_element(&e, start, text, lines)?;
                el.end = reader.buffer_position() as usize;
                attach(&mut stack, &mut root, el)?;
            }
            Event::End(_) => {
                let mut el = stack.pop().expect("quick-xml checks end tags");
                el.end = reader.buffer_position() as usize;
                attach(&mut stack, &mut root, el)?;
            }
            Event::Text(t) => {
                let value = t
                    .unescape()
                    .map_err(|err| malformed(lines, text, start, format!("bad character data: {err}")))?;
                match stack.last_mut() {
                    Some(parent) => parent
                        .children
                        .push(Node::Text(value.into_owned(), lines.position(text, start))),
                    None if value.trim().is_empty() => {}
                    None => return Err(malformed(lines, text, start, "text outside the root element")),
                }
            }
            Event::CData(c) => {
                let value = String::from_utf8_lossy(&c.into_inner()).into_owned();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(value, lines.position(text, start))),
                    None => return Err(malformed(lines, text, start, "CDATA outside the root element")),
                }
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    if let Some(open) = stack.last() {
        return Err(malformed(lines, text, open.start, format!("unclosed element <{}>", open.name)));
    }
    root.ok_or_else(|| malformed(lines, text, text.len(), "no root element"))
}

struct Interpreter<'a> {
    input: &'a str,
    diags: Vec<Diagnostic>,
    map: SourceMap,
}

impl Interpreter<'_> {
    fn report(&mut self, el_pos: (usize, usize), code: &'static str, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, msg).at(el_pos.0, el_pos.1));
    }

    fn warn(&mut self, el_pos: (usize, usize), code: &'static str, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(code, msg).at(el_pos.0, el_pos.1));
    }

    fn required<'e>(&mut self, el: &'e Element, attr: &str) -> Option<&'e str> {
        match el.attr(attr) {
            Some(v) if !v.is_empty() => Some(v),
            _ => {
                self.report(
                    el.pos,
                    code::MISSING_ATTRIBUTE,
                    format!("<{}> requires a non-empty `{attr}` attribute", el.name),
                );
                None
            }
        }
    }

    /// Flags stray text in elements that may only hold elements.
    fn no_text(&mut self, el: &Element) {
        for node in &el.children {
            if let Node::Text(t, pos) = node {
                if !t.trim().is_empty() {
                    self.report(*pos, code::UNEXPECTED_TEXT, format!("unexpected text inside <{}>", el.name));
                }
            }
        }
    }

    fn unknown(&mut self, el: &Element, parent: &str) {
        self.report(
            el.pos,
            code::UNKNOWN_ELEMENT,
            format!("unknown element <{}> inside <{parent}>", el.name),
        );
    }

    fn document(&mut self, root: &Element) -> UimlDocument {
        let mut doc = UimlDocument::default();
        if root.name != "uiml" {
            self.report(root.pos, code::NOT_UIML, format!("root element is <{}>, expected <uiml>", root.name));
            return doc;
        }
        self.no_text(root);
        let mut names = HashSet::new();
        for el in root.elements() {
            match el.name.as_str() {
                "head" => self.head(el, &mut doc.head),
                "interface" => {
                    let iface = self.interface(el);
                    if !names.insert(iface.name.clone()) {
                        self.report(
                            el.pos,
                            code::DUPLICATE_INTERFACE,
                            format!("duplicate interface name `{}`", iface.name),
                        );
                    }
                    doc.interfaces.push(iface);
                }
                "peers" => doc.preserved_peers.push(self.input[el.start..el.end].to_owned()),
                "template" => doc.preserved_templates.push(self.input[el.start..el.end].to_owned()),
                other => self.warn(el.pos, code::IGNORED_ELEMENT, format!("ignoring unsupported element <{other}>")),
            }
        }
        doc
    }

    fn head(&mut self, el: &Element, out: &mut Vec<MetaEntry>) {
        self.no_text(el);
        for child in el.elements() {
            if child.name != "meta" {
                self.unknown(child, "head");
                continue;
            }
            if let Some(name) = self.required(child, "name") {
                out.push(MetaEntry {
                    name: name.to_owned(),
                    content: child.attr("content").unwrap_or_default().to_owned(),
                });
            }
        }
    }

    fn interface(&mut self, el: &Element) -> Interface {
        self.no_text(el);
        let mut iface = Interface::new(el.attr("name").unwrap_or_default());
        self.map.record(anchor::interface(&iface.name), el.pos);
        for child in el.elements() {
            match child.name.as_str() {
                "structure" => {
                    let s = self.structure(child, &iface.name);
                    iface.structures.push(s);
                }
                "style" => {
                    let s = self.style(child, &iface.name, iface.styles.len());
                    iface.styles.push(s);
                }
                "content" => {
                    let c = self.content(child, &iface.name, iface.contents.len());
                    iface.contents.push(c);
                }
                "behavior" => {
                    let b = self.behavior(child, &iface.name, iface.behaviors.len());
                    iface.behaviors.push(b);
                }
                _ => self.unknown(child, "interface"),
            }
        }
        iface
    }

    fn structure(&mut self, el: &Element, iface: &str) -> Structure {
        self.no_text(el);
        let mut seen = HashSet::new();
        let mut roots = Vec::new();
        for child in el.elements() {
            if child.name != "part" {
                self.unknown(child, "structure");
                continue;
            }
            if let Some(part) = self.part(child, iface, &mut seen) {
                roots.push(part);
            }
        }
        Structure { roots }
    }

    fn part(&mut self, el: &Element, iface: &str, seen: &mut HashSet<String>) -> Option<Part> {
        self.no_text(el);
        let name = self.required(el, "name");
        let class = self.required(el, "class");
        let mut children = Vec::new();
        for child in el.elements() {
            if child.name != "part" {
                self.unknown(child, "part");
                continue;
            }
            if let Some(p) = self.part(child, iface, seen) {
                children.push(p);
            }
        }
        let (name, class) = (name?, class?);
        if !seen.insert(name.to_owned()) {
            self.report(el.pos, code::DUPLICATE_PART, format!("duplicate part name `{name}`"));
        }
        self.map.record(anchor::part(iface, name), el.pos);
        Some(Part {
            name: name.to_owned(),
            widget_class: class.to_owned(),
            children,
        })
    }

    fn style(&mut self, el: &Element, iface: &str, index: usize) -> Style {
        self.no_text(el);
        let mut bindings = Vec::new();
        for child in el.elements() {
            if child.name != "property" {
                self.unknown(child, "style");
                continue;
            }
            let selector = match (child.attr("part-name"), child.attr("class-name")) {
                (Some(p), None) if !p.is_empty() => Some(Selector::PartName(p.to_owned())),
                (None, Some(c)) if !c.is_empty() => Some(Selector::ClassName(c.to_owned())),
                (Some(_), Some(_)) => {
                    self.report(
                        child.pos,
                        code::INVALID_ATTRIBUTE,
                        "<property> takes either `part-name` or `class-name`, not both",
                    );
                    None
                }
                _ => {
                    self.report(
                        child.pos,
                        code::MISSING_ATTRIBUTE,
                        "<property> requires a non-empty `part-name` or `class-name` attribute",
                    );
                    None
                }
            };
            let name = self.required(child, "name");
            let value = self.property_value(child);
            if let (Some(selector), Some(name), Some(value)) = (selector, name, value) {
                self.map.record(anchor::binding(iface, index, bindings.len()), child.pos);
                bindings.push(PropertyBinding {
                    selector,
                    property_name: name.to_owned(),
                    value,
                });
            }
        }
        Style { bindings }
    }

    fn property_value(&mut self, el: &Element) -> Option<PropertyValue> {
        let mut refs = el.elements();
        match (refs.next(), refs.next()) {
            (None, _) => Some(PropertyValue::Literal(el.text())),
            (Some(r), None) if r.name == "reference" => {
                self.no_text(el);
                self.required(r, "constant-name")
                    .map(|c| PropertyValue::ContentRef(c.to_owned()))
            }
            (Some(r), _) => {
                self.unknown(r, &el.name);
                None
            }
        }
    }

    fn content(&mut self, el: &Element, iface: &str, index: usize) -> ContentSection {
        self.no_text(el);
        let mut constants: Vec<(String, String)> = Vec::new();
        for child in el.elements() {
            if child.name != "constant" {
                self.unknown(child, "content");
                continue;
            }
            if let Some(name) = self.required(child, "name") {
                if constants.iter().any(|(n, _)| n == name) {
                    self.report(child.pos, code::DUPLICATE_CONSTANT, format!("duplicate constant `{name}`"));
                    continue;
                }
                if let Some(inner) = child.elements().next() {
                    self.unknown(inner, "constant");
                }
                self.map.record(anchor::constant(iface, index, constants.len()), child.pos);
                constants.push((name.to_owned(), child.text()));
            }
        }
        ContentSection { constants }
    }

    fn behavior(&mut self, el: &Element, iface: &str, index: usize) -> Behavior {
        self.no_text(el);
        let mut rules = Vec::new();
        for child in el.elements() {
            if child.name != "rule" {
                self.unknown(child, "behavior");
                continue;
            }
            if let Some(rule) = self.rule(child) {
                self.map.record(anchor::rule(iface, index, rules.len()), child.pos);
                rules.push(rule);
            }
        }
        Behavior { rules }
    }

    fn rule(&mut self, el: &Element) -> Option<Rule> {
        self.no_text(el);
        let mut condition = None;
        let mut actions = Vec::new();
        let mut saw_action = false;
        let mut ok = true;
        for child in el.elements() {
            match child.name.as_str() {
                "condition" if condition.is_none() => match self.condition(child) {
                    Some(c) => condition = Some(c),
                    None => ok = false,
                },
                "action" => {
                    saw_action = true;
                    self.no_text(child);
                    for a in child.elements() {
                        match self.action(a) {
                            Some(action) => actions.push(action),
                            None => ok = false,
                        }
                    }
                }
                _ => self.unknown(child, "rule"),
            }
        }
        if condition.is_none() && ok {
            self.report(el.pos, code::MISSING_CONDITION, "<rule> requires a <condition>");
            return None;
        }
        if actions.is_empty() && ok {
            let msg = if saw_action {
                "<action> must contain at least one action"
            } else {
                "<rule> requires an <action>"
            };
            self.report(el.pos, code::EMPTY_ACTION_LIST, msg);
            return None;
        }
        if !ok {
            return None;
        }
        Some(Rule {
            condition: condition?,
            actions,
        })
    }

    fn condition(&mut self, el: &Element) -> Option<Condition> {
        self.no_text(el);
        let mut event: Option<(Option<String>, String)> = None;
        let mut op: Option<(String, String)> = None;
        let mut ok = true;
        for child in el.elements() {
            match child.name.as_str() {
                "event" if event.is_none() => {
                    self.no_text(child);
                    match self.required(child, "class") {
                        Some(class) => {
                            let source = child.attr("part-name").filter(|s| !s.is_empty()).map(str::to_owned);
                            event = Some((source, class.to_owned()));
                        }
                        None => ok = false,
                    }
                }
                "op" if op.is_none() && event.is_some() => match self.equal_op(child) {
                    Some(pair) => op = Some(pair),
                    None => ok = false,
                },
                _ => {
                    self.unknown(child, "condition");
                    ok = false;
                }
            }
        }
        let Some((source_part, event_class)) = event else {
            if ok {
                self.report(el.pos, code::MISSING_CONDITION, "<condition> requires an <event>");
            }
            return None;
        };
        if !ok {
            return None;
        }
        Some(match op {
            None => Condition::EventOccurs { source_part, event_class },
            Some((data_key, expected)) => Condition::EventDataEquals {
                source_part,
                event_class,
                data_key,
                expected,
            },
        })
    }

    fn equal_op(&mut self, el: &Element) -> Option<(String, String)> {
        self.no_text(el);
        if el.attr("name") != Some("equal") {
            self.report(el.pos, code::INVALID_ATTRIBUTE, "only <op name=\"equal\"> is supported");
            return None;
        }
        let mut key = None;
        let mut expected = None;
        for child in el.elements() {
            match child.name.as_str() {
                "data" if key.is_none() => key = self.required(child, "key").map(str::to_owned),
                "constant" if expected.is_none() => expected = Some(child.text()),
                _ => self.unknown(child, "op"),
            }
        }
        match (key, expected) {
            (Some(k), Some(v)) => Some((k, v)),
            _ => {
                self.report(
                    el.pos,
                    code::MISSING_CONDITION,
                    "<op name=\"equal\"> requires <data key=…/> and <constant>",
                );
                None
            }
        }
    }

    fn action(&mut self, el: &Element) -> Option<Action> {
        match el.name.as_str() {
            "property" => {
                let part = self.required(el, "part-name");
                let name = self.required(el, "name");
                if let Some(inner) = el.elements().next() {
                    self.unknown(inner, "property");
                    return None;
                }
                Some(Action::SetProperty {
                    part: part?.to_owned(),
                    property_name: name?.to_owned(),
                    value: el.text(),
                })
            }
            "call" => {
                self.no_text(el);
                let function = self.required(el, "name")?.to_owned();
                let mut args = Vec::new();
                for p in el.elements() {
                    if p.name != "param" {
                        self.unknown(p, "call");
                        return None;
                    }
                    match (p.attr("part-name"), p.attr("property")) {
                        (None, None) => args.push(ArgRef::Literal(p.text())),
                        (Some(part), Some(prop)) if !part.is_empty() && !prop.is_empty() => {
                            self.no_text(p);
                            args.push(ArgRef::PropertyRef {
                                part: part.to_owned(),
                                property_name: prop.to_owned(),
                            })
                        }
                        _ => {
                            self.report(
                                p.pos,
                                code::MISSING_ATTRIBUTE,
                                "<param> property references need both `part-name` and `property`",
                            );
                            return None;
                        }
                    }
                }
                Some(Action::CallExternal { function, args })
            }
            "event" => {
                self.no_text(el);
                let class = self.required(el, "class");
                let source = self.required(el, "part-name");
                let mut data = Vec::new();
                for d in el.elements() {
                    if d.name != "data" {
                        self.unknown(d, "event");
                        return None;
                    }
                    let key = self.required(d, "key")?;
                    data.push((key.to_owned(), d.text()));
                }
                Some(Action::FireEvent {
                    event_class: class?.to_owned(),
                    source_part: source?.to_owned(),
                    data,
                })
            }
            "restructure" => {
                self.no_text(el);
                match el.attr("op") {
                    Some("add") => {
                        let parent = self.required(el, "parent")?.to_owned();
                        let mut parts = el.elements();
                        match (parts.next(), parts.next()) {
                            (Some(p), None) if p.name == "part" => {
                                let mut seen = HashSet::new();
                                let subtree = self.part_detached(p, &mut seen)?;
                                Some(Action::Restructure(RestructureOp::AddChild { parent, subtree }))
                            }
                            _ => {
                                self.report(
                                    el.pos,
                                    code::INVALID_ATTRIBUTE,
                                    "<restructure op=\"add\"> must contain exactly one <part>",
                                );
                                None
                            }
                        }
                    }
                    Some("remove") => {
                        if let Some(inner) = el.elements().next() {
                            self.unknown(inner, "restructure");
                            return None;
                        }
                        let part = self.required(el, "part-name")?.to_owned();
                        Some(Action::Restructure(RestructureOp::Remove { part }))
                    }
                    Some(other) => {
                        self.report(el.pos, code::INVALID_ATTRIBUTE, format!("unknown restructure op `{other}`"));
                        None
                    }
                    None => {
                        self.report(el.pos, code::MISSING_ATTRIBUTE, "<restructure> requires an `op` attribute");
                        None
                    }
                }
            }
            _ => {
                self.unknown(el, "action");
                None
            }
        }
    }

    /// Parts inside a restructure action; not registered in the source map.
    fn part_detached(&mut self, el: &Element, seen: &mut HashSet<String>) -> Option<Part> {
        self.no_text(el);
        let name = self.required(el, "name");
        let class = self.required(el, "class");
        let mut children = Vec::new();
        for child in el.elements() {
            if child.name != "part" {
                self.unknown(child, "part");
                return None;
            }
            children.push(self.part_detached(child, seen)?);
        }
        let (name, class) = (name?, class?);
        if !seen.insert(name.to_owned()) {
            self.report(el.pos, code::DUPLICATE_PART, format!("duplicate part name `{name}`"));
        }
        Some(Part {
            name: name.to_owned(),
            widget_class: class.to_owned(),
            children,
        })
    }
}

// ---------------------------------------------------------------------------
// Canonical writer

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}

struct Writer {
    out: String,
}

impl Writer {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }
}

fn attrs(pairs: &[(&str, &str)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = write!(s, " {k}=\"{}\"", escape_attr(v));
    }
    s
}

/// Writes the canonical form: two-space indentation, fixed attribute order,
/// empty elements self-closed, trailing newline.
pub fn serialize(doc: &UimlDocument) -> String {
    let mut w = Writer {
        out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
    };
    w.line(0, "<uiml>");
    if !doc.head.is_empty() {
        w.line(1, "<head>");
        for m in &doc.head {
            w.line(2, &format!("<meta{}/>", attrs(&[("name", &m.name), ("content", &m.content)])));
        }
        w.line(1, "</head>");
    }
    for iface in &doc.interfaces {
        write_interface(&mut w, iface);
    }
    for raw in doc.preserved_peers.iter().chain(&doc.preserved_templates) {
        w.line(1, raw);
    }
    w.line(0, "</uiml>");
    w.out
}

fn write_interface(w: &mut Writer, iface: &Interface) {
    let open = if iface.name.is_empty() {
        "<interface".to_owned()
    } else {
        format!("<interface{}", attrs(&[("name", &iface.name)]))
    };
    let empty = iface.structures.is_empty()
        && iface.styles.is_empty()
        && iface.contents.is_empty()
        && iface.behaviors.is_empty();
    if empty {
        w.line(1, &format!("{open}/>"));
        return;
    }
    w.line(1, &format!("{open}>"));
    for s in &iface.structures {
        if s.roots.is_empty() {
            w.line(2, "<structure/>");
            continue;
        }
        w.line(2, "<structure>");
        for p in &s.roots {
            write_part(w, 3, p);
        }
        w.line(2, "</structure>");
    }
    for s in &iface.styles {
        if s.bindings.is_empty() {
            w.line(2, "<style/>");
            continue;
        }
        w.line(2, "<style>");
        for b in &s.bindings {
            let sel = match &b.selector {
                Selector::PartName(p) => ("part-name", p.as_str()),
                Selector::ClassName(c) => ("class-name", c.as_str()),
            };
            let head = format!("<property{}", attrs(&[sel, ("name", &b.property_name)]));
            match &b.value {
                PropertyValue::Literal(v) if v.is_empty() => w.line(3, &format!("{head}/>")),
                PropertyValue::Literal(v) => w.line(3, &format!("{head}>{}</property>", escape_text(v))),
                PropertyValue::ContentRef(c) => w.line(
                    3,
                    &format!("{head}><reference{}/></property>", attrs(&[("constant-name", c)])),
                ),
            }
        }
        w.line(2, "</style>");
    }
    for c in &iface.contents {
        if c.constants.is_empty() {
            w.line(2, "<content/>");
            continue;
        }
        w.line(2, "<content>");
        for (name, value) in &c.constants {
            let head = format!("<constant{}", attrs(&[("name", name)]));
            if value.is_empty() {
                w.line(3, &format!("{head}/>"));
            } else {
                w.line(3, &format!("{head}>{}</constant>", escape_text(value)));
            }
        }
        w.line(2, "</content>");
    }
    for b in &iface.behaviors {
        if b.rules.is_empty() {
            w.line(2, "<behavior/>");
            continue;
        }
        w.line(2, "<behavior>");
        for r in &b.rules {
            write_rule(w, 3, r);
        }
        w.line(2, "</behavior>");
    }
    w.line(1, "</interface>");
}

fn write_part(w: &mut Writer, depth: usize, p: &Part) {
    let head = format!("<part{}", attrs(&[("name", &p.name), ("class", &p.widget_class)]));
    if p.children.is_empty() {
        w.line(depth, &format!("{head}/>"));
        return;
    }
    w.line(depth, &format!("{head}>"));
    for c in &p.children {
        write_part(w, depth + 1, c);
    }
    w.line(depth, "</part>");
}

fn event_attrs(class: &str, source: Option<&str>) -> String {
    match source {
        Some(s) => attrs(&[("class", class), ("part-name", s)]),
        None => attrs(&[("class", class)]),
    }
}

fn text_element(tag: &str, head_attrs: &str, value: &str) -> String {
    if value.is_empty() {
        format!("<{tag}{head_attrs}/>")
    } else {
        format!("<{tag}{head_attrs}>{}</{tag}>", escape_text(value))
    }
}

fn write_rule(w: &mut Writer, depth: usize, r: &Rule) {
    w.line(depth, "<rule>");
    w.line(depth + 1, "<condition>");
    let ev = event_attrs(r.condition.event_class(), r.condition.source_part());
    w.line(depth + 2, &format!("<event{ev}/>"));
    if let Condition::EventDataEquals { data_key, expected, .. } = &r.condition {
        w.line(depth + 2, "<op name=\"equal\">");
        w.line(depth + 3, &format!("<data{}/>", attrs(&[("key", data_key)])));
        w.line(depth + 3, &text_element("constant", "", expected));
        w.line(depth + 2, "</op>");
    }
    w.line(depth + 1, "</condition>");
    w.line(depth + 1, "<action>");
    let d = depth + 2;
    for a in &r.actions {
        match a {
            Action::SetProperty { part, property_name, value } => w.line(
                d,
                &text_element("property", &attrs(&[("part-name", part), ("name", property_name)]), value),
            ),
            Action::CallExternal { function, args } => {
                let head = format!("<call{}", attrs(&[("name", function)]));
                if args.is_empty() {
                    w.line(d, &format!("{head}/>"));
                    continue;
                }
                w.line(d, &format!("{head}>"));
                for arg in args {
                    match arg {
                        ArgRef::Literal(v) => w.line(d + 1, &text_element("param", "", v)),
                        ArgRef::PropertyRef { part, property_name } => w.line(
                            d + 1,
                            &format!("<param{}/>", attrs(&[("part-name", part), ("property", property_name)])),
                        ),
                    }
                }
                w.line(d, "</call>");
            }
            Action::FireEvent { event_class, source_part, data } => {
                let ev = event_attrs(event_class, Some(source_part));
                if data.is_empty() {
                    w.line(d, &format!("<event{ev}/>"));
                    continue;
                }
                w.line(d, &format!("<event{ev}>"));
                for (k, v) in data {
                    w.line(d + 1, &text_element("data", &attrs(&[("key", k)]), v));
                }
                w.line(d, "</event>");
            }
            Action::Restructure(RestructureOp::AddChild { parent, subtree }) => {
                w.line(d, &format!("<restructure{}>", attrs(&[("op", "add"), ("parent", parent)])));
                write_part(w, d + 1, subtree);
                w.line(d, "</restructure>");
            }
            Action::Restructure(RestructureOp::Remove { part }) => {
                w.line(d, &format!("<restructure{}/>", attrs(&[("op", "remove"), ("part-name", part)])));
            }
        }
    }
    w.line(depth + 1, "</action>");
    w.line(depth, "</rule>");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unclosed_interface_is_malformed_on_line_one() {
        let diags = parse_uiml(b"<uiml><interface>").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, code::MALFORMED_XML);
        assert_eq!(diags[0].line, 1);
    }

    #[test]
    fn mismatched_end_tag_points_at_its_line() {
        let src = "<uiml>\n  <interface>\n  </structure>\n</uiml>\n";
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags[0].code, code::MALFORMED_XML);
        assert_eq!(diags[0].line, 3);
    }

    #[test]
    fn empty_document_golden() {
        let doc = UimlDocument::default();
        assert_eq!(
            serialize(&doc),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<uiml>\n</uiml>\n"
        );
    }

    #[test]
    fn missing_class_attribute() {
        let src = r#"<uiml><interface name="I"><structure><part name="A"/></structure></interface></uiml>"#;
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, code::MISSING_ATTRIBUTE);
    }

    #[test]
    fn duplicate_part_across_depths() {
        let src = r#"<uiml><interface name="I"><structure>
            <part name="A" class="GArea"><part name="B" class="GLabel"/></part>
            <part name="B" class="GLabel"/>
        </structure></interface></uiml>"#;
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, code::DUPLICATE_PART);
        assert_eq!(diags[0].line, 3);
    }

    #[test]
    fn unknown_element_in_section() {
        let src = "<uiml>\n<interface name=\"I\">\n<structure>\n<widget/>\n</structure>\n</interface>\n</uiml>";
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags[0].code, code::UNKNOWN_ELEMENT);
        assert_eq!(diags[0].line, 4);
    }

    #[test]
    fn reports_several_errors_in_order() {
        let src = r#"<uiml><interface name="I"><structure>
<part name="A"/>
<part class="X"/>
<bogus/>
</structure></interface></uiml>"#;
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        let lines: Vec<_> = diags.iter().map(|d| (d.code, d.line)).collect();
        assert_eq!(
            lines,
            [(code::MISSING_ATTRIBUTE, 2), (code::MISSING_ATTRIBUTE, 3), (code::UNKNOWN_ELEMENT, 4)]
        );
        let again = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags, again);
    }

    #[test]
    fn diagnostics_are_capped() {
        let mut src = String::from("<uiml><interface name=\"I\"><structure>");
        for _ in 0..80 {
            src.push_str("<bogus/>");
        }
        src.push_str("</structure></interface></uiml>");
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags.len(), MAX_DIAGNOSTICS);
    }

    #[test]
    fn non_utf8_input() {
        let diags = parse_uiml(b"<uiml>\xff</uiml>").unwrap_err();
        assert_eq!(diags[0].code, code::MALFORMED_XML);
    }

    #[test]
    fn peers_kept_verbatim() {
        let src = "<uiml>\n  <peers>\n    <presentation  name=\"x\" >a &amp; b</presentation>\n  </peers>\n</uiml>\n";
        let doc = parse_uiml(src.as_bytes()).unwrap();
        assert_eq!(
            doc.preserved_peers,
            ["<peers>\n    <presentation  name=\"x\" >a &amp; b</presentation>\n  </peers>"]
        );
        let again = parse_uiml(serialize(&doc).as_bytes()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn escapes_survive() {
        let src = r#"<uiml><interface name="I"><content><constant name="c">a &lt; b &amp; "c"</constant></content></interface></uiml>"#;
        let doc = parse_uiml(src.as_bytes()).unwrap();
        assert_eq!(doc.interfaces[0].contents[0].constants[0].1, "a < b & \"c\"");
        assert_eq!(parse_uiml(serialize(&doc).as_bytes()).unwrap(), doc);
    }

    #[test]
    fn reference_and_literal_values() {
        let src = r#"<uiml><interface name="I"><style>
            <property part-name="A" name="text">
                <reference constant-name="t"/>
            </property>
            <property class-name="GList" name="items">VA
NY</property>
            <property part-name="A" name="visible"/>
        </style></interface></uiml>"#;
        let doc = parse_uiml(src.as_bytes()).unwrap();
        let b = &doc.interfaces[0].styles[0].bindings;
        assert_eq!(b[0].value, PropertyValue::ContentRef("t".into()));
        assert_eq!(b[1].value, PropertyValue::Literal("VA\nNY".into()));
        assert_eq!(b[2].value, PropertyValue::Literal(String::new()));
    }

    #[test]
    fn property_with_both_selectors() {
        let src = r#"<uiml><interface name="I"><style><property part-name="A" class-name="B" name="x">1</property></style></interface></uiml>"#;
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags[0].code, code::INVALID_ATTRIBUTE);
    }

    #[test]
    fn rule_without_actions() {
        let src = r#"<uiml><interface name="I"><behavior><rule><condition><event class="E"/></condition><action/></rule></behavior></interface></uiml>"#;
        let diags = parse_uiml(src.as_bytes()).unwrap_err();
        assert_eq!(diags[0].code, code::EMPTY_ACTION_LIST);
    }

    #[test]
    fn wrong_root() {
        let diags = parse_uiml(b"<html/>").unwrap_err();
        assert_eq!(diags[0].code, code::NOT_UIML);
    }

    #[test]
    fn unsupported_top_level_element_is_a_warning() {
        let out = parse_uiml_full(b"<uiml><extra/></uiml>", "x.uiml");
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].code, code::IGNORED_ELEMENT);
        assert!(!out.diagnostics[0].is_error());
        assert_eq!(out.document.unwrap().source_name, "x.uiml");
    }

    #[test]
    fn source_map_positions() {
        let src = "<uiml>\n<interface name=\"I\">\n<structure>\n  <part name=\"A\" class=\"GArea\"/>\n</structure>\n</interface>\n</uiml>";
        let out = parse_uiml_full(src.as_bytes(), "");
        assert_eq!(out.source_map.position(&anchor::part("I", "A")), Some((4, 3)));
        let mut d = Diagnostic::error(code::UNKNOWN_CLASS, "x").anchored(anchor::part("I", "A"));
        out.source_map.locate(&mut d);
        assert_eq!((d.line, d.column), (4, 3));
    }
}
