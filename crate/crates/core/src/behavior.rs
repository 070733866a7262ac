//! Headless interpreter for behavior rules.
//!
//! Every rule whose condition matches an event fires, in document order, and
//! its actions run in the order listed. Events raised by actions are queued
//! and dispatched after the current one. A single dispatch call processes at
//! most [`DISPATCH_LIMIT`] events; exceeding it is reported as an error and
//! leaves the state untouched.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::diag::{code, Diagnostic};
use crate::model::*;
use crate::vocabulary::Vocabulary;

pub const DISPATCH_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    #[serde(rename = "class")]
    pub event_class: String,
    #[serde(rename = "source")]
    pub source_part: String,
    #[serde(default)]
    pub data: BTreeMap<String, String>,
}

impl Event {
    pub fn new(event_class: impl Into<String>, source_part: impl Into<String>) -> Self {
        Event {
            event_class: event_class.into(),
            source_part: source_part.into(),
            data: BTreeMap::new(),
        }
    }

    pub fn with_data(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.data.insert(key.into(), value.into());
        self
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.event_class, self.source_part)?;
        for (k, v) in &self.data {
            write!(f, " {k}={v:?}")?;
        }
        Ok(())
    }
}

/// Reads an events file: a JSON list of `{"class", "source", "data"}`.
pub fn load_events(text: &str) -> Result<Vec<Event>, Diagnostic> {
    serde_json::from_str(text).map_err(|e| {
        Diagnostic::error(code::EVENTS_SCHEMA, format!("events file: {e}")).at(e.line(), e.column())
    })
}

/// Checks that an event's source exists and may raise the event.
pub fn check_event(doc: &UimlDocument, vocab: &Vocabulary, event: &Event) -> Option<Diagnostic> {
    let part = doc
        .interfaces
        .first()
        .and_then(Interface::primary_structure)
        .and_then(|s| s.find(&event.source_part));
    let Some(part) = part else {
        return Some(Diagnostic::error(
            code::UNRESOLVED_PART,
            format!("event {event} comes from unknown part `{}`", event.source_part),
        ));
    };
    let allowed = vocab.class(&part.widget_class).and_then(|c| c.event(&event.event_class));
    match allowed {
        None => Some(Diagnostic::error(
            code::UNKNOWN_EVENT,
            format!("class `{}` does not raise `{}`", part.widget_class, event.event_class),
        )),
        Some(def) => event
            .data
            .keys()
            .find(|k| !def.data_keys.contains(k))
            .map(|k| {
                Diagnostic::error(
                    code::UNKNOWN_DATA_KEY,
                    format!("event `{}` carries no data key `{k}`", event.event_class),
                )
            }),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuntimeState {
    /// (part, property) → current value.
    pub properties: BTreeMap<(String, String), String>,
    pub structure: Structure,
    pub dispatch_count: usize,
}

impl RuntimeState {
    pub fn property(&self, part: &str, property: &str) -> Option<&str> {
        self.properties
            .get(&(part.to_owned(), property.to_owned()))
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEntry {
    PropertySet {
        part: String,
        property: String,
        old: Option<String>,
        new: String,
    },
    ExternalCall {
        function: String,
        args: Vec<String>,
        result: Option<String>,
    },
    EventFired(Event),
    Restructured(String),
    NoRuleMatched(Event),
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEntry::PropertySet { part, property, old, new } => {
                write!(f, "set {part}.{property}: ")?;
                match old {
                    Some(o) => write!(f, "{o:?}")?,
                    None => f.write_str("unset")?,
                }
                write!(f, " -> {new:?}")
            }
            TraceEntry::ExternalCall { function, args, result } => {
                write!(f, "call {function}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a:?}")?;
                }
                f.write_str(")")?;
                if let Some(r) = result {
                    write!(f, " = {r:?}")?;
                }
                Ok(())
            }
            TraceEntry::EventFired(e) => write!(f, "fire {e}"),
            TraceEntry::Restructured(what) => write!(f, "restructure {what}"),
            TraceEntry::NoRuleMatched(e) => write!(f, "unmatched {e}"),
        }
    }
}

/// One line per entry, newline-terminated.
pub fn format_trace(trace: &[TraceEntry]) -> String {
    trace.iter().map(|t| format!("{t}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("dispatch limit exceeded: {dispatched} events dispatched without the queue draining (limit {limit})")]
    DispatchLimitExceeded { limit: usize, dispatched: usize },
    #[error("restructure conflict: part `{0}` already exists")]
    RestructureConflict(String),
    #[error("action refers to part `{0}` which is not in the structure")]
    UnknownPart(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Answers external calls made by rules. Calls are always traced; the
/// returned value, if any, is recorded alongside.
pub trait ExternalFunctions {
    fn call(&mut self, function: &str, args: &[String]) -> Option<String>;
}

/// Records calls without answering them.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoExternals;

impl ExternalFunctions for NoExternals {
    fn call(&mut self, _function: &str, _args: &[String]) -> Option<String> {
        None
    }
}

/// Fixed answers per function name.
#[derive(Debug, Default, Clone)]
pub struct StubTable(pub BTreeMap<String, String>);

impl ExternalFunctions for StubTable {
    fn call(&mut self, function: &str, _args: &[String]) -> Option<String> {
        self.0.get(function).cloned()
    }
}

/// Rule interpreter bound to one interface of a document.
#[derive(Debug, Clone)]
pub struct Engine<'d> {
    iface: Option<&'d Interface>,
    limit: usize,
}

impl<'d> Engine<'d> {
    /// Engine for the document's first interface.
    pub fn new(doc: &'d UimlDocument) -> Self {
        Engine {
            iface: doc.interfaces.first(),
            limit: DISPATCH_LIMIT,
        }
    }

    pub fn for_interface(doc: &'d UimlDocument, name: &str) -> Result<Self, ModelError> {
        Ok(Engine {
            iface: Some(doc.interface(name)?),
            limit: DISPATCH_LIMIT,
        })
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    fn seed(&self, part: &Part, properties: &mut BTreeMap<(String, String), String>) {
        let Some(iface) = self.iface else { return };
        for p in part.walk() {
            // dangling content references are a validation error; skip them here
            if let Ok(props) = iface.cascaded_properties(&p.name, &p.widget_class) {
                for (k, v) in props {
                    properties.insert((p.name.clone(), k), v);
                }
            }
        }
    }

    /// Properties from the style cascade for every part of the first structure.
    pub fn init_state(&self) -> RuntimeState {
        let structure = self
            .iface
            .and_then(Interface::primary_structure)
            .cloned()
            .unwrap_or_default();
        let mut properties = BTreeMap::new();
        for root in &structure.roots {
            self.seed(root, &mut properties);
        }
        RuntimeState {
            properties,
            structure,
            dispatch_count: 0,
        }
    }

    pub fn dispatch(
        &self,
        state: &RuntimeState,
        event: Event,
        externals: &mut dyn ExternalFunctions,
    ) -> Result<(RuntimeState, Vec<TraceEntry>), EngineError> {
        let mut next = state.clone();
        let mut trace = Vec::new();
        let mut queue = VecDeque::from([event]);
        let mut dispatched = 0;
        while let Some(ev) = queue.pop_front() {
            if dispatched == self.limit {
                return Err(EngineError::DispatchLimitExceeded {
                    limit: self.limit,
                    dispatched,
                });
            }
            dispatched += 1;
            let mut matched = false;
            for rule in self.iface.into_iter().flat_map(Interface::rules) {
                if !matches(&rule.condition, &ev) {
                    continue;
                }
                matched = true;
                for action in &rule.actions {
                    self.apply(action, &mut next, &mut trace, &mut queue, externals)?;
                }
            }
            if !matched {
                trace.push(TraceEntry::NoRuleMatched(ev));
            }
        }
        next.dispatch_count += dispatched;
        Ok((next, trace))
    }

    fn apply(
        &self,
        action: &Action,
        state: &mut RuntimeState,
        trace: &mut Vec<TraceEntry>,
        queue: &mut VecDeque<Event>,
        externals: &mut dyn ExternalFunctions,
    ) -> Result<(), EngineError> {
        match action {
            Action::SetProperty { part, property_name, value } => {
                if state.structure.find(part).is_none() {
                    return Err(EngineError::UnknownPart(part.clone()));
                }
                let old = state
                    .properties
                    .insert((part.clone(), property_name.clone()), value.clone());
                trace.push(TraceEntry::PropertySet {
                    part: part.clone(),
                    property: property_name.clone(),
                    old,
                    new: value.clone(),
                });
            }
            Action::CallExternal { function, args } => {
                let args: Vec<String> = args
                    .iter()
                    .map(|a| match a {
                        ArgRef::Literal(v) => v.clone(),
                        ArgRef::PropertyRef { part, property_name } => {
                            state.property(part, property_name).unwrap_or_default().to_owned()
                        }
                    })
                    .collect();
                let result = externals.call(function, &args);
                trace.push(TraceEntry::ExternalCall {
                    function: function.clone(),
                    args,
                    result,
                });
            }
            Action::FireEvent { event_class, source_part, data } => {
                let ev = Event {
                    event_class: event_class.clone(),
                    source_part: source_part.clone(),
                    data: data.iter().cloned().collect(),
                };
                trace.push(TraceEntry::EventFired(ev.clone()));
                queue.push_back(ev);
            }
            Action::Restructure(RestructureOp::AddChild { parent, subtree }) => {
                if let Some(clash) = subtree.walk().find(|p| state.structure.find(&p.name).is_some()) {
                    return Err(EngineError::RestructureConflict(clash.name.clone()));
                }
                let mut names = std::collections::HashSet::new();
                if let Some(dup) = subtree.walk().find(|p| !names.insert(p.name.as_str())) {
                    return Err(EngineError::RestructureConflict(dup.name.clone()));
                }
                let target = find_mut(&mut state.structure.roots, parent)
                    .ok_or_else(|| EngineError::UnknownPart(parent.clone()))?;
                target.children.push(subtree.clone());
                self.seed(subtree, &mut state.properties);
                trace.push(TraceEntry::Restructured(format!("add {} under {parent}", subtree.name)));
            }
            Action::Restructure(RestructureOp::Remove { part }) => {
                let removed = remove(&mut state.structure.roots, part)
                    .ok_or_else(|| EngineError::UnknownPart(part.clone()))?;
                let gone: std::collections::HashSet<&str> = removed.walk().map(|p| p.name.as_str()).collect();
                state.properties.retain(|(p, _), _| !gone.contains(p.as_str()));
                trace.push(TraceEntry::Restructured(format!("remove {part}")));
            }
        }
        Ok(())
    }
}

fn matches(cond: &Condition, ev: &Event) -> bool {
    if cond.event_class() != ev.event_class {
        return false;
    }
    if cond.source_part().is_some_and(|s| s != ev.source_part) {
        return false;
    }
    match cond {
        Condition::EventOccurs { .. } => true,
        Condition::EventDataEquals { data_key, expected, .. } => ev.data.get(data_key) == Some(expected),
    }
}

fn find_mut<'a>(parts: &'a mut [Part], name: &str) -> Option<&'a mut Part> {
    for p in parts {
        if p.name == name {
            return Some(p);
        }
        if let Some(found) = find_mut(&mut p.children, name) {
            return Some(found);
        }
    }
    None
}

fn remove(parts: &mut Vec<Part>, name: &str) -> Option<Part> {
    if let Some(i) = parts.iter().position(|p| p.name == name) {
        return Some(parts.remove(i));
    }
    parts.iter_mut().find_map(|p| remove(&mut p.children, name))
}

pub fn init_state(doc: &UimlDocument) -> RuntimeState {
    Engine::new(doc).init_state()
}

pub fn dispatch(
    doc: &UimlDocument,
    state: &RuntimeState,
    event: Event,
) -> Result<(RuntimeState, Vec<TraceEntry>), EngineError> {
    Engine::new(doc).dispatch(state, event, &mut NoExternals)
}

/// Initializes state from the document and dispatches each event in turn.
pub fn run(doc: &UimlDocument, events: &[Event]) -> Result<Vec<TraceEntry>, EngineError> {
    run_with(&Engine::new(doc), events, &mut NoExternals)
}

pub fn run_with(
    engine: &Engine<'_>,
    events: &[Event],
    externals: &mut dyn ExternalFunctions,
) -> Result<Vec<TraceEntry>, EngineError> {
    let mut state = engine.init_state();
    let mut trace = Vec::new();
    for ev in events {
        let (next, entries) = engine.dispatch(&state, ev.clone(), externals)?;
        state = next;
        trace.extend(entries);
    }
    Ok(trace)
}
