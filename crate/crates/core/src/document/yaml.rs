use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde_json::{Map, Number, Value};
use yaml_rust2::parser::{Event, Parser, Tag};
use yaml_rust2::scanner::{Marker, ScanError, TScalarStyle};

use super::{MAX_NESTING, MAX_YAML_NODES};
use crate::diagnostic::{Diagnostic, DiagnosticCode};
use crate::pointer::{node_count, Pointer};

static INT_DEC: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[-+]?[0-9]+$").unwrap());
static INT_OCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^0o[0-7]+$").unwrap());
static INT_HEX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^0x[0-9a-fA-F]+$").unwrap());
static FLOAT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?$").unwrap()
});

/// Parses the first YAML document of `text` into a JSON-compatible node.
pub(super) fn parse(text: &str) -> Result<(Value, Vec<Diagnostic>), Diagnostic> {
    let mut builder = Builder::default();
    let mut parser = Parser::new_from_str(text).keep_tags(true);
    let mut seen_document = false;
    loop {
        let (event, mark) = parser.next_token().map_err(scan_error)?;
        match event {
            Event::StreamEnd => break,
            Event::DocumentStart => {
                if seen_document {
                    builder.warnings.push(
                        Diagnostic::warning(
                            DiagnosticCode::ExtraYamlDocuments,
                            Pointer::root(),
                            "additional YAML documents in the stream are ignored",
                        )
                        .at(mark.line(), mark.col() + 1),
                    );
                    break;
                }
                seen_document = true;
            }
            Event::StreamStart | Event::DocumentEnd | Event::Nothing => {}
            other => builder.on_event(other, mark)?,
        }
    }
    match builder.root {
        Some(root) => Ok((root, builder.warnings)),
        None => Err(Diagnostic::fatal(
            DiagnosticCode::EmptyInput,
            Pointer::root(),
            "the YAML stream contains no document",
        )),
    }
}

fn scan_error(err: ScanError) -> Diagnostic {
    let mark = err.marker();
    Diagnostic::fatal(DiagnosticCode::Syntax, Pointer::root(), err.info().to_string())
        .at(mark.line(), mark.col() + 1)
}

enum KeyState {
    Pending,
    Key(String, Marker),
    Merge,
}

enum Container {
    Seq(Vec<Value>),
    Map {
        map: Map<String, Value>,
        key: KeyState,
        merges: Vec<Value>,
    },
}

struct Frame {
    container: Container,
    anchor: usize,
    path: Pointer,
}

#[derive(Default)]
struct Builder {
    stack: Vec<Frame>,
    anchors: HashMap<usize, Value>,
    root: Option<Value>,
    warnings: Vec<Diagnostic>,
    nodes: usize,
}

impl Builder {
    fn on_event(&mut self, event: Event, mark: Marker) -> Result<(), Diagnostic> {
        match event {
            Event::Scalar(text, style, anchor, tag) => {
                if self.expecting_key() {
                    let merge = style == TScalarStyle::Plain && text == "<<" && tag.is_none();
                    if anchor > 0 {
                        self.anchors.insert(anchor, Value::String(text.clone()));
                    }
                    self.set_key(if merge { KeyState::Merge } else { KeyState::Key(text, mark) });
                    return Ok(());
                }
                self.count(1, mark)?;
                let value = resolve_scalar(text, style, tag.as_ref());
                self.emit(value, anchor, mark)
            }
            Event::Alias(id) => {
                let value = self.anchors.get(&id).cloned().ok_or_else(|| {
                    Diagnostic::fatal(DiagnosticCode::Syntax, self.current_path(), "unknown alias")
                        .at(mark.line(), mark.col() + 1)
                })?;
                if self.expecting_key() {
                    return match value {
                        Value::String(key) => {
                            self.set_key(KeyState::Key(key, mark));
                            Ok(())
                        }
                        _ => Err(self.complex_key(mark)),
                    };
                }
                self.count(node_count(&value), mark)?;
                self.emit(value, 0, mark)
            }
            Event::SequenceStart(anchor, _) => self.open(Container::Seq(Vec::new()), anchor, mark),
            Event::MappingStart(anchor, _) => self.open(
                Container::Map {
                    map: Map::new(),
                    key: KeyState::Pending,
                    merges: Vec::new(),
                },
                anchor,
                mark,
            ),
            Event::SequenceEnd | Event::MappingEnd => {
                let frame = self.stack.pop().expect("balanced YAML events");
                self.count(1, mark)?;
                let value = match frame.container {
                    Container::Seq(items) => Value::Array(items),
                    Container::Map { map, merges, .. } => {
                        Value::Object(self.apply_merges(map, merges, &frame.path))
                    }
                };
                self.emit(value, frame.anchor, mark)
            }
            _ => Ok(()),
        }
    }

    fn expecting_key(&self) -> bool {
        matches!(
            self.stack.last(),
            Some(Frame {
                container: Container::Map {
                    key: KeyState::Pending,
                    ..
                },
                ..
            })
        )
    }

    fn set_key(&mut self, state: KeyState) {
        if let Some(Frame {
            container: Container::Map { key, .. },
            ..
        }) = self.stack.last_mut()
        {
            *key = state;
        }
    }

    fn current_path(&self) -> Pointer {
        match self.stack.last() {
            None => Pointer::root(),
            Some(frame) => match &frame.container {
                Container::Seq(items) => frame.path.index(items.len()),
                Container::Map { key: KeyState::Key(k, _), .. } => frame.path.key(k.as_str()),
                Container::Map { key: KeyState::Merge, .. } => frame.path.key("<<"),
                Container::Map { .. } => frame.path.clone(),
            },
        }
    }

    fn complex_key(&self, mark: Marker) -> Diagnostic {
        Diagnostic::fatal(
            DiagnosticCode::ComplexKey,
            self.current_path(),
            "mapping keys must be scalars",
        )
        .at(mark.line(), mark.col() + 1)
    }

    fn open(&mut self, container: Container, anchor: usize, mark: Marker) -> Result<(), Diagnostic> {
        if self.expecting_key() {
            return Err(self.complex_key(mark));
        }
        if self.stack.len() >= MAX_NESTING {
            return Err(Diagnostic::fatal(
                DiagnosticCode::NestingLimit,
                self.current_path(),
                format!("nesting deeper than {MAX_NESTING} levels"),
            )
            .at(mark.line(), mark.col() + 1));
        }
        let path = self.current_path();
        self.stack.push(Frame {
            container,
            anchor,
            path,
        });
        Ok(())
    }

    fn count(&mut self, nodes: usize, mark: Marker) -> Result<(), Diagnostic> {
        self.nodes += nodes;
        if self.nodes > MAX_YAML_NODES {
            return Err(Diagnostic::fatal(
                DiagnosticCode::AliasLimit,
                self.current_path(),
                format!("document expands to more than {MAX_YAML_NODES} nodes"),
            )
            .at(mark.line(), mark.col() + 1));
        }
        Ok(())
    }

    fn emit(&mut self, value: Value, anchor: usize, mark: Marker) -> Result<(), Diagnostic> {
        if anchor > 0 {
            self.anchors.insert(anchor, value.clone());
        }
        let Some(frame) = self.stack.last_mut() else {
            self.root = Some(value);
            return Ok(());
        };
        match &mut frame.container {
            Container::Seq(items) => items.push(value),
            Container::Map { map, key, merges } => {
                match std::mem::replace(key, KeyState::Pending) {
                    KeyState::Key(k, key_mark) => {
                        if map.contains_key(&k) {
                            self.warnings.push(
                                Diagnostic::warning(
                                    DiagnosticCode::DuplicateKey,
                                    frame.path.key(k.as_str()),
                                    format!("duplicate key {k:?}; the last value wins"),
                                )
                                .at(key_mark.line(), key_mark.col() + 1),
                            );
                        }
                        map.insert(k, value);
                    }
                    KeyState::Merge => merges.push(value),
                    KeyState::Pending => {
                        return Err(Diagnostic::fatal(
                            DiagnosticCode::Syntax,
                            frame.path.clone(),
                            "value without a key",
                        )
                        .at(mark.line(), mark.col() + 1))
                    }
                }
            }
        }
        Ok(())
    }

    /// Explicit keys win over merged ones; earlier merge sources win over later ones.
    fn apply_merges(
        &mut self,
        mut map: Map<String, Value>,
        merges: Vec<Value>,
        path: &Pointer,
    ) -> Map<String, Value> {
        for merge in merges {
            let sources = match merge {
                Value::Array(items) => items,
                other => vec![other],
            };
            for source in sources {
                match source {
                    Value::Object(entries) => {
                        for (k, v) in entries {
                            if !map.contains_key(&k) {
                                map.insert(k, v);
                            }
                        }
                    }
                    _ => self.warnings.push(Diagnostic::warning(
                        DiagnosticCode::InvalidMerge,
                        path.key("<<"),
                        "merge key value is not a mapping; ignored",
                    )),
                }
            }
        }
        map
    }
}

fn core_tag(tag: Option<&Tag>) -> Option<&str> {
    let tag = tag?;
    match tag.handle.as_str() {
        "!!" | "tag:yaml.org,2002:" => Some(tag.suffix.as_str()),
        _ => None,
    }
}

/// YAML 1.2 core schema resolution; only plain scalars are typed.
fn resolve_scalar(text: String, style: TScalarStyle, tag: Option<&Tag>) -> Value {
    match core_tag(tag) {
        Some("str") => return Value::String(text),
        Some("null" | "bool" | "int" | "float") => return resolve_plain(text),
        _ => {}
    }
    if style == TScalarStyle::Plain {
        resolve_plain(text)
    } else {
        Value::String(text)
    }
}

fn resolve_plain(text: String) -> Value {
    match text.as_str() {
        "" | "~" | "null" | "Null" | "NULL" => return Value::Null,
        "true" | "True" | "TRUE" => return Value::Bool(true),
        "false" | "False" | "FALSE" => return Value::Bool(false),
        _ => {}
    }
    if INT_DEC.is_match(&text) {
        if let Ok(i) = text.parse::<i64>() {
            return Value::Number(i.into());
        }
        if let Ok(u) = text.trim_start_matches('+').parse::<u64>() {
            return Value::Number(u.into());
        }
    } else if INT_OCT.is_match(&text) {
        if let Ok(i) = i64::from_str_radix(&text[2..], 8) {
            return Value::Number(i.into());
        }
    } else if INT_HEX.is_match(&text) {
        if let Ok(i) = i64::from_str_radix(&text[2..], 16) {
            return Value::Number(i.into());
        }
    }
    if FLOAT.is_match(&text) {
        if let Some(n) = text.parse::<f64>().ok().and_then(Number::from_f64) {
            return Value::Number(n);
        }
    }
    Value::String(text)
}
