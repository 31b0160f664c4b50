use std::cell::RefCell;
use std::fmt;

use serde::de::{DeserializeSeed, MapAccess, SeqAccess, Visitor};
use serde_json::{Map, Number, Value};

use crate::diagnostic::{Diagnostic, DiagnosticCode};
use crate::pointer::Pointer;

/// Parses JSON text, keeping the last value of duplicated keys and reporting them.
pub(super) fn parse(text: &str) -> Result<(Value, Vec<Diagnostic>), Diagnostic> {
    let warnings = RefCell::new(Vec::new());
    let mut de = serde_json::Deserializer::from_str(text);
    let root = NodeSeed {
        warnings: &warnings,
        path: Pointer::root(),
    }
    .deserialize(&mut de)
    .and_then(|root| de.end().map(|()| root))
    .map_err(|err| {
        let code = if err.to_string().contains("recursion limit") {
            DiagnosticCode::NestingLimit
        } else {
            DiagnosticCode::Syntax
        };
        Diagnostic::fatal(code, Pointer::root(), strip_position(&err.to_string()))
            .at(err.line(), err.column())
    })?;
    Ok((root, warnings.into_inner()))
}

fn strip_position(message: &str) -> String {
    match message.find(" at line ") {
        Some(cut) => message[..cut].to_string(),
        None => message.to_string(),
    }
}

struct NodeSeed<'a> {
    warnings: &'a RefCell<Vec<Diagnostic>>,
    path: Pointer,
}

impl<'de> DeserializeSeed<'de> for NodeSeed<'_> {
    type Value = Value;

    fn deserialize<D: serde::Deserializer<'de>>(self, deserializer: D) -> Result<Value, D::Error> {
        deserializer.deserialize_any(self)
    }
}

impl<'de> Visitor<'de> for NodeSeed<'_> {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("any JSON value")
    }

    fn visit_bool<E>(self, v: bool) -> Result<Value, E> {
        Ok(Value::Bool(v))
    }

    fn visit_i64<E>(self, v: i64) -> Result<Value, E> {
        Ok(Value::Number(v.into()))
    }

    fn visit_u64<E>(self, v: u64) -> Result<Value, E> {
        Ok(Value::Number(v.into()))
    }

    fn visit_f64<E>(self, v: f64) -> Result<Value, E> {
        Ok(Number::from_f64(v).map_or(Value::Null, Value::Number))
    }

    fn visit_str<E>(self, v: &str) -> Result<Value, E> {
        Ok(Value::String(v.to_string()))
    }

    fn visit_string<E>(self, v: String) -> Result<Value, E> {
        Ok(Value::String(v))
    }

    fn visit_unit<E>(self) -> Result<Value, E> {
        Ok(Value::Null)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
        let mut items = Vec::new();
        loop {
            let seed = NodeSeed {
                warnings: self.warnings,
                path: self.path.index(items.len()),
            };
            match seq.next_element_seed(seed)? {
                Some(item) => items.push(item),
                None => break,
            }
        }
        Ok(Value::Array(items))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Value, A::Error> {
        let mut map = Map::new();
        while let Some(key) = access.next_key::<String>()? {
            let value = access.next_value_seed(NodeSeed {
                warnings: self.warnings,
                path: self.path.key(key.as_str()),
            })?;
            if map.contains_key(&key) {
                self.warnings.borrow_mut().push(Diagnostic::warning(
                    DiagnosticCode::DuplicateKey,
                    self.path.key(key.as_str()),
                    format!("duplicate key {key:?}; the last value wins"),
                ));
            }
            map.insert(key, value);
        }
        Ok(Value::Object(map))
    }
}
