//! Property naming inside request, response and parameter schemas.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Importance, Meta, PropertyContext, Rule};
use crate::pointer::Pointer;
use crate::tree::OperationInfo;

static LOWER_CAMEL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z][a-zA-Z0-9]*$").unwrap());
static SNAKE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z][a-z0-9]*(_[a-z0-9]+)*$").unwrap());
static KEBAB: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z][a-z0-9]*(-[a-z0-9]+)*$").unwrap());
static PLAIN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[A-Za-z][A-Za-z0-9_-]*$").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyNaming {
    #[default]
    LowerCamel,
    Snake,
    Kebab,
}

impl PropertyNaming {
    pub fn matches(self, name: &str) -> bool {
        match self {
            PropertyNaming::LowerCamel => LOWER_CAMEL.is_match(name),
            PropertyNaming::Snake => SNAKE.is_match(name),
            PropertyNaming::Kebab => KEBAB.is_match(name),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyNaming::LowerCamel => "lower_camel",
            PropertyNaming::Snake => "snake",
            PropertyNaming::Kebab => "kebab",
        }
    }
}

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "SCH-001",
            title: "Property naming convention",
            importance: High,
            description: "Schema property names follow the configured convention (lower_camel by default, or snake or kebab).",
            suggestion: "Rename the property to follow the configured naming convention.",
            tags: &["stackoverflow-json-naming"],
        }
        .property(naming_convention),
        Meta {
            id: "SCH-002",
            title: "Plain property names",
            importance: Low,
            description: "Property names start with a letter and contain only letters, digits, underscores and hyphens.",
            suggestion: "Remove spaces and punctuation, and start the name with a letter.",
            tags: &["stackoverflow-json-naming"],
        }
        .property(plain_name),
    ]
}

fn naming_convention(ctx: &PropertyContext) -> Option<String> {
    let naming = ctx.options.property_naming;
    (!naming.matches(ctx.name)).then(|| format!("property \"{}\" is not {}", ctx.name, naming.as_str()))
}

fn plain_name(ctx: &PropertyContext) -> Option<String> {
    (!PLAIN.is_match(ctx.name)).then(|| {
        format!(
            "property \"{}\" contains characters other than letters, digits, '_' and '-', or starts with a non-letter",
            ctx.name
        )
    })
}

/// One property found while walking a schema.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaProperty<'a> {
    pub name: &'a str,
    pub schema: &'a Value,
    /// Location of the property's schema, e.g. `.../properties/userName`.
    pub pointer: Pointer,
}

const SUBSCHEMA_KEYS: &[&str] = &["items", "additionalProperties", "not", "contains", "unevaluatedProperties"];
const SUBSCHEMA_LIST_KEYS: &[&str] = &["allOf", "anyOf", "oneOf", "prefixItems"];

/// Every property declared in `schema` or its subschemas, depth first.
/// Unresolved `$ref`s are not followed.
pub fn walk_schema_properties<'a>(schema: &'a Value, pointer: &Pointer) -> Vec<SchemaProperty<'a>> {
    let mut out = Vec::new();
    let mut stack = vec![(schema, pointer.clone())];
    while let Some((value, ptr)) = stack.pop() {
        let Some(map) = value.as_object() else {
            continue;
        };
        let mut pending = Vec::new();
        if let Some(Value::Object(props)) = map.get("properties") {
            for (name, sub) in props {
                let sub_ptr = ptr.key("properties").key(name.as_str());
                out.push(SchemaProperty {
                    name,
                    schema: sub,
                    pointer: sub_ptr.clone(),
                });
                pending.push((sub, sub_ptr));
            }
        }
        for key in SUBSCHEMA_KEYS {
            if let Some(sub) = map.get(*key) {
                pending.push((sub, ptr.key(*key)));
            }
        }
        for key in SUBSCHEMA_LIST_KEYS {
            if let Some(Value::Array(list)) = map.get(*key) {
                for (i, sub) in list.iter().enumerate() {
                    pending.push((sub, ptr.key(*key).index(i)));
                }
            }
        }
        stack.extend(pending.into_iter().rev());
    }
    out
}

/// Every schema an operation uses, with its location.
pub(crate) fn operation_schemas(op: &OperationInfo) -> Vec<(&Value, Pointer)> {
    let mut out = Vec::new();
    for param in &op.parameters {
        if let Some(schema) = &param.schema {
            out.push((schema, param.pointer.key("schema")));
        }
    }
    if let Some(body) = &op.request_body {
        for (media_type, schema) in &body.media_types {
            if let Some(schema) = schema {
                out.push((schema, body.pointer.key("content").key(media_type.as_str()).key("schema")));
            }
        }
    }
    for response in op.responses.values() {
        for (media_type, schema) in &response.media_types {
            if let Some(schema) = schema {
                out.push((schema, response.pointer.key("content").key(media_type.as_str()).key("schema")));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn naming_conventions() {
        assert!(PropertyNaming::LowerCamel.matches("userName"));
        assert!(!PropertyNaming::LowerCamel.matches("user_name"));
        assert!(!PropertyNaming::LowerCamel.matches("UserName"));
        assert!(PropertyNaming::Snake.matches("user_name"));
        assert!(!PropertyNaming::Snake.matches("userName"));
        assert!(PropertyNaming::Kebab.matches("user-name"));
        assert!(!PLAIN.is_match("2fa enabled"));
        assert!(!PLAIN.is_match("first name"));
        assert!(PLAIN.is_match("user_name"));
    }

    #[test]
    fn walk_visits_nested_properties() {
        let schema = json!({
            "type": "object",
            "properties": {
                "a": {"type": "object", "properties": {"b": {}}},
                "list": {"type": "array", "items": {"properties": {"c": {}}}}
            },
            "allOf": [{"properties": {"d": {}}}]
        });
        let found: Vec<_> = walk_schema_properties(&schema, &Pointer::root())
            .into_iter()
            .map(|p| p.pointer.to_string())
            .collect();
        assert_eq!(
            found,
            [
                "/properties/a",
                "/properties/list",
                "/properties/a/properties/b",
                "/properties/list/items/properties/c",
                "/allOf/0/properties/d"
            ]
        );
    }
}
