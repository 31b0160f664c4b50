//! Random `$ref` graphs, cycles included, and the resolver properties.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use seora::document::{load_document, Format};
use seora::resolve::{ref_target, resolve_references};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub enum Slot {
    Plain,
    Ref(usize),
    DeepRef(usize),
    External,
    Array(usize),
}

fn slot(n: usize) -> impl Strategy<Value = Slot> {
    prop_oneof![
        2 => Just(Slot::Plain),
        4 => (0..=n).prop_map(Slot::Ref),
        1 => (0..n).prop_map(Slot::DeepRef),
        1 => Just(Slot::External),
        1 => (0..n).prop_map(Slot::Array),
    ]
}

fn target(i: usize) -> String {
    format!("#/components/schemas/S{i}")
}

/// Schemas S0..Sn whose properties point at each other, a missing S{n},
/// deep pointers into other schemas, and an external file.
pub fn graph() -> impl Strategy<Value = Value> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(slot(n), 0..4), n),
                prop::collection::vec(0..=n, 0..3),
            )
        })
        .prop_map(|(n, schemas, roots)| {
            let mut components = Map::new();
            for (i, slots) in schemas.iter().enumerate() {
                let mut properties = Map::new();
                properties.insert("p".into(), json!({"type": "string"}));
                for (k, s) in slots.iter().enumerate() {
                    let value = match s {
                        Slot::Plain => json!({"type": "integer"}),
                        Slot::Ref(j) => json!({"$ref": target(*j)}),
                        Slot::DeepRef(j) => json!({"$ref": format!("{}/properties/p", target(*j))}),
                        Slot::External => json!({"$ref": "other.yaml#/components/schemas/X"}),
                        Slot::Array(j) => json!({"type": "array", "items": {"$ref": target(*j)}}),
                    };
                    properties.insert(format!("f{k}"), value);
                }
                components.insert(format!("S{i}"), json!({"type": "object", "properties": properties}));
            }
            let _ = n;
            let responses: Map<String, Value> = roots
                .iter()
                .enumerate()
                .map(|(k, j)| {
                    (
                        format!("{}", 200 + k),
                        json!({"description": "r", "content": {"application/json": {"schema": {"$ref": target(*j)}}}}),
                    )
                })
                .collect();
            json!({
                "openapi": "3.1.0",
                "info": {"title": "t", "version": "1"},
                "paths": {"/things": {"get": {"responses": responses}}},
                "components": {"schemas": components},
            })
        })
}

pub fn count_refs(value: &Value) -> usize {
    match value {
        Value::Object(map) => {
            usize::from(ref_target(value).is_some()) + map.values().map(count_refs).sum::<usize>()
        }
        Value::Array(items) => items.iter().map(count_refs).sum(),
        _ => 0,
    }
}

/// Termination is implied by returning; idempotence and the unresolved count
/// are checked explicitly.
pub fn all(doc: &Value) -> Result<(), TestCaseError> {
    let raw = load_document(&serde_json::to_vec(doc).unwrap(), Some(Format::Json)).unwrap();
    let once = resolve_references(&raw);
    let twice = resolve_references(&once);
    prop_assert_eq!(&twice.root, &once.root);
    prop_assert_eq!(&twice.unresolved, &once.unresolved);
    prop_assert_eq!(once.unresolved.len(), count_refs(&once.root));
    prop_assert_eq!(once.stats().unresolved_count, once.unresolved.len());
    Ok(())
}
