//! Documentation completeness.

use super::{DocumentContext, Hit, Importance, Meta, OperationContext, Rule};

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "DOC-001",
            title: "Operations are described",
            importance: Low,
            description: "Every operation has a non-empty summary or description.",
            suggestion: "Add a one-line summary saying what the operation does.",
            tags: &["openapi31"],
        }
        .operation(described),
        Meta {
            id: "DOC-002",
            title: "Unique operation ids",
            importance: Low,
            description: "Every operation has an operationId, unique across the document.",
            suggestion: "Give the operation a unique operationId such as listUsers or getUser.",
            tags: &["openapi31"],
        }
        .operation(operation_id),
        Meta {
            id: "DOC-003",
            title: "Parameters are described",
            importance: Low,
            description: "Every parameter has a non-empty description.",
            suggestion: "Describe what the parameter means and which values it accepts.",
            tags: &["openapi31"],
        }
        .operation(parameters_described),
        Meta {
            id: "DOC-004",
            title: "API is described",
            importance: Low,
            description: "The info object has a non-empty description.",
            suggestion: "Add info.description explaining what the API is for.",
            tags: &["openapi31"],
        }
        .document(api_described),
    ]
}

fn non_empty(text: Option<&str>) -> bool {
    text.is_some_and(|t| !t.trim().is_empty())
}

fn described(ctx: &OperationContext) -> Vec<Hit> {
    let op = ctx.operation;
    if non_empty(op.summary.as_deref()) || non_empty(op.description.as_deref()) {
        vec![]
    } else {
        vec![Hit::here("operation has neither summary nor description")]
    }
}

fn operation_id(ctx: &OperationContext) -> Vec<Hit> {
    match ctx.operation.operation_id.as_deref().filter(|id| !id.trim().is_empty()) {
        None => vec![Hit::here("operation has no operationId")],
        Some(id) => match ctx.facts.operation_ids.get(id) {
            Some(&n) if n > 1 => vec![Hit::here(format!("operationId \"{id}\" is used by {n} operations"))],
            _ => vec![],
        },
    }
}

fn parameters_described(ctx: &OperationContext) -> Vec<Hit> {
    ctx.operation
        .parameters
        .iter()
        .filter(|p| !non_empty(p.description.as_deref()))
        .map(|p| Hit::at(p.pointer.clone(), format!("parameter \"{}\" has no description", p.name)))
        .collect()
}

fn api_described(ctx: &DocumentContext) -> Option<String> {
    (!non_empty(ctx.tree.info.description.as_deref())).then(|| "info has no description".to_string())
}
