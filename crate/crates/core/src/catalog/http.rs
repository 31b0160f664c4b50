//! HTTP method semantics.

use super::words::first_word;
use super::{Hit, Importance, Meta, OperationContext, Rule};
use crate::tree::{HttpMethod, SegmentKind};

/// Verbs that indicate a tunnelled method. HEAD, OPTIONS and TRACE are left
/// out because "options" and "trace" are ordinary resource nouns.
const METHOD_VERBS: &[(&str, HttpMethod)] = &[
    ("get", HttpMethod::Get),
    ("put", HttpMethod::Put),
    ("post", HttpMethod::Post),
    ("patch", HttpMethod::Patch),
    ("delete", HttpMethod::Delete),
];

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "HTTP-001",
            title: "GET without request body",
            importance: High,
            description: "A GET operation declares no request body.",
            suggestion: "Move the input into query parameters, or use POST on a search resource.",
            tags: &["rfc9110", "masse2011"],
        }
        .operation(get_body),
        Meta {
            id: "HTTP-002",
            title: "DELETE without request body",
            importance: Low,
            description: "A DELETE operation declares no request body.",
            suggestion: "Identify the resource through the path instead of a body.",
            tags: &["rfc9110"],
        }
        .operation(delete_body),
        Meta {
            id: "HTTP-003",
            title: "GET returns 200",
            importance: High,
            description: "A GET operation declares a 200 response.",
            suggestion: "Declare a 200 response describing the returned representation.",
            tags: &["masse2011"],
        }
        .operation(get_ok),
        Meta {
            id: "HTTP-004",
            title: "POST to a collection returns 201",
            importance: Medium,
            description: "A POST on a collection (a node with a template child) declares a 201 response.",
            suggestion: "Declare 201 Created and return the new resource's URI in the Location header.",
            tags: &["masse2011", "rfc9110"],
        }
        .operation(post_created),
        Meta {
            id: "HTTP-005",
            title: "DELETE returns 204 or 200",
            importance: Medium,
            description: "A DELETE operation declares a 204 or a 200 response.",
            suggestion: "Declare 204 No Content, or 200 if the response carries a status body.",
            tags: &["masse2011"],
        }
        .operation(delete_ok),
        Meta {
            id: "HTTP-006",
            title: "PUT has a request body",
            importance: High,
            description: "A PUT operation declares a request body holding the new representation.",
            suggestion: "Declare the representation being stored as the request body.",
            tags: &["rfc9110"],
        }
        .operation(put_body),
        Meta {
            id: "HTTP-007",
            title: "No method tunnelling",
            importance: High,
            description: "Neither the last literal segment nor the operation id starts with an HTTP method other than the operation's own.",
            suggestion: "Declare the operation under the HTTP method it performs instead of naming another method.",
            tags: &["masse2011", "kotstein2021"],
        }
        .operation(tunnelling),
        Meta {
            id: "HTTP-008",
            title: "PATCH has a request body",
            importance: Low,
            description: "A PATCH operation declares a request body holding the change set.",
            suggestion: "Declare the patch document (e.g. application/merge-patch+json) as the request body.",
            tags: &["rfc5789"],
        }
        .operation(patch_body),
    ]
}

fn method_is(ctx: &OperationContext, method: HttpMethod) -> bool {
    ctx.operation.method == method
}

fn get_body(ctx: &OperationContext) -> Vec<Hit> {
    match &ctx.operation.request_body {
        Some(body) if method_is(ctx, HttpMethod::Get) => {
            vec![Hit::at(body.pointer.clone(), "GET declares a request body")]
        }
        _ => vec![],
    }
}

fn delete_body(ctx: &OperationContext) -> Vec<Hit> {
    match &ctx.operation.request_body {
        Some(body) if method_is(ctx, HttpMethod::Delete) => {
            vec![Hit::at(body.pointer.clone(), "DELETE declares a request body")]
        }
        _ => vec![],
    }
}

fn get_ok(ctx: &OperationContext) -> Vec<Hit> {
    if method_is(ctx, HttpMethod::Get) && !ctx.operation.has_response("200") {
        vec![Hit::here("GET declares no 200 response")]
    } else {
        vec![]
    }
}

fn post_created(ctx: &OperationContext) -> Vec<Hit> {
    if method_is(ctx, HttpMethod::Post)
        && ctx.node.template_child().is_some()
        && !ctx.operation.has_response("201")
    {
        vec![Hit::here("POST to a collection declares no 201 response")]
    } else {
        vec![]
    }
}

fn delete_ok(ctx: &OperationContext) -> Vec<Hit> {
    let op = ctx.operation;
    if method_is(ctx, HttpMethod::Delete) && !op.has_response("204") && !op.has_response("200") {
        vec![Hit::here("DELETE declares neither 204 nor 200")]
    } else {
        vec![]
    }
}

fn put_body(ctx: &OperationContext) -> Vec<Hit> {
    if method_is(ctx, HttpMethod::Put) && ctx.operation.request_body.is_none() {
        vec![Hit::here("PUT declares no request body")]
    } else {
        vec![]
    }
}

fn patch_body(ctx: &OperationContext) -> Vec<Hit> {
    if method_is(ctx, HttpMethod::Patch) && ctx.operation.request_body.is_none() {
        vec![Hit::here("PATCH declares no request body")]
    } else {
        vec![]
    }
}

fn foreign_method(text: &str, own: HttpMethod) -> Option<HttpMethod> {
    let word = first_word(text)?;
    METHOD_VERBS
        .iter()
        .find(|(verb, method)| *verb == word && *method != own)
        .map(|(_, method)| *method)
}

fn tunnelling(ctx: &OperationContext) -> Vec<Hit> {
    let own = ctx.operation.method;
    let node_ctx = ctx.node_context();
    let last = node_ctx
        .segments()
        .filter(|s| s.kind == SegmentKind::Literal && !s.text.is_empty())
        .last();
    if let Some(method) = last.and_then(|s| foreign_method(&s.text, own)) {
        return vec![Hit::here(format!(
            "{own} operation on segment \"{}\" names {method}",
            last.map(|s| s.text.as_str()).unwrap_or_default()
        ))];
    }
    if let Some(id) = &ctx.operation.operation_id {
        if let Some(method) = foreign_method(id, own) {
            return vec![Hit::here(format!("{own} operation has operationId \"{id}\" naming {method}"))];
        }
    }
    vec![]
}
