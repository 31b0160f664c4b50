//! Status code coverage.

use super::{Hit, Importance, Meta, OperationContext, ResponseContext, Rule};
use crate::tree::{status_class, StatusClass};

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "STAT-001",
            title: "Success response declared",
            importance: High,
            description: "Every operation declares at least one 2XX or default response.",
            suggestion: "Declare the success response the client should expect.",
            tags: &["masse2011", "rfc9110"],
        }
        .operation(success_declared),
        Meta {
            id: "STAT-002",
            title: "Secured operations declare 401",
            importance: High,
            description: "An operation with a non-empty security requirement declares a 401 response.",
            suggestion: "Declare 401 Unauthorized for requests without valid credentials.",
            tags: &["rfc9110", "kotstein2021"],
        }
        .operation(unauthorized_declared),
        Meta {
            id: "STAT-003",
            title: "Identified resources declare 404",
            importance: Medium,
            description: "An operation on or below a template segment declares a 404 response.",
            suggestion: "Declare 404 Not Found for identifiers that do not exist.",
            tags: &["masse2011"],
        }
        .operation(not_found_declared),
        Meta {
            id: "STAT-004",
            title: "Error responses have a schema",
            importance: Medium,
            description: "Every 4XX and 5XX response has at least one media type with a schema.",
            suggestion: "Describe the error body with a schema, e.g. application/problem+json.",
            tags: &["rfc9457"],
        }
        .response(error_schema),
        Meta {
            id: "STAT-005",
            title: "Server errors declared",
            importance: Low,
            description: "Every operation declares a 5XX or default response.",
            suggestion: "Declare a 5XX or default response describing server failures.",
            tags: &["kotstein2021"],
        }
        .operation(server_error_declared),
        Meta {
            id: "STAT-006",
            title: "204 has no content",
            importance: High,
            description: "A 204 response declares no content.",
            suggestion: "Remove the content from the 204 response, or return 200 with the body.",
            tags: &["rfc9110"],
        }
        .response(no_content_is_empty),
    ]
}

fn success_declared(ctx: &OperationContext) -> Vec<Hit> {
    let op = ctx.operation;
    if op.has_response_class(StatusClass::Success) || op.has_response_class(StatusClass::Default) {
        vec![]
    } else {
        vec![Hit::here("no 2XX or default response declared")]
    }
}

fn unauthorized_declared(ctx: &OperationContext) -> Vec<Hit> {
    let op = ctx.operation;
    if op.security.is_empty() || op.has_response("401") {
        vec![]
    } else {
        vec![Hit::here(format!(
            "operation requires {} but declares no 401 response",
            op.security.join(", ")
        ))]
    }
}

fn not_found_declared(ctx: &OperationContext) -> Vec<Hit> {
    let templated = ctx.node_context().segments().any(|s| s.is_template());
    if templated && !ctx.operation.has_response("404") {
        vec![Hit::here("operation on an identified resource declares no 404 response")]
    } else {
        vec![]
    }
}

fn server_error_declared(ctx: &OperationContext) -> Vec<Hit> {
    let op = ctx.operation;
    if op.has_response_class(StatusClass::ServerError) || op.has_response_class(StatusClass::Default) {
        vec![]
    } else {
        vec![Hit::here("no 5XX or default response declared")]
    }
}

fn error_schema(ctx: &ResponseContext) -> Option<String> {
    let class = status_class(ctx.code);
    if !matches!(class, StatusClass::ClientError | StatusClass::ServerError) {
        return None;
    }
    let has_schema = ctx.response.media_types.values().any(Option::is_some);
    (!has_schema).then(|| format!("{} response has no media type with a schema", ctx.code))
}

fn no_content_is_empty(ctx: &ResponseContext) -> Option<String> {
    (ctx.code == "204" && ctx.response.has_content()).then(|| "204 response declares content".to_string())
}
