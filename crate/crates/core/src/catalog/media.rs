//! Media type rules.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use super::{Hit, Importance, Meta, OperationContext, ResponseContext, Rule};
use crate::engine::ConventionOptions;
use crate::tree::{status_class, HttpMethod, StatusClass};

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "MED-001",
            title: "JSON payloads",
            importance: High,
            description: "Every request body, and every 2XX response with content, offers a JSON media type from the allowlist.",
            suggestion: "Offer application/json (or another +json type) alongside other formats.",
            tags: &["kotstein2021"],
        }
        .operation(json_offered),
        Meta {
            id: "MED-002",
            title: "Responses describe content",
            importance: High,
            description: "Every declared response other than 204 and 304 has a non-empty content map. HEAD operations are exempt.",
            suggestion: "Describe the response body under content, with its media type and schema.",
            tags: &["masse2011"],
        }
        .response(content_described),
        Meta {
            id: "MED-003",
            title: "Consistent media types",
            importance: Low,
            description: "Every operation's set of response media types equals the set most operations use.",
            suggestion: "Use the same response media types across the API.",
            tags: &["kotstein2021"],
        }
        .operation(consistent_media),
    ]
}

/// True if `media_type` (parameters ignored) is on the allowlist. Entries
/// starting with `+` match as suffixes.
pub(crate) fn allowed_media_type(media_type: &str, options: &ConventionOptions) -> bool {
    let base = media_type.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
    options.media_type_allowlist.iter().any(|entry| {
        let entry = entry.to_ascii_lowercase();
        if entry.starts_with('+') {
            base.ends_with(&entry)
        } else {
            base == entry
        }
    })
}

fn json_offered(ctx: &OperationContext) -> Vec<Hit> {
    let options = ctx.options;
    let offers = |types: &BTreeMap<String, Option<Value>>| types.keys().any(|t| allowed_media_type(t, options));
    let mut hits = Vec::new();
    if let Some(body) = &ctx.operation.request_body {
        if !body.media_types.is_empty() && !offers(&body.media_types) {
            hits.push(Hit::at(body.pointer.clone(), "request body offers no JSON media type"));
        }
    }
    for (code, response) in &ctx.operation.responses {
        if status_class(code) == StatusClass::Success
            && response.has_content()
            && !offers(&response.media_types)
        {
            hits.push(Hit::at(
                response.pointer.clone(),
                format!("{code} response offers no JSON media type"),
            ));
        }
    }
    hits
}

fn content_described(ctx: &ResponseContext) -> Option<String> {
    if ctx.operation.operation.method == HttpMethod::Head || matches!(ctx.code, "204" | "304") {
        return None;
    }
    (!ctx.response.has_content()).then(|| format!("{} response declares no content", ctx.code))
}

fn consistent_media(ctx: &OperationContext) -> Vec<Hit> {
    let set = ctx.operation.response_media_types();
    let Some(modal) = &ctx.facts.modal_media_types else {
        return vec![];
    };
    if set.is_empty() || &set == modal {
        return vec![];
    }
    vec![Hit::here(format!(
        "response media types [{}] differ from the common set [{}]",
        joined(&set),
        joined(modal)
    ))]
}

fn joined(set: &BTreeSet<String>) -> String {
    set.iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}
