//! URI naming and structure rules. Each runs once per operation-bearing
//! node and looks at the node's whole path.

use std::collections::BTreeSet;

use super::words::first_word;
use super::{is_plural, Importance, Meta, NodeContext, Rule};
use crate::tree::{Segment, SegmentKind};

const CRUD_VERBS: &[&str] = &[
    "create", "read", "get", "fetch", "update", "set", "delete", "remove", "put", "post",
];

pub(super) fn rules() -> Vec<Rule> {
    use Importance::*;
    vec![
        Meta {
            id: "URI-001",
            title: "No trailing slash",
            importance: High,
            description: "A path must not end with a forward slash; /users/ and /users name the same resource.",
            suggestion: "Remove the trailing slash from the path.",
            tags: &["masse2011"],
        }
        .node(trailing_slash),
        Meta {
            id: "URI-002",
            title: "Lowercase path segments",
            importance: High,
            description: "Literal path segments contain no uppercase letters. Template variables are exempt.",
            suggestion: "Spell the segment in lowercase, joining words with hyphens.",
            tags: &["masse2011"],
        }
        .node(lowercase),
        Meta {
            id: "URI-003",
            title: "No underscores in paths",
            importance: High,
            description: "Literal path segments contain no underscores.",
            suggestion: "Use hyphens to separate words in path segments.",
            tags: &["masse2011"],
        }
        .node(underscores),
        Meta {
            id: "URI-004",
            title: "No file extensions",
            importance: High,
            description: "The last literal segment does not end in a file extension such as .json or .xml; the format is negotiated through media types.",
            suggestion: "Drop the extension and rely on the Accept and Content-Type headers.",
            tags: &["masse2011"],
        }
        .node(file_extension),
        Meta {
            id: "URI-005",
            title: "No CRUD verbs in paths",
            importance: High,
            description: "No literal segment is or starts with a CRUD function name (create, get, update, delete and similar); the HTTP method carries the action.",
            suggestion: "Name the resource with a noun and express the action through the HTTP method.",
            tags: &["masse2011", "kotstein2021"],
        }
        .node(crud_verbs),
        Meta {
            id: "URI-006",
            title: "Plural collection names",
            importance: High,
            description: "A literal segment followed by a template segment names a collection and must be plural.",
            suggestion: "Use the plural form of the collection name, e.g. /users/{id}.",
            tags: &["masse2011", "kotstein2021"],
        }
        .node(plural_collections),
        Meta {
            id: "URI-007",
            title: "Consistent template names",
            importance: Medium,
            description: "Every template position uses one variable name across the API, and no name repeats along a path.",
            suggestion: "Use one descriptive variable name per position, e.g. {userId} everywhere below /users.",
            tags: &["kotstein2021"],
        }
        .node(template_naming),
        Meta {
            id: "URI-008",
            title: "Limited path depth",
            importance: Low,
            description: "A path has at most max_depth segments.",
            suggestion: "Flatten the hierarchy, e.g. promote deeply nested resources to top-level collections.",
            tags: &["kotstein2021"],
        }
        .node(depth),
        Meta {
            id: "URI-009",
            title: "Collection and document alternation",
            importance: Medium,
            description: "Two template segments never follow each other; every identifier sits below a named collection.",
            suggestion: "Insert a collection name between the variables, e.g. /maps/{mapId}/layers/{layerId}.",
            tags: &["masse2011"],
        }
        .node(consecutive_templates),
        Meta {
            id: "URI-010",
            title: "No empty segments",
            importance: Low,
            description: "A path contains no empty interior segment (a double slash).",
            suggestion: "Remove the doubled slash.",
            tags: &["masse2011"],
        }
        .node(empty_segments),
        Meta {
            id: "URI-011",
            title: "Plain path characters",
            importance: Low,
            description: "Literal segments use only lowercase letters, digits and hyphens; spaces, dots and percent-encoded characters are flagged.",
            suggestion: "Restrict path segments to a-z, 0-9 and hyphens.",
            tags: &["masse2011"],
        }
        .node(plain_characters),
    ]
}

fn literals<'a>(ctx: &'a NodeContext) -> impl Iterator<Item = &'a Segment> + 'a {
    ctx.segments().filter(|s| s.kind == SegmentKind::Literal)
}

fn final_literal<'a>(ctx: &'a NodeContext) -> Option<&'a Segment> {
    literals(ctx).filter(|s| !s.text.is_empty()).last()
}

fn extension_of<'a>(text: &str, ctx: &'a NodeContext) -> Option<&'a str> {
    let lower = text.to_lowercase();
    ctx.options
        .file_extensions
        .iter()
        .map(String::as_str)
        .find(|ext| lower.len() > ext.len() && lower.ends_with(&ext.to_lowercase()))
}

fn trailing_slash(ctx: &NodeContext) -> Option<String> {
    (ctx.node.has_operations() && !ctx.node.is_root() && ctx.node.segment.is_empty_literal())
        .then(|| format!("{} ends with a slash", ctx.node.key_path))
}

fn lowercase(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let bad: Vec<_> = literals(ctx)
        .filter(|s| s.text.chars().any(char::is_uppercase))
        .map(|s| s.text.as_str())
        .collect();
    (!bad.is_empty()).then(|| format!("segment {} contains uppercase letters", quoted(&bad)))
}

fn underscores(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let bad: Vec<_> = literals(ctx)
        .filter(|s| s.text.contains('_'))
        .map(|s| s.text.as_str())
        .collect();
    (!bad.is_empty()).then(|| format!("segment {} contains underscores", quoted(&bad)))
}

fn file_extension(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let last = final_literal(ctx)?;
    let ext = extension_of(&last.text, ctx)?;
    Some(format!("segment \"{}\" ends in the file extension {ext}", last.text))
}

fn crud_verbs(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let bad: Vec<_> = literals(ctx)
        .filter(|s| first_word(&s.text).is_some_and(|w| CRUD_VERBS.contains(&w.as_str())))
        .map(|s| s.text.as_str())
        .collect();
    (!bad.is_empty()).then(|| format!("segment {} names a CRUD function", quoted(&bad)))
}

fn plural_collections(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let segments: Vec<_> = ctx.segments().collect();
    let bad: Vec<_> = segments
        .windows(2)
        .filter(|w| w[0].kind == SegmentKind::Literal && w[1].is_template() && !w[0].text.is_empty())
        .filter(|w| !is_plural(&w[0].text, ctx.options))
        .map(|w| w[0].text.as_str())
        .collect();
    (!bad.is_empty()).then(|| format!("collection {} is not plural", quoted(&bad)))
}

fn template_naming(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let templates: Vec<_> = ctx.path_nodes().filter(|n| n.segment.is_template()).collect();
    if let Some(mixed) = templates.iter().find(|n| n.template_names.len() > 1) {
        let names: Vec<_> = mixed.template_names.iter().map(|n| format!("{{{n}}}")).collect();
        return Some(format!(
            "template position {} is spelled {}",
            mixed.key_path,
            names.join(", ")
        ));
    }
    let mut seen = BTreeSet::new();
    for node in templates {
        if !seen.insert(node.segment.text.as_str()) {
            return Some(format!("template name {{{}}} appears twice on the path", node.segment.text));
        }
    }
    None
}

fn depth(ctx: &NodeContext) -> Option<String> {
    (ctx.node.has_operations() && ctx.node.depth > ctx.options.max_depth).then(|| {
        format!(
            "path has {} segments; the limit is {}",
            ctx.node.depth, ctx.options.max_depth
        )
    })
}

fn consecutive_templates(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let segments: Vec<_> = ctx.segments().collect();
    let pair = segments.windows(2).find(|w| w[0].is_template() && w[1].is_template())?;
    Some(format!("template {} directly follows template {}", pair[1], pair[0]))
}

fn empty_segments(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let segments: Vec<_> = ctx.segments().collect();
    let (_, interior) = segments.split_last()?;
    interior
        .iter()
        .any(|s| s.is_empty_literal())
        .then(|| format!("{} contains an empty segment", ctx.node.key_path))
}

fn plain_characters(ctx: &NodeContext) -> Option<String> {
    if !ctx.node.has_operations() {
        return None;
    }
    let named: Vec<_> = literals(ctx).filter(|s| !s.text.is_empty()).collect();
    let allowed = |c: char| {
        c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_' || c.is_uppercase()
    };
    let mut bad = Vec::new();
    for (i, segment) in named.iter().enumerate() {
        let mut text = segment.text.as_str();
        if i + 1 == named.len() {
            if let Some(ext) = extension_of(text, ctx) {
                text = &text[..text.len() - ext.len()];
            }
        }
        if !text.chars().all(allowed) {
            bad.push(segment.text.as_str());
        }
    }
    (!bad.is_empty()).then(|| {
        format!("segment {} contains characters outside a-z, 0-9 and '-'", quoted(&bad))
    })
}

fn quoted(items: &[&str]) -> String {
    items.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(", ")
}
