//! The URI tree: one node per path segment, operations attached to the node
//! of their declared path.
//!
//! Template segments at the same position share one node whatever the
//! variable is called; every spelling seen is kept in `template_names`.
//! A trailing slash becomes an empty literal child, so `/users/` is the
//! node below `/users`.

mod operation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::Value;

pub use operation::{
    status_class, ContentInfo, HttpMethod, OperationInfo, ParameterInfo, ParameterLocation,
    ResponseInfo, StatusClass, UnknownMethod,
};

use crate::diagnostic::{Diagnostic, DiagnosticCode};
use crate::pointer::Pointer;
use crate::resolve::ResolvedDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Literal,
    Template,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Literal text, or the variable name without braces.
    pub text: String,
}

impl Segment {
    pub fn literal(text: impl Into<String>) -> Self {
        Self {
            kind: SegmentKind::Literal,
            text: text.into(),
        }
    }

    pub fn template(name: impl Into<String>) -> Self {
        Self {
            kind: SegmentKind::Template,
            text: name.into(),
        }
    }

    pub fn is_template(&self) -> bool {
        self.kind == SegmentKind::Template
    }

    pub fn is_empty_literal(&self) -> bool {
        self.kind == SegmentKind::Literal && self.text.is_empty()
    }

    fn child_key(&self) -> ChildKey {
        match self.kind {
            SegmentKind::Literal => ChildKey::Literal(self.text.clone()),
            SegmentKind::Template => ChildKey::Template,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SegmentKind::Literal => f.write_str(&self.text),
            SegmentKind::Template => write!(f, "{{{}}}", self.text),
        }
    }
}

/// Orders literal children lexicographically, the single template child last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChildKey {
    Literal(String),
    Template,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UriTreeNode {
    pub segment: Segment,
    pub key_path: String,
    pub depth: usize,
    pub children: BTreeMap<ChildKey, UriTreeNode>,
    pub operations: BTreeMap<HttpMethod, OperationInfo>,
    pub template_names: BTreeSet<String>,
    /// Path keys from the document that landed on this node.
    pub declared_paths: Vec<String>,
}

impl UriTreeNode {
    fn root() -> Self {
        Self {
            segment: Segment::literal(""),
            key_path: String::new(),
            depth: 0,
            children: BTreeMap::new(),
            operations: BTreeMap::new(),
            template_names: BTreeSet::new(),
            declared_paths: Vec::new(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    pub fn has_operations(&self) -> bool {
        !self.operations.is_empty()
    }

    pub fn template_child(&self) -> Option<&UriTreeNode> {
        self.children.get(&ChildKey::Template)
    }

    /// The key path as a URI: `"/"` for the root.
    pub fn rendered_path(&self) -> &str {
        if self.key_path.is_empty() {
            "/"
        } else {
            &self.key_path
        }
    }

    fn child_mut(&mut self, segment: &Segment) -> &mut UriTreeNode {
        let key_path = format!("{}/{}", self.key_path, segment);
        let depth = self.depth + 1;
        self.children
            .entry(segment.child_key())
            .or_insert_with(|| UriTreeNode {
                segment: segment.clone(),
                key_path,
                depth,
                children: BTreeMap::new(),
                operations: BTreeMap::new(),
                template_names: BTreeSet::new(),
                declared_paths: Vec::new(),
            })
    }

    fn walk_inner<'a>(
        &'a self,
        ancestors: &mut Vec<&'a UriTreeNode>,
        visit: &mut dyn FnMut(&'a UriTreeNode, &[&'a UriTreeNode]),
    ) {
        visit(self, ancestors);
        ancestors.push(self);
        for child in self.children.values() {
            child.walk_inner(ancestors, visit);
        }
        ancestors.pop();
    }
}

/// Title and description from the document's `info` object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DocumentInfo {
    pub title: Option<String>,
    pub version: Option<String>,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UriTree {
    pub root: UriTreeNode,
    pub info: DocumentInfo,
    pub source_name: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl UriTree {
    /// Pre-order, depth-first; children in [`ChildKey`] order.
    pub fn walk<'a>(&'a self, mut visit: impl FnMut(&'a UriTreeNode)) {
        self.root.walk_inner(&mut Vec::new(), &mut |node, _| visit(node));
    }

    /// Like [`UriTree::walk`], also passing the chain of ancestors from the root.
    pub fn walk_with_ancestors<'a>(&'a self, mut visit: impl FnMut(&'a UriTreeNode, &[&'a UriTreeNode])) {
        self.root.walk_inner(&mut Vec::new(), &mut visit);
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(|_| n += 1);
        n
    }

    pub fn lookup(&self, key_path: &str) -> Option<&UriTreeNode> {
        node_lookup(self, key_path)
    }

    /// Number of operation-bearing nodes.
    pub fn path_count(&self) -> usize {
        let mut n = 0;
        self.walk(|node| n += usize::from(node.has_operations()));
        n
    }

    pub fn export(&self) -> TreeExport {
        export_node(&self.root)
    }

    /// Pretty JSON debug export: `{segment, kind, children, methods}` per node.
    pub fn export_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.export()).expect("tree export serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeExport {
    pub segment: String,
    pub kind: &'static str,
    pub children: Vec<TreeExport>,
    pub methods: Vec<HttpMethod>,
}

fn export_node(node: &UriTreeNode) -> TreeExport {
    TreeExport {
        segment: node.segment.text.clone(),
        kind: if node.is_root() {
            "root"
        } else {
            match node.segment.kind {
                SegmentKind::Literal => "literal",
                SegmentKind::Template => "template",
            }
        },
        children: node.children.values().map(export_node).collect(),
        methods: node.operations.keys().copied().collect(),
    }
}

/// Splits a path key into segments. `"/"` has no segments.
pub fn split_path(path: &str) -> Option<Vec<(Segment, bool)>> {
    let rest = path.strip_prefix('/')?;
    if rest.is_empty() {
        return Some(Vec::new());
    }
    Some(rest.split('/').map(parse_segment).collect())
}

/// Returns the segment and whether it is malformed (kept verbatim as a literal).
fn parse_segment(raw: &str) -> (Segment, bool) {
    if raw.contains([';', '?', '#']) {
        return (Segment::literal(raw), true);
    }
    if let Some(inner) = raw.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        if !inner.is_empty() && !inner.contains(['{', '}']) {
            return (Segment::template(inner), false);
        }
    }
    if raw.contains(['{', '}']) {
        return (Segment::literal(raw), true);
    }
    (Segment::literal(raw), false)
}

/// Finds the node for a key path. Accepts keys with or without the leading
/// `/`; template segments match by position whatever their variable name.
pub fn node_lookup<'a>(tree: &'a UriTree, key_path: &str) -> Option<&'a UriTreeNode> {
    if key_path.is_empty() {
        return Some(&tree.root);
    }
    let canonical = if key_path.starts_with('/') {
        key_path.to_string()
    } else {
        format!("/{key_path}")
    };
    let mut node = &tree.root;
    for (segment, _) in split_path(&canonical)? {
        node = node.children.get(&segment.child_key())?;
    }
    Some(node)
}

fn text_field(value: &Value, key: &str) -> Option<String> {
    value.get(key).and_then(Value::as_str).map(str::to_string)
}

pub fn build_uri_tree(doc: &ResolvedDocument) -> Result<UriTree, Diagnostic> {
    let info = doc.root.get("info").map_or_else(DocumentInfo::default, |info| DocumentInfo {
        title: text_field(info, "title"),
        version: text_field(info, "version"),
        description: text_field(info, "description"),
    });
    let mut tree = UriTree {
        root: UriTreeNode::root(),
        info,
        source_name: doc.source_name.clone(),
        diagnostics: Vec::new(),
    };
    let paths_ptr = Pointer::root().key("paths");
    let paths = match doc.root.get("paths") {
        None => return Ok(tree),
        Some(Value::Object(paths)) => paths,
        Some(_) => {
            return Err(Diagnostic::fatal(
                DiagnosticCode::InvalidPaths,
                paths_ptr,
                "\"paths\" is not a map",
            ))
        }
    };
    let default_security = doc.root.get("security");
    for (path, item) in paths {
        let item_ptr = paths_ptr.key(path.as_str());
        let segments = split_path(path).ok_or_else(|| {
            Diagnostic::fatal(
                DiagnosticCode::InvalidPathKey,
                item_ptr.clone(),
                format!("path {path:?} does not start with \"/\""),
            )
        })?;
        let mut node = &mut tree.root;
        for (segment, malformed) in &segments {
            if *malformed {
                tree.diagnostics.push(Diagnostic::warning(
                    DiagnosticCode::MalformedSegment,
                    item_ptr.clone(),
                    format!("segment {:?} of {path:?} is not a plain literal or template", segment.text),
                ));
            }
            node = node.child_mut(segment);
            if segment.is_template() {
                node.template_names.insert(segment.text.clone());
            }
        }
        if let Some(previous) = node.declared_paths.first() {
            tree.diagnostics.push(Diagnostic::warning(
                DiagnosticCode::TemplateMerge,
                item_ptr.clone(),
                format!("path {path:?} merges with {previous:?} (template names differ only)"),
            ));
        }
        node.declared_paths.push(path.clone());

        let Some(item) = item.as_object() else {
            continue;
        };
        let shared_params = item.get("parameters");
        for method in HttpMethod::ALL {
            let Some(op) = item.get(method.path_item_key()) else {
                continue;
            };
            let op_ptr = item_ptr.key(method.path_item_key());
            let info = build_operation(
                method,
                op,
                &op_ptr,
                shared_params,
                &item_ptr,
                default_security,
                &mut tree.diagnostics,
            );
            if node.operations.insert(method, info).is_some() {
                tree.diagnostics.push(Diagnostic::warning(
                    DiagnosticCode::DuplicateOperation,
                    op_ptr,
                    format!("{method} {path:?} was already declared by a merged path; the last one wins"),
                ));
            }
        }
    }
    Ok(tree)
}

fn build_operation(
    method: HttpMethod,
    op: &Value,
    op_ptr: &Pointer,
    shared_params: Option<&Value>,
    item_ptr: &Pointer,
    default_security: Option<&Value>,
    diagnostics: &mut Vec<Diagnostic>,
) -> OperationInfo {
    let mut parameters: Vec<ParameterInfo> = Vec::new();
    let sources = [
        (shared_params, item_ptr.key("parameters")),
        (op.get("parameters"), op_ptr.key("parameters")),
    ];
    for (list, list_ptr) in sources {
        let Some(Value::Array(list)) = list else {
            continue;
        };
        for (i, raw) in list.iter().enumerate() {
            let Some(param) = build_parameter(raw, list_ptr.index(i), diagnostics) else {
                continue;
            };
            match parameters
                .iter_mut()
                .find(|p| p.name == param.name && p.location == param.location)
            {
                Some(existing) => *existing = param,
                None => parameters.push(param),
            }
        }
    }

    let request_body = op.get("requestBody").map(|body| ContentInfo {
        media_types: media_types(body, &op_ptr.key("requestBody"), diagnostics),
        pointer: op_ptr.key("requestBody"),
    });

    let mut responses = BTreeMap::new();
    if let Some(Value::Object(map)) = op.get("responses") {
        for (code, response) in map {
            let ptr = op_ptr.key("responses").key(code.as_str());
            let headers = response
                .get("headers")
                .and_then(Value::as_object)
                .map(|h| h.keys().cloned().collect())
                .unwrap_or_default();
            responses.insert(
                code.clone(),
                ResponseInfo {
                    description: text_field(response, "description"),
                    media_types: media_types(response, &ptr, diagnostics),
                    headers,
                    pointer: ptr,
                },
            );
        }
    }

    let security = op
        .get("security")
        .or(default_security)
        .and_then(Value::as_array)
        .map(|reqs| {
            let mut names: Vec<String> = Vec::new();
            for name in reqs.iter().filter_map(Value::as_object).flat_map(|r| r.keys()) {
                if !names.contains(name) {
                    names.push(name.clone());
                }
            }
            names
        })
        .unwrap_or_default();

    OperationInfo {
        method,
        operation_id: text_field(op, "operationId"),
        summary: text_field(op, "summary"),
        description: text_field(op, "description"),
        parameters,
        request_body,
        responses,
        security,
        raw_pointer: op_ptr.clone(),
    }
}

fn build_parameter(raw: &Value, ptr: Pointer, diagnostics: &mut Vec<Diagnostic>) -> Option<ParameterInfo> {
    let name = text_field(raw, "name");
    let location = raw
        .get("in")
        .and_then(Value::as_str)
        .and_then(|s| s.parse::<ParameterLocation>().ok());
    let (Some(name), Some(location)) = (name, location) else {
        diagnostics.push(Diagnostic::warning(
            DiagnosticCode::InvalidParameter,
            ptr,
            "parameter needs a \"name\" and an \"in\" of path, query, header or cookie; skipped",
        ));
        return None;
    };
    let mut required = raw.get("required").and_then(Value::as_bool).unwrap_or(false);
    if location == ParameterLocation::Path && !required {
        diagnostics.push(Diagnostic::warning(
            DiagnosticCode::InvalidParameter,
            ptr.clone(),
            format!("path parameter {name:?} must be required; treating it as required"),
        ));
        required = true;
    }
    Some(ParameterInfo {
        name,
        location,
        required,
        description: text_field(raw, "description"),
        schema: raw.get("schema").cloned(),
        pointer: ptr,
    })
}

fn media_types(
    holder: &Value,
    holder_ptr: &Pointer,
    diagnostics: &mut Vec<Diagnostic>,
) -> BTreeMap<String, Option<Value>> {
    let mut out = BTreeMap::new();
    let Some(Value::Object(content)) = holder.get("content") else {
        return out;
    };
    for (media_type, entry) in content {
        if !media_type.contains('/') {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::InvalidMediaType,
                holder_ptr.key("content").key(media_type.as_str()),
                format!("{media_type:?} is not a media type; skipped"),
            ));
            continue;
        }
        out.insert(media_type.clone(), entry.get("schema").cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::load_document;
    use crate::resolve::resolve_references;

    fn tree_for(paths: &[&str]) -> UriTree {
        let mut map = serde_json::Map::new();
        for p in paths {
            map.insert(p.to_string(), serde_json::json!({"get": {"responses": {"200": {"description": "ok"}}}}));
        }
        let doc = serde_json::json!({"openapi": "3.1.0", "info": {"title": "t", "version": "1"}, "paths": map});
        let raw = load_document(doc.to_string().as_bytes(), None).unwrap();
        build_uri_tree(&resolve_references(&raw)).unwrap()
    }

    fn visit_order(tree: &UriTree) -> Vec<String> {
        let mut seen = Vec::new();
        tree.walk(|n| seen.push(n.key_path.clone()));
        seen
    }

    #[test]
    fn figure_two_layout() {
        let tree = tree_for(&["/instances/{instance_id}/rules", "/instances/{instance_id}/ignores"]);
        assert_eq!(tree.node_count(), 5);
        assert_eq!(
            visit_order(&tree),
            [
                "",
                "/instances",
                "/instances/{instance_id}",
                "/instances/{instance_id}/ignores",
                "/instances/{instance_id}/rules"
            ]
        );
        let rules = node_lookup(&tree, "/instances/{instance_id}/rules").unwrap();
        assert_eq!(rules.segment, Segment::literal("rules"));
        assert!(node_lookup(&tree, "instances/{instance_id}/rules").is_some());
        assert!(node_lookup(&tree, "").unwrap().is_root());
        assert!(node_lookup(&tree, "/nope").is_none());
    }

    #[test]
    fn templates_merge_by_position() {
        let tree = tree_for(&["/a/{x}/c", "/a/{y}/d"]);
        let a = node_lookup(&tree, "/a").unwrap();
        assert_eq!(a.children.len(), 1);
        let template = a.template_child().unwrap();
        assert_eq!(template.template_names, BTreeSet::from(["x".to_string(), "y".to_string()]));
        assert_eq!(template.key_path, "/a/{x}");
        let kids: Vec<_> = template.children.values().map(|c| c.segment.text.as_str()).collect();
        assert_eq!(kids, ["c", "d"]);
        assert!(node_lookup(&tree, "/a/{y}/d").is_some());
    }

    #[test]
    fn empty_paths_gives_root_only() {
        let tree = tree_for(&[]);
        assert_eq!(tree.node_count(), 1);
        assert_eq!(visit_order(&tree), [""]);
    }

    #[test]
    fn literal_siblings_sorted_template_last() {
        let tree = tree_for(&["/b", "/{id}", "/a", "/c"]);
        assert_eq!(visit_order(&tree), ["", "/a", "/b", "/c", "/{id}"]);
    }

    #[test]
    fn trailing_slash_is_empty_child() {
        let tree = tree_for(&["/Users/"]);
        let node = node_lookup(&tree, "/Users/").unwrap();
        assert!(node.segment.is_empty_literal());
        assert!(node.has_operations());
        assert!(!node_lookup(&tree, "/Users").unwrap().has_operations());
    }

    #[test]
    fn root_path_attaches_to_root() {
        let tree = tree_for(&["/"]);
        assert_eq!(tree.node_count(), 1);
        assert!(tree.root.has_operations());
        assert_eq!(tree.root.rendered_path(), "/");
    }

    #[test]
    fn spelling_only_duplicates_merge_with_diagnostic() {
        let tree = tree_for(&["/a/{x}", "/a/{y}"]);
        let codes: Vec<_> = tree.diagnostics.iter().map(|d| d.code).collect();
        assert!(codes.contains(&DiagnosticCode::TemplateMerge));
        assert!(codes.contains(&DiagnosticCode::DuplicateOperation));
        assert_eq!(tree.path_count(), 1);
    }

    #[test]
    fn malformed_segments_kept_verbatim() {
        let tree = tree_for(&["/files/{id}.json", "/a;v=1/b"]);
        assert!(node_lookup(&tree, "/files/{id}.json").is_some());
        assert_eq!(
            tree.diagnostics.iter().filter(|d| d.code == DiagnosticCode::MalformedSegment).count(),
            2
        );
    }

    #[test]
    fn path_parameters_pushed_down() {
        let raw = load_document(
            br#"
openapi: 3.1.0
info: {title: t, version: "1"}
security: [{apiKey: []}]
paths:
  /users/{id}:
    parameters:
      - {name: id, in: path, required: true, description: shared}
      - {name: verbose, in: query}
    get:
      parameters:
        - {name: verbose, in: query, description: overridden}
      responses:
        200:
          description: ok
          headers: {X-Rate: {}}
          content:
            application/json: {schema: {type: object}}
            bogus: {}
    delete:
      security: []
      responses: {"204": {description: gone}}
"#,
            None,
        )
        .unwrap();
        let tree = build_uri_tree(&resolve_references(&raw)).unwrap();
        let node = node_lookup(&tree, "/users/{id}").unwrap();
        let get = &node.operations[&HttpMethod::Get];
        assert_eq!(get.parameters.len(), 2);
        assert_eq!(get.parameters[1].description.as_deref(), Some("overridden"));
        assert_eq!(get.parameters[1].pointer.to_string(), "/paths/~1users~1{id}/get/parameters/0");
        assert_eq!(get.security, ["apiKey"]);
        let ok = &get.responses["200"];
        assert!(ok.headers.contains("X-Rate"));
        assert_eq!(ok.media_types.len(), 1);
        assert!(node.operations[&HttpMethod::Delete].security.is_empty());
        assert!(tree.diagnostics.iter().any(|d| d.code == DiagnosticCode::InvalidMediaType));
    }

    #[test]
    fn export_shape() {
        let tree = tree_for(&["/a/{id}"]);
        let json: Value = serde_json::from_str(&tree.export_json()).unwrap();
        assert_eq!(json["kind"], "root");
        assert_eq!(json["children"][0]["children"][0]["kind"], "template");
        assert_eq!(json["children"][0]["children"][0]["methods"][0], "GET");
    }
}
