//! The built-in design rules and the machinery to run them.
//!
//! A [`Rule`] pairs its metadata with a check over one kind of target: a
//! URI tree node, an operation, a single response, a schema property or the
//! whole document. Checks return [`Hit`]s; the engine turns hits into
//! violations, applies suppression and orders the result.

mod docs;
mod http;
mod media;
pub mod plural;
mod schema;
mod status;
mod uri;
mod words;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::ConventionOptions;
use crate::pointer::Pointer;
use crate::tree::{OperationInfo, ResponseInfo, Segment, UriTree, UriTreeNode};

pub use plural::is_plural;
pub use schema::{walk_schema_properties, PropertyNaming, SchemaProperty};
pub(crate) use schema::operation_schemas;

/// Number of built-in rules.
pub const BUILTIN_RULE_COUNT: usize = 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Importance {
    High,
    Medium,
    Low,
}

impl Importance {
    pub const ALL: [Importance; 3] = [Importance::High, Importance::Medium, Importance::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            Importance::High => "high",
            Importance::Medium => "medium",
            Importance::Low => "low",
        }
    }
}

impl fmt::Display for Importance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Node,
    Operation,
    Response,
    SchemaProperty,
    Document,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Node => "node",
            Target::Operation => "operation",
            Target::Response => "response",
            Target::SchemaProperty => "schema_property",
            Target::Document => "document",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleMetadata {
    pub id: String,
    pub title: String,
    pub importance: Importance,
    pub target: Target,
    pub description: String,
    /// Default remedy attached to every violation of the rule.
    pub suggestion: String,
    pub source_tags: Vec<String>,
}

/// True if `id` looks like `FAMILY-NNN`.
pub fn is_valid_rule_id(id: &str) -> bool {
    let Some((family, number)) = id.split_once('-') else {
        return false;
    };
    !family.is_empty()
        && family.bytes().all(|b| b.is_ascii_uppercase())
        && number.len() == 3
        && number.bytes().all(|b| b.is_ascii_digit())
}

/// One finding from a check, before the engine assigns location and rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    /// `None` means the target's own pointer.
    pub pointer: Option<Pointer>,
    pub message: String,
}

impl Hit {
    pub fn here(message: impl Into<String>) -> Self {
        Self {
            pointer: None,
            message: message.into(),
        }
    }

    pub fn at(pointer: Pointer, message: impl Into<String>) -> Self {
        Self {
            pointer: Some(pointer),
            message: message.into(),
        }
    }
}

/// Facts about the whole document that per-operation checks need.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentFacts {
    pub operation_ids: BTreeMap<String, usize>,
    /// The most common non-empty set of response media types.
    pub modal_media_types: Option<BTreeSet<String>>,
}

impl DocumentFacts {
    pub fn collect(tree: &UriTree) -> Self {
        let mut operation_ids = BTreeMap::new();
        let mut sets: BTreeMap<BTreeSet<String>, usize> = BTreeMap::new();
        tree.walk(|node| {
            for op in node.operations.values() {
                if let Some(id) = op.operation_id.as_deref().filter(|id| !id.is_empty()) {
                    *operation_ids.entry(id.to_string()).or_insert(0) += 1;
                }
                let set = op.response_media_types();
                if !set.is_empty() {
                    *sets.entry(set).or_insert(0) += 1;
                }
            }
        });
        // BTreeMap iterates smallest set first, so the first maximum wins ties.
        let mut modal: Option<(BTreeSet<String>, usize)> = None;
        for (set, count) in sets {
            if modal.as_ref().is_none_or(|(_, best)| count > *best) {
                modal = Some((set, count));
            }
        }
        Self {
            operation_ids,
            modal_media_types: modal.map(|(set, _)| set),
        }
    }
}

pub struct NodeContext<'a> {
    pub node: &'a UriTreeNode,
    /// From the root down to the node's parent.
    pub ancestors: &'a [&'a UriTreeNode],
    pub options: &'a ConventionOptions,
}

impl<'a> NodeContext<'a> {
    /// Segments from the first one below the root to the node's own.
    pub fn segments(&self) -> impl Iterator<Item = &'a Segment> + '_ {
        self.ancestors
            .iter()
            .copied()
            .chain(std::iter::once(self.node))
            .filter(|n| !n.is_root())
            .map(|n| &n.segment)
    }

    /// Nodes from the first one below the root to the node itself.
    pub fn path_nodes(&self) -> impl Iterator<Item = &'a UriTreeNode> + '_ {
        self.ancestors
            .iter()
            .copied()
            .chain(std::iter::once(self.node))
            .filter(|n| !n.is_root())
    }
}

pub struct OperationContext<'a> {
    pub node: &'a UriTreeNode,
    pub ancestors: &'a [&'a UriTreeNode],
    pub operation: &'a OperationInfo,
    pub options: &'a ConventionOptions,
    pub facts: &'a DocumentFacts,
}

impl OperationContext<'_> {
    pub fn node_context(&self) -> NodeContext<'_> {
        NodeContext {
            node: self.node,
            ancestors: self.ancestors,
            options: self.options,
        }
    }
}

pub struct ResponseContext<'a> {
    pub operation: &'a OperationContext<'a>,
    pub code: &'a str,
    pub response: &'a ResponseInfo,
}

pub struct PropertyContext<'a> {
    pub node: &'a UriTreeNode,
    pub operation: &'a OperationInfo,
    pub name: &'a str,
    pub schema: &'a Value,
    pub pointer: &'a Pointer,
    pub options: &'a ConventionOptions,
}

pub struct DocumentContext<'a> {
    pub tree: &'a UriTree,
    pub options: &'a ConventionOptions,
}

pub type NodeCheck = Arc<dyn Fn(&NodeContext) -> Vec<Hit> + Send + Sync>;
pub type OperationCheck = Arc<dyn Fn(&OperationContext) -> Vec<Hit> + Send + Sync>;
pub type ResponseCheck = Arc<dyn Fn(&ResponseContext) -> Vec<Hit> + Send + Sync>;
pub type PropertyCheck = Arc<dyn Fn(&PropertyContext) -> Vec<Hit> + Send + Sync>;
pub type DocumentCheck = Arc<dyn Fn(&DocumentContext) -> Vec<Hit> + Send + Sync>;

#[derive(Clone)]
pub enum Check {
    Node(NodeCheck),
    Operation(OperationCheck),
    Response(ResponseCheck),
    Property(PropertyCheck),
    Document(DocumentCheck),
}

impl Check {
    pub fn target(&self) -> Target {
        match self {
            Check::Node(_) => Target::Node,
            Check::Operation(_) => Target::Operation,
            Check::Response(_) => Target::Response,
            Check::Property(_) => Target::SchemaProperty,
            Check::Document(_) => Target::Document,
        }
    }
}

#[derive(Clone)]
pub struct Rule {
    pub metadata: RuleMetadata,
    pub check: Check,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule").field("metadata", &self.metadata).finish_non_exhaustive()
    }
}

impl Rule {
    pub fn new(metadata: RuleMetadata, check: Check) -> Self {
        Self { metadata, check }
    }

    pub fn id(&self) -> &str {
        &self.metadata.id
    }

    pub fn importance(&self) -> Importance {
        self.metadata.importance
    }
}

/// An ordered, id-unique list of rules.
#[derive(Clone, Debug, Default)]
pub struct RuleCatalog {
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("rule id {0:?} is already in the catalog")]
    DuplicateId(String),
    #[error("rule id {0:?} does not match FAMILY-NNN")]
    InvalidId(String),
}

impl RuleCatalog {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.metadata.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn push(&mut self, rule: Rule) -> Result<(), CatalogError> {
        if !is_valid_rule_id(&rule.metadata.id) {
            return Err(CatalogError::InvalidId(rule.metadata.id));
        }
        if self.contains(&rule.metadata.id) {
            return Err(CatalogError::DuplicateId(rule.metadata.id));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn metadata(&self) -> impl Iterator<Item = &RuleMetadata> {
        self.rules.iter().map(|r| &r.metadata)
    }

    pub fn count_by_importance(&self) -> BTreeMap<Importance, usize> {
        let mut counts: BTreeMap<Importance, usize> = Importance::ALL.iter().map(|i| (*i, 0)).collect();
        for rule in &self.rules {
            *counts.entry(rule.importance()).or_insert(0) += 1;
        }
        counts
    }
}

/// The 34 built-in rules, in id order within each family.
pub fn catalog() -> RuleCatalog {
    let mut catalog = RuleCatalog::empty();
    for rule in uri::rules()
        .into_iter()
        .chain(http::rules())
        .chain(status::rules())
        .chain(media::rules())
        .chain(schema::rules())
        .chain(docs::rules())
    {
        catalog.push(rule).expect("built-in rule ids are unique and well formed");
    }
    catalog
}

pub(crate) struct Meta {
    pub id: &'static str,
    pub title: &'static str,
    pub importance: Importance,
    pub description: &'static str,
    pub suggestion: &'static str,
    pub tags: &'static [&'static str],
}

impl Meta {
    fn build(self, check: Check) -> Rule {
        Rule::new(
            RuleMetadata {
                id: self.id.to_string(),
                title: self.title.to_string(),
                importance: self.importance,
                target: check.target(),
                description: self.description.to_string(),
                suggestion: self.suggestion.to_string(),
                source_tags: self.tags.iter().map(|t| t.to_string()).collect(),
            },
            check,
        )
    }

    pub fn node(self, f: fn(&NodeContext) -> Option<String>) -> Rule {
        self.build(Check::Node(Arc::new(move |ctx: &NodeContext| {
            f(ctx).map(Hit::here).into_iter().collect()
        })))
    }

    pub fn operation(self, f: fn(&OperationContext) -> Vec<Hit>) -> Rule {
        self.build(Check::Operation(Arc::new(f)))
    }

    pub fn response(self, f: fn(&ResponseContext) -> Option<String>) -> Rule {
        self.build(Check::Response(Arc::new(move |ctx: &ResponseContext| {
            f(ctx).map(Hit::here).into_iter().collect()
        })))
    }

    pub fn property(self, f: fn(&PropertyContext) -> Option<String>) -> Rule {
        self.build(Check::Property(Arc::new(move |ctx: &PropertyContext| {
            f(ctx).map(Hit::here).into_iter().collect()
        })))
    }

    pub fn document(self, f: fn(&DocumentContext) -> Option<String>) -> Rule {
        self.build(Check::Document(Arc::new(move |ctx: &DocumentContext| {
            f(ctx).map(Hit::here).into_iter().collect()
        })))
    }
}
