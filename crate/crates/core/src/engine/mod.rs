//! Runs a rule catalog over a URI tree and collects violations.
//!
//! Every enabled and disabled rule is evaluated; hits that fall under a
//! suppression scope are only counted. Violations are grouped by key path
//! (lexicographic) and ordered inside a group by importance, then rule id.

mod analyze;
mod config;
mod custom;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Serialize};

pub use analyze::{analyze, prepare, Analysis, AnalyzeError, Analyzer, PreparedSpec};
pub use config::{
    config_from_env, is_suppressed, normalize_key, ConfigError, ConfigFile, ConventionOptions,
    RuleConfig, SuppressionScope,
};
pub use custom::{compile_custom_rules, CustomRuleSpec, Predicate};

use crate::catalog::{
    self, Check, DocumentContext, DocumentFacts, Hit, Importance, NodeContext, OperationContext,
    PropertyContext, ResponseContext, Rule, RuleCatalog,
};
use crate::pointer::Pointer;
use crate::tree::{HttpMethod, UriTree};

/// Rule id of the synthetic violation reported when a rule's check panics.
pub const ENGINE_FAILURE_RULE: &str = "ENGINE-000";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule_id: String,
    pub importance: Importance,
    pub key_path: String,
    pub method: Option<HttpMethod>,
    pub detail_pointer: Option<Pointer>,
    pub message: String,
    pub suggestion: String,
}

impl Violation {
    fn order_key(&self) -> (Importance, &str, Option<HttpMethod>, Option<&Pointer>, &str) {
        (
            self.importance,
            &self.rule_id,
            self.method,
            self.detail_pointer.as_ref(),
            &self.message,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationGroup {
    pub key_path: String,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationReport {
    pub source_name: String,
    pub rule_count_evaluated: usize,
    /// All violations, in group order.
    pub violations: Vec<Violation>,
    pub groups: Vec<ViolationGroup>,
    /// Always holds all three importance levels.
    pub counts_by_importance: BTreeMap<Importance, usize>,
    pub suppressed_count: usize,
}

impl EvaluationReport {
    /// Sorts and groups `violations`.
    pub fn new(
        source_name: impl Into<String>,
        rule_count_evaluated: usize,
        violations: Vec<Violation>,
        suppressed_count: usize,
    ) -> Self {
        let mut by_key: BTreeMap<String, Vec<Violation>> = BTreeMap::new();
        for v in violations {
            by_key.entry(v.key_path.clone()).or_default().push(v);
        }
        let mut counts: BTreeMap<Importance, usize> = Importance::ALL.iter().map(|i| (*i, 0)).collect();
        let mut flat = Vec::new();
        let mut groups = Vec::with_capacity(by_key.len());
        for (key_path, mut list) in by_key {
            list.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
            for v in &list {
                *counts.entry(v.importance).or_insert(0) += 1;
            }
            flat.extend(list.iter().cloned());
            groups.push(ViolationGroup { key_path, violations: list });
        }
        Self {
            source_name: source_name.into(),
            rule_count_evaluated,
            violations: flat,
            groups,
            counts_by_importance: counts,
            suppressed_count,
        }
    }

    pub fn count(&self, importance: Importance) -> usize {
        self.counts_by_importance.get(&importance).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn group(&self, key_path: &str) -> Option<&ViolationGroup> {
        self.groups.iter().find(|g| g.key_path == key_path)
    }

    /// `(rule_id, key_path)` of every violation, sorted.
    pub fn rule_key_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<_> = self
            .violations
            .iter()
            .map(|v| (v.rule_id.clone(), v.key_path.clone()))
            .collect();
        pairs.sort();
        pairs
    }
}

/// The built-in catalog extended with the config's custom rules.
pub fn catalog_for(config: &RuleConfig) -> Result<RuleCatalog, ConfigError> {
    let mut catalog = catalog::catalog();
    for rule in compile_custom_rules(&config.custom_rules)? {
        let id = rule.id().to_string();
        catalog
            .push(rule)
            .map_err(|e| ConfigError::CustomRule { id, message: e.to_string() })?;
    }
    config.validate(&catalog)?;
    Ok(catalog)
}

struct Sink<'a> {
    config: &'a RuleConfig,
    violations: Vec<Violation>,
    suppressed: usize,
}

impl Sink<'_> {
    fn run(
        &mut self,
        rule: &Rule,
        key_path: &str,
        method: Option<HttpMethod>,
        default_pointer: Option<&Pointer>,
        check: impl FnOnce() -> Vec<Hit>,
    ) {
        let hits = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(hits) => hits,
            Err(payload) => {
                let reason = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                self.violations.push(Violation {
                    rule_id: ENGINE_FAILURE_RULE.into(),
                    importance: Importance::Low,
                    key_path: key_path.to_string(),
                    method,
                    detail_pointer: default_pointer.cloned(),
                    message: format!("rule {} failed: {reason}", rule.id()),
                    suggestion: "The rest of the report is complete; report the input that triggers this failure."
                        .into(),
                });
                return;
            }
        };
        let mut seen = BTreeSet::new();
        for hit in hits {
            let pointer = hit.pointer.or_else(|| default_pointer.cloned());
            if !seen.insert(pointer.clone()) {
                continue;
            }
            if self.config.is_suppressed(rule.id(), key_path) {
                self.suppressed += 1;
                continue;
            }
            self.violations.push(Violation {
                rule_id: rule.id().to_string(),
                importance: rule.importance(),
                key_path: key_path.to_string(),
                method,
                detail_pointer: pointer,
                message: hit.message,
                suggestion: rule.metadata.suggestion.clone(),
            });
        }
    }
}

/// Applies every rule in `catalog` to every matching target in `tree`.
pub fn evaluate(tree: &UriTree, catalog: &RuleCatalog, config: &RuleConfig) -> EvaluationReport {
    let facts = DocumentFacts::collect(tree);
    let options = &config.options;
    let mut sink = Sink {
        config,
        violations: Vec::new(),
        suppressed: 0,
    };
    let has_property_rules = catalog.rules().iter().any(|r| matches!(r.check, Check::Property(_)));
    let paths = Pointer::root().key("paths");

    tree.walk_with_ancestors(|node, ancestors| {
        let node_ctx = NodeContext {
            node,
            ancestors,
            options,
        };
        let node_ptr = node.declared_paths.first().map(|p| paths.key(p.as_str()));
        for rule in catalog.rules() {
            if let Check::Node(check) = &rule.check {
                sink.run(rule, &node.key_path, None, node_ptr.as_ref(), || check(&node_ctx));
            }
        }
        for op in node.operations.values() {
            let op_ctx = OperationContext {
                node,
                ancestors,
                operation: op,
                options,
                facts: &facts,
            };
            let method = Some(op.method);
            for rule in catalog.rules() {
                match &rule.check {
                    Check::Operation(check) => {
                        sink.run(rule, &node.key_path, method, Some(&op.raw_pointer), || check(&op_ctx));
                    }
                    Check::Response(check) => {
                        for (code, response) in &op.responses {
                            let ctx = ResponseContext {
                                operation: &op_ctx,
                                code,
                                response,
                            };
                            sink.run(rule, &node.key_path, method, Some(&response.pointer), || check(&ctx));
                        }
                    }
                    _ => {}
                }
            }
            if !has_property_rules {
                continue;
            }
            for (schema, pointer) in catalog::operation_schemas(op) {
                for prop in catalog::walk_schema_properties(schema, &pointer) {
                    let ctx = PropertyContext {
                        node,
                        operation: op,
                        name: prop.name,
                        schema: prop.schema,
                        pointer: &prop.pointer,
                        options,
                    };
                    for rule in catalog.rules() {
                        if let Check::Property(check) = &rule.check {
                            sink.run(rule, &node.key_path, method, Some(&prop.pointer), || check(&ctx));
                        }
                    }
                }
            }
        }
    });

    let doc_ctx = DocumentContext { tree, options };
    let info_ptr = Pointer::root().key("info");
    for rule in catalog.rules() {
        if let Check::Document(check) = &rule.check {
            sink.run(rule, "", None, Some(&info_ptr), || check(&doc_ctx));
        }
    }

    EvaluationReport::new(tree.source_name.clone(), catalog.len(), sink.violations, sink.suppressed)
}
