//! Random small OpenAPI documents and the engine properties checked on them.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use seora::catalog::{catalog, RuleCatalog};
use seora::engine::{evaluate, normalize_key, prepare, EvaluationReport, RuleConfig, SuppressionScope, Violation};
use seora::tree::UriTree;
use serde_json::{json, Map, Value};

const SEGMENTS: &[&str] = &[
    "users", "Users", "user", "orders", "order_items", "get-users", "reports.json", "v1", "items", "{id}",
    "{userId}", "", "a.b", "teams",
];
const METHODS: &[&str] = &["get", "put", "post", "patch", "delete", "head"];
const CODES: &[&str] = &["200", "201", "204", "400", "401", "404", "500", "default"];
const MEDIA: &[&str] = &["application/json", "text/plain", "application/problem+json"];
const PROPS: &[&str] = &["userName", "user_name", "Bad Name", "id", "x-y", "9lives"];
const OP_IDS: &[&str] = &["listUsers", "getUser", "deleteThing", "postItem"];

fn response() -> impl Strategy<Value = Value> {
    (any::<bool>(), prop::sample::select(MEDIA), prop::collection::vec(prop::sample::select(PROPS), 0..3)).prop_map(
        |(content, media, props)| {
            let mut r = json!({"description": "r"});
            if content {
                let properties: Map<String, Value> = props.iter().map(|p| (p.to_string(), json!({"type": "string"}))).collect();
                r["content"] = json!({ media: {"schema": {"type": "object", "properties": properties}} });
            }
            r
        },
    )
}

fn operation() -> impl Strategy<Value = Value> {
    (
        prop::collection::btree_map(prop::sample::select(CODES), response(), 0..4),
        prop::option::of(prop::sample::select(OP_IDS)),
        any::<bool>(),
        prop::option::of(prop::sample::select(MEDIA)),
        any::<(bool, bool)>(),
    )
        .prop_map(|(responses, op_id, summary, body, (secured, described_param))| {
            let mut op = json!({ "responses": responses });
            if let Some(id) = op_id {
                op["operationId"] = json!(id);
            }
            if summary {
                op["summary"] = json!("does a thing");
            }
            if let Some(media) = body {
                op["requestBody"] = json!({"content": {media: {"schema": {"type": "object", "properties": {"user_name": {"type": "string"}}}}}});
            }
            if secured {
                op["security"] = json!([{"bearer": []}]);
            }
            let mut param = json!({"name": "q", "in": "query", "schema": {"type": "string"}});
            if described_param {
                param["description"] = json!("filter");
            }
            op["parameters"] = json!([param]);
            op
        })
}

fn path() -> impl Strategy<Value = String> {
    (prop::collection::vec(prop::sample::select(SEGMENTS), 1..5), any::<bool>()).prop_map(|(segments, slash)| {
        let mut p = format!("/{}", segments.join("/"));
        if slash {
            p.push('/');
        }
        p
    })
}

/// A document with 1 to 5 paths, each with 1 to 3 operations.
pub fn spec() -> impl Strategy<Value = Value> {
    (
        prop::collection::btree_map(path(), prop::collection::btree_map(prop::sample::select(METHODS), operation(), 1..4), 1..6),
        any::<bool>(),
    )
        .prop_map(|(paths, described)| {
            let mut info = json!({"title": "t", "version": "1"});
            if described {
                info["description"] = json!("d");
            }
            json!({"openapi": "3.1.0", "info": info, "paths": paths})
        })
}

/// Raw choice of an ignore: scope kind, rule index, key index.
pub type Pick = (u8, usize, usize);

pub fn pick() -> impl Strategy<Value = Pick> {
    (0u8..3, any::<usize>(), any::<usize>())
}

pub struct Case {
    pub tree: UriTree,
    pub catalog: RuleCatalog,
    pub base: EvaluationReport,
}

impl Case {
    pub fn new(doc: &Value) -> Option<Case> {
        let bytes = serde_json::to_vec(doc).unwrap();
        let spec = prepare("random.json", &bytes, None).ok()?;
        let catalog = catalog();
        let base = evaluate(&spec.tree, &catalog, &RuleConfig::default());
        Some(Case {
            tree: spec.tree,
            catalog,
            base,
        })
    }

    pub fn eval(&self, config: &RuleConfig) -> EvaluationReport {
        evaluate(&self.tree, &self.catalog, config)
    }

    pub fn keys(&self) -> Vec<String> {
        let mut keys = Vec::new();
        self.tree.walk(|n| keys.push(n.key_path.clone()));
        keys
    }

    pub fn scope(&self, (kind, rule, key): Pick) -> SuppressionScope {
        let rule_id = self.catalog.rules()[rule % self.catalog.len()].id().to_string();
        let keys = self.keys();
        let key_path = keys[key % keys.len()].clone();
        match kind {
            0 => SuppressionScope::Global { rule_id },
            1 => SuppressionScope::Key { rule_id, key_path },
            _ => SuppressionScope::KeyAll { key_path },
        }
    }

    pub fn config_with(&self, scopes: &[SuppressionScope]) -> RuleConfig {
        let mut config = RuleConfig::default();
        for scope in scopes {
            config.set_rule_state(&self.catalog, scope, false).unwrap();
        }
        config
    }
}

fn multiset(vs: &[Violation]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for v in vs {
        *out.entry(format!("{v:?}")).or_insert(0) += 1;
    }
    out
}

fn covers(scope: &SuppressionScope, v: &Violation) -> bool {
    let same_key = |k: &str| normalize_key(k) == normalize_key(&v.key_path);
    match scope {
        SuppressionScope::Global { rule_id } => &v.rule_id == rule_id,
        SuppressionScope::Key { rule_id, key_path } => &v.rule_id == rule_id && same_key(key_path),
        SuppressionScope::KeyAll { key_path } => same_key(key_path),
    }
}

pub fn determinism(case: &Case) -> Result<(), TestCaseError> {
    prop_assert_eq!(&case.eval(&RuleConfig::default()), &case.base);
    Ok(())
}

/// Adding one ignore to a random set of ignores never adds a violation.
pub fn monotonicity(case: &Case, prior: &[Pick], added: Pick) -> Result<(), TestCaseError> {
    let mut scopes: Vec<_> = prior.iter().map(|p| case.scope(*p)).collect();
    let before = case.eval(&case.config_with(&scopes));
    let scope = case.scope(added);
    scopes.push(scope.clone());
    let after = case.eval(&case.config_with(&scopes));
    prop_assert!(after.violations.len() <= before.violations.len());
    let (b, a) = (multiset(&before.violations), multiset(&after.violations));
    for (v, n) in &a {
        prop_assert!(b.get(v).is_some_and(|m| m >= n), "new violation {}", v);
    }
    for v in &before.violations {
        if !after.violations.contains(v) {
            prop_assert!(covers(&scope, v), "{:?} removed without being covered by {:?}", v, scope);
        }
    }
    Ok(())
}

pub fn global_disable(case: &Case, rule: usize) -> Result<(), TestCaseError> {
    let scope = case.scope((0, rule, 0));
    let rule_id = scope.rule_id().unwrap().to_string();
    let report = case.eval(&case.config_with(&[scope]));
    prop_assert!(report.violations.iter().all(|v| v.rule_id != rule_id));
    let expected = case.base.violations.iter().filter(|v| v.rule_id == rule_id).count();
    prop_assert_eq!(report.suppressed_count, expected);
    Ok(())
}

pub fn conservation(case: &Case, picks: &[Pick]) -> Result<(), TestCaseError> {
    let scopes: Vec<_> = picks.iter().map(|p| case.scope(*p)).collect();
    let report = case.eval(&case.config_with(&scopes));
    prop_assert_eq!(report.violations.len() + report.suppressed_count, case.base.violations.len());
    let hidden = case.base.violations.iter().filter(|v| scopes.iter().any(|s| covers(s, v))).count();
    prop_assert_eq!(report.suppressed_count, hidden);
    Ok(())
}

pub fn partition(case: &Case) -> Result<(), TestCaseError> {
    let report = &case.base;
    let keys: Vec<_> = report.groups.iter().map(|g| g.key_path.as_str()).collect();
    prop_assert!(keys.windows(2).all(|w| w[0] < w[1]), "group keys not strictly increasing: {:?}", keys);
    let mut flat = Vec::new();
    for g in &report.groups {
        prop_assert!(!g.violations.is_empty());
        prop_assert!(g.violations.iter().all(|v| v.key_path == g.key_path));
        flat.extend(g.violations.iter().cloned());
    }
    prop_assert_eq!(&flat, &report.violations);
    let counted: usize = report.counts_by_importance.values().sum();
    prop_assert_eq!(counted, report.violations.len());
    Ok(())
}

/// Every engine property on one generated document.
pub fn all(doc: &Value, prior: &[Pick], added: Pick) -> Result<(), TestCaseError> {
    let Some(case) = Case::new(doc) else {
        return Err(TestCaseError::reject("document rejected by the loader"));
    };
    determinism(&case)?;
    monotonicity(&case, prior, added)?;
    global_disable(&case, added.1)?;
    conservation(&case, &[prior, &[added]].concat())?;
    partition(&case)
}
