mod common;

use std::sync::Arc;

use common::fixture;
use seora::catalog::{catalog, Check, Importance, RuleMetadata, Target};
use seora::engine::{analyze, evaluate, prepare, Analyzer, RuleConfig, SuppressionScope, ENGINE_FAILURE_RULE};

const SMALL: &str = r#"
openapi: 3.1.0
info: {title: t, version: "1", description: d}
paths:
  /v1/users:
    get:
      operationId: listUsers
      summary: List users
      responses:
        "200":
          description: ok
          content:
            application/json:
              schema: {type: object, properties: {user_name: {type: string}}}
        "500":
          description: failure
          content:
            application/problem+json:
              schema: {type: object}
"#;

#[test]
fn panicking_rule_becomes_engine_failure() {
    let spec = prepare("small.yaml", SMALL.as_bytes(), None).unwrap();
    let mut rules = catalog();
    let metadata = RuleMetadata {
        id: "TEST-001".into(),
        title: "Panics".into(),
        importance: Importance::High,
        target: Target::Operation,
        description: "Always panics.".into(),
        suggestion: "None.".into(),
        source_tags: vec![],
    };
    rules
        .push(seora::catalog::Rule::new(metadata, Check::Operation(Arc::new(|_| panic!("boom")))))
        .unwrap();
    let baseline = evaluate(&spec.tree, &catalog(), &RuleConfig::default());
    let report = evaluate(&spec.tree, &rules, &RuleConfig::default());
    let failures: Vec<_> = report.violations.iter().filter(|v| v.rule_id == ENGINE_FAILURE_RULE).collect();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].importance, Importance::Low);
    assert_eq!(failures[0].key_path, "/v1/users");
    assert!(failures[0].message.contains("TEST-001") && failures[0].message.contains("boom"));
    let rest: Vec<_> = report.violations.iter().filter(|v| v.rule_id != ENGINE_FAILURE_RULE).cloned().collect();
    assert_eq!(rest, baseline.violations);

    let mut config = RuleConfig::default();
    config.key_all_disabled.insert("/v1/users".into());
    let suppressed = evaluate(&spec.tree, &rules, &config);
    assert_eq!(suppressed.violations.iter().filter(|v| v.rule_id == ENGINE_FAILURE_RULE).count(), 1);
}

#[test]
fn custom_segment_rule_flags_version_prefix() {
    let config = RuleConfig::from_bytes(
        br#"
options: {property_naming: snake}
custom_rules:
  - id: CUST-001
    importance: medium
    target: node
    predicate: segment_matches
    pattern: "^v[0-9]+$"
    message: version in the path
"#,
    )
    .unwrap();
    let analysis = analyze("small.yaml", SMALL.as_bytes(), None, &config).unwrap();
    let pairs = analysis.report.rule_key_pairs();
    assert_eq!(pairs, vec![("CUST-001".to_string(), "/v1".to_string())]);
    assert_eq!(analysis.report.rule_count_evaluated, 35);
    assert_eq!(analysis.report.count(Importance::Medium), 1);
}

#[test]
fn custom_rule_errors() {
    for (body, expected) in [
        ("id: URI-050\nimportance: low\ntarget: node\npredicate: segment_matches\npattern: x\nmessage: m", "CUST-"),
        ("id: CUST-001\nimportance: low\ntarget: node\npredicate: segment_matches\npattern: '('\nmessage: m", "pattern"),
        ("id: CUST-001\nimportance: low\ntarget: node\npredicate: forbids_request_body\nmessage: m", "does not apply"),
    ] {
        let text = format!("custom_rules:\n  - {}", body.replace('\n', "\n    "));
        let err = RuleConfig::from_bytes(text.as_bytes())
            .and_then(Analyzer::new)
            .unwrap_err()
            .to_string();
        assert!(err.contains(expected), "{err}");
    }
}

#[test]
fn config_keys_match_any_template_spelling() {
    let mut config = RuleConfig::default();
    config.key_rule_disabled.insert(("/invoices/{id}".into(), "STAT-003".into()));
    let analysis = analyze("dirty.yaml", &fixture("dirty.yaml"), None, &config).unwrap();
    assert!(analysis.report.violations.iter().all(|v| v.rule_id != "STAT-003"));
    assert_eq!(analysis.report.suppressed_count, 1);
}

#[test]
fn slash_key_covers_root_and_empty_first_segment() {
    let spec = r#"
openapi: 3.1.0
info: {title: t, version: "1"}
paths:
  //things:
    get:
      responses: {"200": {description: ok}}
"#;
    let base = analyze("s.yaml", spec.as_bytes(), None, &RuleConfig::default()).unwrap().report;
    assert!(base.violations.iter().any(|v| v.key_path.is_empty() && v.rule_id == "DOC-004"));
    let mut config = RuleConfig::default();
    config
        .set_rule_state(&catalog(), &SuppressionScope::KeyAll { key_path: "/".into() }, false)
        .unwrap();
    let report = analyze("s.yaml", spec.as_bytes(), None, &config).unwrap().report;
    assert!(report.violations.iter().all(|v| !v.key_path.is_empty() && v.key_path != "/"));
    assert_eq!(report.violations.len() + report.suppressed_count, base.violations.len());
}

#[test]
fn every_rule_has_documentation() {
    for meta in catalog().metadata() {
        assert!(!meta.title.is_empty() && !meta.description.is_empty() && !meta.suggestion.is_empty(), "{}", meta.id);
        assert!(!meta.source_tags.is_empty(), "{}", meta.id);
    }
}
