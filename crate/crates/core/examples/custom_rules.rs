//! Declarative custom rules loaded from a config file.

use seora::engine::{analyze, RuleConfig};
use seora::report::render_text;

const CONFIG: &str = r#"
custom_rules:
  - id: CUST-001
    importance: medium
    target: node
    predicate: segment_matches
    pattern: "^v[0-9]+$"
    message: version number in the path
    suggestion: Version through a media type parameter or a header instead.
  - id: CUST-002
    importance: low
    target: operation
    predicate: requires_response_code
    value: "429"
    message: no 429 response declared
"#;

const SPEC: &str = r#"
openapi: 3.1.0
info: {title: Versioned, version: "1", description: d}
paths:
  /v1/users:
    get:
      operationId: listUsers
      summary: List users
      responses:
        "200":
          description: ok
          content: {application/json: {schema: {type: array}}}
        "500":
          description: failure
          content: {application/problem+json: {schema: {type: object}}}
"#;

fn main() {
    let config = RuleConfig::from_bytes(CONFIG.as_bytes()).expect("valid config");
    let analysis = analyze("versioned.yaml", SPEC.as_bytes(), None, &config).expect("valid spec");
    println!("{} rules evaluated", analysis.report.rule_count_evaluated);
    print!("{}", render_text(&analysis.report, false).as_str());
}
