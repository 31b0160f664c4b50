//! The three suppression scopes: a rule everywhere, a rule at one key, every
//! rule at one key.

use seora::catalog::catalog;
use seora::engine::{analyze, RuleConfig, SuppressionScope};

fn main() {
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/dirty.yaml")).unwrap();
    let catalog = catalog();
    let scopes = [
        SuppressionScope::Global { rule_id: "DOC-002".into() },
        SuppressionScope::Key { rule_id: "URI-003".into(), key_path: "/order_items".into() },
        SuppressionScope::KeyAll { key_path: "/Users/".into() },
    ];
    let mut config = RuleConfig::default();
    let base = analyze("dirty.yaml", &bytes, None, &config).unwrap().report;
    println!("no ignores: {} violations", base.violations.len());
    for scope in &scopes {
        config.set_rule_state(&catalog, scope, false).unwrap();
        let report = analyze("dirty.yaml", &bytes, None, &config).unwrap().report;
        println!(
            "+ {}: {} violations, {} suppressed",
            serde_json::to_string(scope).unwrap(),
            report.violations.len(),
            report.suppressed_count
        );
    }
    println!("\nas a config file:\n{}", serde_json::to_string_pretty(&config.to_file()).unwrap());
}
