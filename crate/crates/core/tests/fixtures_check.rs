use std::collections::BTreeMap;

use seora::engine::{analyze, RuleConfig};
use serde::Deserialize;

#[derive(Deserialize)]
struct Seed {
    rule_id: String,
    key_path: String,
}

fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn multiset(pairs: impl IntoIterator<Item = (String, String)>) -> BTreeMap<(String, String), usize> {
    let mut out = BTreeMap::new();
    for p in pairs {
        *out.entry(p).or_insert(0) += 1;
    }
    out
}

#[test]
fn dirty_fixture_matches_seed_manifest() {
    let seeds: Vec<Seed> = serde_json::from_slice(&fixture("dirty.seeds.json")).unwrap();
    let expected = multiset(seeds.into_iter().map(|s| (s.rule_id, s.key_path)));
    let analysis = analyze("dirty.yaml", &fixture("dirty.yaml"), None, &RuleConfig::default()).unwrap();
    let actual = multiset(analysis.report.rule_key_pairs());
    let missing: Vec<_> = expected.iter().filter(|(k, n)| actual.get(*k) != Some(n)).collect();
    let extra: Vec<_> = actual.iter().filter(|(k, n)| expected.get(*k) != Some(n)).collect();
    assert!(missing.is_empty() && extra.is_empty(), "missing {missing:#?}\nextra {extra:#?}");
}
