//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use common::corpus::{self, Measure, STEMS, TIME_LIMIT};
use common::{fixture, fixture_path, refs, specs};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use seora::catalog::{catalog, Importance, BUILTIN_RULE_COUNT};
use seora::engine::{analyze, prepare, RuleConfig};
use seora::service::{SERVICE_CONVENTIONS_YAML, SERVICE_OPENAPI_YAML};
use serde::Deserialize;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn catalog_contract() -> Outcome {
    let c = catalog();
    let counts = c.count_by_importance();
    let (h, m, l) = (counts[&Importance::High], counts[&Importance::Medium], counts[&Importance::Low]);
    ensure(
        c.len() == BUILTIN_RULE_COUNT && c.len() == 34 && (h, m, l) == (16, 6, 12),
        format!("{} rules, high {h}, medium {m}, low {l}", c.len()),
    )
}

fn tree_reproduction() -> Outcome {
    let spec = prepare("instances.yaml", &fixture("instances.yaml"), None).map_err(|d| format!("{d:?}"))?;
    let golden = fixture("instances.tree.json");
    ensure(
        spec.tree.export_json().as_bytes() == golden.as_slice(),
        format!("export vs {} golden bytes", golden.len()),
    )
}

#[derive(Deserialize)]
struct Seed {
    rule_id: String,
    key_path: String,
}

fn seeded_fixture() -> Outcome {
    let seeds: Vec<Seed> = serde_json::from_slice(&fixture("dirty.seeds.json")).map_err(|e| e.to_string())?;
    let rules: BTreeSet<_> = seeds.iter().map(|s| s.rule_id.as_str()).collect();
    let families: BTreeSet<_> = rules.iter().map(|r| r.split('-').next().unwrap()).collect();
    let mut expected: BTreeMap<(String, String), usize> = BTreeMap::new();
    for s in &seeds {
        *expected.entry((s.rule_id.clone(), s.key_path.clone())).or_default() += 1;
    }
    let start = Instant::now();
    let analysis = analyze("dirty.yaml", &fixture("dirty.yaml"), None, &RuleConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut actual: BTreeMap<(String, String), usize> = BTreeMap::new();
    for pair in analysis.report.rule_key_pairs() {
        *actual.entry(pair).or_default() += 1;
    }
    ensure(
        actual == expected && seeds.len() >= 20 && rules.len() >= 25 && families.len() == 6 && elapsed < Duration::from_secs(1),
        format!(
            "{} seeds over {} rules in {} families, {} reported, {elapsed:?}",
            seeds.len(),
            rules.len(),
            families.len(),
            analysis.report.violations.len()
        ),
    )
}

fn clean_fixture() -> Outcome {
    let start = Instant::now();
    let analysis = analyze("clean.yaml", &fixture("clean.yaml"), None, &RuleConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        analysis.report.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} violations in {elapsed:?}", analysis.report.violations.len()),
    )
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn property_suite() -> Outcome {
    let strategy = (specs::spec(), prop::collection::vec(specs::pick(), 0..3), specs::pick());
    runner(1000)
        .run(&strategy, |(doc, prior, added)| specs::all(&doc, &prior, added))
        .map(|_| "1000 random specs: determinism, monotonicity, global disable, conservation, partition".into())
        .map_err(|e| e.to_string())
}

fn resolver_properties() -> Outcome {
    runner(500)
        .run(&refs::graph(), |doc| refs::all(&doc))
        .map(|_| "500 random reference graphs: termination, idempotence, unresolved count".into())
        .map_err(|e| e.to_string())
}

fn public_corpus() -> Outcome {
    let baseline: BTreeMap<String, Measure> =
        serde_json::from_slice(&fixture("corpus/baseline.json")).map_err(|e| e.to_string())?;
    let dir = fixture_path("corpus");
    let mut ordered = Vec::new();
    let mut slowest = Duration::ZERO;
    for stem in STEMS {
        let path = corpus::find(&dir, stem).ok_or(format!("{stem} missing"))?;
        let (m, elapsed) = corpus::measure(&path)?;
        slowest = slowest.max(elapsed);
        if baseline.get(stem) != Some(&m) {
            return Err(format!("{stem}: {m:?} differs from baseline"));
        }
        ordered.push(m);
    }
    let per_op: Vec<_> = ordered.iter().map(|m| m.violations_per_operation).collect();
    let mut detail = format!("stand-in specs, violations per operation {per_op:?}, slowest {slowest:?}");
    let mut ok = corpus::strictly_decreasing(&ordered) && slowest < TIME_LIMIT;
    if let Some(public) = std::env::var_os("SEORA_PUBLIC_CORPUS") {
        let public = std::path::PathBuf::from(public);
        let mut measured = Vec::new();
        for stem in STEMS {
            let path = corpus::find(&public, stem).ok_or(format!("public {stem} missing"))?;
            let (m, elapsed) = corpus::measure(&path)?;
            ok &= elapsed < TIME_LIMIT;
            measured.push(m);
        }
        ok &= corpus::strictly_decreasing(&measured);
        let per_op: Vec<_> = measured.iter().map(|m| m.violations_per_operation).collect();
        detail.push_str(&format!("; public specs {per_op:?}"));
    } else {
        detail.push_str("; public specs not supplied");
    }
    ensure(ok, detail)
}

fn dogfooding() -> Outcome {
    let config = RuleConfig::from_bytes(SERVICE_CONVENTIONS_YAML.as_bytes()).map_err(|e| e.to_string())?;
    let analysis = analyze("seora-service.yaml", SERVICE_OPENAPI_YAML.as_bytes(), None, &config).map_err(|e| e.to_string())?;
    let high: Vec<_> = analysis
        .report
        .violations
        .iter()
        .filter(|v| v.importance == Importance::High)
        .map(|v| format!("{} {}", v.rule_id, v.key_path))
        .collect();
    ensure(
        high.is_empty(),
        format!("{} high-importance violations {high:?}", high.len()),
    )
}

fn cli_contract() -> Outcome {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_seora"))
            .args(args)
            .env_remove("SEORA_CONFIG")
            .output()
            .map_err(|e| e.to_string())
    };
    let clean = fixture_path("clean.yaml");
    let dirty = fixture_path("dirty.yaml");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let malformed = dir.path().join("malformed.yaml");
    std::fs::write(&malformed, "openapi: 3.1.0\npaths: [\n").map_err(|e| e.to_string())?;
    let codes = [
        run(&["check", clean.to_str().unwrap()])?.status.code(),
        run(&["check", dirty.to_str().unwrap(), "--fail-on", "high"])?.status.code(),
        run(&["check", malformed.to_str().unwrap()])?.status.code(),
    ];
    let a = run(&["check", dirty.to_str().unwrap(), "--format", "json"])?.stdout;
    let b = run(&["check", dirty.to_str().unwrap(), "--format", "json"])?.stdout;
    ensure(
        codes == [Some(0), Some(1), Some(2)] && a == b && !a.is_empty(),
        format!("exit codes {codes:?}, JSON identical across runs: {}", a == b),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("catalog contract", catalog_contract),
        ("tree reproduction", tree_reproduction),
        ("seeded-fixture exactness", seeded_fixture),
        ("clean-fixture silence", clean_fixture),
        ("engine property suite", property_suite),
        ("resolver properties", resolver_properties),
        ("public-corpus regression", public_corpus),
        ("dogfooding", dogfooding),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
