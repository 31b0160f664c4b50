//! Fail a pipeline step on findings at or above a threshold.
//!
//! cargo run --example ci_gate -- path/to/openapi.yaml medium

use seora::engine::{config_from_env, Analyzer, RuleConfig};
use seora::report::{exit_code, render_json, FailOn};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/clean.yaml").into());
    let fail_on: FailOn = args.next().as_deref().unwrap_or("high").parse().expect("high, medium, low or none");
    let config = config_from_env().unwrap_or_else(|| Ok(RuleConfig::default())).expect("valid config");
    let analyzer = Analyzer::new(config).expect("config matches the catalog");
    let bytes = std::fs::read(&path).expect("readable spec");
    let code = match analyzer.analyze(&path, &bytes, None) {
        Ok(analysis) => {
            print!("{}", render_json(&analysis.report).as_str());
            exit_code(&analysis.report, fail_on)
        }
        Err(err) => {
            eprintln!("{err}");
            2
        }
    };
    std::process::exit(code);
}
