//! Analyze a spec file and print the grouped text report.
//!
//! cargo run --example check_spec -- path/to/openapi.yaml

use seora::engine::{analyze, RuleConfig};
use seora::report::render_text;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/dirty.yaml").into());
    let bytes = std::fs::read(&path).expect("readable spec");
    match analyze(&path, &bytes, None, &RuleConfig::default()) {
        Ok(analysis) => {
            for warning in &analysis.spec.warnings {
                eprintln!("warning: {warning}");
            }
            print!("{}", render_text(&analysis.report, false).as_str());
        }
        Err(err) => eprintln!("{err}"),
    }
}
