//! The three demonstration specs, ordered from poor to well designed.

use std::path::Path;
use std::time::{Duration, Instant};

use seora::engine::{analyze, RuleConfig};
use serde::{Deserialize, Serialize};

/// File stems, poor first.
pub const STEMS: [&str; 3] = ["storefront", "mail", "chat"];
pub const TIME_LIMIT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub operations: usize,
    pub violations: usize,
    pub violations_per_operation: f64,
}

pub fn measure(path: &Path) -> Result<(Measure, Duration), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let start = Instant::now();
    let analysis = analyze(&path.display().to_string(), &bytes, None, &RuleConfig::default())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let elapsed = start.elapsed();
    let mut operations = 0;
    analysis.spec.tree.walk(|n| operations += n.operations.len());
    let violations = analysis.report.violations.len();
    let per_op = if operations == 0 { 0.0 } else { violations as f64 / operations as f64 };
    Ok((
        Measure {
            operations,
            violations,
            violations_per_operation: (per_op * 1000.0).round() / 1000.0,
        },
        elapsed,
    ))
}

/// Finds `<stem>.json`, `<stem>.yaml` or `<stem>.yml` in `dir`.
pub fn find(dir: &Path, stem: &str) -> Option<std::path::PathBuf> {
    ["json", "yaml", "yml"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.exists())
}

pub fn strictly_decreasing(measures: &[Measure]) -> bool {
    measures
        .windows(2)
        .all(|w| w[0].violations_per_operation > w[1].violations_per_operation)
}
