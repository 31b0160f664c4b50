//! Text and JSON renderings of an [`EvaluationReport`], and CI exit codes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{Importance, RuleMetadata};
use crate::engine::{EvaluationReport, Violation};
use crate::pointer::Pointer;
use crate::tree::HttpMethod;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedReport {
    pub format: OutputFormat,
    pub body: Vec<u8>,
}

impl RenderedReport {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.body).expect("renderers emit UTF-8")
    }
}

/// Lowest importance that fails a CI run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailOn {
    #[default]
    High,
    Medium,
    Low,
    None,
}

impl FromStr for FailOn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "high" => Ok(FailOn::High),
            "medium" => Ok(FailOn::Medium),
            "low" => Ok(FailOn::Low),
            "none" => Ok(FailOn::None),
            other => Err(format!("expected high, medium, low or none, got {other:?}")),
        }
    }
}

/// 0 if nothing at or above `fail_on` was found, 1 otherwise.
pub fn exit_code(report: &EvaluationReport, fail_on: FailOn) -> i32 {
    let threshold = match fail_on {
        FailOn::None => return 0,
        FailOn::High => Importance::High,
        FailOn::Medium => Importance::Medium,
        FailOn::Low => Importance::Low,
    };
    i32::from(report.violations.iter().any(|v| v.importance <= threshold))
}

fn group_header(key_path: &str) -> &str {
    if key_path.is_empty() {
        "/"
    } else {
        key_path
    }
}

fn footer(report: &EvaluationReport) -> String {
    format!(
        "{} violations, {} suppressed (high {}, medium {}, low {})",
        report.violations.len(),
        report.suppressed_count,
        report.count(Importance::High),
        report.count(Importance::Medium),
        report.count(Importance::Low),
    )
}

/// One section per key path, one line per violation, then a count footer.
pub fn render_text(report: &EvaluationReport, color: bool) -> RenderedReport {
    let paint = |code: &str, text: &str| {
        if color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    };
    let mut out = String::new();
    for group in &report.groups {
        let _ = writeln!(out, "{}", paint("1", group_header(&group.key_path)));
        for v in &group.violations {
            let tag = format!("[{}]", v.importance.as_str().to_uppercase());
            let tag = match v.importance {
                Importance::High => paint("31", &tag),
                Importance::Medium => paint("33", &tag),
                Importance::Low => paint("36", &tag),
            };
            let method = v.method.map(|m| format!(" {m}")).unwrap_or_default();
            let _ = writeln!(out, "  {tag} {}{method} — {} ({})", v.rule_id, v.message, v.suggestion);
        }
        out.push('\n');
    }
    out.push_str(&footer(report));
    out.push('\n');
    RenderedReport {
        format: OutputFormat::Text,
        body: out.into_bytes(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonViolation {
    pub rule_id: String,
    pub importance: Importance,
    pub method: Option<HttpMethod>,
    pub pointer: Option<Pointer>,
    pub message: String,
    pub suggestion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonGroup {
    pub key: String,
    pub violations: Vec<JsonViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonCounts {
    pub high: usize,
    pub medium: usize,
    pub low: usize,
}

/// The stable machine-readable report layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonReport {
    pub report_version: String,
    pub source: String,
    pub groups: Vec<JsonGroup>,
    pub counts: JsonCounts,
    pub suppressed: usize,
}

impl JsonReport {
    pub fn from_report(report: &EvaluationReport) -> Self {
        Self {
            report_version: REPORT_VERSION.into(),
            source: report.source_name.clone(),
            groups: report
                .groups
                .iter()
                .map(|g| JsonGroup {
                    key: g.key_path.clone(),
                    violations: g
                        .violations
                        .iter()
                        .map(|v| JsonViolation {
                            rule_id: v.rule_id.clone(),
                            importance: v.importance,
                            method: v.method,
                            pointer: v.detail_pointer.clone(),
                            message: v.message.clone(),
                            suggestion: v.suggestion.clone(),
                        })
                        .collect(),
                })
                .collect(),
            counts: JsonCounts {
                high: report.count(Importance::High),
                medium: report.count(Importance::Medium),
                low: report.count(Importance::Low),
            },
            suppressed: report.suppressed_count,
        }
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Pretty-printed, newline-terminated.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Rebuilds the report. The rule count is not part of the JSON layout
    /// and comes back as 0.
    pub fn into_report(self) -> EvaluationReport {
        let violations = self
            .groups
            .into_iter()
            .flat_map(|g| {
                let key = g.key;
                g.violations.into_iter().map(move |v| Violation {
                    rule_id: v.rule_id,
                    importance: v.importance,
                    key_path: key.clone(),
                    method: v.method,
                    detail_pointer: v.pointer,
                    message: v.message,
                    suggestion: v.suggestion,
                })
            })
            .collect();
        EvaluationReport::new(self.source, 0, violations, self.suppressed)
    }
}

pub fn render_json(report: &EvaluationReport) -> RenderedReport {
    RenderedReport {
        format: OutputFormat::Json,
        body: JsonReport::from_report(report).render().into_bytes(),
    }
}

pub fn render(report: &EvaluationReport, format: OutputFormat, color: bool) -> RenderedReport {
    match format {
        OutputFormat::Text => render_text(report, color),
        OutputFormat::Json => render_json(report),
    }
}

/// The rule reference: one block per rule in text, or a JSON array.
pub fn render_rules(rules: &[RuleMetadata], format: OutputFormat) -> RenderedReport {
    let body = match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(rules).expect("metadata serializes");
            out.push('\n');
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for rule in rules {
                let _ = writeln!(
                    out,
                    "{} [{}] {} ({})",
                    rule.id,
                    rule.importance.as_str().to_uppercase(),
                    rule.title,
                    rule.target
                );
                let _ = writeln!(out, "    {}", rule.description);
                let _ = writeln!(out, "    Fix: {}", rule.suggestion);
            }
            out
        }
    };
    RenderedReport {
        format,
        body: body.into_bytes(),
    }
}
