//! Declarative organisation-specific rules.

use std::sync::Arc;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::config::ConfigError;
use crate::catalog::{
    is_valid_rule_id, Check, Hit, Importance, NodeContext, OperationContext, PropertyContext,
    ResponseContext, Rule, RuleMetadata, Target,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// Flags nodes whose segment matches `pattern`.
    SegmentMatches,
    /// Flags nodes whose segment does not match `pattern`.
    SegmentNotMatches,
    /// Flags operations without a response keyed `value`.
    RequiresResponseCode,
    /// Flags operations that declare a request body.
    ForbidsRequestBody,
    /// Flags operations (or responses with content) that do not offer media type `value`.
    RequiresMediaType,
    /// Flags schema properties whose name matches `pattern`.
    PropertyNameMatches,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomRuleSpec {
    pub id: String,
    pub importance: Importance,
    pub target: Target,
    pub predicate: Predicate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<String>,
}

impl CustomRuleSpec {
    fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::CustomRule {
            id: self.id.clone(),
            message: message.into(),
        }
    }

    fn regex(&self) -> Result<Regex, ConfigError> {
        let pattern = self.pattern.as_deref().ok_or_else(|| self.error("predicate needs a pattern"))?;
        Regex::new(pattern).map_err(|e| self.error(format!("invalid pattern: {e}")))
    }

    fn value(&self) -> Result<String, ConfigError> {
        self.value.clone().ok_or_else(|| self.error("predicate needs a value"))
    }
}

/// Turns declarative specs into rules. Ids must be unique, start with
/// `CUST-` and follow `FAMILY-NNN`.
pub fn compile_custom_rules(specs: &[CustomRuleSpec]) -> Result<Vec<Rule>, ConfigError> {
    let mut rules: Vec<Rule> = Vec::with_capacity(specs.len());
    for spec in specs {
        if !spec.id.starts_with("CUST-") || !is_valid_rule_id(&spec.id) {
            return Err(spec.error("id must look like CUST-NNN"));
        }
        if rules.iter().any(|r| r.id() == spec.id) {
            return Err(spec.error("id is used twice"));
        }
        rules.push(compile(spec)?);
    }
    Ok(rules)
}

fn compile(spec: &CustomRuleSpec) -> Result<Rule, ConfigError> {
    let message = spec.message.clone();
    let check = match (spec.predicate, spec.target) {
        (Predicate::SegmentMatches | Predicate::SegmentNotMatches, Target::Node) => {
            let re = spec.regex()?;
            let flag_matches = spec.predicate == Predicate::SegmentMatches;
            Check::Node(Arc::new(move |ctx: &NodeContext| {
                if ctx.node.is_root() {
                    return vec![];
                }
                let text = ctx.node.segment.to_string();
                if re.is_match(&text) == flag_matches {
                    vec![Hit::here(message.clone())]
                } else {
                    vec![]
                }
            }))
        }
        (Predicate::RequiresResponseCode, Target::Operation) => {
            let code = spec.value()?;
            Check::Operation(Arc::new(move |ctx: &OperationContext| {
                if ctx.operation.has_response(&code) {
                    vec![]
                } else {
                    vec![Hit::here(message.clone())]
                }
            }))
        }
        (Predicate::ForbidsRequestBody, Target::Operation) => {
            Check::Operation(Arc::new(move |ctx: &OperationContext| match &ctx.operation.request_body {
                Some(body) => vec![Hit::at(body.pointer.clone(), message.clone())],
                None => vec![],
            }))
        }
        (Predicate::RequiresMediaType, Target::Operation) => {
            let media_type = spec.value()?;
            Check::Operation(Arc::new(move |ctx: &OperationContext| {
                let op = ctx.operation;
                let offered = op.response_media_types().contains(&media_type)
                    || op.request_body.as_ref().is_some_and(|b| b.media_types.contains_key(&media_type));
                if offered {
                    vec![]
                } else {
                    vec![Hit::here(message.clone())]
                }
            }))
        }
        (Predicate::RequiresMediaType, Target::Response) => {
            let media_type = spec.value()?;
            Check::Response(Arc::new(move |ctx: &ResponseContext| {
                if ctx.response.has_content() && !ctx.response.media_types.contains_key(&media_type) {
                    vec![Hit::here(message.clone())]
                } else {
                    vec![]
                }
            }))
        }
        (Predicate::PropertyNameMatches, Target::SchemaProperty) => {
            let re = spec.regex()?;
            Check::Property(Arc::new(move |ctx: &PropertyContext| {
                if re.is_match(ctx.name) {
                    vec![Hit::here(message.clone())]
                } else {
                    vec![]
                }
            }))
        }
        (predicate, target) => {
            let name = serde_json::to_value(predicate).unwrap_or_default();
            return Err(spec.error(format!(
                "predicate {} does not apply to target {target}",
                name.as_str().unwrap_or("?")
            )));
        }
    };
    Ok(Rule::new(
        RuleMetadata {
            id: spec.id.clone(),
            title: spec.message.clone(),
            importance: spec.importance,
            target: spec.target,
            description: spec.message.clone(),
            suggestion: spec
                .suggestion
                .clone()
                .unwrap_or_else(|| "Follow the organisation's API guideline for this rule.".into()),
            source_tags: vec!["custom".into()],
        },
        check,
    ))
}
