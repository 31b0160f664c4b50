use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::custom::CustomRuleSpec;
use crate::catalog::{PropertyNaming, RuleCatalog};
use crate::diagnostic::Diagnostic;
use crate::document::parse_node;
use crate::tree::UriTree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConventionOptions {
    pub property_naming: PropertyNaming,
    pub max_depth: usize,
    pub extra_plural_nouns: BTreeSet<String>,
    pub extra_singular_nouns: BTreeSet<String>,
    /// Exact media types, or suffixes written with a leading `+`.
    pub media_type_allowlist: Vec<String>,
    /// Extensions flagged on the last path segment, with the leading dot.
    pub file_extensions: Vec<String>,
}

impl Default for ConventionOptions {
    fn default() -> Self {
        Self {
            property_naming: PropertyNaming::LowerCamel,
            max_depth: 8,
            extra_plural_nouns: BTreeSet::new(),
            extra_singular_nouns: BTreeSet::new(),
            media_type_allowlist: vec![
                "application/json".into(),
                "application/problem+json".into(),
                "+json".into(),
            ],
            file_extensions: [".json", ".xml", ".html", ".php", ".aspx"].map(String::from).to_vec(),
        }
    }
}

/// Which rules are switched off where, plus convention options and custom rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleConfig {
    pub globally_disabled: BTreeSet<String>,
    /// `(key_path, rule_id)` pairs.
    pub key_rule_disabled: BTreeSet<(String, String)>,
    pub key_all_disabled: BTreeSet<String>,
    pub options: ConventionOptions,
    pub custom_rules: Vec<CustomRuleSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "scope", rename_all = "snake_case")]
pub enum SuppressionScope {
    Global { rule_id: String },
    Key { rule_id: String, key_path: String },
    KeyAll { key_path: String },
}

impl SuppressionScope {
    pub fn rule_id(&self) -> Option<&str> {
        match self {
            SuppressionScope::Global { rule_id } | SuppressionScope::Key { rule_id, .. } => Some(rule_id),
            SuppressionScope::KeyAll { .. } => None,
        }
    }

    pub fn key_path(&self) -> Option<&str> {
        match self {
            SuppressionScope::Key { key_path, .. } | SuppressionScope::KeyAll { key_path } => Some(key_path),
            SuppressionScope::Global { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown rule id {0:?}")]
    UnknownRule(String),
    #[error("custom rule {id}: {message}")]
    CustomRule { id: String, message: String },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("config file: {0}")]
    Parse(Diagnostic),
    #[error("config file: {0}")]
    Schema(String),
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
}

/// Canonical key spelling: leading `/`, and `""` for the root.
pub fn normalize_key(key_path: &str) -> String {
    match key_path {
        "" | "/" => String::new(),
        k if k.starts_with('/') => k.to_string(),
        k => format!("/{k}"),
    }
}

/// True iff the rule is switched off globally, for the whole key, or for
/// this rule at this key. Scopes do not inherit down the tree. Keys compare
/// in [`normalize_key`] spelling.
pub fn is_suppressed(rule_id: &str, key_path: &str, config: &RuleConfig) -> bool {
    if config.globally_disabled.contains(rule_id) {
        return true;
    }
    let key = normalize_key(key_path);
    config.key_all_disabled.contains(&key) || config.key_rule_disabled.contains(&(key, rule_id.to_string()))
}

impl RuleConfig {
    pub fn is_suppressed(&self, rule_id: &str, key_path: &str) -> bool {
        is_suppressed(rule_id, key_path, self)
    }

    /// Checks every referenced rule id against `catalog` and the option ranges.
    pub fn validate(&self, catalog: &RuleCatalog) -> Result<(), ConfigError> {
        let known = |id: &str| {
            if catalog.contains(id) {
                Ok(())
            } else {
                Err(ConfigError::UnknownRule(id.to_string()))
            }
        };
        for id in &self.globally_disabled {
            known(id)?;
        }
        for (_, id) in &self.key_rule_disabled {
            known(id)?;
        }
        if self.options.max_depth == 0 {
            return Err(ConfigError::InvalidOption("max_depth must be at least 1".into()));
        }
        for word in self.options.extra_plural_nouns.iter().chain(&self.options.extra_singular_nouns) {
            if word.chars().any(char::is_uppercase) {
                return Err(ConfigError::InvalidOption(format!("noun {word:?} must be lowercase")));
            }
        }
        Ok(())
    }

    /// Switches a scope off (`enabled = false`) or back on. Idempotent.
    pub fn set_rule_state(
        &mut self,
        catalog: &RuleCatalog,
        scope: &SuppressionScope,
        enabled: bool,
    ) -> Result<(), ConfigError> {
        if let Some(id) = scope.rule_id() {
            if !catalog.contains(id) {
                return Err(ConfigError::UnknownRule(id.to_string()));
            }
        }
        match scope {
            SuppressionScope::Global { rule_id } => {
                toggle(&mut self.globally_disabled, rule_id.clone(), enabled);
            }
            SuppressionScope::Key { rule_id, key_path } => {
                toggle(
                    &mut self.key_rule_disabled,
                    (normalize_key(key_path), rule_id.clone()),
                    enabled,
                );
            }
            SuppressionScope::KeyAll { key_path } => {
                toggle(&mut self.key_all_disabled, normalize_key(key_path), enabled);
            }
        }
        Ok(())
    }

    /// Every active suppression entry.
    pub fn scopes(&self) -> Vec<SuppressionScope> {
        let global = self
            .globally_disabled
            .iter()
            .map(|rule_id| SuppressionScope::Global { rule_id: rule_id.clone() });
        let key = self
            .key_rule_disabled
            .iter()
            .map(|(key_path, rule_id)| SuppressionScope::Key {
                rule_id: rule_id.clone(),
                key_path: key_path.clone(),
            });
        let key_all = self
            .key_all_disabled
            .iter()
            .map(|key_path| SuppressionScope::KeyAll { key_path: key_path.clone() });
        global.chain(key).chain(key_all).collect()
    }

    /// Rewrites key paths to the tree's spelling, so `/teams/{id}` in a config
    /// matches a node first declared as `/teams/{teamId}`.
    pub fn canonicalized(&self, tree: &UriTree) -> RuleConfig {
        let canon = |key: &str| tree.lookup(key).map_or_else(|| key.to_string(), |n| n.key_path.clone());
        RuleConfig {
            key_rule_disabled: self
                .key_rule_disabled
                .iter()
                .map(|(k, r)| (canon(k), r.clone()))
                .collect(),
            key_all_disabled: self.key_all_disabled.iter().map(|k| canon(k)).collect(),
            ..self.clone()
        }
    }

    /// Parses a YAML or JSON config file body.
    pub fn from_bytes(bytes: &[u8]) -> Result<RuleConfig, ConfigError> {
        let parsed = parse_node(bytes, None).map_err(ConfigError::Parse)?;
        let file: ConfigFile =
            serde_json::from_value(parsed.root).map_err(|e| ConfigError::Schema(e.to_string()))?;
        Ok(file.into_config())
    }

    pub fn from_path(path: &Path) -> Result<RuleConfig, ConfigError> {
        let bytes = std::fs::read(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_bytes(&bytes)
    }

    pub fn to_file(&self) -> ConfigFile {
        let mut key_ignores: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for key in &self.key_all_disabled {
            key_ignores.entry(key.clone()).or_default().push("*".into());
        }
        for (key, rule) in &self.key_rule_disabled {
            key_ignores.entry(key.clone()).or_default().push(rule.clone());
        }
        ConfigFile {
            disabled_rules: self.globally_disabled.iter().cloned().collect(),
            key_ignores,
            options: self.options.clone(),
            custom_rules: self.custom_rules.clone(),
        }
    }
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, item: T, enabled: bool) {
    if enabled {
        set.remove(&item);
    } else {
        set.insert(item);
    }
}

/// On-disk config layout. `"*"` in a key's list disables every rule there.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub disabled_rules: Vec<String>,
    pub key_ignores: BTreeMap<String, Vec<String>>,
    pub options: ConventionOptions,
    pub custom_rules: Vec<CustomRuleSpec>,
}

impl ConfigFile {
    pub fn into_config(self) -> RuleConfig {
        let mut config = RuleConfig {
            globally_disabled: self.disabled_rules.into_iter().collect(),
            options: self.options,
            custom_rules: self.custom_rules,
            ..RuleConfig::default()
        };
        for (key, rules) in self.key_ignores {
            let key = normalize_key(&key);
            for rule in rules {
                if rule == "*" {
                    config.key_all_disabled.insert(key.clone());
                } else {
                    config.key_rule_disabled.insert((key.clone(), rule));
                }
            }
        }
        config
    }
}

/// Reads the config named by `SEORA_CONFIG`, if set.
pub fn config_from_env() -> Option<Result<RuleConfig, ConfigError>> {
    let path = std::env::var_os("SEORA_CONFIG")?;
    Some(RuleConfig::from_path(Path::new(&path)))
}
