use std::fmt;

use super::{catalog_for, evaluate, ConfigError, EvaluationReport, RuleConfig};
use crate::catalog::RuleCatalog;
use crate::diagnostic::Diagnostic;
use crate::document::{load_named, validate_structure, Format};
use crate::resolve::{resolve_references, ResolvedDocument};
use crate::tree::{build_uri_tree, UriTree};

/// A document taken through loading, resolution and tree building.
#[derive(Debug, Clone)]
pub struct PreparedSpec {
    pub document: ResolvedDocument,
    pub tree: UriTree,
    /// Non-fatal findings from every stage.
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: PreparedSpec,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyzeError {
    /// The document could not be read as an OpenAPI description.
    Document(Vec<Diagnostic>),
    Config(ConfigError),
}

impl fmt::Display for AnalyzeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyzeError::Document(diags) => {
                let lines: Vec<_> = diags.iter().map(ToString::to_string).collect();
                f.write_str(&lines.join("\n"))
            }
            AnalyzeError::Config(err) => err.fmt(f),
        }
    }
}

impl std::error::Error for AnalyzeError {}

impl From<ConfigError> for AnalyzeError {
    fn from(err: ConfigError) -> Self {
        AnalyzeError::Config(err)
    }
}

/// Loads, validates, resolves and builds the URI tree.
pub fn prepare(source_name: &str, bytes: &[u8], format_hint: Option<Format>) -> Result<PreparedSpec, Vec<Diagnostic>> {
    let raw = load_named(source_name, bytes, format_hint).map_err(|d| vec![d])?;
    let mut warnings = raw.diagnostics.clone();
    let (fatal, structural): (Vec<_>, Vec<_>) = validate_structure(&raw).into_iter().partition(Diagnostic::is_fatal);
    if !fatal.is_empty() {
        return Err(fatal);
    }
    warnings.extend(structural);
    let document = resolve_references(&raw);
    let mut tree = build_uri_tree(&document).map_err(|d| vec![d])?;
    warnings.append(&mut tree.diagnostics.clone());
    tree.diagnostics = warnings.clone();
    Ok(PreparedSpec {
        document,
        tree,
        warnings,
    })
}

/// A validated config together with the catalog it applies to.
#[derive(Debug, Clone)]
pub struct Analyzer {
    catalog: RuleCatalog,
    config: RuleConfig,
}

impl Analyzer {
    pub fn new(config: RuleConfig) -> Result<Self, ConfigError> {
        let catalog = catalog_for(&config)?;
        Ok(Self { catalog, config })
    }

    pub fn catalog(&self) -> &RuleCatalog {
        &self.catalog
    }

    pub fn config(&self) -> &RuleConfig {
        &self.config
    }

    /// Evaluates an already built tree, matching config keys to its spelling.
    pub fn evaluate(&self, tree: &UriTree) -> EvaluationReport {
        evaluate(tree, &self.catalog, &self.config.canonicalized(tree))
    }

    pub fn analyze(&self, source_name: &str, bytes: &[u8], format_hint: Option<Format>) -> Result<Analysis, AnalyzeError> {
        let spec = prepare(source_name, bytes, format_hint).map_err(AnalyzeError::Document)?;
        let report = self.evaluate(&spec.tree);
        Ok(Analysis { spec, report })
    }
}

/// One-shot analysis with the given config.
pub fn analyze(
    source_name: &str,
    bytes: &[u8],
    format_hint: Option<Format>,
    config: &RuleConfig,
) -> Result<Analysis, AnalyzeError> {
    Analyzer::new(config.clone())?.analyze(source_name, bytes, format_hint)
}
