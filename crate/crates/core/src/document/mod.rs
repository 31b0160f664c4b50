//! Ingests JSON or YAML bytes into a raw OpenAPI document tree.
//!
//! Both formats produce the same node model (`serde_json::Value` with map
//! order preserved). YAML goes through the YAML 1.2 core schema, so `yes`
//! and `no` stay strings, anchors and merge keys are expanded, and scalar
//! mapping keys keep their source text (`200:` becomes the key `"200"`).

mod json;
mod yaml;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagnostic::{Diagnostic, DiagnosticCode};
use crate::pointer::Pointer;

/// Inputs above this size are rejected outright.
pub const MAX_DOCUMENT_BYTES: usize = 50 * 1024 * 1024;

pub(crate) const MAX_NESTING: usize = 128;
pub(crate) const MAX_YAML_NODES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Yaml,
}

impl Format {
    /// `.json` is JSON, `.yaml`/`.yml` is YAML; anything else is unknown.
    pub fn from_path(path: &std::path::Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "yaml" | "yml" => Some(Format::Yaml),
            _ => None,
        }
    }

    /// First non-whitespace byte `{` or `[` means JSON; anything else is YAML.
    pub fn detect(text: &str) -> Format {
        match text.trim_start().bytes().next() {
            Some(b'{' | b'[') => Format::Json,
            _ => Format::Yaml,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Yaml => "yaml",
        })
    }
}

/// A parsed document that has passed the minimal OpenAPI shape check.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDocument {
    pub format: Format,
    pub root: Value,
    pub source_name: String,
    /// Non-fatal findings from parsing (duplicate keys, ignored YAML documents).
    pub diagnostics: Vec<Diagnostic>,
}

/// A generic parsed node, before any OpenAPI-specific checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedNode {
    pub format: Format,
    pub root: Value,
    pub warnings: Vec<Diagnostic>,
}

/// Parses JSON or YAML bytes into a node tree without interpreting it.
pub fn parse_node(bytes: &[u8], format_hint: Option<Format>) -> Result<ParsedNode, Diagnostic> {
    if bytes.is_empty() {
        return Err(Diagnostic::fatal(
            DiagnosticCode::EmptyInput,
            Pointer::root(),
            "input is empty",
        ));
    }
    if bytes.len() > MAX_DOCUMENT_BYTES {
        return Err(Diagnostic::fatal(
            DiagnosticCode::TooLarge,
            Pointer::root(),
            format!(
                "input is {} bytes; the limit is {MAX_DOCUMENT_BYTES} bytes",
                bytes.len()
            ),
        ));
    }
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let text = std::str::from_utf8(bytes).map_err(|err| {
        Diagnostic::fatal(
            DiagnosticCode::Encoding,
            Pointer::root(),
            format!("input is not valid UTF-8 (byte offset {})", err.valid_up_to()),
        )
    })?;
    if text.trim().is_empty() {
        return Err(Diagnostic::fatal(
            DiagnosticCode::EmptyInput,
            Pointer::root(),
            "input contains only whitespace",
        ));
    }
    let format = format_hint.unwrap_or_else(|| Format::detect(text));
    let (root, warnings) = match format {
        Format::Json => json::parse(text)?,
        Format::Yaml => yaml::parse(text)?,
    };
    Ok(ParsedNode {
        format,
        root,
        warnings,
    })
}

/// Loads an OpenAPI document from bytes, labelling it `<input>`.
pub fn load_document(bytes: &[u8], format_hint: Option<Format>) -> Result<RawDocument, Diagnostic> {
    load_named("<input>", bytes, format_hint)
}

/// Loads an OpenAPI document from bytes under the given source label.
pub fn load_named(
    source_name: &str,
    bytes: &[u8],
    format_hint: Option<Format>,
) -> Result<RawDocument, Diagnostic> {
    let parsed = parse_node(bytes, format_hint)?;
    let Some(map) = parsed.root.as_object() else {
        return Err(Diagnostic::fatal(
            DiagnosticCode::NotOpenApi,
            Pointer::root(),
            "document root is not a map",
        ));
    };
    match map.get("openapi") {
        Some(Value::String(_)) => {}
        Some(_) => {
            return Err(Diagnostic::fatal(
                DiagnosticCode::NotOpenApi,
                Pointer::root().key("openapi"),
                "\"openapi\" must be a text value such as \"3.1.0\"",
            ))
        }
        None => {
            return Err(Diagnostic::fatal(
                DiagnosticCode::NotOpenApi,
                Pointer::root(),
                "document has no \"openapi\" version field",
            ))
        }
    }
    Ok(RawDocument {
        format: parsed.format,
        root: parsed.root,
        source_name: source_name.to_string(),
        diagnostics: parsed.warnings,
    })
}

/// Gatekeeper checks run before building the URI tree.
pub fn validate_structure(doc: &RawDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let root = &doc.root;
    if root.get("info").is_none() {
        out.push(Diagnostic::warning(
            DiagnosticCode::MissingInfo,
            Pointer::root(),
            "document has no \"info\" object",
        ));
    }
    let version = root.get("openapi").and_then(Value::as_str).unwrap_or_default();
    if !version.starts_with("3.1") {
        out.push(Diagnostic::warning(
            DiagnosticCode::UnsupportedVersion,
            Pointer::root().key("openapi"),
            format!("unsupported minor version {version:?}, proceeding"),
        ));
    }
    match root.get("paths") {
        None => out.push(Diagnostic::warning(
            DiagnosticCode::MissingPaths,
            Pointer::root(),
            "document has no \"paths\" object",
        )),
        Some(Value::Object(paths)) => {
            for key in paths.keys().filter(|k| !k.starts_with('/')) {
                out.push(Diagnostic::fatal(
                    DiagnosticCode::InvalidPathKey,
                    Pointer::root().key("paths").key(key.as_str()),
                    format!("path {key:?} does not start with \"/\""),
                ));
            }
        }
        Some(_) => out.push(Diagnostic::fatal(
            DiagnosticCode::InvalidPaths,
            Pointer::root().key("paths"),
            "\"paths\" is not a map",
        )),
    }
    out
}
