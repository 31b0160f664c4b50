use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pointer::Pointer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Fatal,
    Warning,
}

/// Machine-readable classification of a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    EmptyInput,
    TooLarge,
    Encoding,
    Syntax,
    NestingLimit,
    AliasLimit,
    NotOpenApi,
    ComplexKey,
    DuplicateKey,
    ExtraYamlDocuments,
    InvalidMerge,
    MissingInfo,
    MissingPaths,
    UnsupportedVersion,
    InvalidPaths,
    InvalidPathKey,
    TemplateMerge,
    MalformedSegment,
    DuplicateOperation,
    InvalidParameter,
    InvalidMediaType,
}

/// A problem found while loading or interpreting a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub location: Pointer,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub column: Option<usize>,
    pub message: String,
}

pub type DocumentDiagnostic = Diagnostic;

impl Diagnostic {
    pub fn fatal(code: DiagnosticCode, location: Pointer, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Fatal,
            code,
            location,
            line: None,
            column: None,
            message: message.into(),
        }
    }

    pub fn warning(code: DiagnosticCode, location: Pointer, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::fatal(code, location, message)
        }
    }

    pub fn at(mut self, line: usize, column: usize) -> Self {
        self.line = Some(line);
        self.column = Some(column);
        self
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Fatal
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Fatal => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}")?;
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " at line {line}, column {column}")?;
        }
        if !self.location.is_root() {
            write!(f, " [{}]", self.location)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for Diagnostic {}
