use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::pointer::Pointer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HttpMethod {
    Get,
    Put,
    Post,
    Delete,
    Options,
    Head,
    Patch,
    Trace,
}

impl HttpMethod {
    pub const ALL: [HttpMethod; 8] = [
        HttpMethod::Get,
        HttpMethod::Put,
        HttpMethod::Post,
        HttpMethod::Delete,
        HttpMethod::Options,
        HttpMethod::Head,
        HttpMethod::Patch,
        HttpMethod::Trace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HttpMethod::Get => "GET",
            HttpMethod::Put => "PUT",
            HttpMethod::Post => "POST",
            HttpMethod::Delete => "DELETE",
            HttpMethod::Options => "OPTIONS",
            HttpMethod::Head => "HEAD",
            HttpMethod::Patch => "PATCH",
            HttpMethod::Trace => "TRACE",
        }
    }

    /// The key used for this method inside an OpenAPI path item.
    pub fn path_item_key(self) -> &'static str {
        match self {
            HttpMethod::Get => "get",
            HttpMethod::Put => "put",
            HttpMethod::Post => "post",
            HttpMethod::Delete => "delete",
            HttpMethod::Options => "options",
            HttpMethod::Head => "head",
            HttpMethod::Patch => "patch",
            HttpMethod::Trace => "trace",
        }
    }
}

impl fmt::Display for HttpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown HTTP method {0:?}")]
pub struct UnknownMethod(pub String);

impl FromStr for HttpMethod {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HttpMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterLocation {
    Path,
    Query,
    Header,
    Cookie,
}

impl FromStr for ParameterLocation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "path" => Ok(ParameterLocation::Path),
            "query" => Ok(ParameterLocation::Query),
            "header" => Ok(ParameterLocation::Header),
            "cookie" => Ok(ParameterLocation::Cookie),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterInfo {
    pub name: String,
    pub location: ParameterLocation,
    pub required: bool,
    pub description: Option<String>,
    pub schema: Option<Value>,
    pub pointer: Pointer,
}

/// Media types of a request body, keyed by media-type text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContentInfo {
    pub media_types: BTreeMap<String, Option<Value>>,
    pub pointer: Pointer,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResponseInfo {
    pub description: Option<String>,
    pub media_types: BTreeMap<String, Option<Value>>,
    pub headers: BTreeSet<String>,
    pub pointer: Pointer,
}

impl ResponseInfo {
    pub fn has_content(&self) -> bool {
        !self.media_types.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationInfo {
    pub method: HttpMethod,
    pub operation_id: Option<String>,
    pub summary: Option<String>,
    pub description: Option<String>,
    /// Path-level parameters merged with (and overridden by) operation-level ones.
    pub parameters: Vec<ParameterInfo>,
    pub request_body: Option<ContentInfo>,
    /// Keyed by status pattern: "200", "4XX", "default".
    pub responses: BTreeMap<String, ResponseInfo>,
    /// Names of the security schemes in effect (operation-level, else document-level).
    pub security: Vec<String>,
    pub raw_pointer: Pointer,
}

/// Classification of a response key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusClass {
    Informational,
    Success,
    Redirect,
    ClientError,
    ServerError,
    Default,
    Unknown,
}

pub fn status_class(code: &str) -> StatusClass {
    if code == "default" {
        return StatusClass::Default;
    }
    let bytes = code.as_bytes();
    let well_formed = bytes.len() == 3
        && bytes[0].is_ascii_digit()
        && ((bytes[1].is_ascii_digit() && bytes[2].is_ascii_digit())
            || code[1..].eq_ignore_ascii_case("xx"));
    if !well_formed {
        return StatusClass::Unknown;
    }
    match bytes[0] {
        b'1' => StatusClass::Informational,
        b'2' => StatusClass::Success,
        b'3' => StatusClass::Redirect,
        b'4' => StatusClass::ClientError,
        b'5' => StatusClass::ServerError,
        _ => StatusClass::Unknown,
    }
}

impl OperationInfo {
    pub fn has_response(&self, code: &str) -> bool {
        self.responses.contains_key(code)
    }

    pub fn has_response_class(&self, class: StatusClass) -> bool {
        self.responses.keys().any(|code| status_class(code) == class)
    }

    /// Union of all media types across responses.
    pub fn response_media_types(&self) -> BTreeSet<String> {
        self.responses
            .values()
            .flat_map(|r| r.media_types.keys().cloned())
            .collect()
    }
}
