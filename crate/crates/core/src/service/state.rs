use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::{IgnoreEntry, ServiceError};
use crate::document::Format;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub snapshot_version: u32,
    pub instances: Vec<InstanceSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSnapshot {
    pub instance_id: String,
    pub source_name: String,
    pub format: Format,
    pub created_at: u64,
    pub source_base64: String,
    pub ignores: Vec<IgnoreEntry>,
}

impl InstanceSnapshot {
    pub fn new(
        instance_id: &str,
        source_name: &str,
        format: Format,
        created_at: u64,
        source: &[u8],
        ignores: Vec<IgnoreEntry>,
    ) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            source_name: source_name.to_string(),
            format,
            created_at,
            source_base64: STANDARD.encode(source),
            ignores,
        }
    }

    pub fn source_bytes(&self) -> Result<Vec<u8>, ServiceError> {
        STANDARD.decode(&self.source_base64).map_err(|e| ServiceError::BadRequest(format!(
            "instance {}: source is not base64: {e}",
            self.instance_id
        )))
    }
}

fn state_error(path: &Path, message: impl ToString) -> ServiceError {
    ServiceError::State {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

/// `None` when the file is missing or blank.
pub(super) fn read_snapshot(path: &Path) -> Result<Option<Snapshot>, ServiceError> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(state_error(path, e)),
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    serde_json::from_str(&text).map(Some).map_err(|e| state_error(path, e))
}

/// Writes to a sibling temp file, then renames over `path`.
pub(super) fn write_snapshot(path: &Path, snapshot: &Snapshot) -> Result<(), ServiceError> {
    let mut body = serde_json::to_vec_pretty(snapshot).map_err(|e| state_error(path, e))?;
    body.push(b'\n');
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, body).map_err(|e| state_error(path, e))?;
    std::fs::rename(&tmp, path).map_err(|e| state_error(path, e))
}
