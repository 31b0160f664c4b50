//! Governance service: uploaded instances, their suppression state, and the
//! HTTP API over them.
//!
//! Each instance's ignores collection is the only suppression state; the
//! [`RuleConfig`] used for evaluation is derived from it on demand.

mod http;
mod state;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use http::{router, serve};
pub use state::{InstanceSnapshot, Snapshot, SNAPSHOT_VERSION};

use crate::catalog::RuleMetadata;
use crate::diagnostic::{Diagnostic, DiagnosticCode};
use crate::document::{parse_node, Format};
use crate::engine::{evaluate, prepare, Analyzer, ConfigError, EvaluationReport, PreparedSpec, RuleConfig, SuppressionScope};
use crate::report::JsonReport;

/// The service's own OpenAPI description.
pub const SERVICE_OPENAPI_YAML: &str = include_str!("../../openapi/seora-service.yaml");
/// Conventions the service's wire format follows.
pub const SERVICE_CONVENTIONS_YAML: &str = include_str!("../../openapi/seora-service.config.yaml");

/// The service description as JSON.
pub fn service_openapi() -> Value {
    parse_node(SERVICE_OPENAPI_YAML.as_bytes(), Some(Format::Yaml))
        .expect("bundled description parses")
        .root
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("no instance {0:?}")]
    UnknownInstance(String),
    #[error("no rule {0:?}")]
    UnknownRule(String),
    #[error("no node at key path {0:?}")]
    UnknownKey(String),
    #[error("no ignore {0:?}")]
    UnknownIgnore(String),
    #[error("already ignored by {0:?}")]
    Duplicate(String),
    #[error("the document could not be read")]
    Document(Vec<Diagnostic>),
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error("state file {path}: {message}")]
    State { path: String, message: String },
}

impl ServiceError {
    pub fn is_too_large(&self) -> bool {
        matches!(self, ServiceError::Document(d) if d.iter().any(|d| d.code == DiagnosticCode::TooLarge))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance_id: String,
    pub source_name: String,
    pub path_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDetails {
    pub instance_id: String,
    pub source_name: String,
    pub path_count: usize,
    pub format: Format,
    pub created_at: u64,
    pub ignore_count: usize,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IgnoreEntry {
    pub ignore_id: String,
    #[serde(flatten)]
    pub scope: SuppressionScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleState {
    #[serde(flatten)]
    pub metadata: RuleMetadata,
    pub enabled_globally: bool,
}

struct Cached {
    report: EvaluationReport,
    json: Arc<String>,
}

struct Instance {
    id: String,
    source_name: String,
    source: Vec<u8>,
    format: Format,
    created_at: u64,
    spec: PreparedSpec,
    ignores: Vec<IgnoreEntry>,
    cache: Mutex<Option<Arc<Cached>>>,
}

impl Instance {
    fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            instance_id: self.id.clone(),
            source_name: self.source_name.clone(),
            path_count: self.spec.tree.path_count(),
        }
    }

    fn invalidate(&mut self) {
        *self.cache.get_mut().unwrap_or_else(|e| e.into_inner()) = None;
    }

    fn find(&self, scope: &SuppressionScope) -> Option<&IgnoreEntry> {
        self.ignores.iter().find(|e| &e.scope == scope)
    }
}

/// Shared registry of instances. Every HTTP operation is a method here.
pub struct Service {
    analyzer: Analyzer,
    instances: RwLock<BTreeMap<String, Arc<RwLock<Instance>>>>,
    state_path: Option<PathBuf>,
    persist_lock: Mutex<()>,
}

impl std::fmt::Debug for Service {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Service")
            .field("instances", &self.instance_ids().len())
            .field("state_path", &self.state_path)
            .finish()
    }
}

impl Default for Service {
    fn default() -> Self {
        Self::new()
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn read<T>(lock: &RwLock<T>) -> std::sync::RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(|e| e.into_inner())
}

fn write<T>(lock: &RwLock<T>) -> std::sync::RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(|e| e.into_inner())
}

impl Service {
    /// In-memory service using the built-in catalog and default conventions.
    pub fn new() -> Self {
        Self::with_config(RuleConfig::default()).expect("default config is valid")
    }

    /// In-memory service whose instances share `base`'s options and custom
    /// rules. Suppression entries in `base` are ignored.
    pub fn with_config(base: RuleConfig) -> Result<Self, ConfigError> {
        let base = RuleConfig {
            options: base.options,
            custom_rules: base.custom_rules,
            ..RuleConfig::default()
        };
        Ok(Self {
            analyzer: Analyzer::new(base)?,
            instances: RwLock::new(BTreeMap::new()),
            state_path: None,
            persist_lock: Mutex::new(()),
        })
    }

    /// Restores instances from `path` (missing or empty means none) and
    /// writes every later change back to it.
    pub fn with_state(mut self, path: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let path = path.into();
        if let Some(snapshot) = state::read_snapshot(&path)? {
            self.restore(snapshot)?;
        }
        self.state_path = Some(path);
        Ok(self)
    }

    pub fn state_path(&self) -> Option<&Path> {
        self.state_path.as_deref()
    }

    fn instance(&self, id: &str) -> Result<Arc<RwLock<Instance>>, ServiceError> {
        read(&self.instances)
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownInstance(id.to_string()))
    }

    fn persist(&self) -> Result<(), ServiceError> {
        let Some(path) = &self.state_path else {
            return Ok(());
        };
        let _guard = self.persist_lock.lock().unwrap_or_else(|e| e.into_inner());
        state::write_snapshot(path, &self.snapshot())
    }

    pub fn instance_ids(&self) -> Vec<String> {
        read(&self.instances).keys().cloned().collect()
    }

    /// Parses and indexes an uploaded document.
    pub fn create_instance(
        &self,
        source_name: &str,
        bytes: &[u8],
        format_hint: Option<Format>,
    ) -> Result<InstanceSummary, ServiceError> {
        let id = format!("{:032x}", rand::random::<u128>());
        let summary = self.insert(id, source_name, bytes, format_hint, now(), Vec::new())?;
        self.persist()?;
        Ok(summary)
    }

    fn insert(
        &self,
        id: String,
        source_name: &str,
        bytes: &[u8],
        format_hint: Option<Format>,
        created_at: u64,
        ignores: Vec<IgnoreEntry>,
    ) -> Result<InstanceSummary, ServiceError> {
        let spec = prepare(source_name, bytes, format_hint).map_err(ServiceError::Document)?;
        let instance = Instance {
            id: id.clone(),
            source_name: source_name.to_string(),
            source: bytes.to_vec(),
            format: spec.document.format,
            created_at,
            spec,
            ignores: Vec::new(),
            cache: Mutex::new(None),
        };
        let summary = instance.summary();
        let instance = Arc::new(RwLock::new(instance));
        for entry in ignores {
            self.add_ignore_entry(&mut write(&instance), entry.scope, entry.ignore_id)?;
        }
        write(&self.instances).insert(id, instance);
        Ok(summary)
    }

    pub fn summary(&self, id: &str) -> Result<InstanceSummary, ServiceError> {
        Ok(read(&*self.instance(id)?).summary())
    }

    pub fn details(&self, id: &str) -> Result<InstanceDetails, ServiceError> {
        let instance = self.instance(id)?;
        let instance = read(&instance);
        Ok(InstanceDetails {
            instance_id: instance.id.clone(),
            source_name: instance.source_name.clone(),
            path_count: instance.spec.tree.path_count(),
            format: instance.format,
            created_at: instance.created_at,
            ignore_count: instance.ignores.len(),
            warnings: instance.spec.warnings.clone(),
        })
    }

    pub fn delete_instance(&self, id: &str) -> Result<(), ServiceError> {
        write(&self.instances)
            .remove(id)
            .ok_or_else(|| ServiceError::UnknownInstance(id.to_string()))?;
        self.persist()
    }

    /// The suppression config derived from an instance's ignores.
    pub fn config(&self, id: &str) -> Result<RuleConfig, ServiceError> {
        Ok(self.config_of(&read(&*self.instance(id)?)))
    }

    fn config_of(&self, instance: &Instance) -> RuleConfig {
        let mut config = self.analyzer.config().clone();
        for entry in &instance.ignores {
            config
                .set_rule_state(self.analyzer.catalog(), &entry.scope, false)
                .expect("stored scopes name known rules");
        }
        config
    }

    fn cached(&self, id: &str) -> Result<Arc<Cached>, ServiceError> {
        let instance = self.instance(id)?;
        let instance = read(&instance);
        let mut cache = instance.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(cached) = cache.as_ref() {
            return Ok(Arc::clone(cached));
        }
        let report = evaluate(&instance.spec.tree, self.analyzer.catalog(), &self.config_of(&instance));
        let json = Arc::new(JsonReport::from_report(&report).render());
        let cached = Arc::new(Cached { report, json });
        *cache = Some(Arc::clone(&cached));
        Ok(cached)
    }

    /// The current report, evaluated once per change of suppression state.
    pub fn violations(&self, id: &str) -> Result<EvaluationReport, ServiceError> {
        Ok(self.cached(id)?.report.clone())
    }

    /// The current report in the JSON report layout.
    pub fn violations_json(&self, id: &str) -> Result<Arc<String>, ServiceError> {
        Ok(Arc::clone(&self.cached(id)?.json))
    }

    pub fn rules(&self, id: &str) -> Result<Vec<RuleState>, ServiceError> {
        let instance = self.instance(id)?;
        let instance = read(&instance);
        Ok(self
            .analyzer
            .catalog()
            .rules()
            .iter()
            .map(|rule| RuleState {
                enabled_globally: instance
                    .find(&SuppressionScope::Global { rule_id: rule.id().to_string() })
                    .is_none(),
                metadata: rule.metadata.clone(),
            })
            .collect())
    }

    /// Switches a rule on or off for the whole instance. Repeating a call is
    /// a no-op.
    pub fn set_rule_enabled(&self, id: &str, rule_id: &str, enabled: bool) -> Result<RuleState, ServiceError> {
        let rule = self
            .analyzer
            .catalog()
            .get(rule_id)
            .ok_or_else(|| ServiceError::UnknownRule(rule_id.to_string()))?;
        let instance = self.instance(id)?;
        let changed = {
            let mut instance = write(&instance);
            let scope = SuppressionScope::Global { rule_id: rule_id.to_string() };
            let present = instance.find(&scope).is_some();
            if enabled && present {
                instance.ignores.retain(|e| e.scope != scope);
            } else if !enabled && !present {
                self.add_ignore_entry(&mut instance, scope, new_ignore_id())?;
            }
            if present && enabled {
                instance.invalidate();
            }
            present == enabled
        };
        if changed {
            self.persist()?;
        }
        Ok(RuleState {
            metadata: rule.metadata.clone(),
            enabled_globally: enabled,
        })
    }

    pub fn ignores(&self, id: &str) -> Result<Vec<IgnoreEntry>, ServiceError> {
        Ok(read(&*self.instance(id)?).ignores.clone())
    }

    pub fn ignore(&self, id: &str, ignore_id: &str) -> Result<IgnoreEntry, ServiceError> {
        read(&*self.instance(id)?)
            .ignores
            .iter()
            .find(|e| e.ignore_id == ignore_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownIgnore(ignore_id.to_string()))
    }

    /// Adds a suppression entry. Key paths must name a node of the instance's
    /// tree and are stored in the tree's spelling.
    pub fn add_ignore(&self, id: &str, scope: SuppressionScope) -> Result<IgnoreEntry, ServiceError> {
        let instance = self.instance(id)?;
        let entry = self.add_ignore_entry(&mut write(&instance), scope, new_ignore_id())?;
        self.persist()?;
        Ok(entry)
    }

    fn add_ignore_entry(
        &self,
        instance: &mut Instance,
        scope: SuppressionScope,
        ignore_id: String,
    ) -> Result<IgnoreEntry, ServiceError> {
        if let Some(rule_id) = scope.rule_id() {
            if !self.analyzer.catalog().contains(rule_id) {
                return Err(ServiceError::UnknownRule(rule_id.to_string()));
            }
        }
        let canonical_key = |key: &str| {
            instance
                .spec
                .tree
                .lookup(key)
                .map(|n| n.key_path.clone())
                .ok_or_else(|| ServiceError::UnknownKey(key.to_string()))
        };
        let scope = match scope {
            SuppressionScope::Global { rule_id } => SuppressionScope::Global { rule_id },
            SuppressionScope::Key { rule_id, key_path } => SuppressionScope::Key {
                rule_id,
                key_path: canonical_key(&key_path)?,
            },
            SuppressionScope::KeyAll { key_path } => SuppressionScope::KeyAll {
                key_path: canonical_key(&key_path)?,
            },
        };
        if let Some(existing) = instance.find(&scope) {
            return Err(ServiceError::Duplicate(existing.ignore_id.clone()));
        }
        if instance.ignores.iter().any(|e| e.ignore_id == ignore_id) {
            return Err(ServiceError::BadRequest(format!("ignore id {ignore_id:?} is used twice")));
        }
        let entry = IgnoreEntry { ignore_id, scope };
        instance.ignores.push(entry.clone());
        instance.invalidate();
        Ok(entry)
    }

    pub fn delete_ignore(&self, id: &str, ignore_id: &str) -> Result<(), ServiceError> {
        let instance = self.instance(id)?;
        {
            let mut instance = write(&instance);
            let before = instance.ignores.len();
            instance.ignores.retain(|e| e.ignore_id != ignore_id);
            if instance.ignores.len() == before {
                return Err(ServiceError::UnknownIgnore(ignore_id.to_string()));
            }
            instance.invalidate();
        }
        self.persist()
    }

    /// Every instance with its source bytes and ignores.
    pub fn snapshot(&self) -> Snapshot {
        let instances: Vec<_> = read(&self.instances).values().cloned().collect();
        Snapshot {
            snapshot_version: SNAPSHOT_VERSION,
            instances: instances
                .iter()
                .map(|instance| {
                    let instance = read(instance);
                    InstanceSnapshot::new(
                        &instance.id,
                        &instance.source_name,
                        instance.format,
                        instance.created_at,
                        &instance.source,
                        instance.ignores.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Replaces nothing: adds the snapshot's instances to this service.
    pub fn restore(&self, snapshot: Snapshot) -> Result<(), ServiceError> {
        if snapshot.snapshot_version != SNAPSHOT_VERSION {
            return Err(ServiceError::BadRequest(format!(
                "snapshot version {} is not supported",
                snapshot.snapshot_version
            )));
        }
        for item in snapshot.instances {
            let bytes = item.source_bytes()?;
            self.insert(
                item.instance_id,
                &item.source_name,
                &bytes,
                Some(item.format),
                item.created_at,
                item.ignores,
            )?;
        }
        Ok(())
    }

    /// Writes a snapshot to `path` regardless of write-through.
    pub fn save_to(&self, path: &Path) -> Result<(), ServiceError> {
        state::write_snapshot(path, &self.snapshot())
    }
}

fn new_ignore_id() -> String {
    format!("{:016x}", rand::random::<u64>())
}
