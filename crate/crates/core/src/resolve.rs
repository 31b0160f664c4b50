//! Local `$ref` resolution by deep copy.
//!
//! A reference site is left in place when it is external, dangling, or part of
//! a reference cycle. Cycles are decided on the site graph: site `s` has an
//! edge to every site located inside `target(s)`, and `s` is cyclic when it
//! can reach itself. Every other site expands recursively, which always
//! terminates because a chain of non-cyclic sites never revisits a site.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::document::{Format, RawDocument};
use crate::pointer::{node_count, Pointer};

pub const DEFAULT_MAX_NODES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnresolvedReason {
    Cycle,
    External,
    Missing,
    /// Expanding the reference would push the document past the node budget.
    ExpansionLimit,
}

impl fmt::Display for UnresolvedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnresolvedReason::Cycle => "cycle",
            UnresolvedReason::External => "external",
            UnresolvedReason::Missing => "missing",
            UnresolvedReason::ExpansionLimit => "expansion limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedRef {
    /// Location of the object holding the `$ref`, in the resolved root.
    pub pointer: Pointer,
    pub target: String,
    pub reason: UnresolvedReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedDocument {
    pub root: Value,
    pub unresolved: Vec<UnresolvedRef>,
    pub source_name: String,
    pub format: Format,
    resolved_count: usize,
    source_node_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionStats {
    pub resolved_count: usize,
    pub unresolved_count: usize,
    pub expansion_ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ResolveOptions {
    /// Upper bound on nodes materialized by expansion.
    pub max_nodes: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Anything that can be fed to the resolver.
pub trait ResolveSource {
    fn root(&self) -> &Value;
    fn source_name(&self) -> &str;
    fn format(&self) -> Format;
    /// References already known to be unresolvable; they are kept as they are.
    fn known_unresolved(&self) -> &[UnresolvedRef] {
        &[]
    }
}

impl ResolveSource for RawDocument {
    fn root(&self) -> &Value {
        &self.root
    }
    fn source_name(&self) -> &str {
        &self.source_name
    }
    fn format(&self) -> Format {
        self.format
    }
}

impl ResolveSource for ResolvedDocument {
    fn root(&self) -> &Value {
        &self.root
    }
    fn source_name(&self) -> &str {
        &self.source_name
    }
    fn format(&self) -> Format {
        self.format
    }
    fn known_unresolved(&self) -> &[UnresolvedRef] {
        &self.unresolved
    }
}

pub fn resolve_references<D: ResolveSource>(doc: &D) -> ResolvedDocument {
    resolve_with(doc, ResolveOptions::default())
}

pub fn resolve_with<D: ResolveSource>(doc: &D, options: ResolveOptions) -> ResolvedDocument {
    let root = doc.root();
    let sites = classify_sites(root, doc.known_unresolved());
    let mut resolver = Resolver {
        root,
        sites,
        memo: HashMap::new(),
        budget: options.max_nodes,
        emitted: 0,
    };
    let mut expansion = Expansion::default();
    let value = resolver.copy(root, &mut Pointer::root(), &mut Pointer::root(), &mut expansion);
    ResolvedDocument {
        root: value,
        unresolved: expansion.unresolved,
        source_name: doc.source_name().to_string(),
        format: doc.format(),
        resolved_count: expansion.resolved,
        source_node_count: node_count(root),
    }
}

pub fn resolution_stats(doc: &ResolvedDocument) -> ResolutionStats {
    ResolutionStats {
        resolved_count: doc.resolved_count,
        unresolved_count: doc.unresolved.len(),
        expansion_ratio: node_count(&doc.root) as f64 / doc.source_node_count.max(1) as f64,
    }
}

impl ResolvedDocument {
    pub fn stats(&self) -> ResolutionStats {
        resolution_stats(self)
    }
}

/// Returns the reference text when `value` is a reference object.
pub fn ref_target(value: &Value) -> Option<&str> {
    value.as_object()?.get("$ref")?.as_str()
}

#[derive(Debug, Clone)]
enum Disposition {
    Keep(UnresolvedReason),
    Expand(Pointer),
}

#[derive(Debug, Clone)]
struct Site {
    target: String,
    disposition: Disposition,
}

fn collect_sites(value: &Value, at: &mut Pointer, out: &mut Vec<(Pointer, String)>) {
    match value {
        Value::Object(map) => {
            if let Some(target) = ref_target(value) {
                out.push((at.clone(), target.to_string()));
            }
            for (k, v) in map {
                if k != "$ref" {
                    at.push_key(k.as_str());
                    collect_sites(v, at, out);
                    at.pop();
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                at.push_index(i);
                collect_sites(v, at, out);
                at.pop();
            }
        }
        _ => {}
    }
}

fn classify_sites(root: &Value, known: &[UnresolvedRef]) -> HashMap<Pointer, Site> {
    let known: HashMap<&Pointer, UnresolvedReason> =
        known.iter().map(|u| (&u.pointer, u.reason)).collect();
    let mut found = Vec::new();
    collect_sites(root, &mut Pointer::root(), &mut found);
    found.sort_by(|a, b| a.0.cmp(&b.0));

    let mut sites = HashMap::with_capacity(found.len());
    let mut local: Vec<(usize, Pointer)> = Vec::new();
    for (index, (at, target)) in found.iter().enumerate() {
        let disposition = if let Some(reason) = known.get(at) {
            Disposition::Keep(*reason)
        } else if !target.starts_with('#') {
            Disposition::Keep(UnresolvedReason::External)
        } else {
            match Pointer::from_fragment(target).and_then(|p| p.normalized(root)) {
                Some(pointer) => {
                    local.push((index, pointer.clone()));
                    Disposition::Expand(pointer)
                }
                None => Disposition::Keep(UnresolvedReason::Missing),
            }
        };
        sites.insert(
            at.clone(),
            Site {
                target: target.clone(),
                disposition,
            },
        );
    }

    // Site graph over `found` (sorted, so every subtree is a contiguous run).
    let mut graph = DiGraph::<(), ()>::with_capacity(found.len(), 0);
    let nodes: Vec<_> = (0..found.len()).map(|_| graph.add_node(())).collect();
    let mut self_loops = HashSet::new();
    for (from, target) in &local {
        let start = found.partition_point(|(at, _)| at < target);
        for (to, (at, _)) in found.iter().enumerate().skip(start) {
            if !target.is_prefix_of(at) {
                break;
            }
            if to == *from {
                self_loops.insert(*from);
            }
            graph.add_edge(nodes[*from], nodes[to], ());
        }
    }
    let mut cyclic = self_loops;
    for component in tarjan_scc(&graph) {
        if component.len() > 1 {
            cyclic.extend(component.iter().map(|n| n.index()));
        }
    }
    for index in cyclic {
        if let Some(site) = sites.get_mut(&found[index].0) {
            if matches!(site.disposition, Disposition::Expand(_)) {
                site.disposition = Disposition::Keep(UnresolvedReason::Cycle);
            }
        }
    }
    sites
}

#[derive(Default)]
struct Expansion {
    value: Value,
    /// Pointers relative to the expansion root.
    unresolved: Vec<UnresolvedRef>,
    resolved: usize,
    nodes: usize,
}

struct Resolver<'a> {
    root: &'a Value,
    sites: HashMap<Pointer, Site>,
    memo: HashMap<Pointer, Rc<Expansion>>,
    budget: usize,
    emitted: usize,
}

impl Resolver<'_> {
    fn expand_target(&mut self, target: &Pointer) -> Rc<Expansion> {
        if let Some(done) = self.memo.get(target) {
            return Rc::clone(done);
        }
        let raw = target.get(self.root).expect("target checked during classification");
        let mut expansion = Expansion::default();
        let value = self.copy(raw, &mut target.clone(), &mut Pointer::root(), &mut expansion);
        expansion.nodes = node_count(&value);
        expansion.value = value;
        let expansion = Rc::new(expansion);
        self.memo.insert(target.clone(), Rc::clone(&expansion));
        expansion
    }

    /// Copies `raw` (found at `at` in the source) into the output at `rel`.
    fn copy(&mut self, raw: &Value, at: &mut Pointer, rel: &mut Pointer, acc: &mut Expansion) -> Value {
        match raw {
            Value::Object(map) => {
                if ref_target(raw).is_some() {
                    if let Some(site) = self.sites.get(at).cloned() {
                        return self.copy_site(map, site, at, rel, acc);
                    }
                }
                let mut out = Map::with_capacity(map.len());
                for (k, v) in map {
                    at.push_key(k.as_str());
                    rel.push_key(k.as_str());
                    out.insert(k.clone(), self.copy(v, at, rel, acc));
                    rel.pop();
                    at.pop();
                }
                Value::Object(out)
            }
            Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, v) in items.iter().enumerate() {
                    at.push_index(i);
                    rel.push_index(i);
                    out.push(self.copy(v, at, rel, acc));
                    rel.pop();
                    at.pop();
                }
                Value::Array(out)
            }
            scalar => scalar.clone(),
        }
    }

    fn copy_site(
        &mut self,
        map: &Map<String, Value>,
        site: Site,
        at: &mut Pointer,
        rel: &mut Pointer,
        acc: &mut Expansion,
    ) -> Value {
        let mut disposition = site.disposition;
        let mut expanded = None;
        if let Disposition::Expand(target) = &disposition {
            let expansion = self.expand_target(target);
            if self.emitted + expansion.nodes > self.budget {
                disposition = Disposition::Keep(UnresolvedReason::ExpansionLimit);
            } else {
                self.emitted += expansion.nodes;
                expanded = Some(expansion);
            }
        }
        let Some(expansion) = expanded else {
            let Disposition::Keep(reason) = disposition else {
                unreachable!()
            };
            acc.unresolved.push(UnresolvedRef {
                pointer: rel.clone(),
                target: site.target,
                reason,
            });
            let mut out = Map::with_capacity(map.len());
            for (k, v) in map {
                if k == "$ref" {
                    out.insert(k.clone(), v.clone());
                    continue;
                }
                at.push_key(k.as_str());
                rel.push_key(k.as_str());
                out.insert(k.clone(), self.copy(v, at, rel, acc));
                rel.pop();
                at.pop();
            }
            return Value::Object(out);
        };

        acc.resolved += 1 + expansion.resolved;
        let mut value = expansion.value.clone();
        let mut inherited: Vec<UnresolvedRef> = expansion
            .unresolved
            .iter()
            .map(|u| UnresolvedRef {
                pointer: rel.join(&u.pointer),
                ..u.clone()
            })
            .collect();
        // Sibling keys override the copied target.
        if let Value::Object(target_map) = &mut value {
            for (k, v) in map {
                if k == "$ref" {
                    continue;
                }
                let shadowed = rel.key(k.as_str());
                inherited.retain(|u| !shadowed.is_prefix_of(&u.pointer));
                at.push_key(k.as_str());
                rel.push_key(k.as_str());
                let copied = self.copy(v, at, rel, acc);
                rel.pop();
                at.pop();
                target_map.insert(k.clone(), copied);
            }
        }
        acc.unresolved.extend(inherited);
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::load_document;
    use serde_json::json;

    fn raw(value: Value) -> RawDocument {
        RawDocument {
            format: Format::Json,
            root: value,
            source_name: "test".into(),
            diagnostics: vec![],
        }
    }

    fn count_refs(v: &Value) -> usize {
        match v {
            Value::Object(m) => {
                usize::from(m.get("$ref").is_some_and(Value::is_string))
                    + m.iter().filter(|(k, _)| *k != "$ref").map(|(_, v)| count_refs(v)).sum::<usize>()
            }
            Value::Array(a) => a.iter().map(count_refs).sum(),
            _ => 0,
        }
    }

    #[test]
    fn single_step_substitution() {
        let doc = raw(json!({"openapi": "3.1.0", "components": {"schemas": {
            "A": {"$ref": "#/components/schemas/B"}, "B": {"type": "string"}}}}));
        let out = resolve_references(&doc);
        assert_eq!(out.root["components"]["schemas"]["A"], json!({"type": "string"}));
        assert!(out.unresolved.is_empty());
    }

    #[test]
    fn two_cycle_is_kept() {
        let doc = raw(json!({"openapi": "3.1.0", "components": {"schemas": {
            "A": {"$ref": "#/components/schemas/B"}, "B": {"$ref": "#/components/schemas/A"}}}}));
        let out = resolve_references(&doc);
        assert_eq!(out.root, doc.root);
        assert_eq!(out.unresolved.len(), 2);
        assert!(out.unresolved.iter().all(|u| u.reason == UnresolvedReason::Cycle));
        let stats = out.stats();
        assert_eq!((stats.resolved_count, stats.unresolved_count), (0, 2));
    }

    #[test]
    fn external_reference_kept() {
        let doc = raw(json!({"openapi": "3.1.0", "x": {"$ref": "./common.yaml#/Pet"}}));
        let out = resolve_references(&doc);
        assert_eq!(out.unresolved[0].reason, UnresolvedReason::External);
        assert_eq!(out.unresolved[0].pointer.to_string(), "/x");
        assert_eq!(out.root, doc.root);
    }

    #[test]
    fn dangling_reference_is_missing() {
        let doc = raw(json!({"openapi": "3.1.0", "x": {"$ref": "#/components/schemas/Nope"}}));
        let out = resolve_references(&doc);
        assert_eq!(out.unresolved[0].reason, UnresolvedReason::Missing);
    }

    #[test]
    fn zero_references_ratio_is_one() {
        let doc = raw(json!({"openapi": "3.1.0", "paths": {}}));
        let stats = resolve_references(&doc).stats();
        assert_eq!(stats.expansion_ratio, 1.0);
        assert_eq!(stats.resolved_count, 0);
    }

    #[test]
    fn four_sites_one_schema() {
        let doc = raw(json!({"openapi": "3.1.0",
            "components": {"schemas": {"Id": {"type": "string", "format": "uuid"}}},
            "uses": [
                {"$ref": "#/components/schemas/Id"}, {"$ref": "#/components/schemas/Id"},
                {"$ref": "#/components/schemas/Id"}, {"$ref": "#/components/schemas/Id"}]}));
        let before = node_count(&doc.root);
        let out = resolve_references(&doc);
        let stats = out.stats();
        assert_eq!(stats.resolved_count, 4);
        // Each 2-node reference object became a 3-node schema.
        assert_eq!(node_count(&out.root), before + 4);
        assert!(stats.expansion_ratio > 1.0);
        assert_eq!(stats.expansion_ratio, (before + 4) as f64 / before as f64);
    }

    #[test]
    fn diamond_is_not_a_cycle() {
        let doc = raw(json!({"openapi": "3.1.0", "s": {
            "A": {"properties": {"c": {"$ref": "#/s/C"}}},
            "B": {"properties": {"c": {"$ref": "#/s/C"}}},
            "C": {"type": "integer"}}}));
        let out = resolve_references(&doc);
        assert!(out.unresolved.is_empty());
        assert_eq!(out.root["s"]["A"]["properties"]["c"], json!({"type": "integer"}));
    }

    #[test]
    fn recursive_schema_kept_at_use_sites() {
        let doc = raw(json!({"openapi": "3.1.0", "s": {
            "Node": {"properties": {"next": {"$ref": "#/s/Node"}}},
            "Use": {"$ref": "#/s/Node"}}}));
        let out = resolve_references(&doc);
        assert_eq!(out.root["s"]["Node"], doc.root["s"]["Node"]);
        assert_eq!(
            out.root["s"]["Use"],
            json!({"properties": {"next": {"$ref": "#/s/Node"}}})
        );
        let mut pointers: Vec<_> = out.unresolved.iter().map(|u| u.pointer.to_string()).collect();
        pointers.sort();
        assert_eq!(pointers, ["/s/Node/properties/next", "/s/Use/properties/next"]);
        assert_eq!(count_refs(&out.root), out.unresolved.len());
    }

    #[test]
    fn siblings_override_target() {
        let doc = raw(json!({"openapi": "3.1.0", "s": {
            "A": {"$ref": "#/s/B", "description": "mine"},
            "B": {"type": "string", "description": "theirs"}}}));
        let out = resolve_references(&doc);
        assert_eq!(out.root["s"]["A"], json!({"type": "string", "description": "mine"}));
    }

    #[test]
    fn idempotent_on_cycles() {
        let doc = raw(json!({"openapi": "3.1.0", "s": {
            "Node": {"properties": {"next": {"$ref": "#/s/Node"}, "x": {"$ref": "#/s/X"}}},
            "X": {"type": "string"},
            "Use": {"items": {"$ref": "#/s/Node"}}}}));
        let once = resolve_references(&doc);
        let twice = resolve_references(&once);
        assert_eq!(once.root, twice.root);
        assert_eq!(once.unresolved, twice.unresolved);
    }

    #[test]
    fn array_index_targets() {
        let doc = load_document(
            br##"{"openapi":"3.1.0","list":[{"a":1},{"b":2}],"x":{"$ref":"#/list/1"}}"##,
            None,
        )
        .unwrap();
        let out = resolve_references(&doc);
        assert_eq!(out.root["x"], json!({"b": 2}));
    }

    #[test]
    fn expansion_limit_leaves_reference() {
        let doc = raw(json!({"openapi": "3.1.0",
            "s": {"Big": {"a": 1, "b": 2, "c": 3}},
            "u": [{"$ref": "#/s/Big"}, {"$ref": "#/s/Big"}]}));
        let out = resolve_with(&doc, ResolveOptions { max_nodes: 5 });
        assert_eq!(out.unresolved.len(), 1);
        assert_eq!(out.unresolved[0].reason, UnresolvedReason::ExpansionLimit);
        assert_eq!(out.unresolved[0].pointer.to_string(), "/u/1");
    }

    #[test]
    fn self_reference_through_root() {
        let doc = raw(json!({"openapi": "3.1.0", "a": {"$ref": "#"}}));
        let out = resolve_references(&doc);
        assert_eq!(out.unresolved[0].reason, UnresolvedReason::Cycle);
    }
}
