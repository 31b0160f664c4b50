//! Resolve local references, keeping cycles, dangling and external refs in place.

use seora::document::load_document;
use seora::resolve::resolve_references;

const SPEC: &str = r##"
openapi: 3.1.0
info: {title: Refs, version: "1"}
paths:
  /nodes:
    get:
      responses:
        "200":
          description: ok
          content:
            application/json:
              schema: {$ref: "#/components/schemas/Node"}
components:
  schemas:
    Node:
      type: object
      properties:
        label: {$ref: "#/components/schemas/Label"}
        parent: {$ref: "#/components/schemas/Node"}
        owner: {$ref: "people.yaml#/Person"}
        missing: {$ref: "#/components/schemas/Nope"}
    Label: {type: string}
"##;

fn main() {
    let raw = load_document(SPEC.as_bytes(), None).expect("valid document");
    let resolved = resolve_references(&raw);
    let schema = &resolved.root["paths"]["/nodes"]["get"]["responses"]["200"]["content"]["application/json"]["schema"];
    println!("{}", serde_json::to_string_pretty(schema).unwrap());
    for r in &resolved.unresolved {
        println!("kept {} -> {} ({})", r.pointer, r.target, r.reason);
    }
    let stats = resolved.stats();
    println!("resolved {}, unresolved {}", stats.resolved_count, stats.unresolved_count);
}
