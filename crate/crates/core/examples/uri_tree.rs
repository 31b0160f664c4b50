//! Build the URI tree of a two-path spec and walk it.

use seora::engine::prepare;

const SPEC: &str = r#"
openapi: 3.1.0
info: {title: Rules, version: "1"}
paths:
  /instances/{instance_id}/rules:
    get: {responses: {"200": {description: ok}}}
  /instances/{instance_id}/ignores:
    get: {responses: {"200": {description: ok}}}
    post: {responses: {"201": {description: created}}}
"#;

fn main() {
    let spec = prepare("rules.yaml", SPEC.as_bytes(), None).expect("valid spec");
    spec.tree.walk(|node| {
        let methods: Vec<_> = node.operations.keys().map(ToString::to_string).collect();
        let key = if node.is_root() { "/" } else { node.key_path.as_str() };
        let line = format!("{:indent$}{key} {}", "", methods.join(" "), indent = node.depth * 2);
        println!("{}", line.trim_end());
    });
    let shared = spec.tree.lookup("/instances/{id}").expect("template node");
    println!("\n{} has {} children", shared.key_path, shared.children.len());
    print!("{}", spec.tree.export_json());
}
