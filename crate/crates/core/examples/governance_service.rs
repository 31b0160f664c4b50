//! The governance service as a library, then over HTTP on a local port.
//!
//! cargo run --example governance_service -- --serve

use std::sync::Arc;

use seora::engine::SuppressionScope;
use seora::service::{serve, Service};

#[tokio::main]
async fn main() {
    let service = Arc::new(Service::new());
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/dirty.yaml")).unwrap();
    let summary = service.create_instance("dirty.yaml", &bytes, None).unwrap();
    let id = &summary.instance_id;
    println!("instance {id} with {} paths", summary.path_count);

    let before = service.violations(id).unwrap();
    let entry = service
        .add_ignore(id, SuppressionScope::KeyAll { key_path: "/Users/".into() })
        .unwrap();
    let during = service.violations(id).unwrap();
    service.delete_ignore(id, &entry.ignore_id).unwrap();
    let after = service.violations(id).unwrap();
    println!(
        "violations: {} -> {} with ignore {} -> {} after removing it",
        before.violations.len(),
        during.violations.len(),
        entry.ignore_id,
        after.violations.len()
    );

    if std::env::args().any(|a| a == "--serve") {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:8080").await.unwrap();
        println!("try: curl http://127.0.0.1:8080/instances/{id}/violations");
        serve(service, listener).await.unwrap();
    }
}
