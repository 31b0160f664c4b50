//! Print the built-in rules grouped by importance.

use seora::catalog::{catalog, Importance};

fn main() {
    let catalog = catalog();
    for importance in Importance::ALL {
        let rules: Vec<_> = catalog.metadata().filter(|m| m.importance == importance).collect();
        println!("{} ({})", importance.as_str(), rules.len());
        for m in rules {
            println!("  {:<9} {:<15} {}", m.id, m.target.to_string(), m.title);
        }
    }
}
