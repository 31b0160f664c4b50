//! A word-list and suffix heuristic for "is this collection name plural?".
//!
//! English plurals are irregular enough that no short heuristic is exact.
//! Misjudged words can be fixed per project through
//! `extra_plural_nouns` and `extra_singular_nouns`.

use crate::engine::ConventionOptions;

const IRREGULAR_PLURALS: &[&str] = &[
    "people", "children", "men", "women", "feet", "teeth", "mice", "data", "menus", "media",
];

/// Irregular plurals that also end compound words (`salespeople`).
const COMPOUNDING_PLURALS: &[&str] = &["people", "children", "data"];

const SINGULAR_EXCEPTIONS: &[&str] = &[
    "status", "news", "analysis", "basis", "address", "bus", "campus", "virus", "census", "corpus",
    "species",
];

/// Decides whether a literal segment names a plural collection. Kebab and
/// snake case segments are judged by their last word.
pub fn is_plural(segment: &str, options: &ConventionOptions) -> bool {
    let lower = segment.to_lowercase();
    let word = lower.rsplit(['-', '_']).find(|w| !w.is_empty()).unwrap_or(&lower);
    if options.extra_singular_nouns.contains(word) || options.extra_singular_nouns.contains(&lower) {
        return false;
    }
    if options.extra_plural_nouns.contains(word) || options.extra_plural_nouns.contains(&lower) {
        return true;
    }
    if IRREGULAR_PLURALS.contains(&word) || COMPOUNDING_PLURALS.iter().any(|p| word.ends_with(p)) {
        return true;
    }
    if SINGULAR_EXCEPTIONS.contains(&word) {
        return false;
    }
    if word.ends_with("ss") || word.ends_with("sis") || word.ends_with("us") {
        return false;
    }
    word.ends_with('s')
}
