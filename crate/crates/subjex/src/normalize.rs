//! Label normalization shared by the authority store, the term index,
//! fixture keying, and the evaluation harness.
//!
//! A label is reduced to lowercase, diacritic-folded tokens split on
//! anything that is not a letter or digit, so comparisons are insensitive
//! to case, accents, and punctuation.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// A label reduced to its normalized token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizedLabel {
    tokens: Vec<String>,
}

impl NormalizedLabel {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Canonical rendering: tokens joined by single spaces.
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }

    /// Map key form; identical to `render`.
    pub fn key(&self) -> String {
        self.render()
    }

    /// Filename-safe key: tokens joined by underscores.
    pub fn file_key(&self) -> String {
        self.tokens.join("_")
    }
}

/// Folds ligatures and crossed letters that NFKD mark stripping leaves
/// intact. Input chars are already lowercased.
fn fold_char(c: char, out: &mut String) {
    match c {
        'æ' => out.push_str("ae"),
        'œ' => out.push_str("oe"),
        'ß' => out.push_str("ss"),
        'ø' => out.push('o'),
        'đ' => out.push('d'),
        'ð' => out.push('d'),
        'ł' => out.push('l'),
        'þ' => out.push_str("th"),
        _ => out.push(c),
    }
}

/// Normalizes a display label into its token sequence.
///
/// Steps: NFKD decomposition, combining-mark removal, lowercasing,
/// ligature folding, then splitting on every non-alphanumeric character.
/// Total and deterministic; an empty or all-punctuation input yields an
/// empty token list.
pub fn normalize(label: &str) -> NormalizedLabel {
    let mut folded = String::with_capacity(label.len());
    for c in label.nfkd() {
        if is_combining_mark(c) {
            continue;
        }
        for lc in c.to_lowercase() {
            fold_char(lc, &mut folded);
        }
    }
    // chars that stay uppercase after lowercasing (circled letters and
    // similar symbols) break tokens like punctuation does
    let tokens = folded
        .split(|c: char| !c.is_alphanumeric() || c.is_uppercase())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    NormalizedLabel { tokens }
}
