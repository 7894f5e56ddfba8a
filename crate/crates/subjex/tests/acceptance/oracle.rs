//! Independent brute-force cosine scorer used to check the term index.
//!
//! Recomputes term frequencies, document frequencies, smoothed idf, norms,
//! and dot products directly from the store's labels, never touching the
//! index internals. Accumulation runs over tokens in sorted order, the
//! same convention the index documents, so scores are comparable at
//! tight tolerance.

use std::collections::BTreeMap;

use subjex::authority::AuthorityStore;
use subjex::index::{LabelRole, SearchHit};
use subjex::normalize::normalize;

pub struct BruteForceScorer {
    docs: Vec<BruteDoc>,
    df: BTreeMap<String, usize>,
}

struct BruteDoc {
    record_id: String,
    label: String,
    role: LabelRole,
    tf: BTreeMap<String, u32>,
}

fn term_counts(label: &str) -> BTreeMap<String, u32> {
    let mut tf = BTreeMap::new();
    for t in normalize(label).tokens() {
        *tf.entry(t.clone()).or_insert(0) += 1;
    }
    tf
}

impl BruteForceScorer {
    pub fn new(store: &AuthorityStore) -> Self {
        let mut docs = Vec::new();
        for r in store.records() {
            for (label, role) in std::iter::once((&r.authorized_label, LabelRole::Authorized))
                .chain(r.variant_labels.iter().map(|v| (v, LabelRole::Variant)))
            {
                let tf = term_counts(label);
                if tf.is_empty() {
                    continue;
                }
                docs.push(BruteDoc {
                    record_id: r.id.clone(),
                    label: label.clone(),
                    role,
                    tf,
                });
            }
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in &docs {
            for token in doc.tf.keys() {
                *df.entry(token.clone()).or_insert(0) += 1;
            }
        }
        BruteForceScorer { docs, df }
    }

    fn idf(&self, token: &str) -> Option<f64> {
        let n = self.docs.len() as f64;
        self.df.get(token).map(|&d| ((n + 1.0) / (d as f64 + 1.0)).ln() + 1.0)
    }

    pub fn search(&self, query: &str, k: usize) -> Vec<SearchHit> {
        let qtf = term_counts(query);
        let mut qnorm_sq = 0.0;
        for (t, &c) in &qtf {
            if let Some(w) = self.idf(t) {
                qnorm_sq += (c as f64 * w) * (c as f64 * w);
            }
        }
        if qnorm_sq == 0.0 || k == 0 {
            return Vec::new();
        }
        let qnorm = qnorm_sq.sqrt();

        let mut hits = Vec::new();
        for doc in &self.docs {
            let mut dnorm_sq = 0.0;
            for (t, &c) in &doc.tf {
                let w = c as f64 * self.idf(t).expect("indexed token has df");
                dnorm_sq += w * w;
            }
            let mut dot = 0.0;
            for (t, &qc) in &qtf {
                let Some(w) = self.idf(t) else { continue };
                let Some(&dc) = doc.tf.get(t) else { continue };
                dot += (qc as f64 * w) * (dc as f64 * w);
            }
            if dot > 0.0 {
                hits.push(SearchHit {
                    record_id: doc.record_id.clone(),
                    matched_label: doc.label.clone(),
                    label_role: doc.role,
                    score: dot / (qnorm * dnorm_sq.sqrt()),
                });
            }
        }
        hits.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then_with(|| a.record_id.cmp(&b.record_id))
                .then_with(|| a.label_role.cmp(&b.label_role))
                .then_with(|| a.matched_label.cmp(&b.matched_label))
        });
        hits.truncate(k);
        hits
    }
}
