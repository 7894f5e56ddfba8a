//! TF-IDF retrieval index over authorized and variant labels.
//!
//! Every authorized label and every variant label becomes one searchable
//! document, so a variant can outrank an unrelated authorized label;
//! `classify` keeps exact matches ahead of fuzzy ones. Weighting is raw
//! term frequency times smoothed log idf, scored by cosine similarity.
//!
//! Dot products and norms are accumulated over tokens in sorted order so
//! that scores are bit-reproducible against an independent scorer using
//! the same conventions.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::authority::{AuthorityError, AuthorityRecord, AuthorityStore, Scheme};
use crate::normalize::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelRole {
    Authorized,
    Variant,
}

/// One searchable document: a single label of a single record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexDoc {
    pub record_id: String,
    pub label: String,
    pub role: LabelRole,
    norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Posting {
    doc: u32,
    tf: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermIndex {
    docs: Vec<IndexDoc>,
    postings: BTreeMap<String, Vec<Posting>>,
    idf: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchHit {
    pub record_id: String,
    pub matched_label: String,
    pub label_role: LabelRole,
    /// Cosine similarity in [0, 1].
    pub score: f64,
}

/// Outcome of looking a candidate heading up against one store.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "match", rename_all = "snake_case")]
pub enum MatchClass {
    Authorized { record_id: String },
    VariantOf { record_id: String, matched_variant: String },
    Fuzzy { hits: Vec<SearchHit> },
    NotFound,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Minimum cosine similarity for a fuzzy suggestion.
    pub fuzzy_threshold: f64,
    /// Maximum number of fuzzy suggestions.
    pub k: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { fuzzy_threshold: 0.60, k: 5 }
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("stored norm for document {doc} drifts from recomputed value ({stored} vs {actual})")]
    NormDrift { doc: usize, stored: f64, actual: f64 },
    #[error("cache io error at {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cache at {path} is not a subjex index cache")]
    CacheMagic { path: String },
    #[error("cache at {path} has format version {found}, expected {expected}")]
    CacheVersion { path: String, found: u32, expected: u32 },
    #[error("cache at {path} was built from different source content")]
    CacheStale { path: String },
    #[error("cache at {path} is corrupt: {detail}")]
    CacheCorrupt { path: String, detail: String },
}

/// Smoothed idf: `ln((N+1)/(df+1)) + 1`.
fn idf_value(doc_count: usize, df: usize) -> f64 {
    ((doc_count as f64 + 1.0) / (df as f64 + 1.0)).ln() + 1.0
}

/// Builds the index: one document per authorized label and per variant
/// label, in store order. Labels that normalize to no tokens produce no
/// document. An empty store yields a valid empty index.
pub fn build_index(store: &AuthorityStore) -> TermIndex {
    let mut docs: Vec<IndexDoc> = Vec::new();
    let mut doc_tokens: Vec<BTreeMap<String, u32>> = Vec::new();

    let push_doc = |record: &AuthorityRecord, label: &str, role: LabelRole,
                        docs: &mut Vec<IndexDoc>,
                        doc_tokens: &mut Vec<BTreeMap<String, u32>>| {
        let normalized = normalize(label);
        if normalized.is_empty() {
            return;
        }
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in normalized.tokens() {
            *tf.entry(t.clone()).or_insert(0) += 1;
        }
        docs.push(IndexDoc {
            record_id: record.id.clone(),
            label: label.to_owned(),
            role,
            norm: 0.0,
        });
        doc_tokens.push(tf);
    };

    for record in store.records() {
        push_doc(record, &record.authorized_label, LabelRole::Authorized, &mut docs, &mut doc_tokens);
        for v in &record.variant_labels {
            push_doc(record, v, LabelRole::Variant, &mut docs, &mut doc_tokens);
        }
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    for (doc_id, tf) in doc_tokens.iter().enumerate() {
        for (token, &count) in tf {
            postings
                .entry(token.clone())
                .or_default()
                .push(Posting { doc: doc_id as u32, tf: count });
        }
    }

    let doc_count = docs.len();
    let idf: BTreeMap<String, f64> = postings
        .iter()
        .map(|(token, plist)| (token.clone(), idf_value(doc_count, plist.len())))
        .collect();

    for (doc_id, tf) in doc_tokens.iter().enumerate() {
        let mut sq = 0.0;
        for (token, &count) in tf {
            let w = count as f64 * idf[token];
            sq += w * w;
        }
        docs[doc_id].norm = sq.sqrt();
    }

    TermIndex { docs, postings, idf }
}

impl TermIndex {
    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn docs(&self) -> &[IndexDoc] {
        &self.docs
    }

    /// Document frequency of a token.
    pub fn df(&self, token: &str) -> usize {
        self.postings.get(token).map_or(0, Vec::len)
    }

    /// Idf weight of a token, if it occurs in any document.
    pub fn idf(&self, token: &str) -> Option<f64> {
        self.idf.get(token).copied()
    }

    /// Top-k documents by cosine similarity against the query. Unknown
    /// query tokens contribute zero weight. Ties break by record id
    /// ascending, then authorized before variant, then label.
    pub fn search(&self, query: &str, k: usize) -> Vec<SearchHit> {
        let normalized = normalize(query);
        if normalized.is_empty() || k == 0 {
            return Vec::new();
        }
        let mut qtf: BTreeMap<&str, u32> = BTreeMap::new();
        for t in normalized.tokens() {
            *qtf.entry(t.as_str()).or_insert(0) += 1;
        }

        let mut qnorm_sq = 0.0;
        for (token, &count) in &qtf {
            if let Some(idf) = self.idf.get(*token) {
                let w = count as f64 * idf;
                qnorm_sq += w * w;
            }
        }
        if qnorm_sq == 0.0 {
            return Vec::new();
        }
        let qnorm = qnorm_sq.sqrt();

        let mut candidates: BTreeSet<u32> = BTreeSet::new();
        for token in qtf.keys() {
            if let Some(plist) = self.postings.get(*token) {
                candidates.extend(plist.iter().map(|p| p.doc));
            }
        }

        let mut hits: Vec<SearchHit> = Vec::with_capacity(candidates.len());
        for doc_id in candidates {
            let mut dot = 0.0;
            for (token, &qcount) in &qtf {
                let Some(idf) = self.idf.get(*token) else { continue };
                let Some(plist) = self.postings.get(*token) else { continue };
                if let Ok(pos) = plist.binary_search_by_key(&doc_id, |p| p.doc) {
                    let qw = qcount as f64 * idf;
                    let dw = plist[pos].tf as f64 * idf;
                    dot += qw * dw;
                }
            }
            if dot <= 0.0 {
                continue;
            }
            let doc = &self.docs[doc_id as usize];
            hits.push(SearchHit {
                record_id: doc.record_id.clone(),
                matched_label: doc.label.clone(),
                label_role: doc.role,
                score: dot / (qnorm * doc.norm),
            });
        }
        sort_hits(&mut hits);
        hits.truncate(k);
        hits
    }

    /// Recomputes invariants: stored norms within 1e-9 relative tolerance
    /// of norms recomputed from postings, and df consistent with postings.
    pub fn verify(&self) -> Result<(), IndexError> {
        let mut sums = vec![0.0f64; self.docs.len()];
        for (token, plist) in &self.postings {
            let idf = self.idf[token];
            for p in plist {
                let w = p.tf as f64 * idf;
                sums[p.doc as usize] += w * w;
            }
        }
        for (i, doc) in self.docs.iter().enumerate() {
            let actual = sums[i].sqrt();
            let tol = 1e-9 * actual.max(1.0);
            if (doc.norm - actual).abs() > tol {
                return Err(IndexError::NormDrift { doc: i, stored: doc.norm, actual });
            }
        }
        Ok(())
    }
}

/// Deterministic hit ordering: score descending, then record id, then
/// authorized before variant, then label.
fn sort_hits(hits: &mut [SearchHit]) {
    hits.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| a.record_id.cmp(&b.record_id))
            .then_with(|| a.label_role.cmp(&b.label_role))
            .then_with(|| a.matched_label.cmp(&b.matched_label))
    });
}

/// Classifies a query with exact-match precedence: authorized label, then
/// variant, then fuzzy hits at or above the threshold, then not found.
/// Exactly one branch fires; ambiguity errors from the store propagate.
pub fn classify(
    store: &AuthorityStore,
    index: &TermIndex,
    query: &str,
    options: &SearchOptions,
) -> Result<MatchClass, AuthorityError> {
    if let Some(record) = store.lookup_exact(query)? {
        return Ok(MatchClass::Authorized { record_id: record.id.clone() });
    }
    if let Some((record, variant)) = store.resolve_variant(query)? {
        return Ok(MatchClass::VariantOf {
            record_id: record.id.clone(),
            matched_variant: variant.to_owned(),
        });
    }
    let mut hits = index.search(query, options.k);
    hits.retain(|h| h.score >= options.fuzzy_threshold);
    if hits.is_empty() {
        Ok(MatchClass::NotFound)
    } else {
        Ok(MatchClass::Fuzzy { hits })
    }
}

const CACHE_MAGIC: &[u8; 4] = b"SJXI";
const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheBody {
    scheme: Scheme,
    records: Vec<AuthorityRecord>,
    index: TermIndex,
}

/// Sha-256 of a source file's bytes; keys the index cache.
pub fn hash_file(path: &Path) -> Result<[u8; 32], IndexError> {
    let mut file = fs::File::open(path).map_err(|e| IndexError::CacheIo {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| IndexError::CacheIo {
            path: path.display().to_string(),
            source: e,
        })?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().into())
}

/// Writes a versioned binary snapshot of a loaded store and its index,
/// keyed by the content hash of the source NDJSON.
pub fn write_cache(
    path: &Path,
    source_hash: [u8; 32],
    store: &AuthorityStore,
    index: &TermIndex,
) -> Result<(), IndexError> {
    let body = CacheBody {
        scheme: store.scheme(),
        records: store.records().to_vec(),
        index: index.clone(),
    };
    let payload = bincode::serialize(&body).map_err(|e| IndexError::CacheCorrupt {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let io_err = |e| IndexError::CacheIo { path: path.display().to_string(), source: e };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(CACHE_MAGIC).map_err(io_err)?;
    file.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io_err)?;
    file.write_all(&source_hash).map_err(io_err)?;
    file.write_all(&payload).map_err(io_err)?;
    Ok(())
}

/// Reads a cache snapshot back, rejecting wrong magic, wrong format
/// version, or a hash that no longer matches the source content.
pub fn read_cache(
    path: &Path,
    expected_hash: [u8; 32],
) -> Result<(AuthorityStore, TermIndex), IndexError> {
    let data = fs::read(path).map_err(|e| IndexError::CacheIo {
        path: path.display().to_string(),
        source: e,
    })?;
    let p = path.display().to_string();
    if data.len() < 4 + 4 + 32 || &data[..4] != CACHE_MAGIC {
        return Err(IndexError::CacheMagic { path: p });
    }
    let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(IndexError::CacheVersion { path: p, found: version, expected: CACHE_VERSION });
    }
    if data[8..40] != expected_hash {
        return Err(IndexError::CacheStale { path: p });
    }
    let body: CacheBody = bincode::deserialize(&data[40..])
        .map_err(|e| IndexError::CacheCorrupt { path: p.clone(), detail: e.to_string() })?;
    let (store, _) = AuthorityStore::from_records(body.scheme, body.records)
        .map_err(|e| IndexError::CacheCorrupt { path: p, detail: e.to_string() })?;
    Ok((store, body.index))
}
