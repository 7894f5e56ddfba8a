//! In-memory authority vocabulary store loaded from canonical NDJSON.
//!
//! One line of input is one record: `{"id", "scheme", "kind", "authorized",
//! "variants", "broader", "narrower", "geo_subdividable"}` with unknown
//! fields ignored. The store is immutable after load and safe to share
//! across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::normalize;

/// Which controlled vocabulary a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Lcsh,
    Lcgft,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Lcsh => write!(f, "lcsh"),
            Scheme::Lcgft => write!(f, "lcgft"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Topical,
    Geographic,
    GenreForm,
}

/// One controlled-vocabulary entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorityRecord {
    pub id: String,
    pub scheme: Scheme,
    pub kind: RecordKind,
    pub authorized_label: String,
    pub variant_labels: Vec<String>,
    pub broader_ids: Vec<String>,
    pub narrower_ids: Vec<String>,
    pub geo_subdividable: bool,
}

#[derive(Debug, Error)]
pub enum AuthorityError {
    #[error("cannot read authority file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ambiguous authorized label {label:?}: records {ids:?}")]
    AmbiguousAuthorized { label: String, ids: Vec<String> },
    #[error("ambiguous variant {label:?}: owned by records {ids:?}")]
    AmbiguousVariant { label: String, ids: Vec<String> },
    #[error("unknown record id {0:?}")]
    UnknownId(String),
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
}

/// A rejected input line and why it was rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

/// A broader/narrower reference to an id absent from the store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DanglingLink {
    pub from_id: String,
    pub missing_id: String,
    pub link: LinkKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Broader,
    Narrower,
}

/// What happened during a load: accepted count, rejected lines, duplicate
/// ids, and dangling hierarchy links. Partial vocabulary extracts are the
/// normal fixture, so dangling links are reported rather than fatal.
#[derive(Debug, Default, Clone, Serialize)]
pub struct LoadReport {
    pub loaded: usize,
    pub skipped: Vec<SkippedLine>,
    pub duplicates: Vec<SkippedLine>,
    pub dangling: Vec<DanglingLink>,
}

/// Normalized, queryable view over a set of authority records.
pub struct AuthorityStore {
    scheme: Scheme,
    records: Vec<AuthorityRecord>,
    by_id: BTreeMap<String, usize>,
    by_authorized: BTreeMap<String, Vec<usize>>,
    by_variant: BTreeMap<String, Vec<(usize, usize)>>,
}

impl AuthorityStore {
    /// Assembles a store from records already known to be individually
    /// valid. Duplicate ids are an error; dangling links are returned for
    /// the caller to report.
    pub fn from_records(
        scheme: Scheme,
        records: Vec<AuthorityRecord>,
    ) -> Result<(Self, Vec<DanglingLink>), AuthorityError> {
        let mut by_id = BTreeMap::new();
        for (i, rec) in records.iter().enumerate() {
            if by_id.insert(rec.id.clone(), i).is_some() {
                return Err(AuthorityError::DuplicateId(rec.id.clone()));
            }
        }
        let mut by_authorized: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_variant: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, rec) in records.iter().enumerate() {
            by_authorized
                .entry(normalize(&rec.authorized_label).key())
                .or_default()
                .push(i);
            for (vi, v) in rec.variant_labels.iter().enumerate() {
                let key = normalize(v).key();
                if key.is_empty() {
                    continue;
                }
                by_variant.entry(key).or_default().push((i, vi));
            }
        }
        let mut dangling = Vec::new();
        for rec in &records {
            for b in &rec.broader_ids {
                if !by_id.contains_key(b) {
                    dangling.push(DanglingLink {
                        from_id: rec.id.clone(),
                        missing_id: b.clone(),
                        link: LinkKind::Broader,
                    });
                }
            }
            for n in &rec.narrower_ids {
                if !by_id.contains_key(n) {
                    dangling.push(DanglingLink {
                        from_id: rec.id.clone(),
                        missing_id: n.clone(),
                        link: LinkKind::Narrower,
                    });
                }
            }
        }
        Ok((
            AuthorityStore {
                scheme,
                records,
                by_id,
                by_authorized,
                by_variant,
            },
            dangling,
        ))
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in load order.
    pub fn records(&self) -> &[AuthorityRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&AuthorityRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    /// Finds the record whose normalized authorized label equals the
    /// normalized input, or `None`. Two records sharing one normalized
    /// authorized label is an ambiguity error listing both ids.
    pub fn lookup_exact(&self, label: &str) -> Result<Option<&AuthorityRecord>, AuthorityError> {
        let key = normalize(label).key();
        if key.is_empty() {
            return Ok(None);
        }
        match self.by_authorized.get(&key) {
            None => Ok(None),
            Some(idxs) if idxs.len() == 1 => Ok(Some(&self.records[idxs[0]])),
            Some(idxs) => Err(AuthorityError::AmbiguousAuthorized {
                label: label.to_owned(),
                ids: idxs.iter().map(|&i| self.records[i].id.clone()).collect(),
            }),
        }
    }

    /// Finds the record owning a variant (UF reference) whose normalization
    /// equals the normalized input. Authorized labels are deliberately not
    /// consulted here; callers try `lookup_exact` first. A variant owned by
    /// multiple records is an ambiguity error listing all owners.
    pub fn resolve_variant(
        &self,
        label: &str,
    ) -> Result<Option<(&AuthorityRecord, &str)>, AuthorityError> {
        let key = normalize(label).key();
        if key.is_empty() {
            return Ok(None);
        }
        match self.by_variant.get(&key) {
            None => Ok(None),
            Some(entries) => {
                let mut owners: Vec<usize> = entries.iter().map(|&(i, _)| i).collect();
                owners.dedup();
                if owners.len() > 1 {
                    return Err(AuthorityError::AmbiguousVariant {
                        label: label.to_owned(),
                        ids: owners.iter().map(|&i| self.records[i].id.clone()).collect(),
                    });
                }
                let (i, vi) = entries[0];
                Ok(Some((&self.records[i], self.records[i].variant_labels[vi].as_str())))
            }
        }
    }

    /// Enumerates every ancestor path from `id` along broader links, up to
    /// `max_depth` hops, in depth-first preorder. Cycle-safe: an id already
    /// on the current path (including the root) is never expanded again.
    /// Dangling broader ids appear as path elements but are not expanded.
    pub fn broader_chain(
        &self,
        id: &str,
        max_depth: usize,
    ) -> Result<Vec<Vec<String>>, AuthorityError> {
        let &root = self
            .by_id
            .get(id)
            .ok_or_else(|| AuthorityError::UnknownId(id.to_owned()))?;
        let mut paths = Vec::new();
        let mut path = Vec::new();
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        visited.insert(&self.records[root].id);
        self.walk_broader(root, max_depth, &mut path, &mut visited, &mut paths);
        Ok(paths)
    }

    fn walk_broader<'a>(
        &'a self,
        rec_idx: usize,
        depth_left: usize,
        path: &mut Vec<String>,
        visited: &mut BTreeSet<&'a str>,
        paths: &mut Vec<Vec<String>>,
    ) {
        if depth_left == 0 {
            return;
        }
        for broader in &self.records[rec_idx].broader_ids {
            if visited.contains(broader.as_str()) {
                continue;
            }
            path.push(broader.clone());
            paths.push(path.clone());
            if let Some(&bi) = self.by_id.get(broader) {
                visited.insert(broader);
                self.walk_broader(bi, depth_left - 1, path, visited, paths);
                visited.remove(broader.as_str());
            }
            path.pop();
        }
    }

    /// Flattened set of all ancestor ids reachable within `max_depth`.
    pub fn ancestor_ids(&self, id: &str, max_depth: usize) -> Result<BTreeSet<String>, AuthorityError> {
        Ok(self
            .broader_chain(id, max_depth)?
            .into_iter()
            .flatten()
            .collect())
    }
}

/// Canonical NDJSON line shape. Unknown fields are ignored.
#[derive(Deserialize)]
struct RawRecord {
    id: String,
    scheme: Scheme,
    kind: RecordKind,
    authorized: String,
    #[serde(default)]
    variants: Vec<String>,
    #[serde(default)]
    broader: Vec<String>,
    #[serde(default)]
    narrower: Vec<String>,
    #[serde(default)]
    geo_subdividable: bool,
}

fn validate_raw(raw: &RawRecord, expected: Scheme) -> Result<(), String> {
    if raw.id.trim().is_empty() {
        return Err("empty id".into());
    }
    if raw.authorized.trim().is_empty() {
        return Err("empty authorized label".into());
    }
    if raw.scheme != expected {
        return Err(format!("scheme {} does not match requested {expected}", raw.scheme));
    }
    match (raw.scheme, raw.kind) {
        (Scheme::Lcgft, RecordKind::GenreForm) => {}
        (Scheme::Lcgft, _) => return Err("lcgft records must have kind genre_form".into()),
        (Scheme::Lcsh, RecordKind::GenreForm) => {
            return Err("lcsh records must not have kind genre_form".into())
        }
        (Scheme::Lcsh, _) => {}
    }
    if raw.broader.iter().any(|b| b == &raw.id) {
        return Err("record lists itself as broader (self-loop)".into());
    }
    Ok(())
}

/// Loads a canonical NDJSON authority file. Malformed lines are skipped and
/// reported with their line numbers; a line reusing an already-loaded id is
/// rejected and reported; dangling broader/narrower links are reported.
/// Only an unreadable file is fatal.
pub fn load_authorities(
    path: &Path,
    scheme: Scheme,
) -> Result<(AuthorityStore, LoadReport), AuthorityError> {
    let file = File::open(path).map_err(|e| AuthorityError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut records: Vec<AuthorityRecord> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut report = LoadReport::default();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| AuthorityError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                report.skipped.push(SkippedLine {
                    line: lineno,
                    reason: format!("invalid record: {e}"),
                });
                continue;
            }
        };
        if let Err(reason) = validate_raw(&raw, scheme) {
            report.skipped.push(SkippedLine { line: lineno, reason });
            continue;
        }
        if !seen.insert(raw.id.clone()) {
            report.duplicates.push(SkippedLine {
                line: lineno,
                reason: format!("duplicate id {:?}", raw.id),
            });
            continue;
        }
        records.push(AuthorityRecord {
            id: raw.id,
            scheme: raw.scheme,
            kind: raw.kind,
            authorized_label: raw.authorized,
            variant_labels: raw.variants,
            broader_ids: raw.broader,
            narrower_ids: raw.narrower,
            geo_subdividable: raw.geo_subdividable,
        });
    }

    let (store, dangling) = AuthorityStore::from_records(scheme, records)?;
    report.loaded = store.len();
    report.dangling = dangling;
    Ok((store, report))
}
