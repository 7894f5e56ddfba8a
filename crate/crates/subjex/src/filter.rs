//! Quantitative and structural selection rules that reduce an
//! over-generated concept list to an ordered candidate-heading list.
//!
//! Five rules run in sequence: the coverage threshold (with an exception
//! for critical named entities), collapse of four-or-more subtopics onto
//! their broader subject, hierarchy deduplication against the authority
//! store's broader-term links, genre/form routing to 655 candidates, and
//! predominance ordering with genre/form candidates last.
//!
//! Coverage fractions and predominance ranks are inputs: the engine
//! enforces the rules, it never estimates the quantities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::authority::AuthorityStore;

/// Bibliographic surrogate a concept list was derived from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkDescription {
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub summary: String,
    #[serde(default)]
    pub toc: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identifier: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConceptKind {
    Topical,
    Geographic,
    PersonalName,
    CorporateName,
    GenreForm,
    NameTitle,
}

/// Subdivision category. `Form` exists only so that inputs carrying the
/// discontinued category are recognized and rejected with the policy
/// named, rather than failing as unknown data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubdivisionKind {
    Topical,
    Geographic,
    Chronological,
    Form,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionHint {
    #[serde(rename = "type")]
    pub kind: SubdivisionKind,
    pub value: String,
}

/// Marks a concept as one subtopic of a broader subject; concepts sharing
/// a `key` form one group for the subtopic-collapse rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroaderGroup {
    pub key: String,
    pub broader_label: String,
}

/// One candidate topic from conceptual analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub label: String,
    pub kind: ConceptKind,
    /// Fraction of the work devoted to the concept, in [0, 1].
    pub coverage: f64,
    /// 1 = primary focus; unique within one concept list.
    pub predominance_rank: u32,
    #[serde(default)]
    pub critical_entity: bool,
    #[serde(default)]
    pub facet_distinct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broader_group: Option<BroaderGroup>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subdivision_hints: Vec<SubdivisionHint>,
    #[serde(default)]
    pub justification: String,
}

/// Concept-list input document, one per work. This format is the
/// replacement boundary for upstream conceptual analysis: any provider
/// that emits it can drive the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConceptDocument {
    pub work: WorkDescription,
    #[serde(default)]
    pub aboutness: String,
    pub concepts: Vec<Concept>,
}

/// MARC subject field type. 611 exists as a type slot; no concept kind
/// routes to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MarcTag {
    T600,
    T610,
    T611,
    T650,
    T651,
    T655,
}

impl MarcTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MarcTag::T600 => "600",
            MarcTag::T610 => "610",
            MarcTag::T611 => "611",
            MarcTag::T650 => "650",
            MarcTag::T651 => "651",
            MarcTag::T655 => "655",
        }
    }

    pub fn from_str_tag(s: &str) -> Option<MarcTag> {
        match s {
            "600" => Some(MarcTag::T600),
            "610" => Some(MarcTag::T610),
            "611" => Some(MarcTag::T611),
            "650" => Some(MarcTag::T650),
            "651" => Some(MarcTag::T651),
            "655" => Some(MarcTag::T655),
            _ => None,
        }
    }
}

impl std::fmt::Display for MarcTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for MarcTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for MarcTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        MarcTag::from_str_tag(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown MARC tag {s:?}")))
    }
}

/// A concept routed to its intended MARC field type, in assigned order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateHeading {
    pub concept: Concept,
    pub intended_tag: MarcTag,
    pub order_position: u32,
}

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("concept {label:?} has coverage {coverage} outside [0, 1]")]
    InvalidCoverage { label: String, coverage: f64 },
    #[error("group {key:?} carries inconsistent broader labels: {labels:?}")]
    InconsistentGroup { key: String, labels: Vec<String> },
    #[error("duplicate predominance rank {rank} (concepts {first:?} and {second:?})")]
    DuplicateRank { rank: u32, first: String, second: String },
    #[error("name-title concept {label:?} carries no work-title component")]
    MissingWorkTitle { label: String },
    #[error("concept {label:?} carries a form subdivision hint {value:?}; form subdivisions are discontinued under the 2026 policy (use a genre_form concept instead)")]
    FormSubdivisionHint { label: String, value: String },
}

/// A concept removed by the coverage threshold.
#[derive(Debug, Clone, Serialize)]
pub struct DroppedConcept {
    pub label: String,
    pub coverage: f64,
    pub threshold: f64,
}

/// A subtopic group collapsed onto its broader subject.
#[derive(Debug, Clone, Serialize)]
pub struct GroupCollapse {
    pub key: String,
    pub broader_label: String,
    pub member_labels: Vec<String>,
}

/// A concept removed because a kept concept is its narrower term.
#[derive(Debug, Clone, Serialize)]
pub struct DedupRemoval {
    pub label: String,
    pub kept_narrower: Vec<String>,
}

/// A narrower-term note: the store knows terms more specific than the one
/// chosen. Surfaced for review, never auto-substituted.
#[derive(Debug, Clone, Serialize)]
pub struct NarrowerSuggestion {
    pub label: String,
    pub narrower: Vec<String>,
}

pub const DEFAULT_COVERAGE_THRESHOLD: f64 = 0.20;
pub const DEFAULT_DEDUP_DEPTH: usize = 3;

/// Keeps every concept whose coverage meets the threshold, plus critical
/// named entities regardless of coverage. The kept set is exactly
/// `{c : coverage ≥ threshold ∨ critical_entity}`.
pub fn apply_twenty_percent(
    concepts: Vec<Concept>,
    threshold: f64,
) -> (Vec<Concept>, Vec<DroppedConcept>) {
    let mut kept = Vec::with_capacity(concepts.len());
    let mut dropped = Vec::new();
    for c in concepts {
        if c.coverage >= threshold || c.critical_entity {
            kept.push(c);
        } else {
            dropped.push(DroppedConcept { label: c.label, coverage: c.coverage, threshold });
        }
    }
    (kept, dropped)
}

/// Collapses every broader-group with four or more members onto a single
/// synthesized concept labeled with the group's broader subject. The
/// replacement carries the capped coverage sum and the best member rank;
/// it takes the first member's position in the list. Groups of three or
/// fewer pass unchanged.
pub fn apply_rule_of_three(
    concepts: Vec<Concept>,
) -> Result<(Vec<Concept>, Vec<GroupCollapse>), FilterError> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, c) in concepts.iter().enumerate() {
        if let Some(group) = &c.broader_group {
            groups.entry(group.key.clone()).or_default().push(i);
        }
    }

    let mut collapses = Vec::new();
    let mut replaced: BTreeMap<usize, Concept> = BTreeMap::new(); // first-member index -> replacement
    let mut removed: Vec<bool> = vec![false; concepts.len()];

    for (key, members) in &groups {
        let labels: Vec<String> = members
            .iter()
            .map(|&i| concepts[i].broader_group.as_ref().unwrap().broader_label.clone())
            .collect();
        let broader = labels[0].clone();
        if labels.iter().any(|l| l != &broader) {
            let mut distinct = labels.clone();
            distinct.dedup();
            return Err(FilterError::InconsistentGroup { key: key.clone(), labels: distinct });
        }
        if members.len() < 4 {
            continue;
        }
        let coverage_sum: f64 = members.iter().map(|&i| concepts[i].coverage).sum();
        let min_rank = members.iter().map(|&i| concepts[i].predominance_rank).min().unwrap();
        let kinds: Vec<ConceptKind> = members.iter().map(|&i| concepts[i].kind).collect();
        let kind = if kinds.iter().all(|k| *k == kinds[0]) { kinds[0] } else { ConceptKind::Topical };
        let member_labels: Vec<String> =
            members.iter().map(|&i| concepts[i].label.clone()).collect();
        for &i in members {
            removed[i] = true;
        }
        replaced.insert(
            members[0],
            Concept {
                label: broader.clone(),
                kind,
                coverage: coverage_sum.min(1.0),
                predominance_rank: min_rank,
                critical_entity: false,
                facet_distinct: false,
                broader_group: None,
                subdivision_hints: Vec::new(),
                justification: format!(
                    "replaces {} subtopics of {:?} (group {key})",
                    members.len(),
                    broader
                ),
            },
        );
        collapses.push(GroupCollapse { key: key.clone(), broader_label: broader, member_labels });
    }

    let mut out = Vec::with_capacity(concepts.len());
    for (i, c) in concepts.into_iter().enumerate() {
        if let Some(replacement) = replaced.remove(&i) {
            out.push(replacement);
        } else if !removed[i] {
            out.push(c);
        }
    }
    Ok((out, collapses))
}

/// Resolves a concept label to a record id: authorized form first, then
/// variant redirection. Ambiguous labels resolve to nothing here; the
/// validator will surface them.
fn resolve_concept_id(store: &AuthorityStore, label: &str) -> Option<String> {
    if let Ok(Some(rec)) = store.lookup_exact(label) {
        return Some(rec.id.clone());
    }
    if let Ok(Some((rec, _))) = store.resolve_variant(label) {
        return Some(rec.id.clone());
    }
    None
}

/// Removes every concept that is a broader term (within `max_depth` hops)
/// of another kept concept, unless either side is marked facet-distinct.
/// Broadest concepts are removed first, so the surviving set is the most
/// specific one; concepts whose labels do not resolve in the store are
/// never removed.
pub fn apply_depth_dedup(
    concepts: Vec<Concept>,
    store: &AuthorityStore,
    max_depth: usize,
) -> (Vec<Concept>, Vec<DedupRemoval>) {
    let resolved: Vec<Option<String>> = concepts
        .iter()
        .map(|c| resolve_concept_id(store, &c.label))
        .collect();
    let ancestors: Vec<Option<std::collections::BTreeSet<String>>> = resolved
        .iter()
        .map(|id| {
            id.as_ref()
                .and_then(|id| store.ancestor_ids(id, max_depth).ok())
        })
        .collect();

    let mut kept: Vec<bool> = vec![true; concepts.len()];
    let mut removals = Vec::new();

    loop {
        // indices of kept concepts that are ancestors of other kept concepts
        let mut candidates: Vec<(usize, Vec<usize>)> = Vec::new();
        for x in 0..concepts.len() {
            if !kept[x] || concepts[x].facet_distinct {
                continue;
            }
            let Some(x_id) = &resolved[x] else { continue };
            let narrower: Vec<usize> = (0..concepts.len())
                .filter(|&y| {
                    y != x
                        && kept[y]
                        && !concepts[y].facet_distinct
                        && ancestors[y].as_ref().is_some_and(|a| a.contains(x_id))
                })
                .collect();
            if !narrower.is_empty() {
                candidates.push((x, narrower));
            }
        }
        // remove the broadest candidate first: most kept descendants, then
        // least predominant, then label
        let Some((x, narrower)) = candidates
            .into_iter()
            .max_by(|(xa, na), (xb, nb)| {
                na.len()
                    .cmp(&nb.len())
                    .then_with(|| concepts[*xa].predominance_rank.cmp(&concepts[*xb].predominance_rank))
                    .then_with(|| concepts[*xb].label.cmp(&concepts[*xa].label))
            })
        else {
            break;
        };
        kept[x] = false;
        removals.push(DedupRemoval {
            label: concepts[x].label.clone(),
            kept_narrower: narrower.iter().map(|&y| concepts[y].label.clone()).collect(),
        });
    }

    let out = concepts
        .into_iter()
        .zip(kept)
        .filter_map(|(c, keep)| keep.then_some(c))
        .collect();
    (out, removals)
}

/// Maps each concept to its intended MARC field type. Genre/form concepts
/// become 655 candidates; no concept is ever assigned a form subdivision,
/// and hints carrying one are rejected with the policy named.
pub fn route_genre_form(concepts: &[Concept]) -> Result<Vec<CandidateHeading>, FilterError> {
    let mut out = Vec::with_capacity(concepts.len());
    for (i, c) in concepts.iter().enumerate() {
        if let Some(hint) = c.subdivision_hints.iter().find(|h| h.kind == SubdivisionKind::Form) {
            return Err(FilterError::FormSubdivisionHint {
                label: c.label.clone(),
                value: hint.value.clone(),
            });
        }
        let intended_tag = match c.kind {
            ConceptKind::GenreForm => MarcTag::T655,
            ConceptKind::PersonalName => MarcTag::T600,
            ConceptKind::NameTitle => {
                if crate::names::split_name_title(&c.label).is_none() {
                    return Err(FilterError::MissingWorkTitle { label: c.label.clone() });
                }
                MarcTag::T600
            }
            ConceptKind::CorporateName => MarcTag::T610,
            ConceptKind::Geographic => MarcTag::T651,
            ConceptKind::Topical => MarcTag::T650,
        };
        out.push(CandidateHeading {
            concept: c.clone(),
            intended_tag,
            order_position: (i + 1) as u32,
        });
    }
    Ok(out)
}

/// Sorts candidates by predominance rank, genre/form candidates after all
/// others regardless of rank, and assigns order positions 1..n. Duplicate
/// ranks are a configuration error.
pub fn order_by_predominance(
    mut candidates: Vec<CandidateHeading>,
) -> Result<Vec<CandidateHeading>, FilterError> {
    let mut seen: BTreeMap<u32, &str> = BTreeMap::new();
    for c in &candidates {
        if let Some(first) = seen.insert(c.concept.predominance_rank, &c.concept.label) {
            return Err(FilterError::DuplicateRank {
                rank: c.concept.predominance_rank,
                first: first.to_owned(),
                second: c.concept.label.clone(),
            });
        }
    }
    candidates.sort_by_key(|c| (c.intended_tag == MarcTag::T655, c.concept.predominance_rank));
    for (i, c) in candidates.iter_mut().enumerate() {
        c.order_position = (i + 1) as u32;
    }
    Ok(candidates)
}

#[derive(Debug, Clone, Copy)]
pub struct FilterOptions {
    pub coverage_threshold: f64,
    pub dedup_depth: usize,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            coverage_threshold: DEFAULT_COVERAGE_THRESHOLD,
            dedup_depth: DEFAULT_DEDUP_DEPTH,
        }
    }
}

/// Everything the filter stage decided, for the stage report.
#[derive(Debug, Serialize)]
pub struct FilterOutcome {
    pub candidates: Vec<CandidateHeading>,
    pub dropped_below_threshold: Vec<DroppedConcept>,
    pub group_collapses: Vec<GroupCollapse>,
    pub dedup_removals: Vec<DedupRemoval>,
    pub narrower_suggestions: Vec<NarrowerSuggestion>,
}

/// Runs the whole filter pass: threshold, subtopic collapse, hierarchy
/// dedup, routing, ordering. Deterministic, and idempotent on its own
/// surviving concepts.
pub fn run_filter(
    document: &ConceptDocument,
    store_lcsh: &AuthorityStore,
    options: &FilterOptions,
) -> Result<FilterOutcome, FilterError> {
    for c in &document.concepts {
        if !(0.0..=1.0).contains(&c.coverage) || c.coverage.is_nan() {
            return Err(FilterError::InvalidCoverage {
                label: c.label.clone(),
                coverage: c.coverage,
            });
        }
    }
    let (kept, dropped) =
        apply_twenty_percent(document.concepts.clone(), options.coverage_threshold);
    let (kept, collapses) = apply_rule_of_three(kept)?;
    let (kept, removals) = apply_depth_dedup(kept, store_lcsh, options.dedup_depth);

    let mut suggestions = Vec::new();
    for c in &kept {
        if let Some(id) = resolve_concept_id(store_lcsh, &c.label) {
            let rec = store_lcsh.get(&id).expect("resolved id present");
            if !rec.narrower_ids.is_empty() {
                let narrower = rec
                    .narrower_ids
                    .iter()
                    .map(|nid| {
                        store_lcsh
                            .get(nid)
                            .map(|r| r.authorized_label.clone())
                            .unwrap_or_else(|| nid.clone())
                    })
                    .collect();
                suggestions.push(NarrowerSuggestion { label: c.label.clone(), narrower });
            }
        }
    }

    let routed = route_genre_form(&kept)?;
    let candidates = order_by_predominance(routed)?;
    Ok(FilterOutcome {
        candidates,
        dropped_below_threshold: dropped,
        group_collapses: collapses,
        dedup_removals: removals,
        narrower_suggestions: suggestions,
    })
}
