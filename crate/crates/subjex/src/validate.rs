//! Authority validation: dispatches each candidate heading to the correct
//! authority source, resolves authorized forms, and authorizes geographic
//! subdivisions by the indirect method.
//!
//! Topical and geographic bases go to the LCSH store, genre/form bases to
//! the LCGFT store, and name bases to the name-suggestion client. A fuzzy
//! or missing match is a rejection carrying the match evidence; transport
//! failures from the name client are a separate error class so callers can
//! distinguish service trouble from a genuine not-found.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::authority::{AuthorityError, AuthorityRecord, AuthorityStore};
use crate::filter::{CandidateHeading, ConceptKind, MarcTag, SubdivisionKind};
use crate::index::{classify, MatchClass, SearchOptions, TermIndex};
use crate::names::{accept_name, split_name_title, NameClient, NameError, NameHit};
use crate::normalize::normalize;
use crate::synth::OrderMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationStatus {
    Authorized,
    VariantRedirected,
    NameConfirmed,
}

/// Name parts for 600/610 synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameComponents {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dates: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSubdivision {
    #[serde(rename = "type")]
    pub kind: SubdivisionKind,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authority_id: Option<String>,
}

/// An authority-confirmed heading, ready for field synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatedHeading {
    pub candidate: CandidateHeading,
    pub authorized_base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authority_id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolved_subdivisions: Vec<ResolvedSubdivision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name_components: Option<NameComponents>,
    pub status: ValidationStatus,
    /// How synthesis should order the subdivisions.
    #[serde(default)]
    pub order: OrderMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ValidatedHeading {
    /// Re-asserts the structural invariants: non-empty base, an LCGFT
    /// authority id on every 655, and no form-typed subdivision.
    pub fn check(&self) -> Result<(), ValidateError> {
        if self.authorized_base.trim().is_empty() {
            return Err(ValidateError::Invariant("authorized base is empty".into()));
        }
        if self.candidate.intended_tag == MarcTag::T655 && self.authority_id.is_none() {
            return Err(ValidateError::Invariant(
                "655 heading lacks an LCGFT authority id".into(),
            ));
        }
        if let Some(sub) = self
            .resolved_subdivisions
            .iter()
            .find(|s| s.kind == SubdivisionKind::Form)
        {
            return Err(ValidateError::Invariant(format!(
                "form subdivision {:?} present; form subdivisions are discontinued under the 2026 policy",
                sub.value
            )));
        }
        Ok(())
    }
}

/// Why a candidate was not validated.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectionReason {
    /// No authorized or variant match; fuzzy suggestions may be attached.
    NotAuthorized { evidence: MatchClass },
    /// No suggestion hit satisfied the name acceptance policy.
    NameNotConfirmed { hits: Vec<NameHit> },
    /// Base heading is not authorized for geographic subdivision.
    GeoNotSubdividable { base: String },
    /// A local place arrived without a recognizable containing jurisdiction.
    GeoUnknownJurisdiction { place_path: Vec<String> },
    /// A chronological subdivision failed the syntactic check.
    BadChronological { value: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Rejection {
    pub label: String,
    pub tag: MarcTag,
    #[serde(flatten)]
    pub reason: RejectionReason,
}

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("candidate {} (tag {}) rejected", .0.label, .0.tag)]
    Rejected(Box<Rejection>),
    #[error("name service failure: {0}")]
    Name(#[from] NameError),
    #[error("authority store failure: {0}")]
    Store(#[from] AuthorityError),
    #[error("validated heading violates an invariant: {0}")]
    Invariant(String),
}

/// Jurisdictions for the indirect geographic subdivision method: countries
/// interpose themselves before local places; first-order exceptions stand
/// in for their country. Packaged defaults are editable via a JSON file of
/// the same shape.
pub struct GeoPolicy {
    countries: BTreeSet<String>,
    first_order: BTreeSet<String>,
}

#[derive(Deserialize)]
struct GeoPolicyFile {
    countries: Vec<String>,
    first_order_exceptions: Vec<String>,
}

#[derive(Debug, Error)]
pub enum GeoPolicyError {
    #[error("cannot read geo policy {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid geo policy {path}: {detail}")]
    Invalid { path: String, detail: String },
}

impl GeoPolicy {
    fn from_file(file: GeoPolicyFile) -> Self {
        GeoPolicy {
            countries: file.countries.iter().map(|c| normalize(c).key()).collect(),
            first_order: file
                .first_order_exceptions
                .iter()
                .map(|c| normalize(c).key())
                .collect(),
        }
    }

    /// The packaged default table.
    pub fn packaged() -> Self {
        let file: GeoPolicyFile = serde_json::from_str(include_str!("data/geo.json"))
            .expect("packaged geo table parses");
        Self::from_file(file)
    }

    pub fn from_path(path: &Path) -> Result<Self, GeoPolicyError> {
        let text = std::fs::read_to_string(path).map_err(|e| GeoPolicyError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let file: GeoPolicyFile =
            serde_json::from_str(&text).map_err(|e| GeoPolicyError::Invalid {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
        Ok(Self::from_file(file))
    }

    pub fn is_country(&self, place: &str) -> bool {
        self.countries.contains(&normalize(place).key())
    }

    pub fn is_first_order_exception(&self, place: &str) -> bool {
        self.first_order.contains(&normalize(place).key())
    }

    /// Recognized as a jurisdiction that may stand first in an indirect
    /// subdivision.
    pub fn is_jurisdiction(&self, place: &str) -> bool {
        self.is_country(place) || self.is_first_order_exception(place)
    }
}

impl Default for GeoPolicy {
    fn default() -> Self {
        Self::packaged()
    }
}

/// Applies the indirect method to a local-to-largest place path: the
/// containing country — or the first-order jurisdiction that stands in for
/// it — comes first, then the local place. A base not authorized for
/// geographic subdivision, or a local place without a recognizable
/// containing jurisdiction, is a rejection.
pub fn authorize_geo_subdivision(
    policy: &GeoPolicy,
    base: &AuthorityRecord,
    place_path: &[String],
) -> Result<Vec<String>, Box<Rejection>> {
    let reject = |reason: RejectionReason| {
        Box::new(Rejection {
            label: base.authorized_label.clone(),
            tag: MarcTag::T650,
            reason,
        })
    };
    if !base.geo_subdividable {
        return Err(reject(RejectionReason::GeoNotSubdividable {
            base: base.authorized_label.clone(),
        }));
    }
    if place_path.is_empty() {
        return Err(reject(RejectionReason::GeoUnknownJurisdiction { place_path: vec![] }));
    }
    // the first-order exception closest to the local end wins; otherwise
    // the largest element must be a country
    let jurisdiction = place_path
        .iter()
        .find(|p| policy.is_first_order_exception(p))
        .or_else(|| {
            let last = place_path.last().unwrap();
            policy.is_country(last).then_some(last)
        })
        .ok_or_else(|| {
            reject(RejectionReason::GeoUnknownJurisdiction { place_path: place_path.to_vec() })
        })?;
    let local = &place_path[0];
    if normalize(jurisdiction) == normalize(local) {
        Ok(vec![jurisdiction.clone()])
    } else {
        Ok(vec![jurisdiction.clone(), local.clone()])
    }
}

/// Syntactic shape of a chronological subdivision: a year or year range
/// (possibly open), a century phrase, or a "To `<year>`" span, with optional
/// leading words ("Early modern, 1500-1700").
pub fn chronological_is_plausible(value: &str) -> bool {
    static PATTERN: std::sync::OnceLock<regex::Regex> = std::sync::OnceLock::new();
    let re = PATTERN.get_or_init(|| {
        regex::Regex::new(
            r"(?ix)
            \d{3,4}\s*-\s*\d{0,4}   # range or open range: 1500-1700, 2006-
            | ^\s*to\s+\d{3,4}      # To 1500
            | \b\d{1,2}(st|nd|rd|th)\s+century
            | ^\s*\d{3,4}\s*$       # bare year
            ",
        )
        .expect("chronological pattern compiles")
    });
    re.is_match(value)
}

/// Everything validation reads. Stores and indexes are shared read-only;
/// the name client serializes its own traffic.
pub struct ValidationContext<'a> {
    pub store_lcsh: &'a AuthorityStore,
    pub store_lcgft: &'a AuthorityStore,
    pub index_lcsh: &'a TermIndex,
    pub index_lcgft: &'a TermIndex,
    pub names: &'a NameClient,
    pub geo: &'a GeoPolicy,
    pub search: SearchOptions,
    pub default_order: OrderMode,
}

impl<'a> ValidationContext<'a> {
    fn classify_base(
        &self,
        scheme_store: &'a AuthorityStore,
        index: &TermIndex,
        label: &str,
    ) -> Result<MatchClass, AuthorityError> {
        classify(scheme_store, index, label, &self.search)
    }
}

/// Validates one candidate heading. The result is a `ValidatedHeading`
/// ready for synthesis, or a rejection carrying the authority evidence.
pub fn validate_candidate(
    ctx: &ValidationContext<'_>,
    candidate: &CandidateHeading,
) -> Result<ValidatedHeading, ValidateError> {
    let concept = &candidate.concept;
    let reject = |reason: RejectionReason| {
        ValidateError::Rejected(Box::new(Rejection {
            label: concept.label.clone(),
            tag: candidate.intended_tag,
            reason,
        }))
    };

    let mut notes: Vec<String> = Vec::new();
    let mut name_components = None;

    let (authorized_base, authority_id, status) = match concept.kind {
        ConceptKind::Topical | ConceptKind::Geographic => {
            match ctx.classify_base(ctx.store_lcsh, ctx.index_lcsh, &concept.label)? {
                MatchClass::Authorized { record_id } => {
                    let rec = ctx.store_lcsh.get(&record_id).expect("classified id exists");
                    (rec.authorized_label.clone(), Some(record_id), ValidationStatus::Authorized)
                }
                MatchClass::VariantOf { record_id, matched_variant } => {
                    let rec = ctx.store_lcsh.get(&record_id).expect("classified id exists");
                    notes.push(format!(
                        "variant {:?} (matched {:?}) redirected to authorized form {:?}",
                        concept.label, matched_variant, rec.authorized_label
                    ));
                    (
                        rec.authorized_label.clone(),
                        Some(record_id),
                        ValidationStatus::VariantRedirected,
                    )
                }
                evidence @ (MatchClass::Fuzzy { .. } | MatchClass::NotFound) => {
                    return Err(reject(RejectionReason::NotAuthorized { evidence }))
                }
            }
        }
        ConceptKind::GenreForm => {
            match ctx.classify_base(ctx.store_lcgft, ctx.index_lcgft, &concept.label)? {
                MatchClass::Authorized { record_id } => {
                    let rec = ctx.store_lcgft.get(&record_id).expect("classified id exists");
                    (rec.authorized_label.clone(), Some(record_id), ValidationStatus::Authorized)
                }
                MatchClass::VariantOf { record_id, matched_variant } => {
                    let rec = ctx.store_lcgft.get(&record_id).expect("classified id exists");
                    notes.push(format!(
                        "variant {:?} (matched {:?}) redirected to authorized form {:?}",
                        concept.label, matched_variant, rec.authorized_label
                    ));
                    (
                        rec.authorized_label.clone(),
                        Some(record_id),
                        ValidationStatus::VariantRedirected,
                    )
                }
                evidence @ (MatchClass::Fuzzy { .. } | MatchClass::NotFound) => {
                    return Err(reject(RejectionReason::NotAuthorized { evidence }))
                }
            }
        }
        ConceptKind::PersonalName | ConceptKind::CorporateName | ConceptKind::NameTitle => {
            let (name_part, work_title) = match concept.kind {
                ConceptKind::NameTitle => {
                    let (name, title) = split_name_title(&concept.label).ok_or_else(|| {
                        ValidateError::Invariant(format!(
                            "name-title concept {:?} carries no work-title component",
                            concept.label
                        ))
                    })?;
                    (name, Some(title))
                }
                _ => (concept.label.clone(), None),
            };
            let hits = ctx.names.suggest_names(&name_part)?;
            let accepted = accept_name(&name_part, &hits)
                .ok_or_else(|| reject(RejectionReason::NameNotConfirmed { hits: hits.clone() }))?;
            if accepted.total_hits > 1 {
                notes.push(format!(
                    "name service returned {} hits; accepted rank {} ({:?})",
                    accepted.total_hits, accepted.hit.raw_rank, accepted.hit.label
                ));
            }
            name_components = Some(NameComponents {
                name: accepted.name.clone(),
                dates: accepted.dates.clone(),
                work_title,
            });
            (
                accepted.hit.label.clone(),
                Some(accepted.hit.uri.clone()),
                ValidationStatus::NameConfirmed,
            )
        }
    };

    // subdivision hints: geographic hints are authorized en bloc by the
    // indirect method at the position of the first geographic hint; others
    // validate individually
    let mut resolved: Vec<ResolvedSubdivision> = Vec::new();
    let geo_hints: Vec<String> = concept
        .subdivision_hints
        .iter()
        .filter(|h| h.kind == SubdivisionKind::Geographic)
        .map(|h| h.value.clone())
        .collect();
    let mut geo_emitted = false;

    for hint in &concept.subdivision_hints {
        match hint.kind {
            SubdivisionKind::Form => {
                return Err(ValidateError::Invariant(format!(
                    "form subdivision {:?} present; form subdivisions are discontinued under the 2026 policy",
                    hint.value
                )))
            }
            SubdivisionKind::Geographic => {
                if geo_emitted {
                    continue;
                }
                geo_emitted = true;
                let is_name_heading = matches!(
                    concept.kind,
                    ConceptKind::PersonalName | ConceptKind::CorporateName | ConceptKind::NameTitle
                );
                let ordered: Vec<String> = if is_name_heading {
                    notes.push(
                        "geographic subdivision on a name heading passed through without H 830 authorization"
                            .into(),
                    );
                    geo_hints.clone()
                } else {
                    let base_record = authority_id
                        .as_deref()
                        .and_then(|id| match concept.kind {
                            ConceptKind::GenreForm => ctx.store_lcgft.get(id),
                            _ => ctx.store_lcsh.get(id),
                        })
                        .expect("validated base resolves");
                    authorize_geo_subdivision(ctx.geo, base_record, &geo_hints)
                        .map_err(ValidateError::Rejected)?
                };
                for place in ordered {
                    let place_id = ctx
                        .store_lcsh
                        .lookup_exact(&place)
                        .ok()
                        .flatten()
                        .map(|r| r.id.clone());
                    if place_id.is_none() {
                        notes.push(format!(
                            "geographic subdivision {place:?} has no authority record in the loaded store"
                        ));
                    }
                    resolved.push(ResolvedSubdivision {
                        kind: SubdivisionKind::Geographic,
                        value: place,
                        authority_id: place_id,
                    });
                }
            }
            SubdivisionKind::Topical => {
                let id = ctx
                    .store_lcsh
                    .lookup_exact(&hint.value)
                    .ok()
                    .flatten()
                    .map(|r| r.id.clone());
                if id.is_none() {
                    notes.push(format!(
                        "topical subdivision {:?} not found in LCSH; passed through",
                        hint.value
                    ));
                }
                resolved.push(ResolvedSubdivision {
                    kind: SubdivisionKind::Topical,
                    value: hint.value.clone(),
                    authority_id: id,
                });
            }
            SubdivisionKind::Chronological => {
                if !chronological_is_plausible(&hint.value) {
                    return Err(reject(RejectionReason::BadChronological {
                        value: hint.value.clone(),
                    }));
                }
                resolved.push(ResolvedSubdivision {
                    kind: SubdivisionKind::Chronological,
                    value: hint.value.clone(),
                    authority_id: None,
                });
            }
        }
    }

    let heading = ValidatedHeading {
        candidate: candidate.clone(),
        authorized_base,
        authority_id,
        resolved_subdivisions: resolved,
        name_components,
        status,
        order: ctx.default_order,
        notes,
    };
    heading.check()?;
    Ok(heading)
}

/// Per-candidate report line, written whether or not the batch succeeded.
#[derive(Debug, Serialize)]
pub struct ValidationReportEntry {
    pub label: String,
    pub tag: MarcTag,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub authorized_base: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub authority_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<ValidationStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Validates a whole batch. Every candidate is attempted (results are
/// per-candidate and order-independent); the first failure, if any, is
/// returned alongside the full report.
pub fn validate_all(
    ctx: &ValidationContext<'_>,
    candidates: &[CandidateHeading],
) -> (Vec<ValidatedHeading>, Vec<ValidationReportEntry>, Option<ValidateError>) {
    let mut validated = Vec::new();
    let mut entries = Vec::new();
    let mut first_error = None;
    for candidate in candidates {
        match validate_candidate(ctx, candidate) {
            Ok(heading) => {
                entries.push(ValidationReportEntry {
                    label: candidate.concept.label.clone(),
                    tag: candidate.intended_tag,
                    outcome: "validated".into(),
                    authorized_base: Some(heading.authorized_base.clone()),
                    authority_id: heading.authority_id.clone(),
                    status: Some(heading.status),
                    rejection: None,
                    notes: heading.notes.clone(),
                });
                validated.push(heading);
            }
            Err(err) => {
                let rejection = match &err {
                    ValidateError::Rejected(r) => serde_json::to_value(r).ok(),
                    other => Some(serde_json::Value::String(other.to_string())),
                };
                entries.push(ValidationReportEntry {
                    label: candidate.concept.label.clone(),
                    tag: candidate.intended_tag,
                    outcome: "rejected".into(),
                    authorized_base: None,
                    authority_id: None,
                    status: None,
                    rejection,
                    notes: vec![],
                });
                if first_error.is_none() {
                    first_error = Some(err);
                }
            }
        }
    }
    (validated, entries, first_error)
}
