//! Seeded input generators for the acceptance criteria.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use subjex::authority::{AuthorityRecord, RecordKind, Scheme};
use subjex::filter::{BroaderGroup, CandidateHeading, Concept, ConceptKind, MarcTag, SubdivisionKind};
use subjex::synth::{OrderMode, Subfield, SubjectField};
use subjex::validate::{NameComponents, ResolvedSubdivision, ValidatedHeading, ValidationStatus};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const TOKEN_POOL: &[&str] = &[
    "history", "economics", "poverty", "labor", "medicine", "physics", "theology", "comedy",
    "poetry", "ritual", "finance", "banking", "vaccines", "influenza", "holes", "black",
    "matter", "relativity", "discrimination", "race", "workplace", "rural", "urban", "social",
    "political", "criticism", "literature", "american", "english", "andean", "colonial",
    "modern", "industrial", "religious", "methodology", "immunology", "virology", "stories",
    "fiction", "essays", "studies", "sources", "analysis", "theory", "policy", "development",
    "culture", "humor", "gender", "power",
];

fn words(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| *TOKEN_POOL.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn record(id: String, label: String, variants: Vec<String>) -> AuthorityRecord {
    AuthorityRecord {
        id,
        scheme: Scheme::Lcsh,
        kind: RecordKind::Topical,
        authorized_label: label,
        variant_labels: variants,
        broader_ids: vec![],
        narrower_ids: vec![],
        geo_subdividable: false,
    }
}

/// Records whose labels deliberately collide in token space (small pool,
/// short labels) so ranking ties are exercised. Ids are unique; labels
/// may normalize identically.
pub fn overlapping_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<AuthorityRecord> {
    (0..n)
        .map(|i| {
            let variants = if rng.gen_bool(0.3) {
                vec![words(rng, 1, 3)]
            } else {
                vec![]
            };
            record(format!("rec{i:05}"), words(rng, 1, 3), variants)
        })
        .collect()
}

/// Records with guaranteed-unique normalized labels (a serial token is
/// embedded in every label and variant).
pub fn unique_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<AuthorityRecord> {
    (0..n)
        .map(|i| {
            let label = format!("{} uq{i}", words(rng, 1, 3));
            let variants = if rng.gen_bool(0.4) {
                vec![format!("{} vr{i}", words(rng, 1, 2))]
            } else {
                vec![]
            };
            record(format!("rec{i:05}"), label, variants)
        })
        .collect()
}

/// Pairs of records sharing one variant normalization; lookups of these
/// variants must surface an ambiguity, not pick a winner.
pub fn colliding_variant_records(count_pairs: usize, offset: usize) -> Vec<AuthorityRecord> {
    let mut out = Vec::new();
    for p in 0..count_pairs {
        let shared = format!("shared collision token c{p}");
        out.push(record(
            format!("col{:05}a", offset + p),
            format!("collision owner alpha uq-a{p}"),
            vec![shared.clone()],
        ));
        out.push(record(
            format!("col{:05}b", offset + p),
            format!("collision owner beta uq-b{p}"),
            vec![shared],
        ));
    }
    out
}

/// Queries for oracle equivalence: verbatim labels, shuffled labels, and
/// random token combinations.
pub fn queries_for(rng: &mut ChaCha8Rng, records: &[AuthorityRecord], total: usize) -> Vec<String> {
    let mut queries = Vec::with_capacity(total);
    for i in 0..total {
        match i % 3 {
            0 => {
                let r = records.choose(rng).unwrap();
                queries.push(r.authorized_label.clone());
            }
            1 => {
                let r = records.choose(rng).unwrap();
                let mut toks: Vec<&str> = r.authorized_label.split(' ').collect();
                toks.shuffle(rng);
                queries.push(toks.join(" "));
            }
            _ => queries.push(words(rng, 1, 4)),
        }
    }
    queries
}

const GEO_POOL: &[&str] = &["Bolivia", "France", "Japan", "Brazil", "Poland", "United States", "England"];
const CHRONO_POOL: &[&str] = &["1500-1700", "2006-", "20th century", "1994", "To 1500"];

/// A structurally valid validated heading with a consistent kind/tag pair,
/// for the policy suite.
pub fn random_validated_heading(rng: &mut ChaCha8Rng, serial: usize) -> ValidatedHeading {
    let (kind, tag) = *[
        (ConceptKind::Topical, MarcTag::T650),
        (ConceptKind::Geographic, MarcTag::T651),
        (ConceptKind::PersonalName, MarcTag::T600),
        (ConceptKind::CorporateName, MarcTag::T610),
        (ConceptKind::GenreForm, MarcTag::T655),
    ]
    .choose(rng)
    .unwrap();

    let base = match kind {
        ConceptKind::PersonalName => format!("Surname{serial}, Given"),
        ConceptKind::CorporateName => format!("Organization {serial}"),
        _ => format!("{} {serial}", words(rng, 1, 3)),
    };

    let name_components = match kind {
        ConceptKind::PersonalName | ConceptKind::CorporateName => {
            let dates = if kind == ConceptKind::PersonalName && rng.gen_bool(0.5) {
                Some(if rng.gen_bool(0.5) { "1940-".to_owned() } else { "1815-1902".to_owned() })
            } else {
                None
            };
            let work_title = if kind == ConceptKind::PersonalName && rng.gen_bool(0.2) {
                Some(format!("Collected works {serial}"))
            } else {
                None
            };
            Some(NameComponents { name: base.clone(), dates, work_title })
        }
        _ => None,
    };

    let n_subs = if kind == ConceptKind::GenreForm { 0 } else { rng.gen_range(0..=4) };
    let resolved_subdivisions = (0..n_subs)
        .map(|_| match rng.gen_range(0..3) {
            0 => ResolvedSubdivision {
                kind: SubdivisionKind::Topical,
                value: words(rng, 1, 2),
                authority_id: None,
            },
            1 => ResolvedSubdivision {
                kind: SubdivisionKind::Geographic,
                value: GEO_POOL.choose(rng).unwrap().to_string(),
                authority_id: None,
            },
            _ => ResolvedSubdivision {
                kind: SubdivisionKind::Chronological,
                value: CHRONO_POOL.choose(rng).unwrap().to_string(),
                authority_id: None,
            },
        })
        .collect();

    ValidatedHeading {
        candidate: CandidateHeading {
            concept: Concept {
                label: base.clone(),
                kind,
                coverage: rng.gen_range(0.2..=1.0),
                predominance_rank: serial as u32 + 1,
                critical_entity: false,
                facet_distinct: false,
                broader_group: None,
                subdivision_hints: vec![],
                justification: String::new(),
            },
            intended_tag: tag,
            order_position: 1,
        },
        authorized_base: base,
        authority_id: Some(format!("syn-{serial}")),
        resolved_subdivisions,
        name_components,
        status: if matches!(kind, ConceptKind::PersonalName | ConceptKind::CorporateName) {
            ValidationStatus::NameConfirmed
        } else {
            ValidationStatus::Authorized
        },
        order: if rng.gen_bool(0.5) { OrderMode::Canonical } else { OrderMode::PreserveGiven },
        notes: vec![],
    }
}

/// Three-level hierarchy store for the dedup property: roots, children,
/// grandchildren connected by broader links.
pub fn hierarchy_records() -> Vec<AuthorityRecord> {
    let mut out = Vec::new();
    for r in 0..4 {
        let root_id = format!("h-r{r}");
        out.push(record(root_id.clone(), format!("hier root {r}"), vec![]));
        for c in 0..3 {
            let child_id = format!("h-r{r}c{c}");
            let mut child = record(child_id.clone(), format!("hier child {r} {c}"), vec![]);
            child.broader_ids = vec![root_id.clone()];
            out.push(child);
            for g in 0..2 {
                let mut grand =
                    record(format!("h-r{r}c{c}g{g}"), format!("hier leaf {r} {c} {g}"), vec![]);
                grand.broader_ids = vec![child_id.clone()];
                out.push(grand);
            }
        }
    }
    out
}

/// A randomized concept list over the hierarchy store's labels plus
/// unresolvable free labels, with groups, flags, and unique ranks.
pub fn random_concepts(rng: &mut ChaCha8Rng, store_labels: &[String]) -> Vec<Concept> {
    let n = rng.gen_range(1..=12);
    let mut ranks: Vec<u32> = (1..=n as u32).collect();
    ranks.shuffle(rng);
    (0..n)
        .map(|i| {
            let label = if rng.gen_bool(0.6) {
                store_labels.choose(rng).unwrap().clone()
            } else {
                format!("free topic {}", rng.gen_range(0..1000))
            };
            let kind = if rng.gen_bool(0.15) {
                ConceptKind::GenreForm
            } else if rng.gen_bool(0.1) {
                ConceptKind::CorporateName
            } else {
                ConceptKind::Topical
            };
            let broader_group = if rng.gen_bool(0.35) {
                let g = rng.gen_range(0..3);
                Some(BroaderGroup {
                    key: format!("g{g}"),
                    broader_label: format!("group broader {g}"),
                })
            } else {
                None
            };
            Concept {
                label,
                kind,
                coverage: rng.gen_range(0.0..=1.0),
                predominance_rank: ranks[i],
                critical_entity: rng.gen_bool(0.15),
                facet_distinct: rng.gen_bool(0.10),
                broader_group,
                subdivision_hints: vec![],
                justification: String::new(),
            }
        })
        .collect()
}

const VALUE_CHARS: &[char] = &[
    'a', 'b', 'c', 'd', 'e', 'x', 'y', 'z', 'A', 'B', 'M', 'S', 'T', '0', '1', '9', ' ', ',',
    '.', '(', ')', '-', '\'',
];

fn field_value(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=20);
    let mut v: String = (0..n).map(|_| *VALUE_CHARS.choose(rng).unwrap()).collect();
    // keep values structurally valid: non-empty and not all spaces
    if v.trim().is_empty() {
        v.push('q');
    }
    v
}

/// A structurally valid subject field for the round-trip property.
pub fn random_subject_field(rng: &mut ChaCha8Rng) -> SubjectField {
    let tag = *[
        MarcTag::T600,
        MarcTag::T610,
        MarcTag::T611,
        MarcTag::T650,
        MarcTag::T651,
        MarcTag::T655,
    ]
    .choose(rng)
    .unwrap();
    let ind = |rng: &mut ChaCha8Rng| {
        *[' ', '0', '1', '2', '7'].choose(rng).unwrap()
    };
    let mut subfields = vec![Subfield::new('a', field_value(rng))];
    let codes = ['d', 't', 'x', 'y', 'z', '2', 'b', 'c'];
    for _ in 0..rng.gen_range(0..5) {
        subfields.push(Subfield::new(*codes.choose(rng).unwrap(), field_value(rng)));
    }
    SubjectField { tag, ind1: ind(rng), ind2: ind(rng), subfields }
}

/// Baseline segments free of delimiter sequences, for the segment-count
/// property.
pub fn random_baseline_segments(rng: &mut ChaCha8Rng) -> Vec<String> {
    let n = rng.gen_range(1..=6);
    (0..n)
        .map(|_| {
            let mut s = words(rng, 1, 3);
            if rng.gen_bool(0.3) {
                s.push_str(&format!(", {}", rng.gen_range(1500..2026)));
            }
            s
        })
        .collect()
}

/// One canonical NDJSON line for the scale check.
pub fn scale_ndjson_line(rng: &mut ChaCha8Rng, i: usize) -> String {
    let label = format!("{} uq{i}", words(rng, 2, 5));
    if rng.gen_bool(0.3) {
        format!(
            "{{\"id\":\"syn{i}\",\"scheme\":\"lcsh\",\"kind\":\"topical\",\"authorized\":\"{label}\",\"variants\":[\"{} vr{i}\"]}}",
            words(rng, 1, 3)
        )
    } else {
        format!("{{\"id\":\"syn{i}\",\"scheme\":\"lcsh\",\"kind\":\"topical\",\"authorized\":\"{label}\"}}")
    }
}
