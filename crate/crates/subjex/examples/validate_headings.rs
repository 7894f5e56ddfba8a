//! Authority validation: exact and variant matches, name confirmation,
//! and indirect geographic subdivision authorization.
//!
//! ```bash
//! cargo run -p subjex --example validate_headings
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};
use subjex::filter::{
    CandidateHeading, Concept, ConceptKind, MarcTag, SubdivisionHint, SubdivisionKind,
};
use subjex::index::{build_index, SearchOptions};
use subjex::names::{ClientMode, NameClient, NameClientConfig};
use subjex::synth::OrderMode;
use subjex::validate::{validate_candidate, GeoPolicy, ValidateError, ValidationContext};

fn candidate(label: &str, kind: ConceptKind, tag: MarcTag, hints: Vec<SubdivisionHint>) -> CandidateHeading {
    CandidateHeading {
        concept: Concept {
            label: label.into(),
            kind,
            coverage: 0.5,
            predominance_rank: 1,
            critical_entity: false,
            facet_distinct: false,
            broader_group: None,
            subdivision_hints: hints,
            justification: String::new(),
        },
        intended_tag: tag,
        order_position: 1,
    }
}

fn geo(value: &str) -> SubdivisionHint {
    SubdivisionHint { kind: SubdivisionKind::Geographic, value: value.into() }
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let (lcsh, _) = load_authorities(&root.join("lcsh_small.ndjson"), Scheme::Lcsh).unwrap();
    let (lcgft, _) = load_authorities(&root.join("lcgft_small.ndjson"), Scheme::Lcgft).unwrap();
    let index_lcsh = build_index(&lcsh);
    let index_lcgft = build_index(&lcgft);
    let names = NameClient::new(NameClientConfig {
        mode: ClientMode::Fixture,
        fixture_dir: Some(root.join("names")),
        ..NameClientConfig::default()
    })
    .unwrap();
    let geo_policy = GeoPolicy::packaged();
    let ctx = ValidationContext {
        store_lcsh: &lcsh,
        store_lcgft: &lcgft,
        index_lcsh: &index_lcsh,
        index_lcgft: &index_lcgft,
        names: &names,
        geo: &geo_policy,
        search: SearchOptions::default(),
        default_order: OrderMode::Canonical,
    };

    let candidates = vec![
        candidate("Microfinance", ConceptKind::Topical, MarcTag::T650, vec![]),
        candidate("Micro-credit", ConceptKind::Topical, MarcTag::T650, vec![]), // variant
        candidate(
            // local place plus country, reordered by the indirect method
            "Indians of South America",
            ConceptKind::Topical,
            MarcTag::T650,
            vec![geo("Toracari"), geo("Bolivia")],
        ),
        candidate(
            // first-order jurisdiction stands alone
            "Christianity and literature",
            ConceptKind::Topical,
            MarcTag::T650,
            vec![geo("England")],
        ),
        candidate("Yunus, Muhammad", ConceptKind::PersonalName, MarcTag::T600, vec![]),
        candidate("Ethnographies", ConceptKind::GenreForm, MarcTag::T655, vec![]),
        candidate("Completely unknown topic", ConceptKind::Topical, MarcTag::T650, vec![]),
    ];

    for cand in &candidates {
        match validate_candidate(&ctx, cand) {
            Ok(v) => {
                let subs: Vec<String> = v
                    .resolved_subdivisions
                    .iter()
                    .map(|s| format!("{:?} {:?}", s.kind, s.value))
                    .collect();
                println!(
                    "{:?} -> {:?} ({:?}){}",
                    cand.concept.label,
                    v.authorized_base,
                    v.status,
                    if subs.is_empty() { String::new() } else { format!(", subdivisions {subs:?}") }
                );
                for note in &v.notes {
                    println!("    note: {note}");
                }
            }
            Err(ValidateError::Rejected(r)) => {
                println!("{:?} -> REJECTED: {}", cand.concept.label, serde_json::to_string(&r.reason).unwrap());
            }
            Err(other) => println!("{:?} -> error: {other}", cand.concept.label),
        }
    }
}
