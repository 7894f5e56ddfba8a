//! The concept-filtering rules: coverage threshold, subtopic collapse,
//! hierarchy dedup, genre/form routing, predominance ordering.
//!
//! ```bash
//! cargo run -p subjex --example filter_concepts
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};
use subjex::filter::{
    run_filter, BroaderGroup, Concept, ConceptDocument, ConceptKind, FilterOptions,
    WorkDescription,
};

fn concept(label: &str, kind: ConceptKind, coverage: f64, rank: u32) -> Concept {
    Concept {
        label: label.into(),
        kind,
        coverage,
        predominance_rank: rank,
        critical_entity: false,
        facet_distinct: false,
        broader_group: None,
        subdivision_hints: vec![],
        justification: String::new(),
    }
}

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lcsh_small.ndjson");
    let (store, _) = load_authorities(&path, Scheme::Lcsh).unwrap();

    // an over-generated concept list: a below-threshold topic, a critical
    // entity that survives anyway, four subtopics of one broader subject,
    // a broader/narrower pair, and a genre concept
    let mut tangent = concept("Side remark topic", ConceptKind::Topical, 0.05, 7);
    tangent.justification = "mentioned once".into();
    let mut bank = concept("Grameen Bank", ConceptKind::CorporateName, 0.08, 2);
    bank.critical_entity = true;
    let group = |label: &str, rank| {
        let mut c = concept(label, ConceptKind::Topical, 0.22, rank);
        c.broader_group = Some(BroaderGroup {
            key: "flu".into(),
            broader_label: "Influenza".into(),
        });
        c
    };
    let document = ConceptDocument {
        work: WorkDescription {
            title: "Demonstration work".into(),
            summary: String::new(),
            toc: vec![],
            identifier: None,
        },
        aboutness: "a demonstration".into(),
        concepts: vec![
            concept("Poverty", ConceptKind::Topical, 0.5, 1),
            bank,
            concept("Rural poor", ConceptKind::Topical, 0.4, 3),
            group("Influenza A", 4),
            group("Influenza B", 5),
            group("Avian influenza", 6),
            group("Swine influenza", 8),
            tangent,
            concept("Autobiographies", ConceptKind::GenreForm, 1.0, 9),
        ],
    };

    let outcome = run_filter(&document, &store, &FilterOptions::default()).unwrap();

    println!("dropped below threshold:");
    for d in &outcome.dropped_below_threshold {
        println!("  {:?} (coverage {:.2} < {:.2})", d.label, d.coverage, d.threshold);
    }
    println!("\nsubtopic groups collapsed:");
    for c in &outcome.group_collapses {
        println!("  {:?} replaces {:?}", c.broader_label, c.member_labels);
    }
    println!("\nhierarchy dedup removals:");
    for r in &outcome.dedup_removals {
        println!("  {:?} subsumed by {:?}", r.label, r.kept_narrower);
    }
    println!("\nnarrower-term suggestions (review, never auto-substituted):");
    for s in &outcome.narrower_suggestions {
        println!("  {:?} has narrower terms {:?}", s.label, s.narrower);
    }
    println!("\nordered candidates:");
    for c in &outcome.candidates {
        println!(
            "  {}. {} {:?} (rank {})",
            c.order_position,
            c.intended_tag,
            c.concept.label,
            c.concept.predominance_rank
        );
    }
}
