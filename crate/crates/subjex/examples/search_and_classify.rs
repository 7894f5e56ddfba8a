//! TF-IDF search over authority labels and exact-first classification.
//!
//! ```bash
//! cargo run -p subjex --example search_and_classify
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};
use subjex::index::{build_index, classify, MatchClass, SearchOptions};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lcsh_small.ndjson");
    let (store, _) = load_authorities(&path, Scheme::Lcsh).unwrap();
    let index = build_index(&store);
    println!("index: {} records, {} documents\n", store.len(), index.doc_count());

    for query in ["black holes", "holes black astronomy", "rural"] {
        println!("search {query:?}:");
        for hit in index.search(query, 3) {
            println!(
                "  {:.4}  {} [{}] ({:?})",
                hit.score, hit.matched_label, hit.record_id, hit.label_role
            );
        }
    }

    let options = SearchOptions::default();
    println!("\nclassification precedence (threshold {}):", options.fuzzy_threshold);
    for query in [
        "Purchasing power parity",    // authorized form
        "Micro-credit",               // variant reference
        "Purchasing parity power",    // fuzzy
        "entirely unrelated words",   // nothing
    ] {
        let class = classify(&store, &index, query, &options).unwrap();
        match class {
            MatchClass::Authorized { record_id } => {
                println!("  {query:?} -> authorized ({record_id})")
            }
            MatchClass::VariantOf { record_id, matched_variant } => {
                println!("  {query:?} -> variant {matched_variant:?} of {record_id}")
            }
            MatchClass::Fuzzy { hits } => println!(
                "  {query:?} -> fuzzy, best {:?} at {:.3}",
                hits[0].matched_label, hits[0].score
            ),
            MatchClass::NotFound => println!("  {query:?} -> not found"),
        }
    }
}
