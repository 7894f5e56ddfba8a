//! Load canonical authority NDJSON into a queryable store.
//!
//! ```bash
//! cargo run -p subjex --example load_authorities
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    for (path, scheme) in [
        (root.join("lcsh_small.ndjson"), Scheme::Lcsh),
        (root.join("lcgft_small.ndjson"), Scheme::Lcgft),
    ] {
        let (store, report) = load_authorities(&path, scheme).expect("fixture loads");
        println!(
            "{scheme}: {} records loaded, {} skipped, {} duplicates, {} dangling links",
            report.loaded,
            report.skipped.len(),
            report.duplicates.len(),
            report.dangling.len()
        );
        for skipped in &report.skipped {
            println!("  line {}: {}", skipped.line, skipped.reason);
        }

        let sample = &store.records()[0];
        println!("  first record: {} = {:?}", sample.id, sample.authorized_label);
    }

    // exact lookup and variant redirection
    let (lcsh, _) = load_authorities(&root.join("lcsh_small.ndjson"), Scheme::Lcsh).unwrap();
    let hit = lcsh.lookup_exact("purchasing  POWER parity.").unwrap().unwrap();
    println!("normalized exact lookup -> {} ({})", hit.authorized_label, hit.id);

    let (owner, variant) = lcsh.resolve_variant("Micro-credit").unwrap().unwrap();
    println!("variant {variant:?} is a reference to {:?}", owner.authorized_label);

    // broader-term navigation
    let paths = lcsh.broader_chain("sh-rural-poor", 3).unwrap();
    println!("broader chain of sh-rural-poor: {paths:?}");
}
