//! Name authority lookup in offline fixture mode, plus the acceptance
//! policy that turns an undated candidate into a date-qualified form.
//!
//! ```bash
//! cargo run -p subjex --example name_lookup
//! ```

use std::path::Path;

use subjex::names::{accept_name, ClientMode, NameClient, NameClientConfig};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/names");
    let client = NameClient::new(NameClientConfig {
        mode: ClientMode::Fixture,
        fixture_dir: Some(fixtures),
        ..NameClientConfig::default()
    })
    .unwrap();

    for candidate in ["Yunus, Muhammad", "Baxter, Richard", "Grameen Bank"] {
        let hits = client.suggest_names(candidate).unwrap();
        println!("{candidate:?}: {} hit(s)", hits.len());
        for hit in &hits {
            println!("  #{} {} <{}>", hit.raw_rank, hit.label, hit.uri);
        }
        match accept_name(candidate, &hits) {
            Some(accepted) => println!(
                "  accepted: name {:?}, dates {:?}\n",
                accepted.name, accepted.dates
            ),
            None => println!("  no acceptable hit\n"),
        }
    }

    // a query with no recorded fixture is an error, never silently empty
    match client.suggest_names("Unrecorded, Person") {
        Err(e) => println!("missing fixture -> {e}"),
        Ok(_) => unreachable!(),
    }
}
