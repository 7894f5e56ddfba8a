//! The full pipeline over one work: concept list in, filtered candidates,
//! validated headings, MARC 6xx fields out, with every intermediate
//! written for inspection.
//!
//! ```bash
//! cargo run -p subjex --example full_pipeline
//! ```

use std::path::Path;

use subjex::filter::ConceptDocument;
use subjex::pipeline::{cmd_run, PipelineConfig};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let config = PipelineConfig {
        lcsh_path: Some(root.join("lcsh_small.ndjson")),
        lcgft_path: Some(root.join("lcgft_small.ndjson")),
        names_fixture_dir: Some(root.join("names")),
        ..PipelineConfig::default()
    };

    let text = std::fs::read_to_string(root.join("concepts/title04.json")).unwrap();
    let document: ConceptDocument = serde_json::from_str(&text).unwrap();
    println!("work: {}", document.work.title);
    println!("concepts in: {}\n", document.concepts.len());

    let out = tempfile::tempdir().unwrap();
    let artifacts = cmd_run(&config, &document, out.path()).unwrap();

    println!("fields out:\n{}", artifacts.rendered);
    println!("stage documents (written before each next stage began):");
    for path in &artifacts.written {
        println!("  {}", path.file_name().unwrap().to_string_lossy());
    }
    println!(
        "\nfilter stage: {} dropped, {} groups collapsed, {} dedup removals, {} narrower-term suggestions",
        artifacts.filter.dropped_below_threshold.len(),
        artifacts.filter.group_collapses.len(),
        artifacts.filter.dedup_removals.len(),
        artifacts.filter.narrower_suggestions.len(),
    );
}
