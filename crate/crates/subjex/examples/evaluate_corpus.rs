//! Score an agent-output corpus against baseline catalog headings and
//! aggregate the four per-title dimensions.
//!
//! ```bash
//! cargo run -p subjex --example evaluate_corpus
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};
use subjex::eval::{aggregate, compare_title, side_by_side, EvalContext};
use subjex::marc_io::{parse_field_line, read_corpus};
use subjex::validate::GeoPolicy;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let (lcsh, _) = load_authorities(&root.join("lcsh_small.ndjson"), Scheme::Lcsh).unwrap();
    let (lcgft, _) = load_authorities(&root.join("lcgft_small.ndjson"), Scheme::Lcgft).unwrap();
    let gazetteer = GeoPolicy::packaged();
    let ctx = EvalContext::new(Some(&lcsh), Some(&lcgft), &gazetteer);

    let agent = read_corpus(&root.join("golden/agent_corpus.ndjson")).unwrap();
    let baseline = read_corpus(&root.join("golden/baseline_corpus.ndjson")).unwrap();

    let mut reports = Vec::new();
    for (agent_work, baseline_work) in agent.iter().zip(&baseline) {
        assert_eq!(agent_work.work_id, baseline_work.work_id);
        let fields: Vec<_> = agent_work
            .headings
            .iter()
            .map(|l| parse_field_line(l).unwrap())
            .collect();
        reports.push(compare_title(&ctx, &agent_work.work_id, &fields, &baseline_work.headings));
    }

    // the two-column table for the first work
    print!("{}", side_by_side(&reports[..1]));

    let summary = aggregate(&reports).unwrap();
    println!("corpus of {} works:", summary.works);
    println!("  mean conceptual recall     {:.3}", summary.mean_conceptual_recall);
    println!("  mean heading precision     {:.3}", summary.mean_heading_precision);
    println!("  mean subdivision accuracy  {:.3}", summary.mean_subdivision_accuracy);
    println!("  mean genre/form score      {:.3}", summary.mean_genre_form_score);
    println!(
        "  works with agent 600/610   {} (baseline: {})",
        summary.agent_name_heading_works, summary.baseline_name_heading_works
    );
    println!("  agent $v subfields         {}", summary.agent_v_total);
    println!("  baseline form segments     {}", summary.baseline_form_segment_total);
    println!(
        "  overlap per baseline {:.3}, per agent {:.3}",
        summary.overlap_per_baseline, summary.overlap_per_agent
    );
}
