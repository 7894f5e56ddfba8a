//! Parse baseline catalog headings (`--`-delimited) and canonical field
//! lines; emit fields as text and JSON.
//!
//! ```bash
//! cargo run -p subjex --example parse_baseline
//! ```

use std::path::Path;

use subjex::authority::{load_authorities, Scheme};
use subjex::marc_io::{emit, parse_field_line, BaselineClassifier, EmitFormat};
use subjex::validate::GeoPolicy;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let (lcsh, _) = load_authorities(&root.join("lcsh_small.ndjson"), Scheme::Lcsh).unwrap();
    let (lcgft, _) = load_authorities(&root.join("lcgft_small.ndjson"), Scheme::Lcgft).unwrap();
    let gazetteer = GeoPolicy::packaged();
    let classifier = BaselineClassifier::new(Some(&lcsh), Some(&lcgft), &gazetteer);

    for line in [
        "English poetry -- Early modern, 1500-1700 -- History and criticism",
        "Trauma centers -- Fiction",
        "Racism in the workplace -- South Africa -- Port Elizabeth -- 20th century",
        "Purchasing power parity",
    ] {
        let heading = classifier.parse(line).unwrap();
        println!("{line}");
        for segment in &heading.typed_segments {
            println!(
                "    {:<14} {:?} (confidence {:.1})",
                format!("{:?}", segment.kind),
                segment.value,
                segment.confidence
            );
        }
    }

    // canonical field lines round-trip through the parser
    let fields: Vec<_> = [
        "650 _0 $aRace discrimination$zUnited States$xHistory$y20th century.",
        "655 _7 $aEthnographies.$2lcgft",
    ]
    .iter()
    .map(|l| parse_field_line(l).unwrap())
    .collect();

    println!("\nas text:\n{}", emit(&fields, EmitFormat::Text));
    println!("as JSON:\n{}", emit(&fields, EmitFormat::Json));

    match parse_field_line("65 _0 $aBroken") {
        Err(e) => println!("\nmalformed line -> {e}"),
        Ok(_) => unreachable!(),
    }
}
