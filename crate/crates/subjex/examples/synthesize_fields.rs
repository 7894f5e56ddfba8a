//! MARC 6xx field construction: indicator rules, subdivision ordering,
//! name punctuation, and the genre/form source suffix.
//!
//! ```bash
//! cargo run -p subjex --example synthesize_fields
//! ```

use subjex::filter::{CandidateHeading, Concept, ConceptKind, MarcTag, SubdivisionKind};
use subjex::synth::{order_subdivisions, render, synthesize, OrderMode};
use subjex::validate::{NameComponents, ResolvedSubdivision, ValidatedHeading, ValidationStatus};

fn heading(label: &str, kind: ConceptKind, tag: MarcTag, base: &str) -> ValidatedHeading {
    ValidatedHeading {
        candidate: CandidateHeading {
            concept: Concept {
                label: label.into(),
                kind,
                coverage: 0.5,
                predominance_rank: 1,
                critical_entity: false,
                facet_distinct: false,
                broader_group: None,
                subdivision_hints: vec![],
                justification: String::new(),
            },
            intended_tag: tag,
            order_position: 1,
        },
        authorized_base: base.into(),
        authority_id: Some("example-id".into()),
        resolved_subdivisions: vec![],
        name_components: None,
        status: ValidationStatus::Authorized,
        order: OrderMode::Canonical,
        notes: vec![],
    }
}

fn sub(kind: SubdivisionKind, value: &str) -> ResolvedSubdivision {
    ResolvedSubdivision { kind, value: value.into(), authority_id: None }
}

fn main() {
    // topical heading with subdivisions given out of order: the canonical
    // mode reorders to geographic, topical, chronological
    let mut topical = heading(
        "Race discrimination",
        ConceptKind::Topical,
        MarcTag::T650,
        "Race discrimination",
    );
    topical.resolved_subdivisions = vec![
        sub(SubdivisionKind::Topical, "History"),
        sub(SubdivisionKind::Chronological, "20th century"),
        sub(SubdivisionKind::Geographic, "United States"),
    ];
    println!("{}", render(&synthesize(&topical).unwrap()));

    // an established pattern that deviates from the canonical sequence
    // keeps its given order
    let mut poetry =
        heading("English poetry", ConceptKind::Topical, MarcTag::T650, "English poetry");
    poetry.resolved_subdivisions = vec![
        sub(SubdivisionKind::Chronological, "Early modern, 1500-1700"),
        sub(SubdivisionKind::Topical, "History and criticism"),
    ];
    poetry.order = OrderMode::PreserveGiven;
    println!("{}", render(&synthesize(&poetry).unwrap()));

    // dated personal name: comma before $d, open date left unclosed
    let mut person = heading(
        "Yunus, Muhammad",
        ConceptKind::PersonalName,
        MarcTag::T600,
        "Yunus, Muhammad, 1940-",
    );
    person.status = ValidationStatus::NameConfirmed;
    person.name_components = Some(NameComponents {
        name: "Yunus, Muhammad".into(),
        dates: Some("1940-".into()),
        work_title: None,
    });
    println!("{}", render(&synthesize(&person).unwrap()));

    // name-title entry: period closes the dates before $t
    let mut name_title = heading(
        "Baxter, Richard. Methodus theologiæ Christianæ",
        ConceptKind::NameTitle,
        MarcTag::T600,
        "Baxter, Richard, 1615-1691",
    );
    name_title.status = ValidationStatus::NameConfirmed;
    name_title.name_components = Some(NameComponents {
        name: "Baxter, Richard".into(),
        dates: Some("1615-1691".into()),
        work_title: Some("Methodus theologiæ Christianæ".into()),
    });
    println!("{}", render(&synthesize(&name_title).unwrap()));

    // genre/form field: second indicator 7 and the vocabulary suffix
    let genre = heading("Ethnographies", ConceptKind::GenreForm, MarcTag::T655, "Ethnographies");
    println!("{}", render(&synthesize(&genre).unwrap()));

    // parenthesized headings take no terminal period
    let paren = heading(
        "Black holes (Astronomy)",
        ConceptKind::Topical,
        MarcTag::T650,
        "Black holes (Astronomy)",
    );
    println!("{}", render(&synthesize(&paren).unwrap()));

    // a form-typed subdivision is rejected outright
    let forms = vec![sub(SubdivisionKind::Form, "Fiction")];
    match order_subdivisions(&forms, OrderMode::Canonical) {
        Err(e) => println!("form subdivision -> {e}"),
        Ok(_) => unreachable!(),
    }
}
