//! MARC 21 6xx field synthesis from validated headings.
//!
//! Construction enforces the indicator table (600 surname entry, 610
//! direct-order corporate name, LCSH second indicator 0, LCGFT 655 with
//! second indicator 7 and a terminal `$2lcgft`), the subdivision order
//! (geographic, then topical, then chronological, unless the heading asks
//! for its given order), terminal punctuation, and the ban on form
//! subdivisions.
//!
//! The canonical rendering is `TTT II $a...`: three-digit tag, space, two
//! indicators with blank written as `_`, space, then subfields.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{ConceptKind, MarcTag, SubdivisionKind};
use crate::validate::{ResolvedSubdivision, ValidatedHeading};

/// Subdivision ordering behavior for synthesis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// Geographic block, then topical, then chronological, keeping the
    /// relative order within each type.
    #[default]
    Canonical,
    /// Keep the input order verbatim; for headings whose established
    /// pattern deviates from the canonical sequence.
    PreserveGiven,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subfield {
    pub code: char,
    pub value: String,
}

impl Subfield {
    pub fn new(code: char, value: impl Into<String>) -> Self {
        Subfield { code, value: value.into() }
    }

    /// Control subfields carry scheme codes rather than display text.
    pub fn is_control(&self) -> bool {
        self.code.is_ascii_digit()
    }
}

/// A typed MARC 6xx subject field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectField {
    pub tag: MarcTag,
    pub ind1: char,
    pub ind2: char,
    pub subfields: Vec<Subfield>,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("form subdivision {0:?} present; form subdivisions are discontinued under the 2026 policy")]
    FormSubdivision(String),
    #[error("no construction rule for tag 611 (meeting names are out of scope)")]
    MeetingTag,
    #[error("heading {label:?}: concept kind {kind:?} contradicts tag {tag}")]
    KindTagMismatch { label: String, kind: String, tag: MarcTag },
    #[error("name heading {label:?} lacks name components")]
    MissingNameComponents { label: String },
    #[error("field violates {rule}: {detail}")]
    InvalidField { rule: &'static str, detail: String },
}

/// Orders typed subdivisions. Canonical mode partitions stably into the
/// geographic, topical, chronological sequence; preserve-given keeps the
/// input verbatim. A form-typed subdivision is a hard error naming the
/// 2026 policy.
pub fn order_subdivisions(
    subdivisions: &[ResolvedSubdivision],
    mode: OrderMode,
) -> Result<Vec<ResolvedSubdivision>, SynthError> {
    if let Some(form) = subdivisions.iter().find(|s| s.kind == SubdivisionKind::Form) {
        return Err(SynthError::FormSubdivision(form.value.clone()));
    }
    match mode {
        OrderMode::PreserveGiven => Ok(subdivisions.to_vec()),
        OrderMode::Canonical => {
            let mut out = Vec::with_capacity(subdivisions.len());
            for kind in [
                SubdivisionKind::Geographic,
                SubdivisionKind::Topical,
                SubdivisionKind::Chronological,
            ] {
                out.extend(subdivisions.iter().filter(|s| s.kind == kind).cloned());
            }
            Ok(out)
        }
    }
}

fn subdivision_code(kind: SubdivisionKind) -> char {
    match kind {
        SubdivisionKind::Geographic => 'z',
        SubdivisionKind::Topical => 'x',
        SubdivisionKind::Chronological => 'y',
        SubdivisionKind::Form => 'v', // never emitted; rejected upstream
    }
}

/// Values that close a heading on their own: an existing period, a closing
/// parenthesis, or an open-date hyphen.
fn ends_terminally(value: &str) -> bool {
    value.ends_with('.') || value.ends_with(')') || value.ends_with('-')
}

/// Appends the terminal period to the last non-control subfield unless the
/// value already ends with `.`, `)`, or `-`. For 655 the period therefore
/// lands before the `$2` control subfield. Idempotent.
pub fn apply_punctuation(mut field: SubjectField) -> SubjectField {
    if let Some(last) = field.subfields.iter_mut().rev().find(|s| !s.is_control()) {
        if !ends_terminally(&last.value) {
            last.value.push('.');
        }
    }
    field
}

/// Builds the subject field for a validated heading: tag and indicators
/// from the invariant table, name components into `$a`/`$d`/`$t` with the
/// interior punctuation the name pattern requires, subdivisions as
/// `$z`/`$x`/`$y` per the ordering mode, `$2 lcgft` appended on 655, and
/// terminal punctuation applied.
pub fn synthesize(validated: &ValidatedHeading) -> Result<SubjectField, SynthError> {
    validated.check().map_err(|e| SynthError::InvalidField {
        rule: "validated-heading invariants",
        detail: e.to_string(),
    })?;
    let tag = validated.candidate.intended_tag;
    let kind = validated.candidate.concept.kind;
    let label = &validated.candidate.concept.label;

    let kind_ok = matches!(
        (kind, tag),
        (ConceptKind::GenreForm, MarcTag::T655)
            | (ConceptKind::PersonalName | ConceptKind::NameTitle, MarcTag::T600)
            | (ConceptKind::CorporateName, MarcTag::T610)
            | (ConceptKind::Geographic, MarcTag::T651)
            | (ConceptKind::Topical, MarcTag::T650)
    );
    if tag == MarcTag::T611 {
        return Err(SynthError::MeetingTag);
    }
    if !kind_ok {
        return Err(SynthError::KindTagMismatch {
            label: label.clone(),
            kind: format!("{kind:?}"),
            tag,
        });
    }

    let (ind1, ind2) = match tag {
        MarcTag::T600 => ('1', '0'), // surname entry
        MarcTag::T610 => ('2', '0'), // direct-order corporate name
        MarcTag::T655 => (' ', '7'),
        _ => (' ', '0'),
    };

    let mut subfields: Vec<Subfield> = Vec::new();
    match tag {
        MarcTag::T600 | MarcTag::T610 => {
            let name = validated
                .name_components
                .as_ref()
                .ok_or_else(|| SynthError::MissingNameComponents { label: label.clone() })?;
            let mut a = name.name.clone();
            if name.dates.is_some() && !a.ends_with(',') {
                a.push(',');
            } else if name.dates.is_none() && name.work_title.is_some() && !ends_terminally(&a) {
                a.push('.');
            }
            subfields.push(Subfield::new('a', a));
            if let Some(dates) = &name.dates {
                let mut d = dates.clone();
                if name.work_title.is_some() && !ends_terminally(&d) {
                    d.push('.');
                }
                subfields.push(Subfield::new('d', d));
            }
            if let Some(title) = &name.work_title {
                subfields.push(Subfield::new('t', title.clone()));
            }
        }
        _ => {
            subfields.push(Subfield::new('a', validated.authorized_base.clone()));
        }
    }

    for sub in order_subdivisions(&validated.resolved_subdivisions, validated.order)? {
        subfields.push(Subfield::new(subdivision_code(sub.kind), sub.value));
    }

    let mut field = SubjectField { tag, ind1, ind2, subfields };
    field = apply_punctuation(field);
    if tag == MarcTag::T655 {
        field.subfields.push(Subfield::new('2', "lcgft"));
    }
    field.validate().map_err(|mut e| {
        if let SynthError::InvalidField { detail, .. } = &mut e {
            detail.insert_str(0, &format!("heading {label:?}: "));
        }
        e
    })?;
    Ok(field)
}

impl SubjectField {
    /// Checks the structural and policy invariants of a synthesized field.
    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |rule: &'static str, detail: String| Err(SynthError::InvalidField { rule, detail });
        if self.subfields.is_empty() || self.subfields[0].code != 'a' {
            return invalid("first subfield must be $a", format!("{:?}", self.subfields.first()));
        }
        if let Some(v) = self.subfields.iter().find(|s| s.code == 'v') {
            return Err(SynthError::FormSubdivision(v.value.clone()));
        }
        for s in &self.subfields {
            if s.value.is_empty() {
                return invalid("subfield values must be non-empty", format!("${}", s.code));
            }
            if s.value.contains('$') || s.value.contains('\n') {
                return invalid(
                    "subfield values must not contain '$' or newlines",
                    format!("${} = {:?}", s.code, s.value),
                );
            }
            if !s.code.is_ascii_lowercase() && !s.code.is_ascii_digit() {
                return invalid("subfield codes are lowercase letters or digits", s.code.to_string());
            }
        }
        match self.tag {
            MarcTag::T655 => {
                if self.ind2 != '7' {
                    return invalid("655 requires second indicator 7", self.ind2.to_string());
                }
                match self.subfields.last() {
                    Some(s) if s.code == '2' && s.value == "lcgft" => {}
                    other => {
                        return invalid("655 must end with $2 lcgft", format!("{other:?}"));
                    }
                }
            }
            _ => {
                if self.ind2 != '0' {
                    return invalid(
                        "LCSH-tagged fields require second indicator 0",
                        self.ind2.to_string(),
                    );
                }
            }
        }
        match self.tag {
            MarcTag::T600 if self.ind1 != '1' && self.ind1 != '0' => {
                return invalid("600 first indicator must be 0 or 1", self.ind1.to_string());
            }
            MarcTag::T610 if self.ind1 != '2' => {
                return invalid("610 first indicator must be 2", self.ind1.to_string());
            }
            _ => {}
        }
        Ok(())
    }
}

fn render_indicator(c: char) -> char {
    if c == ' ' {
        '_'
    } else {
        c
    }
}

/// Canonical text line: three-digit tag, one space, two indicators with
/// blank rendered as `_`, one space, then each subfield as `$`, code,
/// value, concatenated without separators. Injective over valid fields.
pub fn render(field: &SubjectField) -> String {
    let mut out = String::new();
    out.push_str(field.tag.as_str());
    out.push(' ');
    out.push(render_indicator(field.ind1));
    out.push(render_indicator(field.ind2));
    out.push(' ');
    for s in &field.subfields {
        out.push('$');
        out.push(s.code);
        out.push_str(&s.value);
    }
    out
}
