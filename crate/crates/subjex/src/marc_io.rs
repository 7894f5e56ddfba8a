//! Parsing and emission of subject data: baseline heading strings with
//! `--`-delimited subdivisions, canonical field lines, and corpus files.
//!
//! Baseline strings carry no subfield codes, so segment types are
//! inferred: chronological from year patterns, geographic from the loaded
//! store or the jurisdiction gazetteer, form from LCGFT labels or a short
//! list of classic form subdivisions, topical otherwise. Each inference
//! carries a confidence so consumers can degrade to untyped comparison.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::authority::{AuthorityStore, RecordKind};
use crate::filter::MarcTag;
use crate::normalize::normalize;
use crate::synth::{render, Subfield, SubjectField};
use crate::validate::GeoPolicy;

/// Inferred category of one baseline segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Base,
    Topical,
    Geographic,
    Chronological,
    Form,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypedSegment {
    pub kind: SegmentKind,
    pub value: String,
    pub confidence: f64,
}

/// A baseline catalog heading split into subdivision segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineHeading {
    pub segments: Vec<String>,
    pub typed_segments: Vec<TypedSegment>,
}

#[derive(Debug, Error)]
pub enum MarcIoError {
    #[error("empty heading line")]
    EmptyLine,
    #[error("column {column}: {detail}")]
    FieldSyntax { column: usize, detail: String },
    #[error("corpus io error at {path}: {source}")]
    CorpusIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus line {line} invalid: {detail}")]
    CorpusLine { line: usize, detail: String },
}

fn delimiter_pattern() -> &'static regex::Regex {
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    // two or more hyphens, or an en/em dash, with optional surrounding space
    RE.get_or_init(|| regex::Regex::new(r"\s*(?:-{2,}|[\u{2013}\u{2014}])\s*").unwrap())
}

fn year_pattern() -> &'static regex::Regex {
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    RE.get_or_init(|| {
        regex::Regex::new(
            r"(?ix)
            \d{3,4}\s*-\s*\d{0,4}
            | ^\s*to\s+\d{3,4}
            | \b\d{1,2}(st|nd|rd|th)\s+century
            | ^\s*\d{3,4}\s*$
            ",
        )
        .unwrap()
    })
}

/// Classic free-floating form subdivisions, recognized even without an
/// LCGFT store loaded.
const COMMON_FORM_SUBDIVISIONS: &[&str] = &[
    "fiction",
    "biography",
    "autobiography",
    "periodicals",
    "congresses",
    "dictionaries",
    "encyclopedias",
    "juvenile literature",
    "juvenile fiction",
];

/// Segment classifier with optional vocabulary context. Without stores it
/// falls back to patterns and the built-in lists.
pub struct BaselineClassifier<'a> {
    pub store_lcsh: Option<&'a AuthorityStore>,
    pub store_lcgft: Option<&'a AuthorityStore>,
    pub gazetteer: &'a GeoPolicy,
}

impl<'a> BaselineClassifier<'a> {
    pub fn new(
        store_lcsh: Option<&'a AuthorityStore>,
        store_lcgft: Option<&'a AuthorityStore>,
        gazetteer: &'a GeoPolicy,
    ) -> Self {
        BaselineClassifier { store_lcsh, store_lcgft, gazetteer }
    }

    /// Classifies segment content irrespective of position.
    pub fn classify_segment(&self, value: &str) -> (SegmentKind, f64) {
        if year_pattern().is_match(value) {
            return (SegmentKind::Chronological, 0.9);
        }
        if let Some(store) = self.store_lcsh {
            if let Ok(Some(rec)) = store.lookup_exact(value) {
                if rec.kind == RecordKind::Geographic {
                    return (SegmentKind::Geographic, 0.9);
                }
            }
        }
        if self.gazetteer.is_jurisdiction(value) {
            return (SegmentKind::Geographic, 0.9);
        }
        if let Some(store) = self.store_lcgft {
            if let Ok(Some(_)) = store.lookup_exact(value) {
                return (SegmentKind::Form, 0.9);
            }
        }
        let key = normalize(value).key();
        if COMMON_FORM_SUBDIVISIONS.contains(&key.as_str()) {
            return (SegmentKind::Form, 0.7);
        }
        if key.is_empty() || !key.chars().any(|c| c.is_alphabetic()) {
            return (SegmentKind::Unknown, 0.2);
        }
        (SegmentKind::Topical, 0.5)
    }

    /// Splits on the `--` delimiter (tolerating spacing variants and en/em
    /// dashes) and types each segment. The first segment is always the
    /// base heading.
    pub fn parse(&self, line: &str) -> Result<BaselineHeading, MarcIoError> {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Err(MarcIoError::EmptyLine);
        }
        let segments: Vec<String> = delimiter_pattern()
            .split(trimmed)
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
        if segments.is_empty() {
            return Err(MarcIoError::EmptyLine);
        }
        let typed_segments = segments
            .iter()
            .enumerate()
            .map(|(i, value)| {
                if i == 0 {
                    TypedSegment { kind: SegmentKind::Base, value: value.clone(), confidence: 1.0 }
                } else {
                    let (kind, confidence) = self.classify_segment(value);
                    TypedSegment { kind, value: value.clone(), confidence }
                }
            })
            .collect();
        Ok(BaselineHeading { segments, typed_segments })
    }
}

/// Context-free parse: pattern rules plus the packaged gazetteer only.
pub fn parse_baseline(line: &str) -> Result<BaselineHeading, MarcIoError> {
    static DEFAULT_GEO: OnceLock<GeoPolicy> = OnceLock::new();
    let gazetteer = DEFAULT_GEO.get_or_init(GeoPolicy::packaged);
    BaselineClassifier::new(None, None, gazetteer).parse(line)
}

/// Parses a canonical rendered line back into a field: exact inverse of
/// `synth::render`. Malformed syntax reports the byte column. Policy checks
/// (such as the `$v` ban) are deliberately not applied here so that legacy
/// corpora can be inspected and scored.
pub fn parse_field_line(line: &str) -> Result<SubjectField, MarcIoError> {
    let syntax = |column: usize, detail: &str| MarcIoError::FieldSyntax {
        column,
        detail: detail.to_owned(),
    };
    let bytes = line.as_bytes();
    if bytes.len() < 8 {
        return Err(syntax(line.len(), "line shorter than `TTT II $a`"));
    }
    // byte-wise checks before slicing, so multibyte garbage cannot panic
    if !bytes[0..3].iter().all(u8::is_ascii_digit) {
        return Err(syntax(0, "tag must be three digits"));
    }
    let tag_text = &line[0..3];
    let tag = MarcTag::from_str_tag(tag_text)
        .ok_or_else(|| syntax(0, &format!("unsupported subject tag {tag_text:?}")))?;
    if bytes[3] != b' ' {
        return Err(syntax(3, "expected space after tag"));
    }
    let parse_indicator = |pos: usize| -> Result<char, MarcIoError> {
        match bytes[pos] {
            b'_' => Ok(' '),
            b @ b'0'..=b'9' => Ok(b as char),
            other => Err(syntax(pos, &format!("indicator must be digit or '_', found {:?}", other as char))),
        }
    };
    let ind1 = parse_indicator(4)?;
    let ind2 = parse_indicator(5)?;
    if bytes[6] != b' ' {
        return Err(syntax(6, "expected space after indicators"));
    }
    let rest = &line[7..];
    if !rest.starts_with('$') {
        return Err(syntax(7, "expected subfields starting with '$'"));
    }
    let mut subfields = Vec::new();
    for (offset, chunk) in rest.split('$').enumerate().skip(1) {
        let column = 7 + offset; // approximate: column of the subfield body
        let mut chars = chunk.chars();
        let code = chars
            .next()
            .ok_or_else(|| syntax(column, "empty subfield (dangling '$')"))?;
        if !code.is_ascii_lowercase() && !code.is_ascii_digit() {
            return Err(syntax(column, &format!("invalid subfield code {code:?}")));
        }
        let value: String = chars.collect();
        if value.is_empty() {
            return Err(syntax(column, &format!("subfield ${code} has an empty value")));
        }
        subfields.push(Subfield { code, value });
    }
    if subfields.is_empty() || subfields[0].code != 'a' {
        return Err(syntax(7, "first subfield must be $a"));
    }
    Ok(SubjectField { tag, ind1, ind2, subfields })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Text,
    Json,
}

/// Serializes fields in order: one canonical line per field for text, or a
/// JSON array of field objects.
pub fn emit(fields: &[SubjectField], format: EmitFormat) -> String {
    match format {
        EmitFormat::Text => {
            let mut out = String::new();
            for f in fields {
                out.push_str(&render(f));
                out.push('\n');
            }
            out
        }
        EmitFormat::Json => {
            serde_json::to_string_pretty(fields).expect("fields serialize")
        }
    }
}

/// One work in a corpus file: its identifier, title, and heading strings
/// (baseline headings or canonical field lines, depending on the corpus).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusWork {
    pub work_id: String,
    pub title: String,
    /// Baseline corpora use the `baseline` key; agent corpora use `fields`.
    /// Readers accept either.
    #[serde(alias = "fields", rename = "baseline")]
    pub headings: Vec<String>,
}

/// Reads a corpus file: one JSON object per line.
pub fn read_corpus(path: &std::path::Path) -> Result<Vec<CorpusWork>, MarcIoError> {
    let text = std::fs::read_to_string(path).map_err(|e| MarcIoError::CorpusIo {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut works = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let work: CorpusWork = serde_json::from_str(line).map_err(|e| MarcIoError::CorpusLine {
            line: lineno + 1,
            detail: e.to_string(),
        })?;
        works.push(work);
    }
    Ok(works)
}
