//! Scores agent-generated subject fields against baseline catalog
//! headings along four dimensions: conceptual recall, heading precision,
//! subdivision accuracy, and genre/form treatment.
//!
//! Matching is greedy one-to-one, best level first, ties resolved by
//! baseline order. With no stores loaded the comparison degrades to
//! normalized string equality; with stores, variant links and short
//! broader/narrower paths upgrade near-misses to same-concept or related.
//!
//! Baseline headings carry no MARC tags, so cross-side counts that need
//! tags (name headings, `$v` subfields) are structural facts of the agent
//! side only; the baseline side reports its form-typed segments instead.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::authority::AuthorityStore;
use crate::filter::MarcTag;
use crate::marc_io::{BaselineClassifier, BaselineHeading, SegmentKind};
use crate::normalize::normalize;
use crate::synth::{render, SubjectField};
use crate::validate::GeoPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchLevel {
    NoMatch,
    Related,
    SameConcept,
    Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadingMatch {
    pub agent_index: usize,
    pub agent_line: String,
    pub baseline_index: usize,
    pub baseline: String,
    pub level: MatchLevel,
    pub evidence: String,
}

/// Per-title scores plus the structural counts aggregation needs.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub work_id: String,
    pub conceptual_recall: f64,
    pub heading_precision: f64,
    pub subdivision_accuracy: f64,
    pub genre_form_score: f64,
    pub matches: Vec<HeadingMatch>,
    pub unmatched_baseline: Vec<String>,
    pub unmatched_agent: Vec<String>,
    pub notes: Vec<String>,
    pub agent_field_count: usize,
    pub agent_non_genre_count: usize,
    pub baseline_count: usize,
    pub recall_denominator: usize,
    pub agent_name_field_count: usize,
    pub agent_v_count: usize,
    pub baseline_form_segment_count: usize,
    pub matched_baseline_count: usize,
    pub matched_agent_count: usize,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot aggregate an empty report list")]
    EmptyCorpus,
}

/// Evaluation context; stores are optional and matching degrades to
/// string equality without them.
pub struct EvalContext<'a> {
    pub store_lcsh: Option<&'a AuthorityStore>,
    pub store_lcgft: Option<&'a AuthorityStore>,
    pub gazetteer: &'a GeoPolicy,
    /// Maximum BT/NT distance still counted as the same concept.
    pub same_concept_radius: usize,
    /// Maximum BT/NT distance still counted as related.
    pub related_radius: usize,
}

impl<'a> EvalContext<'a> {
    pub fn new(
        store_lcsh: Option<&'a AuthorityStore>,
        store_lcgft: Option<&'a AuthorityStore>,
        gazetteer: &'a GeoPolicy,
    ) -> Self {
        EvalContext {
            store_lcsh,
            store_lcgft,
            gazetteer,
            same_concept_radius: 1,
            related_radius: 2,
        }
    }

    fn classifier(&self) -> BaselineClassifier<'a> {
        BaselineClassifier::new(self.store_lcsh, self.store_lcgft, self.gazetteer)
    }

    fn resolve(&self, label: &str) -> Option<(char, String)> {
        for (tag, store) in [('s', self.store_lcsh), ('g', self.store_lcgft)] {
            let Some(store) = store else { continue };
            if let Ok(Some(rec)) = store.lookup_exact(label) {
                return Some((tag, rec.id.clone()));
            }
            if let Ok(Some((rec, _))) = store.resolve_variant(label) {
                return Some((tag, rec.id.clone()));
            }
        }
        None
    }

    /// Undirected BT/NT distance between two records of one store, up to
    /// `radius` hops.
    fn graph_distance(&self, scheme: char, a: &str, b: &str, radius: usize) -> Option<usize> {
        if a == b {
            return Some(0);
        }
        let store = match scheme {
            's' => self.store_lcsh?,
            _ => self.store_lcgft?,
        };
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<(&str, usize)> = VecDeque::new();
        seen.insert(a);
        queue.push_back((a, 0));
        while let Some((id, dist)) = queue.pop_front() {
            if dist == radius {
                continue;
            }
            let Some(rec) = store.get(id) else { continue };
            for next in rec.broader_ids.iter().chain(rec.narrower_ids.iter()) {
                if next == b {
                    return Some(dist + 1);
                }
                if seen.insert(next) {
                    queue.push_back((next, dist + 1));
                }
            }
        }
        None
    }

    /// Relation between two base labels: 0 = same concept by string,
    /// variant, or shared record; n = BT/NT distance.
    fn concept_distance(&self, a: &str, b: &str, radius: usize) -> Option<(usize, String)> {
        if normalize(a) == normalize(b) {
            return Some((0, "normalized label equality".into()));
        }
        let (sa, ra) = self.resolve(a)?;
        let (sb, rb) = self.resolve(b)?;
        if sa != sb {
            return None;
        }
        if ra == rb {
            return Some((0, format!("both resolve to record {ra}")));
        }
        self.graph_distance(sa, &ra, &rb, radius)
            .map(|d| (d, format!("BT/NT distance {d} between {ra} and {rb}")))
    }
}

/// Agent field decomposed for comparison.
struct AgentView {
    line: String,
    base: String,
    /// (segment kind, normalized value), in field order.
    subs: Vec<(SegmentKind, String)>,
    tag: MarcTag,
    has_v: bool,
}

fn code_to_kind(code: char) -> Option<SegmentKind> {
    match code {
        'x' => Some(SegmentKind::Topical),
        'z' => Some(SegmentKind::Geographic),
        'y' => Some(SegmentKind::Chronological),
        'v' => Some(SegmentKind::Form),
        _ => None,
    }
}

fn agent_view(field: &SubjectField) -> AgentView {
    let mut base_parts: Vec<&str> = Vec::new();
    let mut subs = Vec::new();
    let mut has_v = false;
    for s in &field.subfields {
        if let Some(kind) = code_to_kind(s.code) {
            if kind == SegmentKind::Form {
                has_v = true;
            }
            subs.push((kind, normalize(&s.value).key()));
        } else if !s.is_control() {
            base_parts.push(&s.value);
        }
    }
    AgentView {
        line: render(field),
        base: base_parts.join(" "),
        subs,
        tag: field.tag,
        has_v,
    }
}

/// Baseline heading decomposed for comparison.
struct BaselineView {
    line: String,
    base: String,
    subs: Vec<(SegmentKind, String)>,
    /// True when the base itself (and every other segment) is a form term.
    form_only: bool,
    form_segments: Vec<String>,
}

fn baseline_view(ctx: &EvalContext<'_>, heading: &BaselineHeading, line: &str) -> BaselineView {
    let base = heading.segments[0].clone();
    let subs: Vec<(SegmentKind, String)> = heading.typed_segments[1..]
        .iter()
        .map(|t| (t.kind, normalize(&t.value).key()))
        .collect();
    let (base_kind, _) = ctx.classifier().classify_segment(&base);
    let form_only =
        base_kind == SegmentKind::Form && subs.iter().all(|(k, _)| *k == SegmentKind::Form);
    let mut form_segments: Vec<String> = heading.typed_segments[1..]
        .iter()
        .filter(|t| t.kind == SegmentKind::Form)
        .map(|t| t.value.clone())
        .collect();
    if form_only {
        form_segments.push(base.clone());
    }
    BaselineView { line: line.to_owned(), base, subs, form_only, form_segments }
}

fn pair_level(ctx: &EvalContext<'_>, agent: &AgentView, baseline: &BaselineView) -> (MatchLevel, String) {
    let string_equal = normalize(&agent.base) == normalize(&baseline.base);
    if string_equal && agent.subs == baseline.subs {
        return (MatchLevel::Exact, "base and typed subdivisions equal".into());
    }
    if string_equal {
        return (
            MatchLevel::SameConcept,
            "base concept equal; subdivisions differ".into(),
        );
    }
    if let Some((dist, via)) =
        ctx.concept_distance(&agent.base, &baseline.base, ctx.related_radius)
    {
        if dist <= ctx.same_concept_radius {
            return (MatchLevel::SameConcept, via);
        }
        if dist <= ctx.related_radius {
            return (MatchLevel::Related, via);
        }
    }
    (MatchLevel::NoMatch, String::new())
}

/// Multiset Jaccard overlap of typed subdivisions; both empty scores 1.
fn subdivision_overlap(a: &[(SegmentKind, String)], b: &[(SegmentKind, String)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    fn count(items: &[(SegmentKind, String)]) -> BTreeMap<(SegmentKind, &str), usize> {
        let mut m = BTreeMap::new();
        for (k, v) in items {
            *m.entry((*k, v.as_str())).or_insert(0) += 1;
        }
        m
    }
    let ma = count(a);
    let mb = count(b);
    let mut intersection = 0usize;
    let mut union = 0usize;
    let keys: BTreeSet<_> = ma.keys().chain(mb.keys()).collect();
    for key in keys {
        let ca = ma.get(key).copied().unwrap_or(0);
        let cb = mb.get(key).copied().unwrap_or(0);
        intersection += ca.min(cb);
        union += ca.max(cb);
    }
    intersection as f64 / union as f64
}

/// Compares one title. Baseline lines that fail to parse are skipped with
/// a note; degenerate inputs produce defined scores with vacuous notes.
pub fn compare_title(
    ctx: &EvalContext<'_>,
    work_id: &str,
    agent_fields: &[SubjectField],
    baseline_lines: &[String],
) -> ComparisonReport {
    let mut notes: Vec<String> = Vec::new();
    let agents: Vec<AgentView> = agent_fields.iter().map(agent_view).collect();
    let classifier = ctx.classifier();
    let mut baselines: Vec<BaselineView> = Vec::new();
    for line in baseline_lines {
        match classifier.parse(line) {
            Ok(h) => baselines.push(baseline_view(ctx, &h, line)),
            Err(e) => notes.push(format!("baseline line {line:?} skipped: {e}")),
        }
    }

    // greedy one-to-one assignment, best level first, baseline order first
    let mut agent_matched: Vec<Option<usize>> = vec![None; agents.len()];
    let mut baseline_matched: Vec<Option<usize>> = vec![None; baselines.len()];
    let mut matches: Vec<HeadingMatch> = Vec::new();
    for level in [MatchLevel::Exact, MatchLevel::SameConcept, MatchLevel::Related] {
        for (bi, baseline) in baselines.iter().enumerate() {
            if baseline_matched[bi].is_some() {
                continue;
            }
            for (ai, agent) in agents.iter().enumerate() {
                if agent_matched[ai].is_some() {
                    continue;
                }
                let (pair, evidence) = pair_level(ctx, agent, baseline);
                if pair >= level {
                    agent_matched[ai] = Some(bi);
                    baseline_matched[bi] = Some(ai);
                    matches.push(HeadingMatch {
                        agent_index: ai,
                        agent_line: agent.line.clone(),
                        baseline_index: bi,
                        baseline: baseline.line.clone(),
                        level: pair,
                        evidence,
                    });
                    break;
                }
            }
        }
    }
    matches.sort_by_key(|m| m.baseline_index);

    // conceptual recall over non-form-only baselines
    let recall_idx: Vec<usize> =
        (0..baselines.len()).filter(|&bi| !baselines[bi].form_only).collect();
    let recall_hits = recall_idx
        .iter()
        .filter(|&&bi| {
            matches
                .iter()
                .any(|m| m.baseline_index == bi && m.level >= MatchLevel::SameConcept)
        })
        .count();
    let conceptual_recall = if recall_idx.is_empty() {
        notes.push("conceptual recall is vacuous (no topical baseline headings)".into());
        1.0
    } else {
        recall_hits as f64 / recall_idx.len() as f64
    };

    // heading precision over non-655 agent fields
    let precision_idx: Vec<usize> =
        (0..agents.len()).filter(|&ai| agents[ai].tag != MarcTag::T655).collect();
    let precision_hits = precision_idx
        .iter()
        .filter(|&&ai| {
            matches
                .iter()
                .any(|m| m.agent_index == ai && m.level == MatchLevel::Exact)
        })
        .count();
    let heading_precision = if precision_idx.is_empty() {
        notes.push("heading precision is vacuous (no topical or name agent fields)".into());
        1.0
    } else {
        precision_hits as f64 / precision_idx.len() as f64
    };

    // subdivision accuracy over matched pairs
    let subdivision_accuracy = if matches.is_empty() {
        notes.push("subdivision accuracy is vacuous (no matched pairs)".into());
        1.0
    } else {
        matches
            .iter()
            .map(|m| subdivision_overlap(&agents[m.agent_index].subs, &baselines[m.baseline_index].subs))
            .sum::<f64>()
            / matches.len() as f64
    };

    // genre/form: baseline form segments covered by agent 655s, scaled by
    // the fraction of agent fields free of form subdivisions
    let form_segments: Vec<&String> =
        baselines.iter().flat_map(|b| b.form_segments.iter()).collect();
    let genre_agents: Vec<&AgentView> =
        agents.iter().filter(|a| a.tag == MarcTag::T655).collect();
    let genre_ctx = EvalContext {
        store_lcsh: ctx.store_lcgft, // genre correspondence resolves in LCGFT
        store_lcgft: None,
        gazetteer: ctx.gazetteer,
        same_concept_radius: ctx.same_concept_radius,
        related_radius: ctx.related_radius,
    };
    let coverage = if form_segments.is_empty() {
        notes.push("genre/form coverage is vacuous (no baseline form segments)".into());
        1.0
    } else {
        let covered = form_segments
            .iter()
            .filter(|segment| {
                genre_agents.iter().any(|a| {
                    genre_ctx
                        .concept_distance(&a.base, segment, genre_ctx.same_concept_radius)
                        .is_some_and(|(d, _)| d <= genre_ctx.same_concept_radius)
                })
            })
            .count();
        covered as f64 / form_segments.len() as f64
    };
    let cleanliness = if agents.is_empty() {
        1.0
    } else {
        let clean = agents.iter().filter(|a| !a.has_v).count();
        clean as f64 / agents.len() as f64
    };
    let genre_form_score = coverage * cleanliness;

    let unmatched_baseline = baselines
        .iter()
        .enumerate()
        .filter(|(bi, _)| baseline_matched[*bi].is_none())
        .map(|(_, b)| b.line.clone())
        .collect();
    let unmatched_agent = agents
        .iter()
        .enumerate()
        .filter(|(ai, _)| agent_matched[*ai].is_none())
        .map(|(_, a)| a.line.clone())
        .collect();

    let matched_baseline_count = (0..baselines.len())
        .filter(|&bi| {
            matches
                .iter()
                .any(|m| m.baseline_index == bi && m.level >= MatchLevel::SameConcept)
        })
        .count();
    let matched_agent_count = (0..agents.len())
        .filter(|&ai| {
            matches
                .iter()
                .any(|m| m.agent_index == ai && m.level >= MatchLevel::SameConcept)
        })
        .count();

    ComparisonReport {
        work_id: work_id.to_owned(),
        conceptual_recall,
        heading_precision,
        subdivision_accuracy,
        genre_form_score,
        matches,
        unmatched_baseline,
        unmatched_agent,
        notes,
        agent_field_count: agents.len(),
        agent_non_genre_count: precision_idx.len(),
        baseline_count: baselines.len(),
        recall_denominator: recall_idx.len(),
        agent_name_field_count: agents
            .iter()
            .filter(|a| matches!(a.tag, MarcTag::T600 | MarcTag::T610))
            .count(),
        agent_v_count: agents.iter().filter(|a| a.has_v).count(),
        baseline_form_segment_count: form_segments.len(),
        matched_baseline_count,
        matched_agent_count,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkRow {
    pub work_id: String,
    pub conceptual_recall: f64,
    pub heading_precision: f64,
    pub subdivision_accuracy: f64,
    pub genre_form_score: f64,
}

/// Corpus-level aggregation of per-title reports.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub works: usize,
    pub mean_conceptual_recall: f64,
    pub mean_heading_precision: f64,
    pub mean_subdivision_accuracy: f64,
    pub mean_genre_form_score: f64,
    /// Works with at least one agent 600/610 field.
    pub agent_name_heading_works: usize,
    /// Baseline strings carry no MARC tags, so no baseline heading can be
    /// identified as a name field; reported for symmetry.
    pub baseline_name_heading_works: usize,
    pub agent_v_total: usize,
    pub baseline_form_segment_total: usize,
    /// Fraction of all baseline headings matched at same-concept or better.
    pub overlap_per_baseline: f64,
    /// Fraction of all agent fields matched at same-concept or better.
    pub overlap_per_agent: f64,
    pub per_work: Vec<WorkRow>,
}

/// Aggregates reports into per-dimension means, structural counts, and
/// both overlap denominators.
pub fn aggregate(reports: &[ComparisonReport]) -> Result<CorpusSummary, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&ComparisonReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let baseline_total: usize = reports.iter().map(|r| r.baseline_count).sum();
    let agent_total: usize = reports.iter().map(|r| r.agent_field_count).sum();
    let matched_baseline: usize = reports.iter().map(|r| r.matched_baseline_count).sum();
    let matched_agent: usize = reports.iter().map(|r| r.matched_agent_count).sum();
    Ok(CorpusSummary {
        works: reports.len(),
        mean_conceptual_recall: mean(|r| r.conceptual_recall),
        mean_heading_precision: mean(|r| r.heading_precision),
        mean_subdivision_accuracy: mean(|r| r.subdivision_accuracy),
        mean_genre_form_score: mean(|r| r.genre_form_score),
        agent_name_heading_works: reports.iter().filter(|r| r.agent_name_field_count > 0).count(),
        baseline_name_heading_works: 0,
        agent_v_total: reports.iter().map(|r| r.agent_v_count).sum(),
        baseline_form_segment_total: reports.iter().map(|r| r.baseline_form_segment_count).sum(),
        overlap_per_baseline: if baseline_total == 0 {
            1.0
        } else {
            matched_baseline as f64 / baseline_total as f64
        },
        overlap_per_agent: if agent_total == 0 {
            1.0
        } else {
            matched_agent as f64 / agent_total as f64
        },
        per_work: reports
            .iter()
            .map(|r| WorkRow {
                work_id: r.work_id.clone(),
                conceptual_recall: r.conceptual_recall,
                heading_precision: r.heading_precision,
                subdivision_accuracy: r.subdivision_accuracy,
                genre_form_score: r.genre_form_score,
            })
            .collect(),
    })
}

/// Renders reports as a plain-text two-column table, agent output on the
/// left and baseline headings on the right, matched rows aligned.
pub fn side_by_side(reports: &[ComparisonReport]) -> String {
    const LEFT: usize = 64;
    let mut out = String::new();
    for report in reports {
        out.push_str(&format!("== {} ==\n", report.work_id));
        out.push_str(&format!(
            "{:<LEFT$} | {}\n",
            "AGENT OUTPUT", "BASELINE HEADINGS"
        ));
        for m in &report.matches {
            out.push_str(&format!(
                "{:<LEFT$} | {}  [{}]\n",
                m.agent_line,
                m.baseline,
                match m.level {
                    MatchLevel::Exact => "exact",
                    MatchLevel::SameConcept => "same concept",
                    MatchLevel::Related => "related",
                    MatchLevel::NoMatch => "none",
                }
            ));
        }
        for line in &report.unmatched_agent {
            out.push_str(&format!("{line:<LEFT$} | ---\n"));
        }
        for line in &report.unmatched_baseline {
            out.push_str(&format!("{:<LEFT$} | {line}\n", "---"));
        }
        out.push_str(&format!(
            "recall {:.2}  precision {:.2}  subdivision {:.2}  genre/form {:.2}\n\n",
            report.conceptual_recall,
            report.heading_precision,
            report.subdivision_accuracy,
            report.genre_form_score
        ));
    }
    out
}

/// Converts an agent field to a baseline-style heading line; used by the
/// self-comparison checks.
pub fn field_to_baseline_line(field: &SubjectField) -> String {
    let view = agent_view(field);
    let mut parts = vec![view.base];
    for s in &field.subfields {
        if code_to_kind(s.code).is_some() {
            parts.push(s.value.trim_end_matches('.').to_owned());
        }
    }
    parts.join(" -- ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::authority::{AuthorityRecord, RecordKind, Scheme};
    use crate::marc_io::parse_field_line;

    fn lcsh_store() -> AuthorityStore {
        let rec = |id: &str, label: &str, broader: Vec<&str>, narrower: Vec<&str>| AuthorityRecord {
            id: id.into(),
            scheme: Scheme::Lcsh,
            kind: RecordKind::Topical,
            authorized_label: label.into(),
            variant_labels: vec![],
            broader_ids: broader.into_iter().map(String::from).collect(),
            narrower_ids: narrower.into_iter().map(String::from).collect(),
            geo_subdividable: false,
        };
        AuthorityStore::from_records(
            Scheme::Lcsh,
            vec![
                rec("pov", "Poverty", vec![], vec!["rp"]),
                rec("rp", "Rural poor", vec!["pov"], vec![]),
                rec("disc", "Race discrimination", vec!["soc"], vec![]),
                rec("soc", "Discrimination", vec![], vec!["disc", "rw"]),
                rec("rw", "Racism in the workplace", vec!["soc"], vec![]),
            ],
        )
        .unwrap()
        .0
    }

    fn lcgft_store() -> AuthorityStore {
        let rec = |id: &str, label: &str, broader: Vec<&str>| AuthorityRecord {
            id: id.into(),
            scheme: Scheme::Lcgft,
            kind: RecordKind::GenreForm,
            authorized_label: label.into(),
            variant_labels: vec![],
            broader_ids: broader.into_iter().map(String::from).collect(),
            narrower_ids: vec![],
            geo_subdividable: false,
        };
        AuthorityStore::from_records(
            Scheme::Lcgft,
            vec![
                rec("fic", "Fiction", vec![]),
                rec("ss", "Short stories", vec!["fic"]),
                rec("mf", "Medical fiction", vec!["fic"]),
            ],
        )
        .unwrap()
        .0
    }

    fn fields(lines: &[&str]) -> Vec<SubjectField> {
        lines.iter().map(|l| parse_field_line(l).unwrap()).collect()
    }

    fn strings(lines: &[&str]) -> Vec<String> {
        lines.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exact_match_on_identical_heading() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let report = compare_title(
            &ctx,
            "t5",
            &fields(&["650 _0 $aPurchasing power parity."]),
            &strings(&["Purchasing power parity"]),
        );
        assert_eq!(report.matches.len(), 1);
        assert_eq!(report.matches[0].level, MatchLevel::Exact);
        assert_eq!(report.conceptual_recall, 1.0);
        assert_eq!(report.heading_precision, 1.0);
        assert_eq!(report.subdivision_accuracy, 1.0);
    }

    #[test]
    fn exact_requires_subdivision_equality() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let report = compare_title(
            &ctx,
            "w",
            &fields(&["650 _0 $aEnglish poetry$yEarly modern, 1500-1700$xHistory and criticism."]),
            &strings(&["English poetry -- Early modern, 1500-1700 -- History and criticism"]),
        );
        assert_eq!(report.matches[0].level, MatchLevel::Exact);

        let report = compare_title(
            &ctx,
            "w",
            &fields(&["650 _0 $aEnglish poetry."]),
            &strings(&["English poetry -- Early modern, 1500-1700 -- History and criticism"]),
        );
        assert_eq!(report.matches[0].level, MatchLevel::SameConcept);
        assert!(report.heading_precision < 1.0);
    }

    #[test]
    fn same_concept_via_one_bt_step() {
        let lcsh = lcsh_store();
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(Some(&lcsh), None, &gaz);
        let report = compare_title(
            &ctx,
            "t4",
            &fields(&["650 _0 $aPoverty."]),
            &strings(&["Rural poor -- Bangladesh -- History"]),
        );
        assert_eq!(report.matches[0].level, MatchLevel::SameConcept);
        assert_eq!(report.conceptual_recall, 1.0);
        assert_eq!(report.heading_precision, 0.0); // not exact
    }

    #[test]
    fn related_via_two_bt_nt_steps() {
        let lcsh = lcsh_store();
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(Some(&lcsh), None, &gaz);
        // Race discrimination -- Discrimination -- Racism in the workplace: 2 hops
        let report = compare_title(
            &ctx,
            "t3",
            &fields(&["650 _0 $aRace discrimination."]),
            &strings(&["Racism in the workplace -- Michigan -- 20th century"]),
        );
        assert_eq!(report.matches[0].level, MatchLevel::Related);
        // related does not count toward recall
        assert_eq!(report.conceptual_recall, 0.0);
    }

    #[test]
    fn empty_agent_output_is_vacuous_precision() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let report = compare_title(&ctx, "w", &[], &strings(&["Anything at all"]));
        assert_eq!(report.conceptual_recall, 0.0);
        assert_eq!(report.heading_precision, 1.0);
        assert!(report.notes.iter().any(|n| n.contains("vacuous")));
        assert_eq!(report.unmatched_baseline.len(), 1);
    }

    #[test]
    fn genre_form_coverage_via_lcgft_links() {
        // baseline form segments "Fiction" are covered by 655s one BT step away
        let lcgft = lcgft_store();
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, Some(&lcgft), &gaz);
        let report = compare_title(
            &ctx,
            "t2",
            &fields(&[
                "650 _0 $aEmergency medicine.",
                "655 _7 $aShort stories.$2lcgft",
                "655 _7 $aMedical fiction.$2lcgft",
            ]),
            &strings(&["Trauma centers -- Fiction", "Emergency physicians -- Fiction"]),
        );
        assert_eq!(report.baseline_form_segment_count, 2);
        assert_eq!(report.genre_form_score, 1.0);
        assert_eq!(report.agent_v_count, 0);
    }

    #[test]
    fn genre_form_scales_with_uncovered_segments_and_v_fields() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        // one covered segment (Fiction ~ Fiction), one uncovered (Biography),
        // and one of two agent fields carries $v
        let report = compare_title(
            &ctx,
            "w",
            &fields(&["655 _7 $aFiction.$2lcgft", "650 _0 $aPoverty$vBiography."]),
            &strings(&["Trauma centers -- Fiction", "Economists -- Biography"]),
        );
        // hand-scored: coverage 1/2, cleanliness 1/2
        assert!((report.genre_form_score - 0.25).abs() < 1e-12);
        assert_eq!(report.agent_v_count, 1);
    }

    #[test]
    fn self_comparison_scores_one() {
        let lines = [
            "650 _0 $aRace discrimination$zUnited States$xHistory$y20th century.",
            "600 10 $aYunus, Muhammad,$d1940-",
            "655 _7 $aEthnographies.$2lcgft",
        ];
        let agent = fields(&lines);
        let baseline: Vec<String> = agent.iter().map(field_to_baseline_line).collect();
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let report = compare_title(&ctx, "self", &agent, &baseline);
        assert_eq!(report.conceptual_recall, 1.0);
        assert_eq!(report.heading_precision, 1.0);
        assert_eq!(report.subdivision_accuracy, 1.0);
        // one-to-one matching
        let mut agent_seen = BTreeSet::new();
        let mut baseline_seen = BTreeSet::new();
        for m in &report.matches {
            assert!(agent_seen.insert(m.agent_index));
            assert!(baseline_seen.insert(m.baseline_index));
        }
    }

    #[test]
    fn aggregate_means_counts_and_overlaps() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let r1 = compare_title(
            &ctx,
            "w1",
            &fields(&["600 10 $aYunus, Muhammad,$d1940-", "650 _0 $aMicrofinance."]),
            &strings(&["Microfinance -- Bangladesh -- History"]),
        );
        let r2 = compare_title(
            &ctx,
            "w2",
            &fields(&["650 _0 $aPurchasing power parity."]),
            &strings(&["Purchasing power parity", "Foreign exchange"]),
        );
        let summary = aggregate(&[r1, r2]).unwrap();
        assert_eq!(summary.works, 2);
        assert_eq!(summary.agent_name_heading_works, 1);
        assert_eq!(summary.baseline_name_heading_works, 0);
        assert_eq!(summary.agent_v_total, 0);
        // 2 of 3 baseline headings matched at >= same-concept
        assert!((summary.overlap_per_baseline - 2.0 / 3.0).abs() < 1e-12);
        // 2 of 3 agent fields matched
        assert!((summary.overlap_per_agent - 2.0 / 3.0).abs() < 1e-12);
        assert!(aggregate(&[]).is_err());

        let single = compare_title(
            &ctx,
            "only",
            &fields(&["650 _0 $aPurchasing power parity."]),
            &strings(&["Purchasing power parity"]),
        );
        let s = aggregate(std::slice::from_ref(&single)).unwrap();
        assert_eq!(s.mean_conceptual_recall, single.conceptual_recall);
        assert_eq!(s.per_work.len(), 1);
    }

    #[test]
    fn side_by_side_renders_columns() {
        let gaz = GeoPolicy::packaged();
        let ctx = EvalContext::new(None, None, &gaz);
        let report = compare_title(
            &ctx,
            "w1",
            &fields(&["650 _0 $aPurchasing power parity."]),
            &strings(&["Purchasing power parity", "Foreign exchange"]),
        );
        let table = side_by_side(&[report]);
        assert!(table.contains("== w1 =="));
        assert!(table.contains("[exact]"));
        assert!(table.contains("| Foreign exchange"));
    }
}
