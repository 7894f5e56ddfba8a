//! Deterministic subject-indexing pipeline for Library of Congress
//! vocabularies.
//!
//! The crate turns a structured concept list for a work into
//! policy-compliant MARC 21 6xx subject fields, in four stages:
//!
//! 1. [`filter`] — quantitative and structural selection rules (coverage
//!    threshold, subtopic collapse, hierarchy deduplication, predominance
//!    ordering, genre/form routing);
//! 2. [`validate`] — authority confirmation against LCSH/LCGFT stores and
//!    the name-suggestion service, plus geographic subdivision
//!    authorization;
//! 3. [`synth`] — MARC 6xx field construction with subdivision ordering,
//!    indicator rules, and punctuation;
//! 4. [`eval`] — scoring of generated fields against baseline catalog
//!    headings.
//!
//! Supporting modules: [`authority`] (NDJSON vocabulary store),
//! [`index`] (TF-IDF retrieval), [`names`] (name authority client),
//! [`marc_io`] (parsing and emission), and [`pipeline`] (configuration
//! and command orchestration used by the `subjex` binary).
//!
//! See the crate examples for one runnable program per capability.

pub mod authority;
pub mod eval;
pub mod filter;
pub mod index;
pub mod marc_io;
pub mod names;
pub mod normalize;
pub mod pipeline;
pub mod synth;
pub mod validate;

pub use authority::{load_authorities, AuthorityRecord, AuthorityStore, Scheme};
pub use eval::{aggregate, compare_title, ComparisonReport, CorpusSummary};
pub use filter::{run_filter, CandidateHeading, Concept, ConceptDocument, MarcTag};
pub use index::{build_index, classify, MatchClass, SearchHit, SearchOptions, TermIndex};
pub use names::{NameClient, NameClientConfig, NameHit};
pub use normalize::{normalize, NormalizedLabel};
pub use pipeline::{PipelineConfig, PipelineError};
pub use synth::{render, synthesize, OrderMode, SubjectField};
pub use validate::{validate_candidate, GeoPolicy, ValidatedHeading, ValidationContext};
