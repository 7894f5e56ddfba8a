//! Client for the LC name-suggestion service, with an offline fixture
//! mode for tests and batch runs.
//!
//! Live mode issues rate-limited GET requests with retry and exponential
//! backoff. Fixture mode replays recorded response bodies keyed by the
//! normalized query and never touches the network. Both paths go through
//! the same response parser.

use std::fs;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::normalize::normalize;

/// One hit from the suggestion service, in response order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NameHit {
    pub uri: String,
    pub label: String,
    pub raw_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientMode {
    Live,
    Fixture,
}

#[derive(Debug, Clone)]
pub struct NameClientConfig {
    pub mode: ClientMode,
    pub endpoint: String,
    pub fixture_dir: Option<PathBuf>,
    pub timeout: Duration,
    pub max_retries: u32,
    pub min_request_interval: Duration,
    pub backoff_base: Duration,
}

pub const DEFAULT_ENDPOINT: &str = "https://id.loc.gov/authorities/names/suggest2";

impl Default for NameClientConfig {
    fn default() -> Self {
        NameClientConfig {
            mode: ClientMode::Fixture,
            endpoint: DEFAULT_ENDPOINT.to_owned(),
            fixture_dir: None,
            timeout: Duration::from_secs(10),
            max_retries: 3,
            min_request_interval: Duration::from_millis(500),
            backoff_base: Duration::from_millis(250),
        }
    }
}

#[derive(Debug, Error)]
pub enum NameError {
    #[error("invalid client config: {0}")]
    Config(String),
    #[error("query is empty after trimming")]
    EmptyQuery,
    #[error("transport failed after {attempts} attempts: {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("service returned status {status}")]
    Status { status: u16 },
    #[error("unparseable response body: {0}")]
    Protocol(String),
    #[error("no fixture recorded for query {query:?} (expected at {path})")]
    FixtureNotFound { query: String, path: String },
    #[error("fixture io error at {path}: {source}")]
    FixtureIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Raw HTTP response as seen by the retry layer.
pub struct TransportResponse {
    pub status: u16,
    pub body: String,
}

/// Minimal blocking HTTP GET abstraction so the retry, backoff, and
/// rate-limit logic is testable without a network.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, timeout: Duration) -> Result<TransportResponse, String>;
}

/// Production transport.
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn get(&self, url: &str, timeout: Duration) -> Result<TransportResponse, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut response = agent.get(url).call().map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(TransportResponse { status, body })
    }
}

/// A transport that always fails; injected in tests to prove fixture-mode
/// runs perform zero network operations.
pub struct FailingTransport;

impl Transport for FailingTransport {
    fn get(&self, _url: &str, _timeout: Duration) -> Result<TransportResponse, String> {
        panic!("network transport invoked");
    }
}

pub struct NameClient {
    config: NameClientConfig,
    transport: Box<dyn Transport>,
    last_request: Mutex<Option<Instant>>,
}

impl NameClient {
    pub fn new(config: NameClientConfig) -> Result<Self, NameError> {
        Self::with_transport(config, Box::new(UreqTransport))
    }

    pub fn with_transport(
        config: NameClientConfig,
        transport: Box<dyn Transport>,
    ) -> Result<Self, NameError> {
        match config.mode {
            ClientMode::Fixture if config.fixture_dir.is_none() => {
                return Err(NameError::Config("fixture mode requires a fixture directory".into()))
            }
            ClientMode::Live if config.endpoint.trim().is_empty() => {
                return Err(NameError::Config("live mode requires an endpoint URL".into()))
            }
            _ => {}
        }
        Ok(NameClient {
            config,
            transport,
            last_request: Mutex::new(None),
        })
    }

    pub fn mode(&self) -> ClientMode {
        self.config.mode
    }

    /// Path of the fixture file for a query: normalized tokens joined by
    /// underscores, plus `.json`.
    pub fn fixture_path(&self, query: &str) -> Result<PathBuf, NameError> {
        let dir = self
            .config
            .fixture_dir
            .as_ref()
            .ok_or_else(|| NameError::Config("no fixture directory configured".into()))?;
        let key = normalize(query).file_key();
        if key.is_empty() {
            return Err(NameError::EmptyQuery);
        }
        Ok(dir.join(format!("{key}.json")))
    }

    /// Looks a name up, returning hits in response order. Fixture mode
    /// replays the recorded body for the normalized query; a missing
    /// fixture is an error, never a silent empty result.
    pub fn suggest_names(&self, query: &str) -> Result<Vec<NameHit>, NameError> {
        if query.trim().is_empty() {
            return Err(NameError::EmptyQuery);
        }
        let body = match self.config.mode {
            ClientMode::Fixture => self.read_fixture(query)?,
            ClientMode::Live => self.fetch(query)?,
        };
        parse_hits(&body)
    }

    /// Fetches a query live and persists the raw body under the
    /// normalized-query key so fixture mode can replay it byte-identically.
    pub fn record_fixture(&self, query: &str) -> Result<PathBuf, NameError> {
        if query.trim().is_empty() {
            return Err(NameError::EmptyQuery);
        }
        let body = self.fetch(query)?;
        parse_hits(&body)?;
        let path = self.fixture_path(query)?;
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| NameError::FixtureIo {
                path: parent.display().to_string(),
                source: e,
            })?;
        }
        fs::write(&path, &body).map_err(|e| NameError::FixtureIo {
            path: path.display().to_string(),
            source: e,
        })?;
        Ok(path)
    }

    fn read_fixture(&self, query: &str) -> Result<String, NameError> {
        let path = self.fixture_path(query)?;
        match fs::read_to_string(&path) {
            Ok(body) => Ok(body),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(NameError::FixtureNotFound {
                query: query.to_owned(),
                path: path.display().to_string(),
            }),
            Err(e) => Err(NameError::FixtureIo {
                path: path.display().to_string(),
                source: e,
            }),
        }
    }

    /// Rate-limited GET with retries. The rate-limit lock is held across
    /// the request, serializing outbound traffic for all callers sharing
    /// this client. Retries cover transport failures and 429/5xx statuses,
    /// with exponential backoff; other statuses fail immediately.
    fn fetch(&self, query: &str) -> Result<String, NameError> {
        let url = format!(
            "{}?q={}",
            self.config.endpoint.trim_end_matches('?'),
            percent_encode_query(query.trim())
        );
        let mut last = self.last_request.lock().expect("rate limiter poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.config.min_request_interval {
                std::thread::sleep(self.config.min_request_interval - elapsed);
            }
        }
        let result = self.fetch_with_retries(&url);
        *last = Some(Instant::now());
        result
    }

    fn fetch_with_retries(&self, url: &str) -> Result<String, NameError> {
        let mut attempt: u32 = 0;
        loop {
            let detail = match self.transport.get(url, self.config.timeout) {
                Ok(r) if (200..300).contains(&r.status) => return Ok(r.body),
                Ok(r) if r.status == 429 || r.status >= 500 => format!("status {}", r.status),
                Ok(r) => return Err(NameError::Status { status: r.status }),
                Err(detail) => detail,
            };
            if attempt >= self.config.max_retries {
                return Err(NameError::Transport { attempts: attempt + 1, detail });
            }
            std::thread::sleep(self.config.backoff_base * 2u32.pow(attempt));
            attempt += 1;
        }
    }
}

/// Parses the service response: a JSON object whose `hits` array (or, as a
/// fallback, its first array member) holds hit objects bearing a URI and a
/// label. Extra fields are ignored so schema additions do not break the
/// client.
pub fn parse_hits(body: &str) -> Result<Vec<NameHit>, NameError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| NameError::Protocol(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| NameError::Protocol("response is not a JSON object".into()))?;
    let array = obj
        .get("hits")
        .and_then(|v| v.as_array())
        .or_else(|| obj.values().find_map(|v| v.as_array()))
        .ok_or_else(|| NameError::Protocol("response contains no hit array".into()))?;
    let mut hits = Vec::with_capacity(array.len());
    for (rank, entry) in array.iter().enumerate() {
        let hit = entry
            .as_object()
            .ok_or_else(|| NameError::Protocol(format!("hit {rank} is not an object")))?;
        let uri = hit
            .get("uri")
            .and_then(|v| v.as_str())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| NameError::Protocol(format!("hit {rank} lacks a uri")))?;
        let label = ["aLabel", "suggestLabel", "label"]
            .iter()
            .find_map(|key| hit.get(*key).and_then(|v| v.as_str()))
            .filter(|s| !s.is_empty())
            .ok_or_else(|| NameError::Protocol(format!("hit {rank} lacks a label")))?;
        hits.push(NameHit {
            uri: uri.to_owned(),
            label: label.to_owned(),
            raw_rank: rank,
        });
    }
    Ok(hits)
}

fn percent_encode_query(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for byte in s.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(byte as char)
            }
            _ => out.push_str(&format!("%{byte:02X}")),
        }
    }
    out
}

/// Splits a name authority label into the name proper and a trailing date
/// qualifier ("Yunus, Muhammad, 1940-" or "Baxter, Richard, 1615-1691").
pub fn strip_name_dates(label: &str) -> (String, Option<String>) {
    static DATE_SUFFIX: std::sync::OnceLock<regex::Regex> = std::sync::OnceLock::new();
    let re = DATE_SUFFIX.get_or_init(|| {
        regex::Regex::new(
            r"(?x)
            ,\s*
            ( (?:active\ |approximately\ |ca\.\ ?|b\.\ ?|d\.\ ?)?
              \d{3,4}\??\s*-\s*(?:\d{3,4}\??)? )
            \.?\s*$",
        )
        .expect("date suffix pattern compiles")
    });
    match re.captures(label) {
        Some(caps) => {
            let full = caps.get(0).unwrap();
            let dates = caps.get(1).unwrap().as_str().trim().to_owned();
            (label[..full.start()].trim_end().to_owned(), Some(dates))
        }
        None => (label.trim_end_matches('.').trim_end().to_owned(), None),
    }
}

/// A name candidate confirmed against a suggestion hit.
#[derive(Debug, Clone, Serialize)]
pub struct AcceptedName {
    pub hit: NameHit,
    /// Name proper, without the date qualifier.
    pub name: String,
    /// Date qualifier from the authority label, when present.
    pub dates: Option<String>,
    /// Total number of hits the service returned for the query.
    pub total_hits: usize,
}

/// Acceptance policy: the first hit whose label, with date subfields
/// removed, normalizes equal to the candidate name. The hit's full label
/// (with dates) becomes the authorized form, so undated input gains the
/// authority's dates.
pub fn accept_name(candidate: &str, hits: &[NameHit]) -> Option<AcceptedName> {
    let wanted = normalize(candidate);
    for hit in hits {
        let (name, dates) = strip_name_dates(&hit.label);
        if normalize(&name) == wanted {
            return Some(AcceptedName {
                hit: hit.clone(),
                name,
                dates,
                total_hits: hits.len(),
            });
        }
    }
    None
}

/// Splits a name-title label ("Baxter, Richard. Methodus theologiæ
/// Christianæ") at the first period that does not terminate a one-letter
/// initial. Returns `None` when no such split point exists.
pub fn split_name_title(label: &str) -> Option<(String, String)> {
    let chars: Vec<char> = label.chars().collect();
    let mut word_len = 0usize;
    for (i, &c) in chars.iter().enumerate() {
        if c == '.' {
            let rest: String = chars[i + 1..].iter().collect();
            let title = rest.trim_start();
            if word_len > 1 && !title.is_empty() {
                let name: String = chars[..i].iter().collect();
                return Some((name.trim_end().to_owned(), title.to_owned()));
            }
            word_len = 0;
        } else if c.is_whitespace() || c == ',' {
            word_len = 0;
        } else {
            word_len += 1;
        }
    }
    None
}
