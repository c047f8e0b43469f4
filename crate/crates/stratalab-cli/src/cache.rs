//! Append-only JSON-lines cache of exact per-signature results.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use stratalab::components::count_components;
use stratalab::euler::{chi_compact, ChiValue, CorrectionProvider, EulerError, Mode, Rational};
use stratalab::search::{Outcome, Positive};
use stratalab::ResiduelessSignature;

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "STRATALAB_CACHE";

/// One cached signature. Rationals are written `num/den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub key: String,
    pub chi_open: String,
    pub chi_compact: String,
    pub h0: u64,
    pub nonhyp: u64,
    pub hyp: u64,
    pub provider_version: String,
}

pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<Rational> {
    let (num, den) = s
        .split_once('/')
        .with_context(|| format!("{s:?} is not of the form num/den"))?;
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
    ensure!(
        digits(num.strip_prefix('-').unwrap_or(num)) && digits(den),
        "{s:?} is not of the form num/den"
    );
    ensure!(den.bytes().any(|c| c != b'0'), "zero denominator in {s:?}");
    s.parse().with_context(|| format!("bad rational {s:?}"))
}

impl CacheRecord {
    /// Exact-mode record; fails when the provider leaves a correction open.
    pub fn compute(sig: &ResiduelessSignature, provider: &dyn CorrectionProvider) -> Result<Self, EulerError> {
        let chi = chi_compact(sig, Mode::Exact, provider)?;
        let exact = |v: &ChiValue| format_ratio(v.exact().expect("exact mode yields exact values"));
        let components = count_components(sig);
        Ok(Self {
            key: sig.to_string(),
            chi_open: exact(&chi.chi_open),
            chi_compact: exact(&chi.chi_compact),
            h0: components.h0,
            nonhyp: components.nonhyperelliptic,
            hyp: components.hyperelliptic,
            provider_version: provider.version().to_string(),
        })
    }

    /// One cache line, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain strings and integers serialize")
    }

    pub fn signature(&self) -> Result<ResiduelessSignature> {
        let sig: ResiduelessSignature = self.key.parse().with_context(|| format!("bad key {:?}", self.key))?;
        ensure!(sig.to_string() == self.key, "key {:?} is not canonical", self.key);
        Ok(sig)
    }

    pub fn chi_compact_value(&self) -> Result<Rational> {
        parse_ratio(&self.chi_compact)
    }

    /// Same classification as [`stratalab::search::evaluate_candidate`] in exact mode.
    pub fn outcome(&self) -> Result<Outcome> {
        let chi = self.chi_compact_value()?;
        if chi <= Rational::from_integer(0.into()) {
            return Ok(Outcome::NonPositive);
        }
        let positive = Positive {
            signature: self.signature()?,
            chi: ChiValue::Exact(chi.clone()),
            h0: self.h0,
        };
        Ok(if chi == Rational::from_integer((2 * self.h0).into()) {
            Outcome::Exceptional(positive)
        } else {
            Outcome::Positive(positive)
        })
    }
}

/// Parses and checks one cache line.
pub fn parse_record(line: &str) -> Result<CacheRecord> {
    let record: CacheRecord = serde_json::from_str(line)?;
    record.signature()?;
    parse_ratio(&record.chi_open)?;
    parse_ratio(&record.chi_compact)?;
    ensure!(
        record.h0 == record.nonhyp.saturating_add(record.hyp),
        "h0 {} is not nonhyp {} + hyp {}",
        record.h0,
        record.nonhyp,
        record.hyp
    );
    if record.provider_version.is_empty() {
        bail!("empty provider_version");
    }
    Ok(record)
}

/// `$STRATALAB_CACHE`, else `$XDG_CACHE_HOME/stratalab/results.jsonl`, else
/// `$HOME/.cache/stratalab/results.jsonl`.
pub fn default_path() -> Option<PathBuf> {
    let var = |name| std::env::var_os(name).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(p) = var(CACHE_ENV) {
        return Some(p);
    }
    let base = var("XDG_CACHE_HOME").or_else(|| var("HOME").map(|h| h.join(".cache")))?;
    Some(base.join("stratalab").join("results.jsonl"))
}

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    records: HashMap<(String, String), CacheRecord>,
    pending: Vec<CacheRecord>,
    warnings: Vec<String>,
}

impl Cache {
    /// A cache that neither reads nor writes.
    pub fn disabled() -> Self {
        Self::default()
    }

    /// Loads `path`; a missing file is an empty cache and corrupt lines are
    /// skipped with a warning.
    pub fn open(path: &Path) -> Result<Self> {
        let mut cache = Self {
            path: Some(path.to_path_buf()),
            ..Self::default()
        };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e).with_context(|| format!("reading cache {}", path.display())),
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_record(line) {
                Ok(r) => {
                    cache
                        .records
                        .entry((r.key.clone(), r.provider_version.clone()))
                        .or_insert(r);
                }
                Err(e) => cache.warnings.push(format!(
                    "{}:{}: skipping corrupt cache line: {e:#}",
                    path.display(),
                    i + 1
                )),
            }
        }
        Ok(cache)
    }

    pub fn is_enabled(&self) -> bool {
        self.path.is_some()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &str, provider_version: &str) -> Option<&CacheRecord> {
        self.records.get(&(key.to_string(), provider_version.to_string()))
    }

    /// Queues `record` for [`Cache::flush`] unless its key is already present.
    pub fn insert(&mut self, record: CacheRecord) {
        if !self.is_enabled() {
            return;
        }
        let k = (record.key.clone(), record.provider_version.clone());
        if let Entry::Vacant(slot) = self.records.entry(k) {
            slot.insert(record.clone());
            self.pending.push(record);
        }
    }

    /// Appends queued records, one JSON object per line.
    pub fn flush(&mut self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if self.pending.is_empty() {
            return Ok(());
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let mut buf = String::new();
        for r in &self.pending {
            buf.push_str(&r.to_line());
            buf.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening cache {}", path.display()))?;
        file.write_all(buf.as_bytes())
            .with_context(|| format!("writing cache {}", path.display()))?;
        self.pending.clear();
        Ok(())
    }
}
