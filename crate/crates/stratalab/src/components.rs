//! Connected components of genus-one residueless strata.
//!
//! Non-hyperelliptic components are counted by rotation number (divisors of
//! the gcd of the pole orders), adjusted by a data table of exceptional
//! signatures. Hyperelliptic components are counted by ramification profile:
//! involutions of the labelled poles that preserve orders, fix the zero
//! (so `a` must be even), fix only even-order poles, and fix at most four
//! marked points including the zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::euler::{
    chi_compact, p1_all_rational, ChiValue, CorrectionProvider, EulerError, EulerResult, Mode, Rational,
};
use crate::signatures::ResiduelessSignature;

const EXCEPTIONS_TOML: &str = include_str!("../data/nonhyperelliptic_exceptions.toml");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("h0 - chi/2 = {0} is negative: chi and the component count disagree")]
    NegativeGenusTotal(Rational),
    #[error("h0 - chi/2 = {0} is not an integer")]
    NonIntegralGenusTotal(Rational),
    #[error("Euler characteristic of {0} is only known as a bracket")]
    InexactChi(String),
    #[error("bracket {bracket} for {sig} straddles 2*h0 = {twice_h0}")]
    Inconclusive {
        sig: String,
        bracket: String,
        twice_h0: u64,
    },
    #[error(transparent)]
    Euler(#[from] EulerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("malformed exception table: {0}")]
    Syntax(String),
    #[error("bad signature {sig:?} in exception table: {reason}")]
    Signature { sig: String, reason: String },
    #[error("duplicate record for {0}")]
    Duplicate(String),
    #[error("record for {0} sets both count and remove_rotation/extra")]
    Conflicting(String),
    #[error("unsupported table version {0}")]
    Version(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentNote {
    /// An exception-table record was applied; carries its source string.
    Exception(String),
    /// Extra tag from the table (`star` marks a corrected classification).
    Mark(String),
    /// Signature outside the hand-checked domain.
    LowConfidence,
}

impl fmt::Display for ComponentNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentNote::Exception(src) => write!(f, "exception: {src}"),
            ComponentNote::Mark(m) => write!(f, "mark: {m}"),
            ComponentNote::LowConfidence => f.write_str("low-confidence"),
        }
    }
}

/// A count with the notes explaining how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counted {
    pub value: u64,
    pub notes: Vec<ComponentNote>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCount {
    pub nonhyperelliptic: u64,
    pub hyperelliptic: u64,
    pub h0: u64,
    pub notes: Vec<ComponentNote>,
}

impl ComponentCount {
    pub fn has_mark(&self, mark: &str) -> bool {
        self.notes
            .iter()
            .any(|n| matches!(n, ComponentNote::Mark(m) if m == mark))
    }

    pub fn is_low_confidence(&self) -> bool {
        self.notes.contains(&ComponentNote::LowConfidence)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjustment {
    pub count: Option<u64>,
    pub remove_rotation: Vec<u64>,
    pub extra: u64,
    pub mark: Option<String>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExceptionTable {
    pub version: u32,
    pub validated: BTreeSet<ResiduelessSignature>,
    pub nonhyperelliptic: BTreeMap<ResiduelessSignature, Adjustment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    version: u32,
    #[serde(default)]
    validated: Vec<String>,
    #[serde(default)]
    nonhyperelliptic: Vec<RawRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    signature: String,
    count: Option<u64>,
    #[serde(default)]
    remove_rotation: Vec<u64>,
    #[serde(default)]
    extra: u64,
    mark: Option<String>,
    source: String,
}

fn parse_sig(s: &str) -> Result<ResiduelessSignature, TableError> {
    s.parse()
        .map_err(|e: crate::signatures::SignatureError| TableError::Signature {
            sig: s.to_string(),
            reason: e.to_string(),
        })
}

/// Parses an exception table in the shipped TOML layout.
pub fn parse_exception_table(text: &str) -> Result<ExceptionTable, TableError> {
    let raw: RawTable = toml::from_str(text).map_err(|e| TableError::Syntax(e.message().to_string()))?;
    if raw.version != 1 {
        return Err(TableError::Version(raw.version));
    }
    let mut table = ExceptionTable {
        version: raw.version,
        ..Default::default()
    };
    for s in &raw.validated {
        if !table.validated.insert(parse_sig(s)?) {
            return Err(TableError::Duplicate(s.clone()));
        }
    }
    for rec in raw.nonhyperelliptic {
        let sig = parse_sig(&rec.signature)?;
        if rec.count.is_some() && (!rec.remove_rotation.is_empty() || rec.extra != 0) {
            return Err(TableError::Conflicting(rec.signature));
        }
        let adj = Adjustment {
            count: rec.count,
            remove_rotation: rec.remove_rotation,
            extra: rec.extra,
            mark: rec.mark,
            source: rec.source,
        };
        if table.nonhyperelliptic.insert(sig, adj).is_some() {
            return Err(TableError::Duplicate(rec.signature));
        }
    }
    Ok(table)
}

/// The table shipped with the crate.
pub fn exception_table() -> &'static ExceptionTable {
    static TABLE: OnceLock<ExceptionTable> = OnceLock::new();
    TABLE.get_or_init(|| parse_exception_table(EXCEPTIONS_TOML).expect("shipped exception table is valid"))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn count_nonhyperelliptic(sig: &ResiduelessSignature) -> Counted {
    count_nonhyperelliptic_with(sig, exception_table())
}

pub fn count_nonhyperelliptic_with(sig: &ResiduelessSignature, table: &ExceptionTable) -> Counted {
    let g = sig.poles().iter().fold(0u64, |g, b| g.gcd(b));
    let rotations = divisors(g);
    let mut notes = Vec::new();
    let value = match table.nonhyperelliptic.get(sig) {
        Some(adj) => {
            notes.push(ComponentNote::Exception(adj.source.clone()));
            if let Some(m) = &adj.mark {
                notes.push(ComponentNote::Mark(m.clone()));
            }
            match adj.count {
                Some(c) => c,
                None => {
                    let kept = rotations.iter().filter(|r| !adj.remove_rotation.contains(r)).count() as u64;
                    kept + adj.extra
                }
            }
        }
        None => rotations.len() as u64,
    };
    if !table.validated.contains(sig) {
        notes.push(ComponentNote::LowConfidence);
    }
    Counted { value, notes }
}

/// Number of ramification profiles admitted by the hyperelliptic rule.
pub fn count_hyperelliptic(sig: &ResiduelessSignature) -> Counted {
    let notes = if exception_table().validated.contains(sig) {
        Vec::new()
    } else {
        vec![ComponentNote::LowConfidence]
    };
    Counted {
        value: hyperelliptic_profiles(sig),
        notes,
    }
}

fn hyperelliptic_profiles(sig: &ResiduelessSignature) -> u64 {
    if sig.zero() % 2 == 1 {
        return 0;
    }
    // Poles fixed in addition to the zero.
    const MAX_FIXED_POLES: usize = 3;

    let mut classes: BTreeMap<u64, usize> = BTreeMap::new();
    for &b in sig.poles() {
        *classes.entry(b).or_default() += 1;
    }
    // ways[f] = number of involutions so far with f fixed poles
    let mut ways = vec![0u64; MAX_FIXED_POLES + 1];
    ways[0] = 1;
    for (&order, &mult) in &classes {
        let mut next = vec![0u64; MAX_FIXED_POLES + 1];
        for swaps in 0..=mult / 2 {
            let fixed = mult - 2 * swaps;
            if order % 2 == 1 && fixed > 0 {
                continue;
            }
            let count = involutions_with(mult, swaps);
            for f in 0..=MAX_FIXED_POLES {
                if f + fixed <= MAX_FIXED_POLES && ways[f] != 0 {
                    next[f + fixed] += ways[f] * count;
                }
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Involutions of `n` labelled points with exactly `swaps` transpositions:
/// `n! / (swaps! 2^swaps (n - 2 swaps)!)`.
fn involutions_with(n: usize, swaps: usize) -> u64 {
    let mut pairs: u64 = 1;
    let mut remaining = n as u64;
    for _ in 0..swaps {
        pairs *= remaining * (remaining - 1) / 2;
        remaining -= 2;
    }
    pairs / (1..=swaps as u64).product::<u64>()
}

pub fn count_components(sig: &ResiduelessSignature) -> ComponentCount {
    let non = count_nonhyperelliptic(sig);
    let hyp = count_hyperelliptic(sig);
    let mut notes = non.notes;
    for n in hyp.notes {
        if !notes.contains(&n) {
            notes.push(n);
        }
    }
    ComponentCount {
        nonhyperelliptic: non.value,
        hyperelliptic: hyp.value,
        h0: non.value + hyp.value,
        notes,
    }
}

/// Sum of the genera of all components, `h0 - chi/2`.
pub fn total_genus(sig: &ResiduelessSignature, chi: &EulerResult) -> Result<u64, ComponentError> {
    let value = chi
        .chi_compact
        .exact()
        .ok_or_else(|| ComponentError::InexactChi(sig.to_string()))?;
    let h0 = count_components(sig).h0;
    let total = Rational::from_integer(h0.into()) - value / Rational::from_integer(2.into());
    if !total.is_integer() {
        return Err(ComponentError::NonIntegralGenusTotal(total));
    }
    if total < Rational::zero() {
        return Err(ComponentError::NegativeGenusTotal(total));
    }
    Ok(total.to_integer().to_u64().expect("genus total fits in u64"))
}

/// Whether every connected component of the stratum is a rational curve.
pub fn all_rational(
    sig: &ResiduelessSignature,
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<bool, ComponentError> {
    if sig.p() == 1 {
        return Ok(p1_all_rational(sig.zero()));
    }
    let chi = chi_compact(sig, mode, provider)?;
    match &chi.chi_compact {
        ChiValue::Exact(_) => Ok(total_genus(sig, &chi)? == 0),
        ChiValue::Bracket { lo, hi } => {
            let twice_h0 = 2 * count_components(sig).h0;
            let target = Rational::from_integer(twice_h0.into());
            if hi < &target {
                Ok(false)
            } else {
                Err(ComponentError::Inconclusive {
                    sig: sig.to_string(),
                    bracket: format!("[{lo}, {hi}]"),
                    twice_h0,
                })
            }
        }
    }
}
