//! Output records and their text, CSV and JSON renderings.
//!
//! JSON and CSV write rationals in reduced form (`4`, `-7/6`).

use std::fmt::Write as _;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use stratalab::components::ComponentCount;
use stratalab::euler::{ChiValue, EulerResult, Mode, Rational};
use stratalab::levelgraphs::WitnessCertificate;
use stratalab::ResiduelessSignature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChiJson {
    Exact(String),
    Bracket { lo: String, hi: String },
}

impl From<&ChiValue> for ChiJson {
    fn from(v: &ChiValue) -> Self {
        match v {
            ChiValue::Exact(x) => ChiJson::Exact(x.to_string()),
            ChiValue::Bracket { lo, hi } => ChiJson::Bracket {
                lo: lo.to_string(),
                hi: hi.to_string(),
            },
        }
    }
}

fn opt(r: &Option<Rational>) -> Option<String> {
    r.as_ref().map(ToString::to_string)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionsJson {
    pub eps: String,
    pub eps0: Option<String>,
    pub eps1: String,
    pub eps2: String,
    pub eta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerRecord {
    pub signature: String,
    pub mode: String,
    pub provider_version: String,
    pub chi_open: ChiJson,
    pub chi_compact: ChiJson,
    pub boundary_points: Option<String>,
    pub corrections: CorrectionsJson,
}

impl EulerRecord {
    pub fn new(r: &EulerResult, mode: Mode, provider_version: &str) -> Self {
        let c = &r.corrections;
        Self {
            signature: r.signature.to_string(),
            mode: mode.to_string(),
            provider_version: provider_version.to_string(),
            chi_open: (&r.chi_open).into(),
            chi_compact: (&r.chi_compact).into(),
            boundary_points: r.boundary_points().map(|b| b.to_string()),
            corrections: CorrectionsJson {
                eps: c.eps.to_string(),
                eps0: opt(&c.eps0),
                eps1: c.eps1.to_string(),
                eps2: c.eps2.to_string(),
                eta: opt(&c.eta),
            },
        }
    }
}

fn chi_text(c: &ChiJson) -> String {
    match c {
        ChiJson::Exact(x) => x.clone(),
        ChiJson::Bracket { lo, hi } => format!("[{lo}, {hi}]"),
    }
}

fn chi_bounds(c: &ChiJson) -> (String, String) {
    match c {
        ChiJson::Exact(x) => (x.clone(), x.clone()),
        ChiJson::Bracket { lo, hi } => (lo.clone(), hi.clone()),
    }
}

fn undecided(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("undecided")
}

#[derive(Serialize)]
struct EulerCsvRow<'a> {
    signature: &'a str,
    mode: &'a str,
    provider_version: &'a str,
    chi_open_lo: String,
    chi_open_hi: String,
    chi_compact_lo: String,
    chi_compact_hi: String,
    boundary_points: Option<&'a str>,
    eps: &'a str,
    eps0: Option<&'a str>,
    eps1: &'a str,
    eps2: &'a str,
    eta: Option<&'a str>,
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn render_euler(r: &EulerRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(r),
        Format::Csv => {
            let (chi_open_lo, chi_open_hi) = chi_bounds(&r.chi_open);
            let (chi_compact_lo, chi_compact_hi) = chi_bounds(&r.chi_compact);
            let c = &r.corrections;
            csv_string([EulerCsvRow {
                signature: &r.signature,
                mode: &r.mode,
                provider_version: &r.provider_version,
                chi_open_lo,
                chi_open_hi,
                chi_compact_lo,
                chi_compact_hi,
                boundary_points: r.boundary_points.as_deref(),
                eps: &c.eps,
                eps0: c.eps0.as_deref(),
                eps1: &c.eps1,
                eps2: &c.eps2,
                eta: c.eta.as_deref(),
            }])
        }
        Format::Text => {
            let c = &r.corrections;
            let mut s = String::new();
            writeln!(s, "signature        {}", r.signature)?;
            writeln!(s, "mode             {}", r.mode)?;
            writeln!(s, "provider         {}", r.provider_version)?;
            writeln!(s, "chi_open         {}", chi_text(&r.chi_open))?;
            writeln!(s, "chi_compact      {}", chi_text(&r.chi_compact))?;
            writeln!(s, "boundary_points  {}", undecided(&r.boundary_points))?;
            writeln!(
                s,
                "corrections      eps={} eps0={} eps1={} eps2={} eta={}",
                c.eps,
                undecided(&c.eps0),
                c.eps1,
                c.eps2,
                undecided(&c.eta)
            )?;
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalRecord {
    pub mode: String,
    pub provider_version: String,
    pub candidates_scanned: usize,
    pub exceptional: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unresolved: Option<Vec<String>>,
}

#[derive(Serialize)]
struct ExceptionalCsvRow<'a> {
    signature: &'a str,
    p: usize,
    status: &'a str,
}

fn pole_count(key: &str) -> usize {
    key.matches(',').count()
}

pub fn render_exceptional(r: &ExceptionalRecord, format: Format) -> Result<String> {
    let unresolved = r.unresolved.as_deref().unwrap_or_default();
    match format {
        Format::Json => json_string(r),
        Format::Csv => {
            let rows = r
                .exceptional
                .iter()
                .map(|s| (s, "exceptional"))
                .chain(unresolved.iter().map(|s| (s, "unresolved")))
                .map(|(s, status)| ExceptionalCsvRow {
                    signature: s,
                    p: pole_count(s),
                    status,
                });
            csv_string(rows)
        }
        Format::Text => {
            let mut s = String::new();
            for sig in &r.exceptional {
                writeln!(s, "{sig}")?;
            }
            if let Some(list) = &r.unresolved {
                writeln!(s, "unresolved ({}):", list.len())?;
                for sig in list {
                    writeln!(s, "  {sig}")?;
                }
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub signature: String,
    pub chi: String,
    pub h0: u64,
    pub nonhyp: u64,
    pub hyp: u64,
    /// `chi < 2 h0`: some component has positive genus.
    pub ok: bool,
    pub mark: Option<String>,
}

impl TableRow {
    pub fn new(sig: &ResiduelessSignature, chi: &Rational, components: &ComponentCount) -> Self {
        let twice_h0 = Rational::from_integer((2 * components.h0).into());
        Self {
            signature: sig.to_string(),
            chi: chi.to_string(),
            h0: components.h0,
            nonhyp: components.nonhyperelliptic,
            hyp: components.hyperelliptic,
            ok: *chi < twice_h0,
            mark: components.has_mark("star").then(|| "star".to_string()),
        }
    }

    fn ok_cell(&self) -> &'static str {
        match (self.ok, self.mark.as_deref()) {
            (true, _) => "\u{2713}",
            (false, Some("star")) => "\u{22c6}",
            _ => "",
        }
    }
}

pub fn render_table(rows: &[TableRow], format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(rows),
        Format::Csv => csv_string(rows),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{:<12}{:<5}{:<8}ok", "signature", "chi", "h0")?;
            for r in rows {
                let h0 = format!("{}={}+{}", r.h0, r.nonhyp, r.hyp);
                let line = format!("{:<12}{:<5}{:<8}{}", r.signature, r.chi, h0, r.ok_cell());
                writeln!(s, "{}", line.trim_end())?;
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentsRecord {
    pub signature: String,
    pub nonhyp: u64,
    pub hyp: u64,
    pub h0: u64,
    pub notes: Vec<String>,
    pub low_confidence: bool,
}

impl ComponentsRecord {
    pub fn new(sig: &ResiduelessSignature, c: &ComponentCount) -> Self {
        Self {
            signature: sig.to_string(),
            nonhyp: c.nonhyperelliptic,
            hyp: c.hyperelliptic,
            h0: c.h0,
            notes: c.notes.iter().map(ToString::to_string).collect(),
            low_confidence: c.is_low_confidence(),
        }
    }
}

pub fn render_components(r: &ComponentsRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(r),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                signature: &'a str,
                nonhyp: u64,
                hyp: u64,
                h0: u64,
                notes: String,
                low_confidence: bool,
            }
            csv_string([Row {
                signature: &r.signature,
                nonhyp: r.nonhyp,
                hyp: r.hyp,
                h0: r.h0,
                notes: r.notes.join("; "),
                low_confidence: r.low_confidence,
            }])
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "signature  {}", r.signature)?;
            writeln!(s, "h0         {}={}+{}", r.h0, r.nonhyp, r.hyp)?;
            for n in &r.notes {
                writeln!(s, "note       {n}")?;
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub level: i32,
    pub vertex: u32,
    pub signature: String,
    pub positive_genus: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub theorem: String,
    pub ambient: String,
    pub genus: u32,
    pub valid: bool,
    pub automorphisms: u64,
    pub ghost_trivial: bool,
    pub violations: Vec<String>,
    pub levels: Vec<LevelJson>,
    /// The graph in the level-graph text format.
    pub graph: String,
}

impl From<&WitnessCertificate> for WitnessRecord {
    fn from(c: &WitnessCertificate) -> Self {
        Self {
            theorem: c.theorem.to_string(),
            ambient: c.ambient.to_string(),
            genus: c.ambient.genus(),
            valid: c.is_valid(),
            automorphisms: c.automorphisms,
            ghost_trivial: c.ghost_trivial,
            violations: c.violations.iter().map(ToString::to_string).collect(),
            levels: c
                .levels
                .iter()
                .map(|l| LevelJson {
                    level: l.level,
                    vertex: l.vertex,
                    signature: l.signature.to_string(),
                    positive_genus: l.positive_genus,
                })
                .collect(),
            graph: c.graph.to_string(),
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_witnesses(records: &[WitnessRecord], format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(records),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                theorem: &'a str,
                ambient: &'a str,
                genus: u32,
                valid: bool,
                automorphisms: u64,
                ghost_trivial: bool,
                levels: String,
                graph: String,
            }
            csv_string(records.iter().map(|r| {
                Row {
                    theorem: &r.theorem,
                    ambient: &r.ambient,
                    genus: r.genus,
                    valid: r.valid,
                    automorphisms: r.automorphisms,
                    ghost_trivial: r.ghost_trivial,
                    levels: r
                        .levels
                        .iter()
                        .map(|l| format!("{}@{}", l.signature, l.level))
                        .collect::<Vec<_>>()
                        .join(" "),
                    graph: r.graph.trim_end().replace('\n', "; "),
                }
            }))
        }
        Format::Text => {
            let mut s = String::new();
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    writeln!(s)?;
                }
                writeln!(s, "theorem        {}", r.theorem)?;
                writeln!(s, "ambient        {} (g={})", r.ambient, r.genus)?;
                writeln!(s, "valid          {}", yes(r.valid))?;
                writeln!(s, "automorphisms  {}", r.automorphisms)?;
                writeln!(s, "ghost_trivial  {}", yes(r.ghost_trivial))?;
                for l in &r.levels {
                    writeln!(
                        s,
                        "level {:<3}      vertex {} {} positive_genus={}",
                        l.level,
                        l.vertex,
                        l.signature,
                        yes(l.positive_genus)
                    )?;
                }
                for v in &r.violations {
                    writeln!(s, "violation      {v}")?;
                }
                s.push_str(&r.graph);
                if !r.graph.ends_with('\n') {
                    s.push('\n');
                }
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub mu: String,
    pub genus: u32,
    pub bound: u64,
}

pub fn render_bound(r: &BoundRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(r),
        Format::Csv => csv_string([r]),
        Format::Text => Ok(format!("{}\n", r.bound)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicabilityRecord {
    pub mu: String,
    pub genus: u32,
    pub theorems: Vec<String>,
}

pub fn render_applicability(r: &ApplicabilityRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(r),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                mu: &'a str,
                genus: u32,
                theorems: String,
            }
            csv_string([Row {
                mu: &r.mu,
                genus: r.genus,
                theorems: r.theorems.join(" "),
            }])
        }
        Format::Text => Ok(format!("{}\n", r.theorems.join(","))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionsRecord {
    pub n: u64,
    /// Decimal string; the count outgrows every fixed-width integer.
    pub count: String,
    pub growth_estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<Vec<String>>,
}

pub fn render_partitions(r: &PartitionsRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(r),
        Format::Csv => match &r.partitions {
            Some(list) => {
                #[derive(Serialize)]
                struct Row<'a> {
                    n: u64,
                    partition: &'a str,
                }
                csv_string(list.iter().map(|p| Row { n: r.n, partition: p }))
            }
            None => {
                #[derive(Serialize)]
                struct Row<'a> {
                    n: u64,
                    count: &'a str,
                    growth_estimate: f64,
                }
                csv_string([Row {
                    n: r.n,
                    count: &r.count,
                    growth_estimate: r.growth_estimate,
                }])
            }
        },
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "n                {}", r.n)?;
            writeln!(s, "count            {}", r.count)?;
            writeln!(s, "growth_estimate  {:.6e}", r.growth_estimate)?;
            for p in r.partitions.iter().flatten() {
                writeln!(s, "{p}")?;
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stratalab::components::count_components;
    use stratalab::euler::{chi_compact, CalibratedCorrections};

    fn sig(s: &str) -> ResiduelessSignature {
        s.parse().unwrap()
    }

    #[test]
    fn euler_json_round_trips() {
        for mode in [Mode::Exact, Mode::Bracket] {
            let r = chi_compact(&sig("8,-4,-4"), mode, &CalibratedCorrections).unwrap();
            let rec = EulerRecord::new(&r, mode, "calibrated-1");
            let text = render_euler(&rec, Format::Json).unwrap();
            let back: EulerRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(back, rec);
            let compact: Rational = match &back.chi_compact {
                ChiJson::Exact(x) => x.parse().unwrap(),
                ChiJson::Bracket { lo, .. } => lo.parse().unwrap(),
            };
            assert_eq!(&compact, r.chi_compact.lo());
        }
    }

    #[test]
    fn euler_csv_quotes_signature() {
        let r = chi_compact(&sig("4,-2,-2"), Mode::Exact, &CalibratedCorrections).unwrap();
        let text = render_euler(&EulerRecord::new(&r, Mode::Exact, "calibrated-1"), Format::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().unwrap().clone();
        let row = reader.records().next().unwrap().unwrap();
        let get = |name: &str| {
            row.get(headers.iter().position(|h| h == name).unwrap())
                .unwrap()
                .to_string()
        };
        assert_eq!(get("signature"), "4,-2,-2");
        assert_eq!(get("chi_compact_lo"), "4");
        assert_eq!(get("chi_compact_hi"), "4");
    }

    #[test]
    fn table_row_cells() {
        let s = sig("10,-2,-8");
        let row = TableRow::new(&s, &Rational::from_integer(4.into()), &count_components(&s));
        assert!(row.ok);
        assert_eq!(row.ok_cell(), "\u{2713}");
        let s = sig("6,-3,-3");
        let row = TableRow::new(&s, &Rational::from_integer(6.into()), &count_components(&s));
        assert!(!row.ok);
        assert_eq!(row.ok_cell(), "\u{22c6}");
    }

    #[test]
    fn exceptional_text_sections() {
        let mut r = ExceptionalRecord {
            mode: "exact".into(),
            provider_version: "calibrated-1".into(),
            candidates_scanned: 1,
            exceptional: vec!["2,-2".into()],
            unresolved: None,
        };
        assert_eq!(render_exceptional(&r, Format::Text).unwrap(), "2,-2\n");
        r.unresolved = Some(vec![]);
        assert_eq!(render_exceptional(&r, Format::Text).unwrap(), "2,-2\nunresolved (0):\n");
        let json = render_exceptional(&r, Format::Json).unwrap();
        assert_eq!(serde_json::from_str::<ExceptionalRecord>(&json).unwrap(), r);
    }
}
