//! Candidate scan with a result cache and a rayon pool.

use anyhow::{Context, Result};
use rayon::prelude::*;
use stratalab::euler::{CorrectionProvider, EulerError, Mode};
use stratalab::search::{assemble_report, candidate_space, evaluate_candidate, Outcome, SearchReport};
use stratalab::ResiduelessSignature;

use crate::cache::{Cache, CacheRecord};

/// Runs `f` on a pool of `jobs` threads; `None` or `Some(0)` picks rayon's default.
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    Ok(pool.install(f))
}

fn exact_outcome(
    sig: &ResiduelessSignature,
    provider: &dyn CorrectionProvider,
) -> Result<(Outcome, Option<CacheRecord>), EulerError> {
    match CacheRecord::compute(sig, provider) {
        Ok(record) => {
            let outcome = record.outcome().expect("freshly computed record is well formed");
            Ok((outcome, Some(record)))
        }
        Err(EulerError::UnresolvedCorrections { .. }) => Ok((Outcome::Unresolved, None)),
        Err(e) => Err(e),
    }
}

/// Scans the candidate space. Exact mode reads and fills `cache`; outcomes
/// are reduced in candidate order whatever the number of threads.
pub fn run_search(
    mode: Mode,
    provider: &dyn CorrectionProvider,
    cache: &mut Cache,
    jobs: Option<usize>,
) -> Result<SearchReport> {
    let candidates = candidate_space();
    let version = provider.version();
    let outcomes: Vec<(Outcome, Option<CacheRecord>)> = with_pool(jobs, || {
        candidates
            .par_iter()
            .map(|sig| match mode {
                Mode::Bracket => evaluate_candidate(sig, mode, provider).map(|o| (o, None)),
                Mode::Exact => match cache.get(&sig.to_string(), version) {
                    Some(record) => Ok((record.outcome().expect("cache lines are checked on load"), None)),
                    None => exact_outcome(sig, provider),
                },
            })
            .collect::<Result<Vec<_>, EulerError>>()
    })??;
    let mut ordered = Vec::with_capacity(outcomes.len());
    for (sig, (outcome, record)) in candidates.into_iter().zip(outcomes) {
        if let Some(r) = record {
            cache.insert(r);
        }
        ordered.push((sig, outcome));
    }
    Ok(assemble_report(ordered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use stratalab::euler::{CalibratedCorrections, NoCorrections};
    use stratalab::search::find_positive_chi;

    #[test]
    fn matches_sequential_search_for_any_job_count() {
        let expected = find_positive_chi(Mode::Exact, &CalibratedCorrections).unwrap();
        for jobs in [Some(1), Some(3), None] {
            let got = run_search(Mode::Exact, &CalibratedCorrections, &mut Cache::disabled(), jobs).unwrap();
            assert_eq!(got, expected);
        }
        let expected = find_positive_chi(Mode::Bracket, &NoCorrections).unwrap();
        let got = run_search(Mode::Bracket, &NoCorrections, &mut Cache::disabled(), Some(2)).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn cached_run_matches_fresh_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut cache = Cache::open(&path).unwrap();
        let fresh = run_search(Mode::Exact, &CalibratedCorrections, &mut cache, Some(2)).unwrap();
        cache.flush().unwrap();
        let mut cache = Cache::open(&path).unwrap();
        assert_eq!(cache.len(), candidate_space().len());
        let cached = run_search(Mode::Exact, &CalibratedCorrections, &mut cache, Some(2)).unwrap();
        assert_eq!(cached, fresh);
    }

    #[test]
    fn unresolved_provider_fills_no_cache() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut cache = Cache::open(&path).unwrap();
        let report = run_search(Mode::Exact, &NoCorrections, &mut cache, Some(2)).unwrap();
        assert!(!report.unresolved.is_empty());
        assert!(cache.len() < candidate_space().len());
        assert!(cache.get("5,-2,-3", "none").is_none());
    }
}
