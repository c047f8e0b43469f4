//! Bounds on the compactified Euler characteristic and the exhaustive search
//! for genus-one residueless strata whose components are all rational.
//!
//! The candidate space is finite: outside it the bounds below are negative.
//! Every candidate is evaluated exactly; the bounds only delimit the space.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::Signed;

use crate::components::count_components;
use crate::euler::{
    chi_compact, factorial, int, p1_all_rational, ratio, ChiValue, CorrectionProvider, EulerError, Mode, Rational,
};
use crate::signatures::ResiduelessSignature;

/// Pruning threshold on `B = (b_1 - 1)(b_2 - 1)` for two poles.
pub const P2_MAX_B: u64 = 176;
/// Largest `c = a - 2p` examined for `p = 3, 4, 5`.
pub const MAX_C: [(usize, u64); 3] = [(3, 12), (4, 5), (5, 1)];
/// Denominator of the rational upper bounds on square roots.
pub const SQRT_PRECISION: u64 = 1_000_000;

/// `p! (c+1) / 48 (20 + 20p - 4p^2 + c(8 - 4p)) + 3`, the value at the
/// extremal signature `(2, ..., 2, c + 2)` plus the largest correction.
pub fn bound_extremal_p3(p: u64, c: u64) -> Rational {
    let p_i = p as i64;
    let c_i = c as i64;
    let poly = 20 + 20 * p_i - 4 * p_i * p_i + c_i * (8 - 4 * p_i);
    Rational::new(
        factorial(p as usize) * BigInt::from(c + 1) * BigInt::from(poly),
        BigInt::from(48),
    ) + int(3)
}

/// Rational `r` with `sqrt(n) <= r <= sqrt(n) + 1/SQRT_PRECISION`.
pub fn sqrt_upper(n: u64) -> Rational {
    let scaled = n as u128 * (SQRT_PRECISION as u128) * (SQRT_PRECISION as u128);
    let mut root = scaled.sqrt();
    if root * root < scaled {
        root += 1;
    }
    Rational::new(BigInt::from(root), BigInt::from(SQRT_PRECISION))
}

/// `B (-(B + 1)/12 + sqrt(b_1) + sqrt(b_2)) + 19/6`, with certified upper
/// bounds on the square roots.
pub fn bound_p2(b1: u64, b2: u64) -> Rational {
    let b = ((b1 - 1) * (b2 - 1)) as i64;
    let inner = -ratio(b + 1, 12) + sqrt_upper(b1) + sqrt_upper(b2);
    int(b) * inner + ratio(19, 6)
}

/// Bound for the class of `sig`: [`bound_p2`] for two poles,
/// [`bound_extremal_p3`] otherwise.
pub fn bound_for(sig: &ResiduelessSignature) -> Option<Rational> {
    match sig.poles() {
        [b1, b2] => Some(bound_p2(*b1, *b2)),
        poles if poles.len() >= 3 => Some(bound_extremal_p3(poles.len() as u64, sig.invariants().c)),
        _ => None,
    }
}

/// Non-decreasing pole sequences of length `len`, entries `>= lo`, sum `<= max_sum`.
fn pole_multisets(len: usize, lo: u64, max_sum: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if len == 0 {
        out.push(prefix.clone());
        return;
    }
    let mut b = lo;
    while b * len as u64 <= max_sum {
        prefix.push(b);
        pole_multisets(len - 1, b, max_sum - b, prefix, out);
        prefix.pop();
        b += 1;
    }
}

/// Pole multisets of size `p` whose `c = a - 2p` lies in `c_range`.
pub fn multisets_with_c(p: usize, c_range: std::ops::RangeInclusive<u64>) -> Vec<ResiduelessSignature> {
    let mut raw = Vec::new();
    pole_multisets(p, 2, 2 * p as u64 + *c_range.end(), &mut Vec::new(), &mut raw);
    let mut sigs: Vec<ResiduelessSignature> = raw
        .iter()
        .map(|poles| ResiduelessSignature::from_poles(poles).expect("poles are at least 2"))
        .filter(|s| c_range.contains(&s.invariants().c))
        .collect();
    sigs.sort();
    sigs
}

/// Two-pole signatures with `B` in the given range.
pub fn two_pole_with_b(b_range: std::ops::Range<u64>) -> Vec<ResiduelessSignature> {
    let mut sigs = Vec::new();
    let mut b1 = 2;
    while (b1 - 1) * (b1 - 1) < b_range.end {
        let mut b2 = b1;
        while (b1 - 1) * (b2 - 1) < b_range.end {
            if b_range.contains(&((b1 - 1) * (b2 - 1))) {
                sigs.push(ResiduelessSignature::from_poles(&[b1, b2]).expect("poles are at least 2"));
            }
            b2 += 1;
        }
        b1 += 1;
    }
    sigs.sort();
    sigs
}

/// Every signature with `2 <= p <= 5` not excluded by the bounds, sorted by
/// `(p, a, poles)`.
pub fn candidate_space() -> Vec<ResiduelessSignature> {
    let mut all = two_pole_with_b(1..P2_MAX_B);
    for (p, max_c) in MAX_C {
        all.extend(multisets_with_c(p, 0..=max_c));
    }
    all.sort_by(|x, y| (x.p(), x).cmp(&(y.p(), y)));
    all
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Positive {
    pub signature: ResiduelessSignature,
    pub chi: ChiValue,
    pub h0: u64,
}

/// Result of evaluating one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    NonPositive,
    Positive(Positive),
    /// Positive with `chi = 2 h0`, so every component is rational.
    Exceptional(Positive),
    /// Positive, but whether `chi = 2 h0` is undecided.
    PositiveUndecided(Positive),
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchReport {
    pub candidates_scanned: usize,
    pub positives: Vec<Positive>,
    pub exceptional: Vec<ResiduelessSignature>,
    pub unresolved: Vec<ResiduelessSignature>,
}

pub fn evaluate_candidate(
    sig: &ResiduelessSignature,
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<Outcome, EulerError> {
    let result = match chi_compact(sig, mode, provider) {
        Ok(r) => r,
        Err(EulerError::UnresolvedCorrections { .. }) => return Ok(Outcome::Unresolved),
        Err(e) => return Err(e),
    };
    let chi = result.chi_compact;
    if !chi.hi().is_positive() {
        return Ok(Outcome::NonPositive);
    }
    if !chi.lo().is_positive() {
        return Ok(Outcome::Unresolved);
    }
    let h0 = count_components(sig).h0;
    let twice_h0 = int(2 * h0 as i64);
    let positive = Positive {
        signature: sig.clone(),
        chi: chi.clone(),
        h0,
    };
    Ok(match &chi {
        ChiValue::Exact(x) if *x == twice_h0 => Outcome::Exceptional(positive),
        ChiValue::Exact(_) => Outcome::Positive(positive),
        ChiValue::Bracket { hi, .. } if *hi < twice_h0 => Outcome::Positive(positive),
        ChiValue::Bracket { .. } => Outcome::PositiveUndecided(positive),
    })
}

/// Folds per-candidate outcomes (in candidate order) into a report.
pub fn assemble_report(outcomes: impl IntoIterator<Item = (ResiduelessSignature, Outcome)>) -> SearchReport {
    let mut report = SearchReport::default();
    for (sig, outcome) in outcomes {
        report.candidates_scanned += 1;
        match outcome {
            Outcome::NonPositive => {}
            Outcome::Positive(pos) => report.positives.push(pos),
            Outcome::Exceptional(pos) => {
                report.exceptional.push(sig);
                report.positives.push(pos);
            }
            Outcome::PositiveUndecided(pos) => {
                report.unresolved.push(sig);
                report.positives.push(pos);
            }
            Outcome::Unresolved => report.unresolved.push(sig),
        }
    }
    report
}

/// Scans [`candidate_space`] sequentially.
pub fn find_positive_chi(mode: Mode, provider: &dyn CorrectionProvider) -> Result<SearchReport, EulerError> {
    let outcomes = candidate_space()
        .into_iter()
        .map(|sig| evaluate_candidate(&sig, mode, provider).map(|o| (sig, o)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_report(outcomes))
}

/// Single-pole signatures `(a; a)` whose components are all rational.
pub fn rational_single_pole() -> Vec<ResiduelessSignature> {
    (2..=12)
        .filter(|&a| p1_all_rational(a))
        .map(|a| ResiduelessSignature::from_poles(&[a]).expect("a >= 2"))
        .collect()
}

/// All-rational strata from a finished report: the single-pole set followed
/// by the exceptional multi-pole signatures, sorted by `(p, a, poles)`.
pub fn exceptional_from_report(
    report: &SearchReport,
    provider: &dyn CorrectionProvider,
) -> Result<Vec<ResiduelessSignature>, EulerError> {
    if let Some(sig) = report.unresolved.first() {
        return Err(EulerError::UnresolvedCorrections {
            sig: sig.to_string(),
            provider: provider.version().to_string(),
        });
    }
    let mut out = rational_single_pole();
    out.extend(report.exceptional.iter().cloned());
    Ok(out)
}

pub fn find_exceptional(
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<Vec<ResiduelessSignature>, EulerError> {
    exceptional_from_report(&find_positive_chi(mode, provider)?, provider)
}

/// Whether `chi` respects the bound of its class; `None` for `p = 1`.
pub fn within_bound(sig: &ResiduelessSignature, chi: &Rational) -> Option<bool> {
    bound_for(sig).map(|b| *chi <= b)
}
