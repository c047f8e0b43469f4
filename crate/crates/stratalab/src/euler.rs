//! Euler characteristics of genus-one residueless strata `R_{1,1+p}(a, -b_1, ..., -b_p)`.
//!
//! All values are exact rationals. The compactified characteristic is
//! assembled as the open characteristic plus the count of boundary points:
//! `p! B / 2` points from the `p!`-fold pole orderings, the cusp gcd-sums, and
//! the correction `eps0`. For `p = 2` the same decomposition holds with the
//! cusp sums specialising to `T_1 + T_2`.
//!
//! The corrections `eps0` (`p` = 2, 3) and `eta` (`p` = 2) come from a
//! [`CorrectionProvider`]. [`Mode::Bracket`] ignores the provider and returns
//! an interval that contains every admissible correction.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::signatures::ResiduelessSignature;

pub type Rational = BigRational;

/// Default budget for [`cusp_sum_naive`], counted as `p! * prod (b_i - 1)`.
pub const DEFAULT_NAIVE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error("{op} needs {expected} poles, signature {sig} has {found}")]
    WrongArity {
        op: &'static str,
        expected: &'static str,
        found: usize,
        sig: String,
    },
    #[error("naive enumeration of {sig} needs {terms} terms, cap is {cap}")]
    CapExceeded { sig: String, terms: BigUint, cap: u64 },
    #[error("correction provider {provider} has no value for {sig}")]
    UnresolvedCorrections { sig: String, provider: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Exact,
    Bracket,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "bracket" => Ok(Mode::Bracket),
            other => Err(format!("unknown mode {other:?}, expected exact or bracket")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Bracket => "bracket",
        })
    }
}

/// An exact value or a closed interval known to contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChiValue {
    Exact(Rational),
    Bracket { lo: Rational, hi: Rational },
}

impl ChiValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ChiValue::Exact(v) => Some(v),
            ChiValue::Bracket { .. } => None,
        }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            ChiValue::Exact(v) => v,
            ChiValue::Bracket { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            ChiValue::Exact(v) => v,
            ChiValue::Bracket { hi, .. } => hi,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    fn shifted(lo: Rational, width: Rational) -> Self {
        if width.is_zero() {
            ChiValue::Exact(lo)
        } else {
            let hi = &lo + width;
            ChiValue::Bracket { lo, hi }
        }
    }
}

impl fmt::Display for ChiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiValue::Exact(v) => write!(f, "{v}"),
            ChiValue::Bracket { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

/// Correction terms entering the Euler characteristic.
///
/// `eps` and `eps1`, `eps2` are explicit; `eps0` and `eta` are `None` when
/// left to the bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionTerms {
    pub eps: Rational,
    pub eps0: Option<Rational>,
    pub eps1: Rational,
    pub eps2: Rational,
    pub eta: Option<Rational>,
}

impl CorrectionTerms {
    pub fn is_exact(&self) -> bool {
        self.eps0.is_some() && self.eta.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerResult {
    pub signature: ResiduelessSignature,
    pub chi_open: ChiValue,
    pub chi_compact: ChiValue,
    pub corrections: CorrectionTerms,
}

impl EulerResult {
    pub fn is_exact(&self) -> bool {
        self.chi_compact.exact().is_some()
    }

    /// Number of boundary points `chi_compact - chi_open` when both are exact.
    pub fn boundary_points(&self) -> Option<Rational> {
        Some(self.chi_compact.exact()? - self.chi_open.exact()?)
    }
}

/// Source of the case-dependent corrections `eps0` and `eta`.
pub trait CorrectionProvider: Send + Sync {
    /// Tag recorded alongside cached results.
    fn version(&self) -> &str;

    /// `eps0` for `p` in {2, 3}; `None` when the provider cannot decide.
    fn eps0(&self, sig: &ResiduelessSignature) -> Option<Rational>;

    /// `eta` for `p = 2`; `None` when the provider cannot decide.
    fn eta(&self, sig: &ResiduelessSignature) -> Option<Rational>;
}

/// Closed-form corrections, fitted to the published values and to the
/// requirement that the compactified characteristic be an even integer.
///
/// * `p = 3`: `eps0 = 0` unless all poles are even; then `eps0 = 3` when all
///   `b_i / 2` share a parity, else `2`.
/// * `p = 2`: `eps0 = 0` unless both poles are even; then `eps0 = 3` when both
///   are divisible by 4, else `2`. `eta = 2/3` iff `b_1 = b_2 (mod 3)` and
///   `b_1 != 1 (mod 3)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CalibratedCorrections;

impl CorrectionProvider for CalibratedCorrections {
    fn version(&self) -> &str {
        "calibrated-1"
    }

    fn eps0(&self, sig: &ResiduelessSignature) -> Option<Rational> {
        let poles = sig.poles();
        let value = match poles.len() {
            2 | 3 if poles.iter().all(|b| b % 2 == 0) => {
                let uniform = if poles.len() == 3 {
                    poles.iter().all(|b| (b / 2) % 2 == (poles[0] / 2) % 2)
                } else {
                    poles.iter().all(|b| b % 4 == 0)
                };
                if uniform {
                    3
                } else {
                    2
                }
            }
            _ => 0,
        };
        Some(int(value))
    }

    fn eta(&self, sig: &ResiduelessSignature) -> Option<Rational> {
        match sig.poles() {
            &[b1, b2] if b1 % 3 == b2 % 3 && b1 % 3 != 1 => Some(ratio(2, 3)),
            _ => Some(Rational::zero()),
        }
    }
}

/// Provider that knows no corrections; exact mode then fails for `p` in {2, 3}.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCorrections;

impl CorrectionProvider for NoCorrections {
    fn version(&self) -> &str {
        "none"
    }

    fn eps0(&self, sig: &ResiduelessSignature) -> Option<Rational> {
        (sig.p() >= 4).then(Rational::zero)
    }

    fn eta(&self, sig: &ResiduelessSignature) -> Option<Rational> {
        (sig.p() != 2).then(Rational::zero)
    }
}

pub(crate) fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub(crate) fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn big(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

fn arity(op: &'static str, expected: &'static str, sig: &ResiduelessSignature) -> EulerError {
    EulerError::WrongArity {
        op,
        expected,
        found: sig.p(),
        sig: sig.to_string(),
    }
}

/// Main polynomial term `p! B / 48 * (A - a^2 - 4a + shift)`.
fn main_term(sig: &ResiduelessSignature, shift: i64) -> Rational {
    let inv = sig.invariants();
    let a = inv.a as i64;
    let inner = inv.sum_sq as i64 - a * a - 4 * a + shift;
    big(factorial(sig.p()) * inv.pole_product) * int(inner) / int(48)
}

fn all_poles_even(sig: &ResiduelessSignature) -> bool {
    sig.poles().iter().all(|b| b % 2 == 0)
}

/// `eps`: `-1/2` for `p = 3` with all poles even, else 0.
pub fn eps_open(sig: &ResiduelessSignature) -> Rational {
    if sig.p() == 3 && all_poles_even(sig) {
        ratio(-1, 2)
    } else {
        Rational::zero()
    }
}

/// `chi(R) = p! B / 48 (A - a^2 - 4a - 4) + eps` for `p >= 3`.
pub fn chi_open_p3(sig: &ResiduelessSignature) -> Result<Rational, EulerError> {
    if sig.p() < 3 {
        return Err(arity("chi_open_p3", "at least 3", sig));
    }
    Ok(main_term(sig, -4) + eps_open(sig))
}

/// Cusp gcd-sum by direct enumeration over `(t, tau, C)`.
///
/// `cap` bounds `p! * prod (b_i - 1)`, the number of `(tau, C)` pairs.
pub fn cusp_sum_naive(sig: &ResiduelessSignature, cap: u64) -> Result<Rational, EulerError> {
    if sig.p() < 2 {
        return Err(arity("cusp_sum_naive", "at least 2", sig));
    }
    let poles = sig.poles();
    let p = poles.len();
    let terms: BigUint = (1..=p as u64).map(BigUint::from).product::<BigUint>()
        * poles.iter().map(|&b| BigUint::from(b - 1)).product::<BigUint>();
    if terms > BigUint::from(cap) {
        return Err(EulerError::CapExceeded {
            sig: sig.to_string(),
            terms,
            cap,
        });
    }

    let mut per_t = vec![0u128; p + 1];
    let mut perm: Vec<usize> = (0..p).collect();
    let mut c = vec![1u64; p];
    loop {
        c.iter_mut().for_each(|x| *x = 1);
        loop {
            let (mut sum_c, mut sum_b) = (0u64, 0u64);
            for t in 1..=p {
                let i = perm[t - 1];
                sum_c += c[i];
                sum_b += poles[i];
                per_t[t] += u128::from(sum_c.gcd(&sum_b));
            }
            if !advance_odometer(&mut c, poles) {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }

    Ok((1..=p)
        .map(|t| big(per_t[t]) / int(2 * t as i64))
        .fold(Rational::zero(), |acc, x| acc + x))
}

fn advance_odometer(c: &mut [u64], poles: &[u64]) -> bool {
    for (ci, &b) in c.iter_mut().zip(poles) {
        if *ci + 1 < b {
            *ci += 1;
            return true;
        }
        *ci = 1;
    }
    false
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Per-`t` cusp terms `T_t`, `t = 1..=p` (index 0 unused).
///
/// The summand for a fixed prefix depends only on the set `S` of poles in
/// the prefix and on `s = sum_{i in S} C_i`. The table `dp[t][sum_b][s]`
/// aggregates over all `S` of size `t` with pole sum `sum_b`: it counts the
/// compositions of `s` with `C_i` in `[1, b_i - 1]` for `i in S`, times
/// `prod_{j not in S} (b_j - 1)`. Each `S` is the prefix of `t! (p - t)!`
/// permutations.
pub(crate) fn cusp_terms(sig: &ResiduelessSignature) -> Vec<Rational> {
    let bound: BigUint = sig.poles().iter().map(|&b| BigUint::from(b - 1)).product();
    // Table entries never exceed prod (b_i - 1); gcd factors stay below a.
    if bound.bits() + 64 < 127 {
        cusp_terms_with::<u128>(sig, BigUint::from)
    } else {
        cusp_terms_with::<BigUint>(sig, |x| x)
    }
}

trait Count: Clone + Zero + for<'a> std::ops::AddAssign<&'a Self> + for<'a> std::ops::SubAssign<&'a Self> {
    fn from_u64(v: u64) -> Self;
    fn mul_u64(&self, v: u64) -> Self;
}

impl Count for u128 {
    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }
    fn mul_u64(&self, v: u64) -> Self {
        self * u128::from(v)
    }
}

impl Count for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn mul_u64(&self, v: u64) -> Self {
        self * v
    }
}

fn cusp_terms_with<T: Count>(sig: &ResiduelessSignature, to_big: impl Fn(T) -> BigUint) -> Vec<Rational> {
    let poles = sig.poles();
    let p = poles.len();
    let a = sig.zero() as usize;
    // dp[t][sum_b] is None while no subset of size t has pole sum sum_b.
    let mut dp: Vec<Vec<Option<Vec<T>>>> = vec![vec![None; a + 1]; p + 1];
    let mut unit = vec![T::zero(); a + 1];
    unit[0] = T::from_u64(1);
    dp[0][0] = Some(unit);

    for &b in poles {
        let mut next: Vec<Vec<Option<Vec<T>>>> = vec![vec![None; a + 1]; p + 1];
        for t in 0..=p {
            for sb in 0..=a {
                let Some(row) = &dp[t][sb] else { continue };
                // pole outside the prefix set
                accumulate(
                    &mut next[t][sb],
                    &row.iter().map(|x| x.mul_u64(b - 1)).collect::<Vec<_>>(),
                );
                // pole inside: convolve with C in [1, b - 1] via a sliding window
                if t < p && sb + b as usize <= a {
                    let mut shifted = vec![T::zero(); a + 1];
                    let mut window = T::zero();
                    for s in 0..=a {
                        if s >= 1 {
                            window += &row[s - 1];
                        }
                        if s >= b as usize {
                            window -= &row[s - b as usize];
                        }
                        shifted[s] = window.clone();
                    }
                    accumulate(&mut next[t + 1][sb + b as usize], &shifted);
                }
            }
        }
        dp = next;
    }

    let mut terms = vec![Rational::zero(); p + 1];
    for t in 1..=p {
        let mut g = BigUint::zero();
        for (sb, row) in dp[t].iter().enumerate() {
            let Some(row) = row else { continue };
            let mut acc = T::zero();
            for (s, count) in row.iter().enumerate() {
                if !count.is_zero() {
                    acc += &count.mul_u64((s as u64).gcd(&(sb as u64)));
                }
            }
            g += to_big(acc);
        }
        let perms = factorial(t) * factorial(p - t);
        terms[t] = big(perms * BigInt::from(g)) / int(2 * t as i64);
    }
    terms
}

fn accumulate<T: Count>(slot: &mut Option<Vec<T>>, add: &[T]) {
    match slot {
        Some(existing) => existing.iter_mut().zip(add).for_each(|(x, y)| *x += y),
        None => *slot = Some(add.to_vec()),
    }
}

/// Cusp gcd-sum by the composition-counting table; agrees with
/// [`cusp_sum_naive`].
pub fn cusp_sum_fast(sig: &ResiduelessSignature) -> Result<Rational, EulerError> {
    if sig.p() < 2 {
        return Err(arity("cusp_sum_fast", "at least 2", sig));
    }
    Ok(cusp_terms(sig).into_iter().fold(Rational::zero(), |acc, x| acc + x))
}

/// Largest `eps0` for `p = 3`.
pub fn eps0_max_p3() -> Rational {
    int(3)
}

pub fn chi_compact_p3(
    sig: &ResiduelessSignature,
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<EulerResult, EulerError> {
    let chi_open = chi_open_p3(sig)?;
    let boundary = big(factorial(sig.p()) * sig.invariants().pole_product) / int(2) + cusp_sum_fast(sig)?;
    let base = &chi_open + boundary;

    let eps0 = if sig.p() >= 4 {
        Some(Rational::zero())
    } else {
        match mode {
            Mode::Exact => Some(provider.eps0(sig).ok_or_else(|| unresolved(sig, provider))?),
            Mode::Bracket => None,
        }
    };
    let chi_compact = match &eps0 {
        Some(e) => ChiValue::Exact(base + e),
        None => ChiValue::shifted(base, eps0_max_p3()),
    };
    Ok(EulerResult {
        signature: sig.clone(),
        chi_open: ChiValue::Exact(chi_open),
        chi_compact,
        corrections: CorrectionTerms {
            eps: eps_open(sig),
            eps0,
            eps1: Rational::zero(),
            eps2: Rational::zero(),
            eta: Some(Rational::zero()),
        },
    })
}

fn unresolved(sig: &ResiduelessSignature, provider: &dyn CorrectionProvider) -> EulerError {
    EulerError::UnresolvedCorrections {
        sig: sig.to_string(),
        provider: provider.version().to_string(),
    }
}

/// `(T_1, T_2)` for `p = 2`.
pub fn t_sums_p2(sig: &ResiduelessSignature) -> Result<(Rational, Rational), EulerError> {
    if sig.p() != 2 {
        return Err(arity("t_sums_p2", "exactly 2", sig));
    }
    let mut terms = cusp_terms(sig);
    let t2 = terms.pop().unwrap();
    let t1 = terms.pop().unwrap();
    Ok((t1, t2))
}

/// `(eps1, eps2)` for `p = 2`: `(a/2, (a-1)/2)` if both poles are even, else zero.
pub fn eps12_p2(sig: &ResiduelessSignature) -> (Rational, Rational) {
    if all_poles_even(sig) {
        let a = sig.zero() as i64;
        (ratio(a, 2), ratio(a - 1, 2))
    } else {
        (Rational::zero(), Rational::zero())
    }
}

/// Range of the total correction `eps0 - eps1 + eps2 + eta` for `p = 2`.
///
/// The upper end is `3 - 1/2 + 2/3`: with both poles divisible by 4 and
/// `b_1 = b_2 != 1 (mod 3)` the even-integrality of the characteristic
/// forces `eps0 = 3` together with `eta = 2/3`.
pub fn p2_correction_range() -> (Rational, Rational) {
    (ratio(-1, 2), ratio(19, 6))
}

/// Manifold Euler characteristic of the compactified stratum for `p = 2`:
/// `2 B / 48 (A - a^2 - 4a + 20) + T_1 + T_2 + (eps0 - eps1 + eps2) + eta`.
///
/// The open part is `2 B / 48 (A - a^2 - 4a - 4) + eps2 - eps1 + eta`; the
/// remaining `B + T_1 + T_2 + eps0` counts boundary points.
pub fn chi_compact_p2(
    sig: &ResiduelessSignature,
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<EulerResult, EulerError> {
    let (t1, t2) = t_sums_p2(sig)?;
    let (eps1, eps2) = eps12_p2(sig);
    let main = main_term(sig, 20) + t1 + t2;
    let open_main = main_term(sig, -4);

    let (eps0, eta) = match mode {
        Mode::Exact => (
            Some(provider.eps0(sig).ok_or_else(|| unresolved(sig, provider))?),
            Some(provider.eta(sig).ok_or_else(|| unresolved(sig, provider))?),
        ),
        Mode::Bracket => (None, None),
    };

    let (chi_open, chi_compact) = match (&eps0, &eta) {
        (Some(e0), Some(et)) => (
            ChiValue::Exact(open_main + &eps2 - &eps1 + et),
            ChiValue::Exact(main + e0 - &eps1 + &eps2 + et),
        ),
        _ => {
            let (lo, hi) = p2_correction_range();
            (
                ChiValue::shifted(open_main + &eps2 - &eps1, ratio(2, 3)),
                ChiValue::shifted(&main + &lo, hi - lo),
            )
        }
    };

    Ok(EulerResult {
        signature: sig.clone(),
        chi_open,
        chi_compact,
        corrections: CorrectionTerms {
            eps: Rational::zero(),
            eps0,
            eps1,
            eps2,
            eta,
        },
    })
}

/// Dispatches on the number of poles; `p = 1` is not covered by these formulas.
pub fn chi_compact(
    sig: &ResiduelessSignature,
    mode: Mode,
    provider: &dyn CorrectionProvider,
) -> Result<EulerResult, EulerError> {
    match sig.p() {
        2 => chi_compact_p2(sig, mode, provider),
        p if p >= 3 => chi_compact_p3(sig, mode, provider),
        _ => Err(arity("chi_compact", "at least 2", sig)),
    }
}

/// Whether every component of `R_{1,2}(a, -a)` is rational.
pub fn p1_all_rational(a: u64) -> bool {
    a <= 10 || a == 12
}

/// Returns `true` when `x` is an even integer.
pub fn is_even_integer(x: &Rational) -> bool {
    x.is_integer() && x.to_integer().is_even()
}

/// Converts a rational to `f64` for display only.
pub fn approx(x: &Rational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if x.is_negative() && n > 0.0 {
        -n / d
    } else {
        n / d
    }
}
