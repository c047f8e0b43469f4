//! Stratum signatures and the scalar invariants derived from them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("signature has no orders")]
    Empty,
    #[error("orders sum to {0}, which is odd")]
    OddSum(i64),
    #[error("orders sum to {0}, implying negative genus")]
    NegativeGenus(i64),
    #[error("zero order {zero} does not equal the pole sum {pole_sum}")]
    SumMismatch { zero: u64, pole_sum: u64 },
    #[error("pole order {0} is below 2")]
    PoleTooSmall(i64),
    #[error("zero order must be positive, got {0}")]
    ZeroNotPositive(i64),
    #[error("no poles given")]
    NoPoles,
    #[error("cannot parse signature: {0}")]
    Parse(String),
}

/// Orders of zeros and poles of a differential, sorted non-increasing.
///
/// The genus is derived from the orders, never supplied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    genus: u32,
    orders: Vec<i64>,
}

impl Signature {
    pub fn new(orders: impl Into<Vec<i64>>) -> Result<Self, SignatureError> {
        let mut orders = orders.into();
        if orders.is_empty() {
            return Err(SignatureError::Empty);
        }
        let sum: i64 = orders.iter().sum();
        if sum.is_odd() {
            return Err(SignatureError::OddSum(sum));
        }
        if sum < -2 {
            return Err(SignatureError::NegativeGenus(sum));
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        let genus = u32::try_from((sum + 2) / 2).map_err(|_| SignatureError::NegativeGenus(sum))?;
        Ok(Self { genus, orders })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn n(&self) -> usize {
        self.orders.len()
    }

    /// The `i`-th largest order (1-based), if present.
    pub fn m(&self, i: usize) -> Option<i64> {
        i.checked_sub(1).and_then(|i| self.orders.get(i).copied())
    }
}

/// `make_signature` under its conventional name.
pub fn make_signature(orders: &[i64]) -> Result<Signature, SignatureError> {
    Signature::new(orders.to_vec())
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Signature {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let orders = parse_int_list(s)?;
        Signature::new(orders)
    }
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, SignatureError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(SignatureError::Empty);
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<i64>()
                .map_err(|_| SignatureError::Parse(format!("invalid integer {tok:?}")))
        })
        .collect()
}

/// Signature `(a; b_1, ..., b_p)` of a genus-one residueless stratum with a
/// single zero of order `a` and poles of orders `b_i >= 2`, `a = sum b_i`.
///
/// Poles are kept sorted non-decreasing, so equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResiduelessSignature {
    zero: u64,
    poles: Vec<u64>,
}

impl ResiduelessSignature {
    pub fn new(zero: i64, poles: &[i64]) -> Result<Self, SignatureError> {
        if poles.is_empty() {
            return Err(SignatureError::NoPoles);
        }
        if let Some(&b) = poles.iter().find(|&&b| b < 2) {
            return Err(SignatureError::PoleTooSmall(b));
        }
        if zero <= 0 {
            return Err(SignatureError::ZeroNotPositive(zero));
        }
        let mut poles: Vec<u64> = poles.iter().map(|&b| b as u64).collect();
        poles.sort_unstable();
        let pole_sum: u64 = poles.iter().sum();
        let zero = zero as u64;
        if zero != pole_sum {
            return Err(SignatureError::SumMismatch { zero, pole_sum });
        }
        Ok(Self { zero, poles })
    }

    /// Builds the signature from poles alone, with `a` their sum.
    pub fn from_poles(poles: &[u64]) -> Result<Self, SignatureError> {
        let a: u64 = poles.iter().sum();
        let poles: Vec<i64> = poles.iter().map(|&b| b as i64).collect();
        Self::new(a as i64, &poles)
    }

    /// The zero order `a`.
    pub fn zero(&self) -> u64 {
        self.zero
    }

    /// Pole orders `b_1 <= ... <= b_p`.
    pub fn poles(&self) -> &[u64] {
        &self.poles
    }

    /// Number of poles `p`.
    pub fn p(&self) -> usize {
        self.poles.len()
    }

    pub fn invariants(&self) -> ScalarInvariants {
        scalar_invariants(self)
    }

    /// The ambient signature `(a, -b_1, ..., -b_p)` in genus one.
    pub fn to_signature(&self) -> Signature {
        let mut orders = vec![self.zero as i64];
        orders.extend(self.poles.iter().map(|&b| -(b as i64)));
        Signature::new(orders).expect("residueless signatures are balanced in genus one")
    }
}

/// `make_residueless` under its conventional name.
pub fn make_residueless(a: i64, poles: &[i64]) -> Result<ResiduelessSignature, SignatureError> {
    ResiduelessSignature::new(a, poles)
}

/// Canonical text form `a,-b1,...,-bp` with poles in non-decreasing order.
impl fmt::Display for ResiduelessSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.zero)?;
        for b in &self.poles {
            write!(f, ",-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for ResiduelessSignature {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = parse_int_list(s)?;
        let (&zero, rest) = values.split_first().ok_or(SignatureError::Empty)?;
        if zero <= 0 {
            return Err(SignatureError::ZeroNotPositive(zero));
        }
        let mut poles = Vec::with_capacity(rest.len());
        for &v in rest {
            if v >= 0 {
                return Err(SignatureError::Parse(format!(
                    "pole orders are written negated, got {v}"
                )));
            }
            poles.push(
                v.checked_neg()
                    .ok_or_else(|| SignatureError::Parse(format!("pole order {v} out of range")))?,
            );
        }
        ResiduelessSignature::new(zero, &poles)
    }
}

/// `(a, A, B, c, gcd)` with `A = sum b_i^2`, `B = prod (b_i - 1)`, `c = a - 2p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarInvariants {
    pub a: u64,
    pub sum_sq: u64,
    pub pole_product: BigInt,
    pub c: u64,
    pub gcd_poles: u64,
}

pub fn scalar_invariants(sig: &ResiduelessSignature) -> ScalarInvariants {
    let poles = sig.poles();
    ScalarInvariants {
        a: sig.zero(),
        sum_sq: poles.iter().map(|b| b * b).sum(),
        pole_product: poles.iter().map(|&b| BigInt::from(b - 1)).product(),
        c: sig.zero() - 2 * poles.len() as u64,
        gcd_poles: poles.iter().fold(0, |g, &b| g.gcd(&b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_signature_examples() {
        let s = make_signature(&[4]).unwrap();
        assert_eq!(s.genus(), 3);
        assert_eq!(s.orders(), &[4]);

        let s = make_signature(&[1, -2, 1]).unwrap();
        assert_eq!(s.genus(), 1);
        assert_eq!(s.orders(), &[1, 1, -2]);

        assert_eq!(make_signature(&[3]), Err(SignatureError::OddSum(3)));
        assert_eq!(make_signature(&[-2, -2]), Err(SignatureError::NegativeGenus(-4)));
        assert_eq!(make_signature(&[]), Err(SignatureError::Empty));
    }

    #[test]
    fn make_residueless_examples() {
        let r = make_residueless(4, &[2, 2]).unwrap();
        assert_eq!(r.poles(), &[2, 2]);
        assert_eq!(
            make_residueless(5, &[2, 2]),
            Err(SignatureError::SumMismatch { zero: 5, pole_sum: 4 })
        );
        assert_eq!(make_residueless(4, &[1, 3]), Err(SignatureError::PoleTooSmall(1)));
        assert_eq!(make_residueless(0, &[]), Err(SignatureError::NoPoles));
    }

    #[test]
    fn scalar_invariant_examples() {
        let inv = scalar_invariants(&make_residueless(8, &[2, 2, 4]).unwrap());
        assert_eq!(
            (inv.sum_sq, inv.pole_product.clone(), inv.c, inv.gcd_poles),
            (24, 3.into(), 2, 2)
        );
        let inv = scalar_invariants(&make_residueless(6, &[3, 3]).unwrap());
        assert_eq!(
            (inv.sum_sq, inv.pole_product.clone(), inv.c, inv.gcd_poles),
            (18, 4.into(), 2, 3)
        );
        let inv = scalar_invariants(&make_residueless(10, &[2, 2, 2, 2, 2]).unwrap());
        assert_eq!(
            (inv.sum_sq, inv.pole_product.clone(), inv.c, inv.gcd_poles),
            (20, 1.into(), 0, 2)
        );
    }

    #[test]
    fn canonical_text_form() {
        let r: ResiduelessSignature = "8,-3,-2,-3".parse().unwrap();
        assert_eq!(r.to_string(), "8,-2,-3,-3");
        assert!("4,-1,-3".parse::<ResiduelessSignature>().is_err());
        assert!("4,2,2".parse::<ResiduelessSignature>().is_err());
        assert!("-4,-2,-2".parse::<ResiduelessSignature>().is_err());
        assert!("".parse::<ResiduelessSignature>().is_err());
        assert!("4,,-2".parse::<ResiduelessSignature>().is_err());
        assert_eq!(r.to_signature().to_string(), "8,-2,-3,-3");
    }

    proptest! {
        #[test]
        fn make_signature_idempotent(orders in prop::collection::vec(-6i64..12, 1..7)) {
            if let Ok(s) = make_signature(&orders) {
                let again = make_signature(s.orders()).unwrap();
                prop_assert_eq!(&again, &s);
                prop_assert_eq!(2 * s.genus() as i64 - 2, s.orders().iter().sum::<i64>());
            }
        }

        #[test]
        fn residueless_bounds(poles in prop::collection::vec(2u64..30, 1..7)) {
            let sig = ResiduelessSignature::from_poles(&poles).unwrap();
            let inv = sig.invariants();
            let p = sig.p() as u64;
            prop_assert!(inv.sum_sq >= 4 * p);
            prop_assert!(inv.pole_product >= BigInt::from(1));
            prop_assert!(inv.a >= 2 * p);
            let reparsed: ResiduelessSignature = sig.to_string().parse().unwrap();
            prop_assert_eq!(reparsed, sig);
        }
    }
}
