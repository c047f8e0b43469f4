//! Euler characteristics, component counts and level-graph witnesses for
//! strata of meromorphic differentials, with a focus on genus-one
//! residueless strata `R_{1,1+p}(a, -b_1, ..., -b_p)`.

pub mod components;
pub mod euler;
pub mod levelgraphs;
pub mod partitions;
pub mod search;
pub mod signatures;

pub use signatures::{make_residueless, make_signature, ResiduelessSignature, Signature, SignatureError};
