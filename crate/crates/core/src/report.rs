//! Serialisation helpers shared by report types.

use num_rational::{BigRational, Rational64};
use serde::Serializer;

/// Rationals as strings such as `"-15/2"`.
pub fn ser_rationals<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn ser_big_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
