//! Flat attribute values. Nested or compound values are not representable.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{self, OcedTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarType {
    String,
    Boolean,
    Integer,
    Real,
    Date,
    Time,
    Timestamp,
}

impl ScalarType {
    pub const ALL: [ScalarType; 7] = [
        ScalarType::String,
        ScalarType::Boolean,
        ScalarType::Integer,
        ScalarType::Real,
        ScalarType::Date,
        ScalarType::Time,
        ScalarType::Timestamp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScalarType::String => "string",
            ScalarType::Boolean => "boolean",
            ScalarType::Integer => "integer",
            ScalarType::Real => "real",
            ScalarType::Date => "date",
            ScalarType::Time => "time",
            ScalarType::Timestamp => "timestamp",
        }
    }
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarType {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScalarType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ValueError::UnknownType(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("unknown value type {0:?}")]
    UnknownType(String),
    #[error("{text:?} is not a valid {ty} literal")]
    BadLiteral { ty: ScalarType, text: String },
    #[error("real values must be finite")]
    NonFinite,
}

/// A single typed attribute value.
#[derive(Debug, Clone)]
pub enum ScalarValue {
    String(String),
    Boolean(bool),
    Integer(i64),
    Real(f64),
    Date(NaiveDate),
    Time(NaiveTime),
    Timestamp(OcedTime),
}

impl ScalarValue {
    pub fn string(s: impl Into<String>) -> Self {
        ScalarValue::String(s.into())
    }

    /// Finite reals only; NaN and infinities have no stable lexical form.
    pub fn real(v: f64) -> Result<Self, ValueError> {
        if v.is_finite() {
            Ok(ScalarValue::Real(v))
        } else {
            Err(ValueError::NonFinite)
        }
    }

    pub fn scalar_type(&self) -> ScalarType {
        match self {
            ScalarValue::String(_) => ScalarType::String,
            ScalarValue::Boolean(_) => ScalarType::Boolean,
            ScalarValue::Integer(_) => ScalarType::Integer,
            ScalarValue::Real(_) => ScalarType::Real,
            ScalarValue::Date(_) => ScalarType::Date,
            ScalarValue::Time(_) => ScalarType::Time,
            ScalarValue::Timestamp(_) => ScalarType::Timestamp,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ScalarValue::String(s) => Some(s),
            _ => None,
        }
    }

    /// Canonical lexical form. `parse(ty, lexical())` gives the value back.
    pub fn lexical(&self) -> String {
        match self {
            ScalarValue::String(s) => s.clone(),
            ScalarValue::Boolean(b) => b.to_string(),
            ScalarValue::Integer(i) => i.to_string(),
            // Display for f64 prints the shortest string that parses back to
            // the same bits.
            ScalarValue::Real(r) => r.to_string(),
            ScalarValue::Date(d) => time::format_date(*d),
            ScalarValue::Time(t) => time::format_time_of_day(*t),
            ScalarValue::Timestamp(t) => t.timestamp_string(),
        }
    }

    pub fn parse(ty: ScalarType, text: &str) -> Result<Self, ValueError> {
        let bad = || ValueError::BadLiteral {
            ty,
            text: text.to_string(),
        };
        Ok(match ty {
            ScalarType::String => ScalarValue::String(text.to_string()),
            ScalarType::Boolean => match text {
                "true" => ScalarValue::Boolean(true),
                "false" => ScalarValue::Boolean(false),
                _ => return Err(bad()),
            },
            ScalarType::Integer => ScalarValue::Integer(text.parse().map_err(|_| bad())?),
            ScalarType::Real => {
                let v: f64 = text.parse().map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                ScalarValue::Real(v)
            }
            ScalarType::Date => ScalarValue::Date(time::parse_date(text).ok_or_else(bad)?),
            ScalarType::Time => ScalarValue::Time(time::parse_time_of_day(text).ok_or_else(bad)?),
            ScalarType::Timestamp => ScalarValue::Timestamp(OcedTime::parse(text).map_err(|_| bad())?),
        })
    }

    fn rank(&self) -> u8 {
        self.scalar_type() as u8
    }
}

// Reals compare by total order so that equality is reflexive and -0.0 is
// distinguished from 0.0 (their lexical forms differ too).
impl PartialEq for ScalarValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ScalarValue {}

impl PartialOrd for ScalarValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScalarValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ScalarValue::*;
        match (self, other) {
            (String(a), String(b)) => a.cmp(b),
            (Boolean(a), Boolean(b)) => a.cmp(b),
            (Integer(a), Integer(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Date(a), Date(b)) => a.cmp(b),
            (Time(a), Time(b)) => a.cmp(b),
            // timestamp values are instants; resolution is not part of the value
            (Timestamp(a), Timestamp(b)) => a.millis().cmp(&b.millis()),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical())
    }
}

impl From<&str> for ScalarValue {
    fn from(s: &str) -> Self {
        ScalarValue::String(s.to_string())
    }
}

impl From<i64> for ScalarValue {
    fn from(v: i64) -> Self {
        ScalarValue::Integer(v)
    }
}

impl From<bool> for ScalarValue {
    fn from(v: bool) -> Self {
        ScalarValue::Boolean(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literals() {
        assert_eq!(
            ScalarValue::parse(ScalarType::Boolean, "true").unwrap(),
            ScalarValue::Boolean(true)
        );
        assert!(ScalarValue::parse(ScalarType::Boolean, "True").is_err());
        assert!(ScalarValue::parse(ScalarType::Integer, "1.5").is_err());
        assert!(ScalarValue::parse(ScalarType::Real, "NaN").is_err());
        assert!(ScalarValue::parse(ScalarType::Date, "2023-02-30").is_err());
        let ts = ScalarValue::parse(ScalarType::Timestamp, "2023-01-01").unwrap();
        assert_eq!(ts.lexical(), "2023-01-01T00:00:00.000Z");
        assert!(ScalarValue::real(f64::INFINITY).is_err());
    }

    #[test]
    fn empty_string_is_a_value() {
        let v = ScalarValue::parse(ScalarType::String, "").unwrap();
        assert_eq!(v, ScalarValue::string(""));
    }

    #[test]
    fn negative_zero_distinct() {
        assert_ne!(ScalarValue::Real(0.0), ScalarValue::Real(-0.0));
    }

    proptest! {
        #[test]
        fn real_lexical_roundtrip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let x = ScalarValue::Real(v);
            let back = ScalarValue::parse(ScalarType::Real, &x.lexical()).unwrap();
            prop_assert_eq!(x, back);
        }

        #[test]
        fn integer_lexical_roundtrip(v: i64) {
            let x = ScalarValue::Integer(v);
            prop_assert_eq!(ScalarValue::parse(ScalarType::Integer, &x.lexical()).unwrap(), x);
        }
    }
}
