//! Timestamps paired with their recording resolution.
//!
//! An [`OcedTime`] is always kept in UTC with millisecond precision. The
//! resolution is stored beside the instant rather than folded into the string
//! form, and every component finer than the resolution must be zero.
//!
//! On input we accept ISO 8601 extended forms with reduced precision
//! (`2022-06-01`, `2022-06-01T22`, `2022-06-01T22:00`, ...), an optional
//! `Z` or numeric offset, a space instead of `T`, and ISO 8601-2 style
//! unspecified trailing components written as `X` digits (`2022-06-01T22:XX`).
//! Missing offsets mean UTC. Output is always the full millisecond form with
//! a `Z` designator.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, NaiveTime, TimeZone, Timelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MS_PER_SECOND: i64 = 1_000;
const MS_PER_MINUTE: i64 = 60 * MS_PER_SECOND;
const MS_PER_HOUR: i64 = 60 * MS_PER_MINUTE;
const MS_PER_DAY: i64 = 24 * MS_PER_HOUR;

/// Precision in which a timestamp was recorded, coarsest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Date,
    Hour,
    Minute,
    Second,
    Millisecond,
}

impl Resolution {
    pub const ALL: [Resolution; 5] = [
        Resolution::Date,
        Resolution::Hour,
        Resolution::Minute,
        Resolution::Second,
        Resolution::Millisecond,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Resolution::Date => "date",
            Resolution::Hour => "hour",
            Resolution::Minute => "minute",
            Resolution::Second => "second",
            Resolution::Millisecond => "millisecond",
        }
    }

    /// Length of one unit of this resolution in milliseconds.
    fn unit_ms(self) -> i64 {
        match self {
            Resolution::Date => MS_PER_DAY,
            Resolution::Hour => MS_PER_HOUR,
            Resolution::Minute => MS_PER_MINUTE,
            Resolution::Second => MS_PER_SECOND,
            Resolution::Millisecond => 1,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Resolution {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Resolution::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| TimeError::UnknownResolution(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("malformed timestamp {0:?}")]
    Malformed(String),
    #[error("unknown resolution {0:?}")]
    UnknownResolution(String),
    #[error("timestamp {timestamp} carries components finer than resolution {resolution}")]
    FinerThanResolution { timestamp: String, resolution: Resolution },
    #[error("timestamp out of range")]
    OutOfRange,
}

/// A point in time (UTC, millisecond precision) plus the resolution it was
/// recorded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OcedTime {
    millis: i64,
    resolution: Resolution,
}

impl OcedTime {
    /// `1970-01-01T00:00:00.000Z`, the default stamp for attribute values
    /// imported without a time.
    pub const EPOCH: OcedTime = OcedTime {
        millis: 0,
        resolution: Resolution::Millisecond,
    };

    pub fn from_millis(millis: i64, resolution: Resolution) -> Result<Self, TimeError> {
        if DateTime::<Utc>::from_timestamp_millis(millis).is_none() {
            return Err(TimeError::OutOfRange);
        }
        if millis.rem_euclid(resolution.unit_ms()) != 0 {
            return Err(TimeError::FinerThanResolution {
                timestamp: format_millis(millis),
                resolution,
            });
        }
        Ok(OcedTime { millis, resolution })
    }

    /// Drops every component finer than `resolution`.
    pub fn truncated(millis: i64, resolution: Resolution) -> Result<Self, TimeError> {
        let unit = resolution.unit_ms();
        OcedTime::from_millis(millis - millis.rem_euclid(unit), resolution)
    }

    pub fn from_datetime(dt: DateTime<Utc>, resolution: Resolution) -> Result<Self, TimeError> {
        OcedTime::from_millis(dt.timestamp_millis(), resolution)
    }

    /// Millisecond-resolution time from calendar components, mainly for
    /// fixtures and tests.
    pub fn ymd_hms_ms(
        year: i32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
        milli: u32,
    ) -> Result<Self, TimeError> {
        let dt = Utc
            .with_ymd_and_hms(year, month, day, hour, minute, second)
            .single()
            .ok_or(TimeError::OutOfRange)?;
        OcedTime::from_millis(dt.timestamp_millis() + i64::from(milli), Resolution::Millisecond)
    }

    pub fn millis(&self) -> i64 {
        self.millis
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn datetime(&self) -> DateTime<Utc> {
        DateTime::<Utc>::from_timestamp_millis(self.millis).expect("range checked on construction")
    }

    /// Same instant, different resolution. Fails if the instant is not
    /// representable in the coarser resolution.
    pub fn with_resolution(&self, resolution: Resolution) -> Result<Self, TimeError> {
        OcedTime::from_millis(self.millis, resolution)
    }

    /// Canonical text: `YYYY-MM-DDThh:mm:ss.sssZ`.
    pub fn timestamp_string(&self) -> String {
        format_millis(self.millis)
    }

    /// Parses a timestamp, inferring the resolution from the given precision.
    pub fn parse(s: &str) -> Result<Self, TimeError> {
        let (millis, resolution) = parse_iso(s)?;
        OcedTime::from_millis(millis, resolution)
    }

    /// Parses a timestamp with an explicitly stated resolution. The text may
    /// be more precise than the resolution as long as the finer components
    /// are zero.
    pub fn parse_with_resolution(s: &str, resolution: Resolution) -> Result<Self, TimeError> {
        let (millis, _) = parse_iso(s)?;
        OcedTime::from_millis(millis, resolution)
    }
}

impl fmt::Display for OcedTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.timestamp_string())
    }
}

fn format_millis(millis: i64) -> String {
    match DateTime::<Utc>::from_timestamp_millis(millis) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
        None => format!("<out of range: {millis} ms>"),
    }
}

/// Splits off a trailing `Z` or `±hh[:mm]` offset. Returns the remaining
/// text and the offset in seconds east of UTC.
fn split_offset(s: &str) -> Result<(&str, i32), TimeError> {
    let malformed = || TimeError::Malformed(s.to_string());
    if let Some(rest) = s.strip_suffix('Z').or_else(|| s.strip_suffix('z')) {
        return Ok((rest, 0));
    }
    // An offset sign can only appear after the time designator; the date
    // part itself contains '-' separators.
    let Some(t_pos) = s.find(['T', 't', ' ']) else {
        return Ok((s, 0));
    };
    let Some(rel) = s[t_pos..].rfind(['+', '-']) else {
        return Ok((s, 0));
    };
    let sign_pos = t_pos + rel;
    let sign = if s.as_bytes()[sign_pos] == b'+' { 1 } else { -1 };
    let off = &s[sign_pos + 1..];
    let digits: String = off.chars().filter(|c| *c != ':').collect();
    if !digits.chars().all(|c| c.is_ascii_digit()) || !(digits.len() == 2 || digits.len() == 4) {
        return Err(malformed());
    }
    let hours: i32 = digits[..2].parse().map_err(|_| malformed())?;
    let minutes: i32 = if digits.len() == 4 {
        digits[2..].parse().map_err(|_| malformed())?
    } else {
        0
    };
    if hours > 23 || minutes > 59 {
        return Err(malformed());
    }
    Ok((&s[..sign_pos], sign * (hours * 3600 + minutes * 60)))
}

fn all_x(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c == 'X' || c == 'x')
}

fn parse_iso(input: &str) -> Result<(i64, Resolution), TimeError> {
    let malformed = || TimeError::Malformed(input.to_string());
    let s = input.trim();
    let (body, offset_secs) = split_offset(s)?;
    let (date_part, time_part) = match body.find(['T', 't', ' ']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let date = NaiveDate::parse_from_str(date_part, "%Y-%m-%d").map_err(|_| malformed())?;
    if date_part.len() != 10 {
        return Err(malformed());
    }

    let mut resolution = Resolution::Date;
    let (mut hour, mut minute, mut second, mut milli) = (0u32, 0u32, 0u32, 0u32);
    if let Some(tp) = time_part {
        let (hms, frac) = match tp.split_once(['.', ',']) {
            Some((a, b)) => (a, Some(b)),
            None => (tp, None),
        };
        let fields: Vec<&str> = hms.split(':').collect();
        if fields.is_empty() || fields.len() > 3 {
            return Err(malformed());
        }
        let mut unspecified = false;
        for (i, field) in fields.iter().enumerate() {
            if field.len() != 2 {
                return Err(malformed());
            }
            if all_x(field) {
                unspecified = true;
                continue;
            }
            if unspecified {
                // a specified component after an unspecified one
                return Err(malformed());
            }
            let v: u32 = field.parse().map_err(|_| malformed())?;
            match i {
                0 => {
                    hour = v;
                    resolution = Resolution::Hour;
                }
                1 => {
                    minute = v;
                    resolution = Resolution::Minute;
                }
                _ => {
                    second = v;
                    resolution = Resolution::Second;
                }
            }
        }
        if let Some(frac) = frac {
            if fields.len() != 3 || frac.is_empty() {
                return Err(malformed());
            }
            if !all_x(frac) {
                if unspecified || !frac.chars().all(|c| c.is_ascii_digit()) {
                    return Err(malformed());
                }
                // Up to nanosecond digits are accepted but anything below the
                // millisecond must be zero.
                if frac.len() > 3 && frac[3..].chars().any(|c| c != '0') {
                    return Err(malformed());
                }
                let ms_digits: String = frac.chars().chain("000".chars()).take(3).collect();
                milli = ms_digits.parse().map_err(|_| malformed())?;
                resolution = Resolution::Millisecond;
            }
        }
    }
    let time = NaiveTime::from_hms_milli_opt(hour, minute, second, milli).ok_or_else(malformed)?;
    let local = NaiveDateTime::new(date, time);
    let utc_millis = local.and_utc().timestamp_millis() - i64::from(offset_secs) * MS_PER_SECOND;
    Ok((utc_millis, resolution))
}

/// Calendar date value (no time zone).
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn format_date(d: NaiveDate) -> String {
    format!("{:04}-{:02}-{:02}", d.year(), d.month(), d.day())
}

/// Time-of-day value at millisecond precision; `hh:mm`, `hh:mm:ss` and
/// fractional seconds are accepted.
pub fn parse_time_of_day(s: &str) -> Option<NaiveTime> {
    let (hms, frac) = match s.split_once('.') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let fields: Vec<&str> = hms.split(':').collect();
    if !(2..=3).contains(&fields.len()) || fields.iter().any(|f| f.len() != 2) {
        return None;
    }
    let h: u32 = fields[0].parse().ok()?;
    let m: u32 = fields[1].parse().ok()?;
    let sec: u32 = match fields.get(2) {
        Some(f) => f.parse().ok()?,
        None => 0,
    };
    let ms = match frac {
        Some(f) => {
            if f.is_empty() || f.len() > 3 || !f.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let padded: String = f.chars().chain("000".chars()).take(3).collect();
            padded.parse().ok()?
        }
        None => 0,
    };
    NaiveTime::from_hms_milli_opt(h, m, sec, ms)
}

pub fn format_time_of_day(t: NaiveTime) -> String {
    format!(
        "{:02}:{:02}:{:02}.{:03}",
        t.hour(),
        t.minute(),
        t.second(),
        t.nanosecond() / 1_000_000
    )
}
