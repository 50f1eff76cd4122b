//! Physical quantities used throughout the crate.
//!
//! Time is kept as an integer number of picoseconds so that interval
//! arithmetic in the simulator is exact. Energy is kept in attojoules and
//! power in attojoules per picosecond (1 aJ/ps = 1 µW); with those scales
//! the usual technology figures (fractions of a picojoule per bit) are
//! whole numbers and sums of them stay exact in `f64`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Picoseconds.
///
/// Serialized as an integer number of nanoseconds when whole, otherwise as
/// a decimal string with up to three fractional digits ("12.345").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(pub u64);

impl Time {
    pub const ZERO: Time = Time(0);

    pub const fn from_ps(ps: u64) -> Self {
        Time(ps)
    }

    pub const fn from_ns(ns: u64) -> Self {
        Time(ns * 1_000)
    }

    pub const fn ps(self) -> u64 {
        self.0
    }

    pub fn as_ns(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn as_seconds(self) -> f64 {
        self.0 as f64 * 1e-12
    }

    pub fn saturating_sub(self, rhs: Time) -> Time {
        Time(self.0.saturating_sub(rhs.0))
    }

    /// Parses nanoseconds written as `12` or `12.5` (at most picosecond
    /// precision).
    pub fn parse_ns(s: &str) -> Option<Time> {
        let s = s.trim();
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if frac.len() > 3 || !frac.bytes().all(|b| b.is_ascii_digit()) || (s.contains('.') && frac.is_empty()) {
            return None;
        }
        let ns: u64 = whole.parse().ok()?;
        let ps: u64 = if frac.is_empty() { 0 } else { format!("{frac:0<3}").parse().ok()? };
        ns.checked_mul(1_000)?.checked_add(ps).map(Time)
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_multiple_of(1_000) {
            s.serialize_u64(self.0 / 1_000)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct TimeVisitor;

        impl Visitor<'_> for TimeVisitor {
            type Value = Time;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer nanosecond count or a decimal string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Time, E> {
                v.checked_mul(1_000).map(Time).ok_or_else(|| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Time, E> {
                u64::try_from(v)
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Time, E> {
                Time::parse_ns(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }

        d.deserialize_any(TimeVisitor)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Mul<u64> for Time {
    type Output = Time;
    fn mul(self, rhs: u64) -> Time {
        Time(self.0 * rhs)
    }
}

impl Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        Time(iter.map(|t| t.0).sum())
    }
}

impl fmt::Display for Time {
    /// Whole nanoseconds print as integers, anything else with the
    /// picosecond fraction.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(1_000) {
            write!(f, "{}", self.0 / 1_000)
        } else {
            write!(f, "{}.{:03}", self.0 / 1_000, self.0 % 1_000)
        }
    }
}

/// Attojoules.
///
/// Serialized as a JSON integer when the value is integral and exactly
/// representable, otherwise as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Energy(pub f64);

impl Energy {
    pub const ZERO: Energy = Energy(0.0);

    pub fn from_aj(aj: f64) -> Self {
        Energy(aj)
    }

    pub fn from_pj(pj: f64) -> Self {
        Energy(pj * 1e6)
    }

    pub fn from_joules(j: f64) -> Self {
        Energy(j * 1e18)
    }

    pub fn aj(self) -> f64 {
        self.0
    }

    pub fn as_pj(self) -> f64 {
        self.0 / 1e6
    }

    pub fn as_joules(self) -> f64 {
        self.0 * 1e-18
    }

    /// Energy of `bits` bits at this per-bit figure.
    pub fn times_bits(self, bits: u64) -> Energy {
        Energy(self.0 * bits as f64)
    }
}

impl Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl AddAssign for Energy {
    fn add_assign(&mut self, rhs: Energy) {
        self.0 += rhs.0;
    }
}

impl Sub for Energy {
    type Output = Energy;
    fn sub(self, rhs: Energy) -> Energy {
        Energy(self.0 - rhs.0)
    }
}

impl Sum for Energy {
    fn sum<I: Iterator<Item = Energy>>(iter: I) -> Energy {
        Energy(iter.map(|e| e.0).sum())
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} pJ", self.as_pj())
    }
}

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

impl Serialize for Energy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() && v.fract() == 0.0 && v.abs() < EXACT_LIMIT {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_str(&format!("{v:?}"))
        }
    }
}

impl<'de> Deserialize<'de> for Energy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct EnergyVisitor;

        impl Visitor<'_> for EnergyVisitor {
            type Value = Energy;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer attojoule count or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Energy, E> {
                Ok(Energy(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Energy, E> {
                Ok(Energy(v as f64))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Energy, E> {
                Ok(Energy(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Energy, E> {
                v.trim()
                    .parse::<f64>()
                    .map(Energy)
                    .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }

        d.deserialize_any(EnergyVisitor)
    }
}

/// Attojoules per picosecond (microwatts).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Power(pub f64);

impl Power {
    pub fn from_watts(w: f64) -> Self {
        Power(w * 1e6)
    }

    /// pJ/ns, which is the same thing as milliwatts.
    pub fn from_pj_per_ns(v: f64) -> Self {
        Power(v * 1e3)
    }

    pub fn as_watts(self) -> f64 {
        self.0 * 1e-6
    }

    pub fn as_pj_per_ns(self) -> f64 {
        self.0 / 1e3
    }

    pub fn over(self, t: Time) -> Energy {
        Energy(self.0 * t.0 as f64)
    }
}

impl Mul<u64> for Power {
    type Output = Power;
    fn mul(self, rhs: u64) -> Power {
        Power(self.0 * rhs as f64)
    }
}
