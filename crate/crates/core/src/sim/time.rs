//! Integer nanosecond time base.
//!
//! All simulation arithmetic happens on whole nanoseconds. `SimTime` is a
//! non-negative instant on the true timeline (or a local clock reading),
//! `Duration` a signed span. Arithmetic never wraps silently: fallible
//! entry points return [`TimeError`], operator forms panic on overflow.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use thiserror::Error;

pub const NANOS_PER_MICRO: i64 = 1_000;
pub const NANOS_PER_MILLI: i64 = 1_000_000;
pub const NANOS_PER_SEC: i64 = 1_000_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TimeError {
    #[error("time arithmetic overflow: {0}")]
    Overflow(&'static str),
    #[error("instant out of range (negative)")]
    Negative,
}

/// An instant, in whole nanoseconds since the simulation epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(i64::MAX as u64);

    /// Instants are capped at `i64::MAX` ns so any pair subtracts into a `Duration`.
    pub fn from_ns(ns: u64) -> SimTime {
        assert!(ns <= i64::MAX as u64, "instant beyond representable range");
        SimTime(ns)
    }

    pub fn from_micros(us: u64) -> SimTime {
        SimTime::from_ns(us * NANOS_PER_MICRO as u64)
    }

    pub fn from_millis(ms: u64) -> SimTime {
        SimTime::from_ns(ms * NANOS_PER_MILLI as u64)
    }

    pub fn from_secs(s: u64) -> SimTime {
        SimTime::from_ns(s * NANOS_PER_SEC as u64)
    }

    pub fn as_ns(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, d: Duration) -> Result<SimTime, TimeError> {
        let sum = self.0 as i128 + d.0 as i128;
        if sum < 0 {
            Err(TimeError::Negative)
        } else if sum > i64::MAX as i128 {
            Err(TimeError::Overflow("instant + duration"))
        } else {
            Ok(SimTime(sum as u64))
        }
    }

    /// Signed distance `self - earlier`; negative when `earlier` is later.
    pub fn since(self, earlier: SimTime) -> Duration {
        Duration(self.0 as i64 - earlier.0 as i64)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add<Duration> for SimTime {
    type Output = SimTime;
    fn add(self, d: Duration) -> SimTime {
        self.checked_add(d).expect("instant arithmetic out of range")
    }
}

impl AddAssign<Duration> for SimTime {
    fn add_assign(&mut self, d: Duration) {
        *self = *self + d;
    }
}

impl Sub<SimTime> for SimTime {
    type Output = Duration;
    fn sub(self, rhs: SimTime) -> Duration {
        self.since(rhs)
    }
}

/// A signed span of whole nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Duration(i64);

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub const fn from_ns(ns: i64) -> Duration {
        Duration(ns)
    }

    pub const fn from_micros(us: i64) -> Duration {
        Duration(us * NANOS_PER_MICRO)
    }

    pub const fn from_millis(ms: i64) -> Duration {
        Duration(ms * NANOS_PER_MILLI)
    }

    pub const fn from_secs(s: i64) -> Duration {
        Duration(s * NANOS_PER_SEC)
    }

    pub fn as_ns(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> Duration {
        Duration(self.0.abs())
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, rhs: Duration) -> Result<Duration, TimeError> {
        self.0
            .checked_add(rhs.0)
            .map(Duration)
            .ok_or(TimeError::Overflow("duration + duration"))
    }

    pub fn checked_sub(self, rhs: Duration) -> Result<Duration, TimeError> {
        self.0
            .checked_sub(rhs.0)
            .map(Duration)
            .ok_or(TimeError::Overflow("duration - duration"))
    }

    /// Integer halving, truncating toward zero. The discarded remainder is
    /// returned alongside so callers can account for it.
    pub fn halve(self) -> (Duration, i64) {
        (Duration(self.0 / 2), self.0 % 2)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Duration {
    type Output = Duration;
    fn add(self, rhs: Duration) -> Duration {
        self.checked_add(rhs).expect("duration arithmetic overflow")
    }
}

impl Sub for Duration {
    type Output = Duration;
    fn sub(self, rhs: Duration) -> Duration {
        self.checked_sub(rhs).expect("duration arithmetic overflow")
    }
}

impl Neg for Duration {
    type Output = Duration;
    fn neg(self) -> Duration {
        Duration(self.0.checked_neg().expect("duration negation overflow"))
    }
}

/// A rate in parts per million, kept as an exact rational so fractional
/// rates (0.5 ppm, 1/3 ppm) evaluate without floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ppm {
    num: i64,
    den: i64,
}

impl Ppm {
    pub const ZERO: Ppm = Ppm { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Ppm {
        assert!(den > 0, "ppm denominator must be positive");
        Ppm { num, den }
    }

    pub const fn from_int(ppm: i64) -> Ppm {
        Ppm { num: ppm, den: 1 }
    }

    pub fn from_ppb(ppb: i64) -> Ppm {
        Ppm { num: ppb, den: 1_000 }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    /// `span * self * 1e-6`, evaluated in 128-bit integers and truncated
    /// toward zero.
    pub fn scale_ns(self, span_ns: i64) -> i64 {
        let wide = span_ns as i128 * self.num as i128 / (self.den as i128 * 1_000_000);
        i64::try_from(wide).expect("ppm scaling overflow")
    }

    pub fn abs(self) -> Ppm {
        Ppm { num: self.num.abs(), den: self.den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ppm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}ppm", self.num)
        } else {
            write!(f, "{}/{}ppm", self.num, self.den)
        }
    }
}
