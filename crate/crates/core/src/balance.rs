//! Protected-group balance arithmetic.
//!
//! Balances are compared exactly by cross-multiplying counts; floating-point
//! values are only produced for reporting.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Balance of a set with `numerator` members in its smaller group and
/// `denominator` members in its larger group.
///
/// A set missing either group has balance 0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BalanceRatio {
    pub numerator: u64,
    pub denominator: u64,
}

/// `min(count0 / count1, count1 / count0)`, or 0 if either count is 0.
pub fn balance_of(count0: u64, count1: u64) -> BalanceRatio {
    BalanceRatio {
        numerator: count0.min(count1),
        denominator: count0.max(count1),
    }
}

impl BalanceRatio {
    pub const ZERO: BalanceRatio = BalanceRatio {
        numerator: 0,
        denominator: 1,
    };

    pub fn value(&self) -> f64 {
        if self.numerator == 0 {
            0.0
        } else {
            self.numerator as f64 / self.denominator as f64
        }
    }

    /// Exact `self >= t`.
    pub fn meets(&self, t: Threshold) -> bool {
        self.numerator > 0
            && u128::from(self.numerator) * u128::from(t.m)
                >= u128::from(t.f) * u128::from(self.denominator)
    }

    // (num, den) with a zero numerator mapped to 0/1 so cross-multiplication is valid
    fn normalized(&self) -> (u128, u128) {
        if self.numerator == 0 {
            (0, 1)
        } else {
            (u128::from(self.numerator), u128::from(self.denominator))
        }
    }
}

impl PartialEq for BalanceRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BalanceRatio {}

impl PartialOrd for BalanceRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BalanceRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.normalized();
        let (c, d) = other.normalized();
        (a * d).cmp(&(c * b))
    }
}

impl fmt::Display for BalanceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} ({:.3})",
            self.numerator,
            self.denominator,
            self.value()
        )
    }
}

/// Balance threshold `t = f/m` in lowest terms, `1 <= f <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Threshold {
    f: u64,
    m: u64,
}

impl Threshold {
    pub const HALF: Threshold = Threshold { f: 1, m: 2 };

    /// Builds `f/m`, reducing to lowest terms.
    pub fn new(f: u64, m: u64) -> Result<Self> {
        if f == 0 || m == 0 || f > m {
            return Err(Error::InvalidParameter(format!(
                "threshold {f}/{m} must lie in (0, 1]"
            )));
        }
        let g = gcd(f, m);
        Ok(Self { f: f / g, m: m / g })
    }

    /// Smallest-denominator fraction (denominator up to 1000) equal to `t`.
    pub fn from_f64(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {t} must lie in (0, 1]"
            )));
        }
        for m in 1..=1000u64 {
            let f = (t * m as f64).round();
            if f >= 1.0 && (f / m as f64 - t).abs() < 1e-9 {
                return Self::new(f as u64, m);
            }
        }
        Err(Error::InvalidParameter(format!(
            "threshold {t} is not a fraction with denominator <= 1000"
        )))
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn value(&self) -> f64 {
        self.f as f64 / self.m as f64
    }

    /// Largest admissible fairlet size, `f + m`.
    pub fn max_fairlet_size(&self) -> usize {
        (self.f + self.m) as usize
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.f, self.m)
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((f, m)) => {
                let parse = |x: &str| {
                    x.trim().parse::<u64>().map_err(|_| {
                        Error::InvalidParameter(format!("cannot parse threshold {s:?}"))
                    })
                };
                Threshold::new(parse(f)?, parse(m)?)
            }
            None => s
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse threshold {s:?}")))
                .and_then(Threshold::from_f64),
        }
    }
}

impl TryFrom<String> for Threshold {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Threshold> for String {
    fn from(t: Threshold) -> String {
        t.to_string()
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
