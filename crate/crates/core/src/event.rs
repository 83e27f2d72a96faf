use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A sign event `{X ? 0}` of a real random variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Event {
    GeZero,
    GtZero,
    LeZero,
    LtZero,
}

impl Event {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Event::GeZero => x >= 0.0,
            Event::GtZero => x > 0.0,
            Event::LeZero => x <= 0.0,
            Event::LtZero => x < 0.0,
        }
    }

    /// Like [`Event::contains`], but values with `|x| <= zero_tol` count as 0.
    pub fn contains_within(self, x: f64, zero_tol: f64) -> bool {
        if x.abs() <= zero_tol {
            self.contains(0.0)
        } else {
            self.contains(x)
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Event::GeZero => "ge-zero",
            Event::GtZero => "gt-zero",
            Event::LeZero => "le-zero",
            Event::LtZero => "lt-zero",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Event {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ge" | "ge-zero" => Ok(Event::GeZero),
            "gt" | "gt-zero" => Ok(Event::GtZero),
            "le" | "le-zero" => Ok(Event::LeZero),
            "lt" | "lt-zero" => Ok(Event::LtZero),
            _ => Err(format!("unknown event `{s}` (expected ge, gt, le or lt)")),
        }
    }
}
