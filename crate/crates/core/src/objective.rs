//! The weighted objective `(1 - alpha) * rooms + alpha * penalty`.
//!
//! Alpha is held as an integer number of ten-thousandths, so every objective
//! value is an exact integer multiple of `1 / 10_000`. Comparisons inside the
//! solvers use [`ScaledCost`]; floats only appear at the reporting edge.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Objective value multiplied by [`Alpha::SCALE`].
pub type ScaledCost = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alpha(u16);

impl Alpha {
    pub const SCALE: i64 = 10_000;
    pub const ZERO: Alpha = Alpha(0);
    pub const HALF: Alpha = Alpha(5_000);
    pub const ONE: Alpha = Alpha(10_000);

    /// Accepts values in `[0, 1]` with at most four decimal places.
    pub fn new(value: f64) -> Result<Alpha> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::AlphaOutOfRange(value));
        }
        let scaled = value * Self::SCALE as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 {
            return Err(Error::AlphaPrecision(value));
        }
        Ok(Alpha(rounded as u16))
    }

    pub fn from_ten_thousandths(v: u16) -> Result<Alpha> {
        if v as i64 > Self::SCALE {
            return Err(Error::AlphaOutOfRange(v as f64 / Self::SCALE as f64));
        }
        Ok(Alpha(v))
    }

    pub fn ten_thousandths(self) -> i64 {
        self.0 as i64
    }

    /// Weight of the room-count term, scaled.
    pub fn room_weight(self) -> i64 {
        Self::SCALE - self.0 as i64
    }

    /// Weight of the accessibility penalty term, scaled.
    pub fn penalty_weight(self) -> i64 {
        self.0 as i64
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }

    pub fn cost(self, rooms: u64, penalty: u64) -> ScaledCost {
        self.room_weight() * rooms as i64 + self.penalty_weight() * penalty as i64
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::HALF
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl std::str::FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Alpha> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("not a number: '{s}'")))?;
        Alpha::new(v)
    }
}

pub fn to_real(cost: ScaledCost) -> f64 {
    cost as f64 / Alpha::SCALE as f64
}

/// Converts a non-negative real tolerance into scaled units, rounding down.
pub fn to_scaled(value: f64) -> ScaledCost {
    (value * Alpha::SCALE as f64 + 1e-9).floor() as ScaledCost
}

/// Both objective terms of one solution and their weighted contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveBreakdown {
    pub alpha: f64,
    /// Rooms carrying at least one meeting.
    pub obj1: u64,
    /// Sum of `floor * pcd` over all meetings.
    pub obj2: u64,
    pub w1: f64,
    pub w2: f64,
    pub fo: f64,
}

impl ObjectiveBreakdown {
    pub fn new(alpha: Alpha, obj1: u64, obj2: u64) -> Self {
        let w1 = alpha.room_weight() * obj1 as i64;
        let w2 = alpha.penalty_weight() * obj2 as i64;
        ObjectiveBreakdown {
            alpha: alpha.value(),
            obj1,
            obj2,
            w1: to_real(w1),
            w2: to_real(w2),
            fo: to_real(w1 + w2),
        }
    }

    pub fn scaled_fo(&self) -> ScaledCost {
        // alpha round-trips exactly through f64 at four decimals
        let a = Alpha::new(self.alpha).expect("breakdown alpha is valid");
        a.cost(self.obj1, self.obj2)
    }
}

impl fmt::Display for ObjectiveBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} FO={} OBJ1={} OBJ2={} OBJ_W1={} OBJ_W2={}",
            self.alpha, self.fo, self.obj1, self.obj2, self.w1, self.w2
        )
    }
}
