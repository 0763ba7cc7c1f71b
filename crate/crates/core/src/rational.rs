//! Small exact-rational helpers: an extended rational type and increasing
//! piecewise linear functions (used for transition functions of ramification
//! filtrations).

use num::rational::Ratio;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exact rational number with machine-word components.
///
/// All quantities this crate feeds into rationals (valuations, polygon
/// ordinates, degrees) are tiny, so `i64` components are ample.
pub type Rat = Ratio<i64>;

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(num, den)
}

/// A rational extended with `-inf` and `+inf`, ordered accordingly.
///
/// Used for quantities like congruence levels, where "the difference is
/// zero" naturally maps to `+inf` and "no constraint" to `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtRat {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl ExtRat {
    pub fn finite(self) -> Option<Rat> {
        match self {
            ExtRat::Fin(r) => Some(r),
            _ => None,
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRat::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => write!(f, "-inf"),
            ExtRat::PosInf => write!(f, "+inf"),
            ExtRat::Fin(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

/// Continuous piecewise linear function given by its break points, with a
/// fixed slope past the last one.  Break points must be strictly increasing
/// in `x`; to the left of the first point the first segment (or, with a
/// single point, the final slope) is extrapolated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    pub pts: Vec<(Rat, Rat)>,
    pub final_slope: Rat,
}

impl PiecewiseLinear {
    pub fn new(pts: Vec<(Rat, Rat)>, final_slope: Rat) -> Self {
        assert!(!pts.is_empty(), "piecewise linear function needs at least one point");
        assert!(
            pts.windows(2).all(|w| w[0].0 < w[1].0),
            "break points must be strictly increasing in x"
        );
        PiecewiseLinear { pts, final_slope }
    }

    /// The identity function.
    pub fn identity() -> Self {
        PiecewiseLinear::new(vec![(Rat::zero(), Rat::zero())], Rat::one())
    }

    fn slope_after(&self, idx: usize) -> Rat {
        if idx + 1 < self.pts.len() {
            let (x0, y0) = self.pts[idx];
            let (x1, y1) = self.pts[idx + 1];
            (y1 - y0) / (x1 - x0)
        } else {
            self.final_slope
        }
    }

    fn slope_before_first(&self) -> Rat {
        if self.pts.len() >= 2 {
            self.slope_after(0)
        } else {
            self.final_slope
        }
    }

    pub fn eval(&self, x: Rat) -> Rat {
        if x <= self.pts[0].0 {
            let (x0, y0) = self.pts[0];
            return y0 + self.slope_before_first() * (x - x0);
        }
        // Last break point with x-coordinate <= x.
        let idx = self.pts.iter().rposition(|&(px, _)| px <= x).unwrap();
        let (x0, y0) = self.pts[idx];
        y0 + self.slope_after(idx) * (x - x0)
    }

    /// Inverse value at `y`.  Requires every slope to be positive.
    pub fn invert(&self, y: Rat) -> Rat {
        if y <= self.pts[0].1 {
            let s = self.slope_before_first();
            assert!(s.is_positive(), "cannot invert a non-increasing function");
            let (x0, y0) = self.pts[0];
            return x0 + (y - y0) / s;
        }
        let idx = self.pts.iter().rposition(|&(_, py)| py <= y).unwrap();
        let s = self.slope_after(idx);
        assert!(s.is_positive(), "cannot invert a non-increasing function");
        let (x0, y0) = self.pts[idx];
        x0 + (y - y0) / s
    }
}
