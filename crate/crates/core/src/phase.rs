//! Exact elements of U(1) written as rationals mod 1.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// `exp(2πi q)` with `q` reduced into `[0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(Ratio<i64>);

impl Phase {
    pub const ZERO: Phase = Phase(Ratio::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase denominator must be nonzero");
        Phase::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(q: Ratio<i64>) -> Phase {
        let floor = q.floor();
        Phase(q - floor)
    }

    pub fn value(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exponent `j` with `self = j / conductor`; `conductor` must be a
    /// multiple of the denominator.
    pub fn exponent(&self, conductor: u64) -> u64 {
        let den = self.denom() as u64;
        debug_assert_eq!(conductor % den, 0, "conductor {conductor} does not absorb {self}");
        self.numer() as u64 * (conductor / den)
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

/// Least common multiple of the denominators.
pub fn conductor_of<'a>(phases: impl IntoIterator<Item = &'a Phase>) -> u64 {
    phases.into_iter().fold(1u64, |acc, p| acc.lcm(&(p.denom() as u64)))
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase::from_ratio(self.0 + rhs.0)
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::from_ratio(-self.0)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl Mul<i64> for Phase {
    type Output = Phase;
    fn mul(self, k: i64) -> Phase {
        Phase::from_ratio(self.0 * k)
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, Add::add)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({})", self.0)
    }
}

impl FromStr for Phase {
    type Err = String;
    fn from_str(s: &str) -> Result<Phase, String> {
        let q: Ratio<i64> = s.trim().parse().map_err(|_| format!("not a rational: {s:?}"))?;
        if q.denom().is_negative() {
            return Err(format!("bad denominator in {s:?}"));
        }
        Ok(Phase::from_ratio(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wraps_into_unit_interval() {
        assert_eq!(Phase::new(5, 4), Phase::new(1, 4));
        assert_eq!(Phase::new(-1, 4), Phase::new(3, 4));
        assert_eq!(Phase::new(2, 2), Phase::ZERO);
        assert_eq!(-Phase::ZERO, Phase::ZERO);
        assert_eq!(Phase::new(1, 2) + Phase::new(1, 2), Phase::ZERO);
        assert_eq!("3/2".parse::<Phase>().unwrap(), Phase::new(1, 2));
    }

    #[test]
    fn exponents() {
        assert_eq!(Phase::new(1, 4).exponent(8), 2);
        assert_eq!(Phase::ZERO.exponent(3), 0);
        assert_eq!(conductor_of(&[Phase::new(1, 4), Phase::new(1, 6)]), 12);
    }

    proptest! {
        #[test]
        fn group_laws(a in -50i64..50, b in 1i64..30, c in -50i64..50, d in 1i64..30) {
            let (x, y) = (Phase::new(a, b), Phase::new(c, d));
            prop_assert_eq!(x + y, y + x);
            prop_assert_eq!(x - x, Phase::ZERO);
            prop_assert!(x.value() >= Ratio::zero() && x.value() < Ratio::from_integer(1));
            prop_assert_eq!((x + y) + x, x + (y + x));
        }
    }
}
