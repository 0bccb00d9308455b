//! Exact elements of cyclotomic fields `Q(ζ_n)`.
//!
//! A value is a polynomial in `ζ_n` reduced modulo the n-th cyclotomic
//! polynomial `Φ_n`, so it has a unique coefficient vector of length
//! `φ(n)` in the power basis. Values of different conductors are compared
//! and combined after lifting both into `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::phase::Phase;

fn poly_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic polynomials are indexed from 1");
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_divide(&num, &cyclotomic_polynomial(d));
    }
    let p = Arc::new(num);
    poly_cache().lock().unwrap().insert(n, p.clone());
    p
}

/// Division by a monic integer polynomial with zero remainder.
fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Euler's totient, as the degree of `Φ_n`.
pub fn totient(n: u64) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

fn reduce(mut coeffs: Vec<BigRational>, n: u64) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    for i in (deg..coeffs.len()).rev() {
        if coeffs[i].is_zero() {
            continue;
        }
        let c = coeffs[i].clone();
        for (j, &pj) in phi.iter().enumerate() {
            if pj != 0 {
                coeffs[i - deg + j] -= &c * BigRational::from_integer(BigInt::from(pj));
            }
        }
    }
    coeffs.resize(deg, BigRational::zero());
    coeffs
}

/// A formal rational combination of `n`-th roots of unity in normal form.
#[derive(Clone)]
pub struct CyclotomicSum {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicSum {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        CyclotomicSum { conductor: 1, coeffs: vec![q] }
    }

    pub fn from_integer(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(k.into()))
    }

    /// `Σ coeffs[j] ζ_n^j` for an arbitrary-length coefficient list.
    pub fn from_powers(n: u64, powers: Vec<BigRational>) -> Self {
        assert!(n >= 1);
        let mut folded = vec![BigRational::zero(); n as usize];
        for (j, c) in powers.into_iter().enumerate() {
            folded[j % n as usize] += c;
        }
        CyclotomicSum { conductor: n, coeffs: reduce(folded, n) }
    }

    /// `Σ counts[j] ζ_n^j`.
    pub fn from_exponent_counts(n: u64, counts: &[u64]) -> Self {
        let powers = counts.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        Self::from_powers(n, powers)
    }

    /// `ζ_n^j`.
    pub fn root_of_unity(n: u64, j: u64) -> Self {
        let mut powers = vec![BigRational::zero(); n as usize];
        powers[(j % n) as usize] = BigRational::one();
        Self::from_powers(n, powers)
    }

    /// `exp(2πi q)`.
    pub fn from_phase(p: Phase) -> Self {
        let n = p.denom() as u64;
        Self::root_of_unity(n, p.numer() as u64)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients in the power basis `1, ζ, …, ζ^{φ(n)−1}`.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-expresses the value in `Q(ζ_m)`; `m` must be a multiple of the conductor.
    pub fn lift(&self, m: u64) -> Self {
        assert_eq!(m % self.conductor, 0, "cannot lift from {} to {m}", self.conductor);
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut powers = vec![BigRational::zero(); m as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            powers[j * step] = c.clone();
        }
        CyclotomicSum { conductor: m, coeffs: reduce(powers, m) }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = self.conductor.lcm(&other.conductor);
        (self.lift(m), other.lift(m))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        // Q(ζ_n) ∩ Q has trivial components off the constant term in
        // the power basis.
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CyclotomicSum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Floating-point rendering `(re, im)`; display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.conductor as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let angle = std::f64::consts::TAU * j as f64 / n;
            (re + c * angle.cos(), im + c * angle.sin())
        })
    }

    /// Smallest conductor whose field contains the value.
    pub fn minimal_conductor(&self) -> u64 {
        let n = self.conductor;
        let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        divisors.sort_unstable();
        for d in divisors {
            if let Some(v) = self.descend(d) {
                return v.conductor;
            }
        }
        n
    }

    /// Tries to write the value with conductor `d | n`.
    fn descend(&self, d: u64) -> Option<Self> {
        if d == self.conductor {
            return Some(self.clone());
        }
        // Solve for coefficients in Q(ζ_d) by linear algebra over the
        // lifted basis: the lift of ζ_d^j is a known vector.
        let basis: Vec<Vec<BigRational>> = (0..totient(d) as u64)
            .map(|j| Self::root_of_unity(d, j).lift(self.conductor).coeffs)
            .collect();
        let solution = solve_in_span(&basis, &self.coeffs)?;
        Some(CyclotomicSum { conductor: d, coeffs: solution })
    }

    /// Normal form with the smallest conductor.
    pub fn simplified(&self) -> Self {
        let d = self.minimal_conductor();
        self.descend(d).unwrap_or_else(|| self.clone())
    }
}

/// Coefficients `x` with `Σ x_i basis[i] = target`, if the target lies in the span.
fn solve_in_span(basis: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let cols = basis.len();
    // augmented matrix, one row per coordinate
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

impl PartialEq for CyclotomicSum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicSum {}

impl Add for &CyclotomicSum {
    type Output = CyclotomicSum;
    fn add(self, rhs: &CyclotomicSum) -> CyclotomicSum {
        let (a, b) = self.aligned(rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CyclotomicSum { conductor: a.conductor, coeffs }
    }
}

impl Add for CyclotomicSum {
    type Output = CyclotomicSum;
    fn add(self, rhs: CyclotomicSum) -> CyclotomicSum {
        &self + &rhs
    }
}

impl Neg for &CyclotomicSum {
    type Output = CyclotomicSum;
    fn neg(self) -> CyclotomicSum {
        CyclotomicSum { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &CyclotomicSum {
    type Output = CyclotomicSum;
    fn sub(self, rhs: &CyclotomicSum) -> CyclotomicSum {
        self + &(-rhs)
    }
}

impl Mul for &CyclotomicSum {
    type Output = CyclotomicSum;
    fn mul(self, rhs: &CyclotomicSum) -> CyclotomicSum {
        let (a, b) = self.aligned(rhs);
        let mut prod = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        CyclotomicSum::from_powers(a.conductor, prod)
    }
}

impl Mul for CyclotomicSum {
    type Output = CyclotomicSum;
    fn mul(self, rhs: CyclotomicSum) -> CyclotomicSum {
        &self * &rhs
    }
}

impl std::iter::Sum for CyclotomicSum {
    fn sum<I: Iterator<Item = CyclotomicSum>>(iter: I) -> CyclotomicSum {
        iter.fold(CyclotomicSum::zero(), |acc, x| &acc + &x)
    }
}

impl std::iter::Product for CyclotomicSum {
    fn product<I: Iterator<Item = CyclotomicSum>>(iter: I) -> CyclotomicSum {
        iter.fold(CyclotomicSum::one(), |acc, x| &acc * &x)
    }
}

impl fmt::Display for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.simplified();
        if let Some(q) = s.as_rational() {
            return write!(f, "{q}");
        }
        let terms: Vec<String> = s
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("{c}"),
                _ => format!("{c}*z{}^{j}", s.conductor),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicSum({self}; conductor {})", self.conductor)
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicRepr {
    conductor: u64,
    coeffs: Vec<String>,
}

impl Serialize for CyclotomicSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let s = self.simplified();
        CyclotomicRepr { conductor: s.conductor, coeffs: s.coeffs.iter().map(|c| c.to_string()).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicSum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = CyclotomicRepr::deserialize(deserializer)?;
        if repr.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let powers = repr
            .coeffs
            .iter()
            .map(|c| c.parse::<BigRational>().map_err(|e| D::Error::custom(format!("{c:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CyclotomicSum::from_powers(repr.conductor, powers))
    }
}
