//! Exact arithmetic in `Q(ζ_p)` for a prime conductor `p`.
//!
//! An element is stored in the power basis `1, ζ, .., ζ^{p-2}`; the
//! relation `ζ^{p-1} = -(1 + ζ + .. + ζ^{p-2})` makes the representation
//! unique, so equality is coefficientwise.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(p: u32) -> Self {
        Cyclotomic {
            p,
            coeffs: vec![BigRational::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u32, r: BigRational) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(p: u32, k: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(k)))
    }

    /// `ζ_p^{k mod p}`.
    pub fn root(p: u32, k: i64) -> Self {
        let mut counts = vec![0i64; p as usize];
        counts[k.rem_euclid(p as i64) as usize] = 1;
        Self::from_root_counts(p, &counts)
    }

    /// `Σ counts[k] ζ^k` over all `k < p`.
    pub fn from_root_counts(p: u32, counts: &[i64]) -> Self {
        debug_assert_eq!(counts.len(), p as usize);
        let top = counts[p as usize - 1];
        let coeffs = counts[..p as usize - 1]
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c - top)))
            .collect();
        Cyclotomic { p, coeffs }
    }

    /// Builds from a full length-`p` coefficient vector, reducing `ζ^{p-1}`.
    fn from_full(p: u32, mut full: Vec<BigRational>) -> Self {
        let top = full.pop().expect("length p");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        Cyclotomic { p, coeffs: full }
    }

    pub fn conductor(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The value as a rational, when it lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ConductorMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Cyclotomic { p: self.p, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Cyclotomic { p: self.p, coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p as usize;
        let mut full = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                full[(i + j) % p] += a * b;
            }
        }
        Ok(Self::from_full(self.p, full))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut full = vec![BigRational::zero(); p];
        for (k, c) in self.coeffs.iter().enumerate() {
            full[(p - k) % p] = c.clone();
        }
        Self::from_full(self.p, full)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Floating-point value at `ζ = e^{2πi/p}` with an absolute error bound.
    pub fn approx(&self) -> (f64, f64, f64) {
        let p = self.p as f64;
        let (mut re, mut im, mut max) = (0.0f64, 0.0f64, 0.0f64);
        for (k, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            max = max.max(v.abs());
            let angle = 2.0 * std::f64::consts::PI * k as f64 / p;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        let bound = (self.p - 1) as f64 * max * 2f64.powi(-50);
        (re, im, bound)
    }

    /// Exact basis string `c0 + c1*z + c2*z^2 + ..` listing every coefficient.
    pub fn basis_string(&self) -> String {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{k}"),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json(&self) -> CyclotomicJson {
        CyclotomicJson {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
    }

    pub fn from_json(j: &CyclotomicJson) -> Result<Self> {
        if j.p < 2 || j.coeffs.len() != (j.p - 1) as usize {
            return Err(Error::Parse(format!(
                "expected {} coefficients for conductor {}",
                j.p.saturating_sub(1),
                j.p
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|[n, d]| {
                let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad numerator {n:?}")))?;
                let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad denominator {d:?}")))?;
                if d.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Ok(BigRational::new(n, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cyclotomic { p: j.p, coeffs })
    }

    /// `|self|^2` when it is rational, i.e. `self · conj(self)` lies in `Q`.
    pub fn norm_squared(&self) -> Option<BigRational> {
        (self * &self.conj()).as_rational().cloned()
    }
}

/// JSON wire form `{"p":…, "coeffs":[["num","den"],…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    pub p: u32,
    pub coeffs: Vec<[String; 2]>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CyclotomicJson::deserialize(d)?;
        Cyclotomic::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "z")?
                    } else {
                        write!(f, "z^{k}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_add(rhs).expect("conductor mismatch")
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_sub(rhs).expect("conductor mismatch")
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_mul(rhs).expect("conductor mismatch")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots() {
        assert_eq!(Cyclotomic::root(2, 1), Cyclotomic::from_int(2, -1));
        assert!(Cyclotomic::root(3, 0).is_one());
        let z2 = Cyclotomic::root(3, 2);
        assert_eq!(z2.coeffs(), &[q(-1, 1), q(-1, 1)]);
        assert_eq!(Cyclotomic::root(5, -1), Cyclotomic::root(5, 4));
    }

    #[test]
    fn sums_of_roots() {
        let one = Cyclotomic::one(2);
        assert!((&one + &Cyclotomic::root(2, 1)).is_zero());
        let s = (0..3).fold(Cyclotomic::zero(3), |acc, k| &acc + &Cyclotomic::root(3, k));
        assert!(s.is_zero());
        assert_eq!(Cyclotomic::root(3, 1).conj(), Cyclotomic::root(3, 2));
    }

    #[test]
    fn root_to_the_p_is_one() {
        for p in [2u32, 3, 5, 7] {
            for k in 0..p as i64 {
                assert!(Cyclotomic::root(p, k).pow(p).is_one());
            }
        }
    }

    #[test]
    fn conductor_mismatch() {
        let a = Cyclotomic::one(2);
        let b = Cyclotomic::one(3);
        assert_eq!(a.try_add(&b).unwrap_err(), Error::ConductorMismatch(2, 3));
    }

    #[test]
    fn approx_values() {
        let (re, im, b) = Cyclotomic::zero(3).approx();
        assert_eq!((re, im, b), (0.0, 0.0, 0.0));
        let (re, im, _) = Cyclotomic::root(2, 1).approx();
        assert_eq!((re, im), (-1.0, 0.0));
        let s = &Cyclotomic::root(3, 1) + &Cyclotomic::root(3, 2);
        let (re, im, b) = s.approx();
        assert!((re + 1.0).abs() <= b.max(1e-15) && im.abs() <= 1e-12);
    }

    #[test]
    fn norm_of_scaled_root() {
        let a = Cyclotomic::root(5, 3).scale(&q(-2, 3));
        assert_eq!(a.norm_squared(), Some(q(4, 9)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Cyclotomic::zero(3).to_string(), "0");
        assert_eq!(Cyclotomic::root(3, 2).to_string(), "-1 - z");
        assert_eq!(Cyclotomic::root(3, 2).basis_string(), "-1 + -1*z");
        assert_eq!(Cyclotomic::from_rational(2, q(1, 2)).basis_string(), "1/2");
    }

    #[test]
    fn json_round_trip() {
        let a = Cyclotomic::root(5, 2).scale(&q(7, 4));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":5,"coeffs":[["0","1"],["0","1"],["7","4"],["0","1"]]}"#);
        let back: Cyclotomic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
