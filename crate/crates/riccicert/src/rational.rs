//! Exact rational arithmetic on arbitrary-precision integers.
//!
//! All topological computations in this crate are exact; floats never enter.
//! A `Rational` is always in canonical form: reduced, positive denominator.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt, // > 0
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Rational { num, den };
        r.reduce();
        r
    }

    fn reduce(&mut self) {
        if self.den.sign() == Sign::Minus {
            self.num = -std::mem::take(&mut self.num);
            self.den = -std::mem::take(&mut self.den);
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = &self.num / &g;
            self.den = &self.den / &g;
        }
    }

    pub fn zero() -> Self {
        Rational { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Rational { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Rational { num: BigInt::from(n), den: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational { num: n, den: BigInt::one() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64_exact(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite float has no rational value");
        if x == 0.0 {
            return Rational::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (mantissa, e2) = if exp == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut num = BigInt::from(mantissa) * BigInt::from(sign);
        let mut den = BigInt::one();
        if e2 >= 0 {
            num <<= e2 as usize;
        } else {
            den <<= (-e2) as usize;
        }
        Rational::new(num, den)
    }

    /// Nearest f64, via a 28-significant-digit decimal. A 28-digit decimal of
    /// x sits far closer to x than to any neighboring float, so values that
    /// came in through `from_f64_exact` convert back bit-identically.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let neg = self.num.sign() == Sign::Minus;
        let n = self.num.abs();
        // log10(n/d) to within one digit
        let approx_log10 = (n.bits() as i64 - self.den.bits() as i64) * 30103 / 100000;
        let e = 28 - approx_log10;
        let t: BigInt = if e >= 0 {
            n * BigInt::from(10u32).pow(e as u32) / &self.den
        } else {
            n / (&self.den * BigInt::from(10u32).pow((-e) as u32))
        };
        let s = format!("{}{}e{}", if neg { "-" } else { "" }, t, -e);
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn abs(&self) -> Self {
        Rational { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rational::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        Rational { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// ⌊self⌋ as a BigInt.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn sign(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.num, self.den))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let den: BigInt = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(num, den))
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $fn(self, rhs: &Rational) -> Rational {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $fn(self, rhs: Rational) -> Rational {
                (&self).$fn(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Rational::new(
    a.num.clone() * &b.den + b.num.clone() * &a.den,
    a.den.clone() * &b.den
));
binop!(Sub, sub, |a, b| Rational::new(
    a.num.clone() * &b.den - b.num.clone() * &a.den,
    a.den.clone() * &b.den
));
binop!(Mul, mul, |a, b| Rational::new(a.num.clone() * &b.num, a.den.clone() * &b.den));
binop!(Div, div, |a, b| {
    assert!(!b.is_zero(), "division by zero");
    Rational::new(a.num.clone() * &b.den, a.den.clone() * &b.num)
});

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num.clone(), den: self.den.clone() }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Solves the square linear system `a · x = b` exactly by Gaussian elimination.
/// Panics on a singular matrix (callers construct nonsingular Hermite systems).
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("singular system in exact solve");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..n {
                m[r][c] = &m[r][c] - &(&factor * &m[col][c]);
            }
            rhs[r] = &rhs[r] - &(&factor * &rhs[col]);
        }
    }
    (0..n).map(|i| &rhs[i] / &m[i][i]).collect()
}
