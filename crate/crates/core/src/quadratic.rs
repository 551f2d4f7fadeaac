//! Exact arithmetic in `Q(√d)`: numbers `a + b·√d` with rational `a`, `b`.
//!
//! Rationals are represented with `b = 0`; they combine with elements of any
//! field. Two irrational operands must share the same radicand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub a: BigRational,
    pub b: BigRational,
    /// Radicand; irrelevant while `b` is zero.
    pub d: BigInt,
}

impl Quadratic {
    pub fn rational(a: BigRational) -> Self {
        Quadratic {
            a,
            b: BigRational::zero(),
            d: BigInt::one(),
        }
    }

    pub fn from_int(a: i64) -> Self {
        Quadratic::rational(BigRational::from_integer(a.into()))
    }

    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        let mut q = Quadratic { a, b, d };
        q.normalize();
        q
    }

    /// `√d` itself.
    pub fn sqrt(d: BigInt) -> Self {
        Quadratic::new(BigRational::zero(), BigRational::one(), d)
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.d = BigInt::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn radicand(&self, other: &Quadratic) -> BigInt {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "mixing different quadratic fields");
                self.d.clone()
            }
        }
    }

    pub fn conjugate(&self) -> Self {
        Quadratic::new(self.a.clone(), -self.b.clone(), self.d.clone())
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.d.clone()) * &self.b * &self.b
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(√d)");
        let n = self.norm();
        let c = self.conjugate();
        Quadratic::new(c.a / &n, c.b / &n, c.d)
    }

    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.recip() } else { self.clone() };
        let mut out = Quadratic::from_int(1);
        for _ in 0..exp.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    /// Exact sign: compares `a` with `−b·√d` by squaring.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: the larger magnitude wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }
}

impl Add for &Quadratic {
    type Output = Quadratic;
    fn add(self, rhs: &Quadratic) -> Quadratic {
        let d = self.radicand(rhs);
        Quadratic::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl Sub for &Quadratic {
    type Output = Quadratic;
    fn sub(self, rhs: &Quadratic) -> Quadratic {
        let d = self.radicand(rhs);
        Quadratic::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl Mul for &Quadratic {
    type Output = Quadratic;
    fn mul(self, rhs: &Quadratic) -> Quadratic {
        let d = self.radicand(rhs);
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Quadratic::new(a, b, d)
    }
}

impl Div for &Quadratic {
    type Output = Quadratic;
    fn div(self, rhs: &Quadratic) -> Quadratic {
        self * &rhs.recip()
    }
}

impl Neg for &Quadratic {
    type Output = Quadratic;
    fn neg(self) -> Quadratic {
        Quadratic::new(-self.a.clone(), -self.b.clone(), self.d.clone())
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{} ", self.a)?;
            f.write_str(if self.b.is_negative() { "- " } else { "+ " })?;
            write!(f, "{}*sqrt({})", self.b.abs(), self.d)
        } else {
            write!(f, "{}*sqrt({})", self.b, self.d)
        }
    }
}
