//! Gaussian rationals: the exact coefficient field Q(i).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A complex number with rational real and imaginary parts.
///
/// Both parts are kept reduced by `BigRational` itself; the value is zero
/// iff both parts are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussianRational::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussianRational::new(r, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus |z|^2 = z * conj(z), a nonnegative rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianRational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({}{}*i)", self.re, self.im)
        } else {
            write!(f, "({}+{}*i)", self.re, self.im)
        }
    }
}

/// Gaussian integer gcd by the Euclidean algorithm with rounded division.
///
/// Result is defined up to units; no unit normalization is applied here.
pub fn gaussian_int_gcd(a: (BigInt, BigInt), b: (BigInt, BigInt)) -> (BigInt, BigInt) {
    fn is_zero(z: &(BigInt, BigInt)) -> bool {
        z.0.is_zero() && z.1.is_zero()
    }
    // nearest integer to p/q
    fn round_div(p: &BigInt, q: &BigInt) -> BigInt {
        let two = BigInt::from(2);
        let (p, q) = if q.is_negative() {
            (-p.clone(), -q.clone())
        } else {
            (p.clone(), q.clone())
        };
        let shifted = if p.is_negative() {
            &p * &two - &q
        } else {
            &p * &two + &q
        };
        shifted / (&q * &two)
    }
    let mut x = a;
    let mut y = b;
    while !is_zero(&y) {
        // quotient of x / y in Z[i], rounded componentwise
        let n = &y.0 * &y.0 + &y.1 * &y.1;
        let re_num = &x.0 * &y.0 + &x.1 * &y.1;
        let im_num = &x.1 * &y.0 - &x.0 * &y.1;
        let q = (round_div(&re_num, &n), round_div(&im_num, &n));
        let r = (
            &x.0 - (&q.0 * &y.0 - &q.1 * &y.1),
            &x.1 - (&q.0 * &y.1 + &q.1 * &y.0),
        );
        x = y;
        y = r;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(a: i64, b: i64) -> (BigInt, BigInt) {
        (BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn field_basics() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
        let z = GaussianRational::new(
            BigRational::new(BigInt::from(3), BigInt::from(4)),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        );
        let w = &z * &z.inv().unwrap();
        assert!(w.is_one());
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn gaussian_gcd_divides() {
        // gcd(2, 1+i) is 1+i up to a unit; check norm
        let g = gaussian_int_gcd(gi(2, 0), gi(1, 1));
        assert_eq!(&g.0 * &g.0 + &g.1 * &g.1, BigInt::from(2));
        let g = gaussian_int_gcd(gi(5, 0), gi(0, 0));
        assert_eq!(g, gi(5, 0));
    }
}
