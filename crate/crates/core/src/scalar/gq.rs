//! Gaussian rationals, the constant field Q(i).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn zero() -> Self {
        Gq { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Gq::from_int(1)
    }

    pub fn i() -> Self {
        Gq { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Gq { re: BigRational::from_integer(BigInt::from(v)), im: BigRational::zero() }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Gq {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Gq { re: r, im: BigRational::zero() }
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

    pub fn conj(&self) -> Gq {
        Gq { re: self.re.clone(), im: -self.im.clone() }
    }

    /// None for zero.
    pub fn inv(&self) -> Option<Gq> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Gq { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    pub fn pow(&self, e: u32) -> Gq {
        let mut acc = Gq::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Residue mod a small prime; None if a denominator is divisible by p or the value is not real.
    pub fn mod_p(&self, p: u64) -> Option<u64> {
        if !self.im.is_zero() {
            return None;
        }
        let pb = BigInt::from(p);
        let num = ((self.re.numer() % &pb) + &pb) % &pb;
        let den = ((self.re.denom() % &pb) + &pb) % &pb;
        if den.is_zero() {
            return None;
        }
        let num: u64 = num.try_into().ok()?;
        let den: u64 = den.try_into().ok()?;
        Some(num * crate::ff::inv_mod(den, p) % p)
    }

    fn fmt_rational(r: &BigRational) -> String {
        if r.is_integer() {
            format!("{}", r.numer())
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    /// True when printing needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        (!self.re.is_zero() && !self.im.is_zero()) || (!self.re.is_integer() && self.im.is_zero())
    }

    pub fn is_negative_real(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = &self.re;
        let im = &self.im;
        if im.is_zero() {
            return write!(f, "{}", Gq::fmt_rational(re));
        }
        let imag = if im.is_one() {
            "i".to_string()
        } else if (-im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", Gq::fmt_rational(im))
        };
        if re.is_zero() {
            write!(f, "{}", imag)
        } else if im.is_negative() {
            write!(f, "{} - {}", Gq::fmt_rational(re), imag.trim_start_matches('-'))
        } else {
            write!(f, "{} + {}", Gq::fmt_rational(re), imag)
        }
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn div(self, o: &Gq) -> Gq {
        self * &o.inv().expect("division by zero constant")
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re, im: -self.im }
    }
}

impl From<i64> for Gq {
    fn from(v: i64) -> Self {
        Gq::from_int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_times_two_is_one() {
        let a = Gq::from_ratio(1, 2);
        let b = Gq::from_int(2);
        assert!((&a * &b).is_one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Gq::i();
        assert_eq!(&i * &i, Gq::from_int(-1));
    }

    #[test]
    fn inverse_of_complex() {
        let z = Gq::new(BigRational::from_integer(2.into()), BigRational::from_integer(2.into()));
        let w = z.inv().unwrap();
        assert!((&z * &w).is_one());
        assert!(Gq::zero().inv().is_none());
    }

    #[test]
    fn reduction_mod_p() {
        assert_eq!(Gq::from_ratio(1, 2).mod_p(3), Some(2));
        assert_eq!(Gq::from_int(-1).mod_p(5), Some(4));
        assert_eq!(Gq::from_ratio(1, 3).mod_p(3), None);
    }
}
