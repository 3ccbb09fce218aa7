use std::fmt;

use serde::{Deserialize, Serialize};

use super::rational::{Field, Rational};

/// An element `re + i·im` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRational { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: self.im.neg() }
    }

    /// `re² + im²`.
    pub fn norm(&self) -> Rational {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussRational { re: self.re.mul(r), im: self.im.mul(r) }
    }
}

impl Field for GaussRational {
    fn zero() -> Self {
        GaussRational::default_zero()
    }
    fn one() -> Self {
        GaussRational::real(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        GaussRational { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRational { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    fn mul(&self, o: &Self) -> Self {
        GaussRational {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn div(&self, o: &Self) -> Self {
        let n = o.norm();
        assert!(!n.is_zero(), "gaussian division by zero");
        let num = self.mul(&o.conj());
        GaussRational { re: num.re.div(&n), im: num.im.div(&n) }
    }
    fn neg(&self) -> Self {
        GaussRational { re: self.re.neg(), im: self.im.neg() }
    }
    fn from_rational(r: Rational) -> Self {
        GaussRational::real(r)
    }
}

impl GaussRational {
    fn default_zero() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::zero() }
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, self.im.neg())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
