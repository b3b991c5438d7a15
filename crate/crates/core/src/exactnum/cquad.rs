use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use super::rquad::{check_field, forward_owned};
use super::{RQuad, Rational};

/// An exact complex number `re + i·im` over `Q(√d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CQuad {
    pub re: RQuad,
    pub im: RQuad,
}

impl CQuad {
    pub fn new(re: RQuad, im: RQuad) -> Self {
        check_field(re.d, im.d);
        CQuad { re, im }
    }

    pub fn d(&self) -> u32 {
        self.re.d
    }

    pub fn zero(d: u32) -> Self {
        Self::new(RQuad::zero(d), RQuad::zero(d))
    }

    pub fn one(d: u32) -> Self {
        Self::new(RQuad::one(d), RQuad::zero(d))
    }

    pub fn i(d: u32) -> Self {
        Self::new(RQuad::zero(d), RQuad::one(d))
    }

    pub fn from_int(n: i64, d: u32) -> Self {
        Self::new(RQuad::from_int(n, d), RQuad::zero(d))
    }

    pub fn from_real(re: RQuad) -> Self {
        let d = re.d;
        Self::new(re, RQuad::zero(d))
    }

    pub fn from_imag(im: RQuad) -> Self {
        let d = im.d;
        Self::new(RQuad::zero(d), im)
    }

    /// `ω = (1 + i√d)/2`.
    pub fn omega(d: u32) -> Self {
        Self::new(RQuad::frac(1, 2, d), &RQuad::sqrt_d(d) * &RQuad::frac(1, 2, d))
    }

    /// `i√d`.
    pub fn i_sqrt_d(d: u32) -> Self {
        Self::from_imag(RQuad::sqrt_d(d))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|² = re² + im²`.
    pub fn norm_sq(&self) -> RQuad {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_inv(&self) -> Option<Self> {
        let n = self.norm_sq().checked_inv()?;
        Some(Self::new(&self.re * &n, -(&self.im * &n)))
    }

    pub fn scale(&self, k: &RQuad) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn scale_rat(&self, k: &Rational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    /// Float shadow `(re, im)`.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for CQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + i({})", self.re, self.im)
    }
}

impl fmt::Display for CQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Neg for &CQuad {
    type Output = CQuad;
    fn neg(self) -> CQuad {
        CQuad::new(-&self.re, -&self.im)
    }
}

impl Neg for CQuad {
    type Output = CQuad;
    fn neg(self) -> CQuad {
        CQuad::new(-self.re, -self.im)
    }
}

impl Add<&CQuad> for &CQuad {
    type Output = CQuad;
    fn add(self, rhs: &CQuad) -> CQuad {
        CQuad::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&CQuad> for &CQuad {
    type Output = CQuad;
    fn sub(self, rhs: &CQuad) -> CQuad {
        CQuad::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&CQuad> for &CQuad {
    type Output = CQuad;
    fn mul(self, rhs: &CQuad) -> CQuad {
        CQuad::new(&self.re * &rhs.re - &self.im * &rhs.im, &self.re * &rhs.im + &self.im * &rhs.re)
    }
}

impl Div<&CQuad> for &CQuad {
    type Output = CQuad;
    /// Panics on division by zero.
    fn div(self, rhs: &CQuad) -> CQuad {
        self * &rhs.checked_inv().expect("division by zero in Q(sqrt d, i)")
    }
}

forward_owned!(CQuad, Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_norm() {
        for d in [7u32, 11] {
            let w = CQuad::omega(d);
            assert_eq!(w.norm_sq(), RQuad::frac(1 + d as i64, 4, d));
            assert_eq!(&w + &w.conj(), CQuad::one(d));
        }
    }

    #[test]
    fn inverse() {
        let z = &CQuad::omega(7) + &CQuad::from_int(3, 7);
        assert_eq!(&z * &z.checked_inv().unwrap(), CQuad::one(7));
        assert_eq!(&(&z / &z) - &CQuad::one(7), CQuad::zero(7));
    }
}
