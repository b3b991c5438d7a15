use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// An exact real number `a + b·√d` with rational `a`, `b`.
///
/// `d` is a small square-free positive integer fixed by context. Combining
/// values carrying different `d` panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RQuad {
    pub a: Rational,
    pub b: Rational,
    pub d: u32,
}

pub(crate) fn check_field(lhs: u32, rhs: u32) {
    assert_eq!(lhs, rhs, "mixed quadratic fields Q(sqrt {lhs}) and Q(sqrt {rhs})");
}

impl RQuad {
    pub fn new(a: Rational, b: Rational, d: u32) -> Self {
        debug_assert!(d > 0);
        RQuad { a, b, d }
    }

    pub fn zero(d: u32) -> Self {
        Self::new(Rational::zero(), Rational::zero(), d)
    }

    pub fn one(d: u32) -> Self {
        Self::from_rational(Rational::one(), d)
    }

    /// `√d` itself.
    pub fn sqrt_d(d: u32) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn from_rational(a: Rational, d: u32) -> Self {
        Self::new(a, Rational::zero(), d)
    }

    pub fn from_int(n: i64, d: u32) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)), d)
    }

    /// `num/den` as a field element.
    pub fn frac(num: i64, den: i64, d: u32) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)), d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b√d`.
    pub fn galois(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(self.d))
    }

    /// Exact sign in `{-1, 0, +1}`, decided by squaring with case analysis
    /// on the signs of the two components.
    pub fn sign(&self) -> i8 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        match (sa, sb) {
            (0, 0) => 0,
            (x, y) if x >= 0 && y >= 0 => 1,
            (x, y) if x <= 0 && y <= 0 => -1,
            // a and b√d have opposite signs: whichever has the larger square wins
            (x, _) => {
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * Rational::from_integer(BigInt::from(self.d));
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => -x,
                    Ordering::Equal => 0,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn exact_cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (a + b√d)^-1 = (a − b√d) / (a² − d b²); the norm of a nonzero element is
        // nonzero because d is not a square
        let n = self.norm();
        Some(Self::new(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Exact square root inside `Q(√d)`, if one exists and `self ≥ 0`.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.sign() < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let d = Rational::from_integer(BigInt::from(self.d));
        if self.b.is_zero() {
            if let Some(p) = rational_sqrt(&self.a) {
                return Some(Self::from_rational(p, self.d));
            }
            // a = q²·d
            let q = rational_sqrt(&(&self.a / &d))?;
            return Some(Self::new(Rational::zero(), q, self.d));
        }
        // (p + q√d)² = p² + d q² + 2pq√d, so p² is a root of 4x² − 4a x + d b² = 0
        let disc = rational_sqrt(&(&self.a * &self.a - &d * &self.b * &self.b))?;
        let two = Rational::from_integer(BigInt::from(2));
        for p2 in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if p2.is_negative() || p2.is_zero() {
                continue;
            }
            if let Some(p) = rational_sqrt(&p2) {
                let q = &self.b / (&two * &p);
                let cand = Self::new(p, q, self.d);
                let root = if cand.sign() < 0 { -cand } else { cand };
                if &root.square() == self {
                    return Some(root);
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * libm::sqrt(self.d as f64)
    }
}

fn rat_sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let m = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&m * &m) == r.denom() {
        Some(Rational::new(n, m))
    } else {
        None
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        // huge components: scale down by a common power of two first
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl fmt::Debug for RQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*s{}", self.b, self.d),
            (false, false) => write!(f, "{} + {}*s{}", self.a, self.b, self.d),
        }
    }
}

impl Neg for &RQuad {
    type Output = RQuad;
    fn neg(self) -> RQuad {
        RQuad::new(-&self.a, -&self.b, self.d)
    }
}

impl Neg for RQuad {
    type Output = RQuad;
    fn neg(self) -> RQuad {
        RQuad::new(-self.a, -self.b, self.d)
    }
}

impl Add<&RQuad> for &RQuad {
    type Output = RQuad;
    fn add(self, rhs: &RQuad) -> RQuad {
        check_field(self.d, rhs.d);
        RQuad::new(&self.a + &rhs.a, &self.b + &rhs.b, self.d)
    }
}

impl Sub<&RQuad> for &RQuad {
    type Output = RQuad;
    fn sub(self, rhs: &RQuad) -> RQuad {
        check_field(self.d, rhs.d);
        RQuad::new(&self.a - &rhs.a, &self.b - &rhs.b, self.d)
    }
}

impl Mul<&RQuad> for &RQuad {
    type Output = RQuad;
    fn mul(self, rhs: &RQuad) -> RQuad {
        check_field(self.d, rhs.d);
        let d = Rational::from_integer(BigInt::from(self.d));
        RQuad::new(&self.a * &rhs.a + &self.b * &rhs.b * d, &self.a * &rhs.b + &self.b * &rhs.a, self.d)
    }
}

impl Div<&RQuad> for &RQuad {
    type Output = RQuad;
    /// Panics on division by zero.
    fn div(self, rhs: &RQuad) -> RQuad {
        self * &rhs.checked_inv().expect("division by zero in Q(sqrt d)")
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(RQuad, Add add, Sub sub, Mul mul, Div div);

impl Mul<&Rational> for &RQuad {
    type Output = RQuad;
    fn mul(self, rhs: &Rational) -> RQuad {
        RQuad::new(&self.a * rhs, &self.b * rhs, self.d)
    }
}
