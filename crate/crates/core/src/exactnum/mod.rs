//! Exact arithmetic in `Q`, the real quadratic field `Q(√d)` and its
//! complexification, plus integrality predicates for the ring of integers
//! `O_d` of `Q(i√d)`.

mod cquad;
mod expr;
mod rquad;

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use cquad::CQuad;
pub use expr::{parse_complex, parse_real};
pub use rquad::rat_to_f64;
pub use rquad::RQuad;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("malformed decimal literal {0:?}")]
    MalformedDecimal(String),
    #[error("value is not an element of Q(i sqrt {0})")]
    NotInField(u32),
    #[error("value is off the integer lattice for d = {0}")]
    OffLattice(u32),
    #[error("cannot parse {input:?}: {msg}")]
    Parse { input: String, msg: String },
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

fn check_in_field(z: &CQuad) -> Result<(), ExactError> {
    // Q(i√d) = { a + i√d·b } so Re is rational and Im is a rational multiple of √d
    if z.re.b.is_zero() && z.im.a.is_zero() {
        Ok(())
    } else {
        Err(ExactError::NotInField(z.d()))
    }
}

/// Membership in `O_d`: `Z[i√d]` for `d ≡ 1, 2 (mod 4)`, `Z[ω_d]` for `d ≡ 3 (mod 4)`.
pub fn in_od(z: &CQuad) -> Result<bool, ExactError> {
    check_in_field(z)?;
    let (x, y) = (&z.re.a, &z.im.b);
    if z.d() % 4 == 3 {
        let two = rat(2, 1);
        let (x2, y2) = (x * &two, y * &two);
        Ok(is_integer(&x2) && is_integer(&y2) && x2.numer().is_even() == y2.numer().is_even())
    } else {
        Ok(is_integer(x) && is_integer(y))
    }
}

/// Integer coordinates of `z` on the lattice used by the congruence arguments.
///
/// For `d ≡ 3 (mod 4)` returns `(x, y)` with `z = x/2 + i√d·y/2`; otherwise
/// `(x, y)` with `z = x + i√d·y`.
pub fn integer_parts(z: &CQuad) -> Result<(BigInt, BigInt), ExactError> {
    check_in_field(z)?;
    let scale = if z.d() % 4 == 3 { rat(2, 1) } else { Rational::one() };
    let x = &z.re.a * &scale;
    let y = &z.im.b * &scale;
    if is_integer(&x) && is_integer(&y) {
        Ok((x.to_integer(), y.to_integer()))
    } else {
        Err(ExactError::OffLattice(z.d()))
    }
}

/// Inverse of [`integer_parts`].
pub fn from_integer_parts(x: &BigInt, y: &BigInt, d: u32) -> CQuad {
    let scale = if d % 4 == 3 { rat(1, 2) } else { Rational::one() };
    CQuad::new(
        RQuad::from_rational(Rational::from_integer(x.clone()) * &scale, d),
        RQuad::new(Rational::zero(), Rational::from_integer(y.clone()) * &scale, d),
    )
}

/// Exact rational value of a finite decimal literal such as `-0.283421`.
pub fn parse_decimal(s: &str) -> Result<Rational, ExactError> {
    let bad = || ExactError::MalformedDecimal(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Parse `"p/q"`, `"p"`, or a decimal literal.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    if t.contains('.') {
        return parse_decimal(t);
    }
    t.parse::<Rational>().map_err(|_| ExactError::Parse { input: s.to_string(), msg: "expected p/q".to_string() })
}

/// JSON form of an `RQuad`: `{"a": "p/q", "b": "r/s"}`; `d` lives at document level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RQuadJson {
    pub a: String,
    pub b: String,
}

/// JSON form of a `CQuad`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CQuadJson {
    pub re: RQuadJson,
    pub im: RQuadJson,
}

impl RQuadJson {
    pub fn from_value(x: &RQuad) -> Self {
        RQuadJson { a: x.a.to_string(), b: x.b.to_string() }
    }

    pub fn to_value(&self, d: u32) -> Result<RQuad, ExactError> {
        Ok(RQuad::new(parse_rational(&self.a)?, parse_rational(&self.b)?, d))
    }
}

impl CQuadJson {
    pub fn from_value(z: &CQuad) -> Self {
        CQuadJson { re: RQuadJson::from_value(&z.re), im: RQuadJson::from_value(&z.im) }
    }

    pub fn to_value(&self, d: u32) -> Result<CQuad, ExactError> {
        Ok(CQuad::new(self.re.to_value(d)?, self.im.to_value(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isd(b: (i64, i64), d: u32) -> CQuad {
        CQuad::from_imag(RQuad::new(Rational::zero(), rat(b.0, b.1), d))
    }

    #[test]
    fn od_examples() {
        let z = &CQuad::one(2) + &isd((1, 1), 2);
        assert_eq!(in_od(&z), Ok(true));
        assert_eq!(in_od(&CQuad::omega(7)), Ok(true));
        // i/√2 = (1/2)·i√2
        assert_eq!(in_od(&isd((1, 2), 2)), Ok(false));
        // (1 + i√7)/2 + 1/2 has mixed parity
        let half = CQuad::from_real(RQuad::frac(1, 2, 7));
        assert_eq!(in_od(&(&CQuad::omega(7) + &half)), Ok(false));
        let bad = CQuad::from_real(RQuad::sqrt_d(7));
        assert_eq!(in_od(&bad), Err(ExactError::NotInField(7)));
    }

    #[test]
    fn integer_parts_examples() {
        let big = |n: i64| BigInt::from(n);
        assert_eq!(integer_parts(&CQuad::omega(7)), Ok((big(1), big(1))));
        let z = &CQuad::from_int(2, 2) - &isd((1, 1), 2);
        assert_eq!(integer_parts(&z), Ok((big(2), big(-1))));
        let z = &CQuad::from_real(RQuad::frac(3, 2, 11)) + &isd((1, 2), 11);
        assert_eq!(integer_parts(&z), Ok((big(3), big(1))));
        assert_eq!(integer_parts(&isd((1, 2), 2)), Err(ExactError::OffLattice(2)));
        assert_eq!(from_integer_parts(&big(3), &big(1), 11), z);
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(parse_decimal("0.5"), Ok(rat(1, 2)));
        assert_eq!(parse_decimal("0.630159"), Ok(rat(630159, 1000000)));
        assert_eq!(parse_decimal("-0.283421"), Ok(rat(-283421, 1000000)));
        assert_eq!(parse_decimal("12"), Ok(rat(12, 1)));
        assert_eq!(parse_decimal(".25"), Ok(rat(1, 4)));
        for bad in ["", "-", ".", "1.2.3", "1e5", "0x10", "1 2"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let z = &CQuad::omega(11) + &CQuad::from_real(RQuad::frac(-7, 3, 11));
        let j = CQuadJson::from_value(&z);
        assert_eq!(j.to_value(11).unwrap(), z);
    }
}
