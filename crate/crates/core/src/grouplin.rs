//! Vectors and matrices over `CQuad`, the Hermitian form `J`, and membership
//! tests for the Picard group, its sister group and their intersection.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactnum::{in_od, integer_parts, is_integer, rat, CQuad, CQuadJson, ExactError, RQuad};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not J-unitary")]
    NotUnitary,
    #[error("unsupported d = {0}; expected 2, 7 or 11")]
    UnsupportedD(u32),
    #[error("unbound generator {0:?}")]
    UnboundName(String),
    #[error("malformed word {input:?}: {msg}")]
    BadWord { input: String, msg: String },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec3(pub [CQuad; 3]);

impl fmt::Debug for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Row-major 3×3 matrix over `CQuad`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat3(pub [[CQuad; 3]; 3]);

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// `⟨z, w⟩ = z1·w̄3 + z2·w̄2 + z3·w̄1`.
pub fn herm_inner(z: &Vec3, w: &Vec3) -> CQuad {
    let [z1, z2, z3] = &z.0;
    let [w1, w2, w3] = &w.0;
    z1 * &w3.conj() + z2 * &w2.conj() + z3 * &w1.conj()
}

impl Mat3 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> CQuad) -> Self {
        Mat3([[f(0, 0), f(0, 1), f(0, 2)], [f(1, 0), f(1, 1), f(1, 2)], [f(2, 0), f(2, 1), f(2, 2)]])
    }

    pub fn zero(d: u32) -> Self {
        Self::from_fn(|_, _| CQuad::zero(d))
    }

    pub fn identity(d: u32) -> Self {
        Self::scalar(CQuad::one(d))
    }

    pub fn scalar(l: CQuad) -> Self {
        let d = l.d();
        Self::from_fn(|j, k| if j == k { l.clone() } else { CQuad::zero(d) })
    }

    pub fn diag(a: CQuad, b: CQuad, c: CQuad) -> Self {
        let d = a.d();
        let v = [a, b, c];
        Self::from_fn(|j, k| if j == k { v[j].clone() } else { CQuad::zero(d) })
    }

    /// The antidiagonal form matrix `J`.
    pub fn j(d: u32) -> Self {
        Self::from_fn(|j, k| if j + k == 2 { CQuad::one(d) } else { CQuad::zero(d) })
    }

    pub fn d(&self) -> u32 {
        self.0[0][0].d()
    }

    /// Entry `z_jk` with 1-based indices.
    pub fn z(&self, j: usize, k: usize) -> &CQuad {
        &self.0[j - 1][k - 1]
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        Self::from_fn(|j, k| &self.0[j][0] * &rhs.0[0][k] + &self.0[j][1] * &rhs.0[1][k] + &self.0[j][2] * &rhs.0[2][k])
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let r = |j: usize| &self.0[j][0] * &v.0[0] + &self.0[j][1] * &v.0[1] + &self.0[j][2] * &v.0[2];
        Vec3([r(0), r(1), r(2)])
    }

    pub fn conj_transpose(&self) -> Mat3 {
        Self::from_fn(|j, k| self.0[k][j].conj())
    }

    pub fn scale(&self, l: &CQuad) -> Mat3 {
        Self::from_fn(|j, k| &self.0[j][k] * l)
    }

    /// `J·A*·J`, the inverse of a J-unitary matrix.
    pub fn j_inverse(&self) -> Mat3 {
        // conjugating by the antidiagonal J reverses both index orders
        Self::from_fn(|j, k| self.0[2 - k][2 - j].conj())
    }

    pub fn is_unitary_j(&self) -> bool {
        let d = self.d();
        self.conj_transpose().mul(&Mat3::j(d)).mul(self) == Mat3::j(d)
    }

    pub fn det(&self) -> CQuad {
        let m = &self.0;
        &m[0][0] * &(&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * &(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * &(&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    /// Inverse via the adjugate; works for any invertible matrix.
    pub fn adjugate_inverse(&self) -> Result<Mat3, LinError> {
        let det_inv = self.det().checked_inv().ok_or(LinError::Singular)?;
        let m = &self.0;
        let cof = |r: usize, c: usize| {
            let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
            let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        };
        Ok(Self::from_fn(|j, k| &cof(k, j) * &det_inv))
    }

    /// `J·A*·J` when `A` is J-unitary, the adjugate inverse otherwise.
    pub fn inverse(&self) -> Result<Mat3, LinError> {
        if self.is_unitary_j() {
            Ok(self.j_inverse())
        } else {
            self.adjugate_inverse()
        }
    }

    /// `Some(λ)` when the matrix equals `λ·Id`.
    pub fn as_scalar(&self) -> Option<CQuad> {
        let l = &self.0[0][0];
        let ok = (0..3).all(|j| (0..3).all(|k| if j == k { &self.0[j][k] == l } else { self.0[j][k].is_zero() }));
        ok.then(|| l.clone())
    }

    /// Scalar with `|λ|² = 1`, i.e. the identity of `PU(2,1)`.
    pub fn is_projective_identity(&self) -> bool {
        self.as_scalar().is_some_and(|l| l.norm_sq() == RQuad::one(self.d()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.0[1][0].is_zero() && self.0[2][0].is_zero() && self.0[2][1].is_zero()
    }

    pub fn pow(&self, e: i32) -> Result<Mat3, LinError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Mat3::identity(self.d());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Float shadow, row-major `(re, im)`.
    pub fn to_f64(&self) -> [[(f64, f64); 3]; 3] {
        let mut out = [[(0.0, 0.0); 3]; 3];
        for (j, row) in self.0.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                out[j][k] = e.to_f64();
            }
        }
        out
    }
}

/// Projective equality: `A·B⁻¹ = λ·Id` with `|λ|² = 1`.
pub fn proj_eq(a: &Mat3, b: &Mat3) -> Result<bool, LinError> {
    let binv = b.adjugate_inverse()?;
    Ok(a.mul(&binv).is_projective_identity())
}

/// Which arithmetic group a membership query targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    Picard(u32),
    Sister(u32),
    Intersection(u32),
}

impl GroupTag {
    pub fn d(self) -> u32 {
        match self {
            GroupTag::Picard(d) | GroupTag::Sister(d) | GroupTag::Intersection(d) => d,
        }
    }
}

pub const SUPPORTED_D: [u32; 3] = [2, 7, 11];

pub fn check_d(d: u32) -> Result<(), LinError> {
    if SUPPORTED_D.contains(&d) {
        Ok(())
    } else {
        Err(LinError::UnsupportedD(d))
    }
}

/// Integer coordinates `(x13, y13)` of a sister-group corner entry.
///
/// `z13 = x13/2 + i·y13/(2√d)` for `d ≡ 3 (mod 4)` and `z13 = x13 + i·y13/√2`
/// for `d = 2`. `None` when the entry is off that lattice.
pub fn sister_corner_parts(z13: &CQuad) -> Option<(BigInt, BigInt)> {
    let d = z13.d();
    if !z13.re.b.is_zero() || !z13.im.a.is_zero() {
        return None;
    }
    // Im z13 = b·√d, and y13/(2√d) = y13·√d/(2d)
    let (xs, ys) = if d % 4 == 3 { (rat(2, 1), rat(2 * d as i64, 1)) } else { (rat(1, 1), rat(d as i64, 1)) };
    let x = &z13.re.a * xs;
    let y = &z13.im.b * ys;
    (is_integer(&x) && is_integer(&y)).then(|| (x.to_integer(), y.to_integer()))
}

fn divisible(x: &BigInt, d: u32) -> bool {
    x.is_multiple_of(&BigInt::from(d))
}

/// The `x` integer part of an `O_d`-form entry (`None` if off-lattice).
fn x_part(z: &CQuad) -> Option<BigInt> {
    integer_parts(z).ok().map(|(x, _)| x)
}

fn in_picard(a: &Mat3) -> Result<bool, LinError> {
    for row in &a.0 {
        for e in row {
            match in_od(e) {
                Ok(true) => {}
                Ok(false) | Err(ExactError::NotInField(_)) => return Ok(false),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(true)
}

fn in_sister(a: &Mat3) -> Result<bool, LinError> {
    let d = a.d();
    let Some((x13, y13)) = sister_corner_parts(a.z(1, 3)) else { return Ok(false) };
    if d % 4 == 3 && x13.is_even() != y13.is_even() {
        return Ok(false);
    }
    for j in 1..=3 {
        for k in 1..=3 {
            if (j, k) != (1, 3) && !in_od(a.z(j, k)).unwrap_or(false) {
                return Ok(false);
            }
        }
    }
    Ok([(2, 1), (3, 1), (3, 2)].iter().all(|&(j, k)| x_part(a.z(j, k)).is_some_and(|x| divisible(&x, d))))
}

/// Membership of a J-unitary matrix in the group named by `tag`.
///
/// Returns `Err(NotUnitary)` when the precondition fails, distinct from
/// `Ok(false)`.
pub fn in_group(a: &Mat3, tag: GroupTag) -> Result<bool, LinError> {
    check_d(tag.d())?;
    assert_eq!(a.d(), tag.d(), "matrix field and group tag disagree on d");
    if !a.is_unitary_j() {
        return Err(LinError::NotUnitary);
    }
    match tag {
        GroupTag::Picard(_) => in_picard(a),
        GroupTag::Sister(_) => in_sister(a),
        GroupTag::Intersection(_) => Ok(in_sister(a)? && in_picard(a)?),
    }
}

/// The intersection subgroup, tested from its direct description: every entry
/// in `O_d` form and `x21, x31, x32` divisible by `d`.
pub fn in_h_explicit(a: &Mat3) -> Result<bool, LinError> {
    let d = a.d();
    check_d(d)?;
    if !a.is_unitary_j() {
        return Err(LinError::NotUnitary);
    }
    if !in_picard(a)? {
        return Ok(false);
    }
    Ok([(2, 1), (3, 1), (3, 2)].iter().all(|&(j, k)| x_part(a.z(j, k)).is_some_and(|x| divisible(&x, d))))
}

/// A word in named generators: `(name, nonzero exponent)` read left to right.
pub type Word = Vec<(String, i32)>;

/// Parse words like `"R1^-1 T^-2 R3^-1 T^-2 R1"` or `"(R1 T R3 T^2 R2)^2"`.
///
/// Parenthesised groups may carry an exponent; a negative group exponent
/// inverts the group. Unicode superscripts are not accepted.
pub fn parse_word(src: &str) -> Result<Word, LinError> {
    let bad = |msg: &str| LinError::BadWord { input: src.to_string(), msg: msg.to_string() };
    let chars: Vec<char> = src.chars().collect();
    let mut pos = 0;

    fn skip_ws(chars: &[char], pos: &mut usize) {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    }

    fn exponent(chars: &[char], pos: &mut usize) -> Option<Result<i32, ()>> {
        skip_ws(chars, pos);
        if *pos >= chars.len() || chars[*pos] != '^' {
            return None;
        }
        *pos += 1;
        skip_ws(chars, pos);
        let start = *pos;
        if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
            *pos += 1;
        }
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let s: String = chars[start..*pos].iter().collect();
        Some(s.parse::<i32>().map_err(|_| ()))
    }

    fn invert(w: &Word) -> Word {
        w.iter().rev().map(|(n, e)| (n.clone(), -e)).collect()
    }

    fn seq(chars: &[char], pos: &mut usize, depth: usize) -> Result<Word, &'static str> {
        let mut out = Word::new();
        loop {
            skip_ws(chars, pos);
            if *pos >= chars.len() {
                return if depth == 0 { Ok(out) } else { Err("missing ')'") };
            }
            let c = chars[*pos];
            if c == ')' {
                return if depth > 0 { Ok(out) } else { Err("unbalanced ')'") };
            }
            let (body, is_group) = if c == '(' {
                *pos += 1;
                let inner = seq(chars, pos, depth + 1)?;
                *pos += 1;
                (inner, true)
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = *pos;
                while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_') {
                    *pos += 1;
                }
                (alloc::vec![(chars[start..*pos].iter().collect(), 1)], false)
            } else {
                return Err("unexpected character");
            };
            let e = match exponent(chars, pos) {
                None => 1,
                Some(Ok(0)) => return Err("zero exponent"),
                Some(Ok(e)) => e,
                Some(Err(())) => return Err("bad exponent"),
            };
            if !is_group {
                out.push((body[0].0.clone(), e));
            } else {
                let unit = if e < 0 { invert(&body) } else { body };
                for _ in 0..e.unsigned_abs() {
                    out.extend(unit.iter().cloned());
                }
            }
        }
    }

    let w = seq(&chars, &mut pos, 0).map_err(bad)?;
    if w.is_empty() {
        return Err(bad("empty word"));
    }
    Ok(w)
}

pub fn format_word(w: &Word) -> String {
    let mut s = String::new();
    for (k, (n, e)) in w.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        s.push_str(n);
        if *e != 1 {
            s.push('^');
            s.push_str(&e.to_string());
        }
    }
    s
}

/// Exact product of a word over a named generator map.
pub fn eval_word(gens: &BTreeMap<String, Mat3>, word: &[(String, i32)]) -> Result<Mat3, LinError> {
    let mut acc: Option<Mat3> = None;
    let mut inverses: BTreeMap<&str, Mat3> = BTreeMap::new();
    for (name, e) in word {
        if *e == 0 {
            return Err(LinError::BadWord { input: format_word(&word.to_vec()), msg: "zero exponent".into() });
        }
        let g = gens.get(name).ok_or_else(|| LinError::UnboundName(name.clone()))?;
        let factor = if *e > 0 {
            g.clone()
        } else {
            if !inverses.contains_key(name.as_str()) {
                inverses.insert(name.as_str(), g.inverse()?);
            }
            inverses[name.as_str()].clone()
        };
        for _ in 0..e.unsigned_abs() {
            acc = Some(match acc {
                None => factor.clone(),
                Some(m) => m.mul(&factor),
            });
        }
    }
    acc.ok_or_else(|| LinError::BadWord { input: String::new(), msg: "empty word".into() })
}

/// Matrix JSON document; `d` is recorded once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub d: u32,
    pub entries: Vec<Vec<CQuadJson>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &Mat3) -> Self {
        MatrixDoc { d: m.d(), entries: m.0.iter().map(|r| r.iter().map(CQuadJson::from_value).collect()).collect() }
    }

    pub fn to_matrix(&self) -> Result<Mat3, LinError> {
        if self.entries.len() != 3 || self.entries.iter().any(|r| r.len() != 3) {
            return Err(LinError::Exact(ExactError::Parse { input: "matrix".into(), msg: "expected 3x3 entries".into() }));
        }
        let mut rows: Vec<[CQuad; 3]> = Vec::with_capacity(3);
        for r in &self.entries {
            rows.push([r[0].to_value(self.d)?, r[1].to_value(self.d)?, r[2].to_value(self.d)?]);
        }
        Ok(Mat3([rows[0].clone(), rows[1].clone(), rows[2].clone()]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_complex;

    fn m(rows: [[&str; 3]; 3], d: u32) -> Mat3 {
        Mat3::from_fn(|j, k| parse_complex(rows[j][k], d).unwrap())
    }

    fn i0(d: u32) -> Mat3 {
        m([["0", "0", "i/s"], ["0", "1", "0"], ["i*s", "0", "0"]], d)
    }

    fn t(d: u32) -> Mat3 {
        m([["1", "0", "i/s"], ["0", "1", "0"], ["0", "0", "1"]], d)
    }

    fn v(e: [&str; 3], d: u32) -> Vec3 {
        Vec3([parse_complex(e[0], d).unwrap(), parse_complex(e[1], d).unwrap(), parse_complex(e[2], d).unwrap()])
    }

    #[test]
    fn herm_inner_examples() {
        let d = 2;
        let q = v(["1", "0", "0"], d);
        assert_eq!(herm_inner(&q, &q), CQuad::zero(d));
        let e2 = v(["0", "1", "0"], d);
        assert_eq!(herm_inner(&e2, &e2), CQuad::one(d));
        let l = v(["-1/2", "0", "1"], d);
        assert_eq!(herm_inner(&l, &l), CQuad::from_int(-1, d));
    }

    #[test]
    fn unitarity_examples() {
        assert!(Mat3::identity(2).is_unitary_j());
        assert!(i0(2).is_unitary_j());
        let two = CQuad::from_int(2, 2);
        assert!(!Mat3::diag(two, CQuad::one(2), CQuad::one(2)).is_unitary_j());
    }

    #[test]
    fn proj_eq_examples() {
        let a = i0(7);
        assert_eq!(proj_eq(&a, &a), Ok(true));
        let minus = Mat3::scalar(CQuad::from_int(-1, 7));
        assert_eq!(proj_eq(&minus, &Mat3::identity(7)), Ok(true));
        let two = Mat3::scalar(CQuad::from_int(2, 7));
        assert_eq!(proj_eq(&two, &Mat3::identity(7)), Ok(false));
        assert_eq!(proj_eq(&a, &Mat3::zero(7)), Err(LinError::Singular));
    }

    #[test]
    fn membership_examples() {
        assert_eq!(in_group(&t(2), GroupTag::Sister(2)), Ok(true));
        assert_eq!(in_group(&t(2), GroupTag::Picard(2)), Ok(false));
        for d in SUPPORTED_D {
            let r1 = Mat3::diag(CQuad::one(d), CQuad::from_int(-1, d), CQuad::one(d));
            assert_eq!(in_group(&r1, GroupTag::Intersection(d)), Ok(true));
            assert_eq!(in_h_explicit(&r1), Ok(true));
            assert_eq!(in_group(&i0(d), GroupTag::Sister(d)), Ok(true));
            assert_eq!(in_group(&i0(d), GroupTag::Picard(d)), Ok(false));
        }
        let two = CQuad::from_int(2, 7);
        let bad = Mat3::diag(two, CQuad::one(7), CQuad::one(7));
        assert_eq!(in_group(&bad, GroupTag::Sister(7)), Err(LinError::NotUnitary));
        assert_eq!(in_group(&Mat3::identity(3), GroupTag::Picard(3)), Err(LinError::UnsupportedD(3)));
    }

    #[test]
    fn fast_inverse_matches_adjugate() {
        for d in SUPPORTED_D {
            let a = i0(d).mul(&t(d)).mul(&i0(d)).mul(&t(d));
            assert_eq!(a.j_inverse(), a.adjugate_inverse().unwrap());
            assert_eq!(a.mul(&a.j_inverse()), Mat3::identity(d));
        }
    }

    #[test]
    fn words() {
        let w = parse_word("R1^-1 T^-2 R3^-1").unwrap();
        assert_eq!(w, alloc::vec![("R1".into(), -1), ("T".into(), -2), ("R3".into(), -1)]);
        let g = parse_word("(R1 T^2)^-2").unwrap();
        assert_eq!(format_word(&g), "T^-2 R1^-1 T^-2 R1^-1");
        assert!(parse_word("R1^0").is_err());
        assert!(parse_word("(R1").is_err());
        assert!(parse_word("R1)").is_err());
        assert!(parse_word("").is_err());

        let d = 2;
        let mut gens = BTreeMap::new();
        gens.insert("R1".to_string(), Mat3::diag(CQuad::one(d), CQuad::from_int(-1, d), CQuad::one(d)));
        gens.insert("I0".to_string(), i0(d));
        assert_eq!(eval_word(&gens, &parse_word("R1^2").unwrap()), Ok(Mat3::identity(d)));
        let sq = eval_word(&gens, &parse_word("I0^2").unwrap()).unwrap();
        // I0² = diag(-1, 1, -1), projectively R1 rather than the identity
        assert!(!sq.is_projective_identity());
        assert_eq!(proj_eq(&sq, &gens["R1"]), Ok(true));
        assert!(eval_word(&gens, &parse_word("I0^4").unwrap()).unwrap().is_projective_identity());
        assert_eq!(eval_word(&gens, &parse_word("X").unwrap()), Err(LinError::UnboundName("X".into())));
    }

    #[test]
    fn matrix_json_roundtrip() {
        let a = i0(11).mul(&t(11));
        let doc = MatrixDoc::from_matrix(&a);
        let s = serde_json::to_string(&doc).unwrap();
        let back: MatrixDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_matrix().unwrap(), a);
    }
}
