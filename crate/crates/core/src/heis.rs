//! Heisenberg group, Cygan metric, horospherical lifts and the action of the
//! stabilizer of infinity on the boundary.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{CQuad, CQuadJson, ExactError, RQuad, RQuadJson};
use crate::grouplin::{Mat3, Vec3};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeisError {
    #[error("image of a boundary point is not in standard-lift form")]
    OffBoundary,
    #[error("matrix is not a Heisenberg isometry: {0}")]
    NotHeisenbergIsometry(&'static str),
    #[error("dilation factor must be positive")]
    NonPositiveDilation,
}

/// Boundary point `(z, t)` of the Siegel domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HeisPoint {
    pub z: CQuad,
    pub t: RQuad,
}

/// Horospherical coordinates `(z, t, u)`, `u ≥ 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HSpacePoint {
    pub z: CQuad,
    pub t: RQuad,
    pub u: RQuad,
}

impl fmt::Debug for HeisPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.z, self.t)
    }
}

impl fmt::Debug for HSpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?}, {:?})", self.z, self.t, self.u)
    }
}

impl HeisPoint {
    pub fn new(z: CQuad, t: RQuad) -> Self {
        assert_eq!(z.d(), t.d, "mixed quadratic fields");
        HeisPoint { z, t }
    }

    pub fn origin(d: u32) -> Self {
        Self::new(CQuad::zero(d), RQuad::zero(d))
    }

    pub fn d(&self) -> u32 {
        self.t.d
    }

    pub fn with_u(&self, u: RQuad) -> HSpacePoint {
        HSpacePoint { z: self.z.clone(), t: self.t.clone(), u }
    }

    pub fn with_t(&self, t: RQuad) -> Self {
        Self::new(self.z.clone(), t)
    }

    pub fn lifted(&self) -> HSpacePoint {
        self.with_u(RQuad::zero(self.d()))
    }

    pub fn inverse(&self) -> Self {
        Self::new(-&self.z, -&self.t)
    }

    /// Float shadow `(Re z, Im z, t)`.
    pub fn to_f64(&self) -> [f64; 3] {
        let (x, y) = self.z.to_f64();
        [x, y, self.t.to_f64()]
    }
}

impl HSpacePoint {
    pub fn boundary(&self) -> HeisPoint {
        HeisPoint::new(self.z.clone(), self.t.clone())
    }
}

/// Twice the imaginary part of `a·b̄`.
fn two_im_a_bbar(a: &CQuad, b: &CQuad) -> RQuad {
    let im = &a.im * &b.re - &a.re * &b.im;
    &im + &im
}

/// Group law `(ζ1 + ζ2, t1 + t2 + 2·Im(ζ1·ζ̄2))`.
pub fn heis_mul(p: &HeisPoint, q: &HeisPoint) -> HeisPoint {
    HeisPoint::new(&p.z + &q.z, &(&p.t + &q.t) + &two_im_a_bbar(&p.z, &q.z))
}

/// `ρ₀(p, q)⁴`: the squared modulus of `|ζ1−ζ2|² − i·t1 + i·t2 − 2i·Im(ζ1·ζ̄2)`.
pub fn cygan_gap(p: &HeisPoint, q: &HeisPoint) -> RQuad {
    let re = (&p.z - &q.z).norm_sq();
    let im = &(&q.t - &p.t) - &two_im_a_bbar(&p.z, &q.z);
    re.square() + im.square()
}

/// Fourth power of the extended Cygan distance, with the `|u1 − u2|` term
/// added to the real part.
pub fn ext_cygan_gap(p: &HSpacePoint, q: &HSpacePoint) -> RQuad {
    let re = &(&p.z - &q.z).norm_sq() + &(&p.u - &q.u).abs();
    let im = &(&q.t - &p.t) - &two_im_a_bbar(&p.z, &q.z);
    re.square() + im.square()
}

/// `((−|ζ|² − u + i·t)/2, ζ, 1)`.
pub fn standard_lift(p: &HSpacePoint) -> Vec3 {
    let d = p.t.d;
    let half = RQuad::frac(1, 2, d);
    let re = -(&(&p.z.norm_sq() + &p.u) * &half);
    let im = &p.t * &half;
    Vec3([CQuad::new(re, im), p.z.clone(), CQuad::one(d)])
}

/// Image of a boundary point: a finite point or `q_∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryImage {
    Point(HeisPoint),
    Infinity,
}

impl BoundaryImage {
    pub fn point(self) -> Option<HeisPoint> {
        match self {
            BoundaryImage::Point(p) => Some(p),
            BoundaryImage::Infinity => None,
        }
    }
}

/// Read `(z, t)` back from a lift whose third coordinate is 1.
fn read_lift(v: &Vec3) -> Result<HeisPoint, HeisError> {
    let z = v.0[1].clone();
    let d = z.d();
    let expect_re = -(&z.norm_sq() * &RQuad::frac(1, 2, d));
    if v.0[0].re != expect_re {
        return Err(HeisError::OffBoundary);
    }
    let t = &v.0[0].im * &RQuad::from_int(2, d);
    Ok(HeisPoint::new(z, t))
}

pub fn act_boundary(a: &Mat3, p: &HeisPoint) -> Result<BoundaryImage, HeisError> {
    let v = a.apply(&standard_lift(&p.lifted()));
    if v.0[2].is_zero() {
        return Ok(BoundaryImage::Infinity);
    }
    let inv = v.0[2].checked_inv().expect("nonzero");
    let w = Vec3([&v.0[0] * &inv, &v.0[1] * &inv, CQuad::one(p.d())]);
    read_lift(&w).map(BoundaryImage::Point)
}

/// Boundary action for elements known to fix `q_∞`.
pub fn act_finite(a: &Mat3, p: &HeisPoint) -> Result<HeisPoint, HeisError> {
    act_boundary(a, p)?.point().ok_or(HeisError::OffBoundary)
}

/// Heisenberg translation `T_(z, t)`, taking the origin to `(z, t)`.
pub fn translation(z: &CQuad, t: &RQuad) -> Mat3 {
    let d = t.d;
    let corner = standard_lift(&HeisPoint::new(z.clone(), t.clone()).lifted()).0[0].clone();
    Mat3([[CQuad::one(d), -z.conj(), corner], [CQuad::zero(d), CQuad::one(d), z.clone()], [CQuad::zero(d), CQuad::zero(d), CQuad::one(d)]])
}

/// Heisenberg rotation `(z, t) ↦ (e^{iθ}z, t)`; `unit` must satisfy `|unit|² = 1`.
pub fn rotation(unit: &CQuad) -> Mat3 {
    let d = unit.d();
    assert!(unit.norm_sq() == RQuad::one(d), "rotation needs a unit complex number");
    Mat3::diag(CQuad::one(d), unit.clone(), CQuad::one(d))
}

/// Dilation `(z, t) ↦ (r·z, r²·t)`.
pub fn dilation(r: &RQuad) -> Result<Mat3, HeisError> {
    if !r.is_positive() {
        return Err(HeisError::NonPositiveDilation);
    }
    let d = r.d;
    Ok(Mat3::diag(CQuad::from_real(r.clone()), CQuad::one(d), CQuad::from_real(r.checked_inv().expect("positive"))))
}

/// Plane isometry `w ↦ rot·w + trans`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlaneIsom {
    pub rot: CQuad,
    pub trans: CQuad,
}

impl fmt::Debug for PlaneIsom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w -> ({:?})w + ({:?})", self.rot, self.trans)
    }
}

impl PlaneIsom {
    pub fn new(rot: CQuad, trans: CQuad) -> Self {
        assert!(rot.norm_sq() == RQuad::one(rot.d()), "rotation part must be unimodular");
        PlaneIsom { rot, trans }
    }

    pub fn identity(d: u32) -> Self {
        Self::new(CQuad::one(d), CQuad::zero(d))
    }

    pub fn apply(&self, w: &CQuad) -> CQuad {
        &(&self.rot * w) + &self.trans
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PlaneIsom) -> PlaneIsom {
        PlaneIsom::new(&self.rot * &other.rot, &(&self.rot * &other.trans) + &self.trans)
    }

    pub fn is_identity(&self) -> bool {
        self.rot == CQuad::one(self.rot.d()) && self.trans.is_zero()
    }

    /// Fixed point of a nontrivial rotation.
    pub fn fixed_point(&self) -> Option<CQuad> {
        let one_minus = &CQuad::one(self.rot.d()) - &self.rot;
        one_minus.checked_inv().map(|k| &self.trans * &k)
    }

    /// Rotation by π about some point.
    pub fn is_half_turn(&self) -> bool {
        self.rot == CQuad::from_int(-1, self.rot.d())
    }
}

/// Projection of a Heisenberg isometry to `Isom(C)`.
///
/// Accepts upper-triangular J-unitary matrices with equal corner entries
/// `z11 = z33 = λ`; reads `rot = z22/λ` and `trans = z23/λ`.
pub fn pi_star(a: &Mat3) -> Result<PlaneIsom, HeisError> {
    if !a.is_upper_triangular() {
        return Err(HeisError::NotHeisenbergIsometry("does not fix infinity"));
    }
    if !a.is_unitary_j() {
        return Err(HeisError::NotHeisenbergIsometry("not J-unitary"));
    }
    let l = a.z(1, 1);
    if l != a.z(3, 3) {
        return Err(HeisError::NotHeisenbergIsometry("has a dilation component"));
    }
    let inv = l.checked_inv().ok_or(HeisError::NotHeisenbergIsometry("singular"))?;
    let rot = a.z(2, 2) * &inv;
    if rot.norm_sq() != RQuad::one(a.d()) {
        return Err(HeisError::NotHeisenbergIsometry("rotation part not unimodular"));
    }
    Ok(PlaneIsom::new(rot, a.z(2, 3) * &inv))
}

/// JSON form of a boundary point, with an optional float shadow for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisPointJson {
    pub z: CQuadJson,
    pub t: RQuadJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float: Option<[f64; 3]>,
}

impl HeisPointJson {
    pub fn from_value(p: &HeisPoint) -> Self {
        HeisPointJson { z: CQuadJson::from_value(&p.z), t: RQuadJson::from_value(&p.t), float: Some(p.to_f64()) }
    }

    pub fn to_value(&self, d: u32) -> Result<HeisPoint, ExactError> {
        Ok(HeisPoint::new(self.z.to_value(d)?, self.t.to_value(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_complex, parse_real};

    fn hp(z: &str, t: &str, d: u32) -> HeisPoint {
        HeisPoint::new(parse_complex(z, d).unwrap(), parse_real(t, d).unwrap())
    }

    fn hs(z: &str, t: &str, u: &str, d: u32) -> HSpacePoint {
        hp(z, t, d).with_u(parse_real(u, d).unwrap())
    }

    #[test]
    fn group_law_examples() {
        let d = 2;
        let p = hp("1/3 - 2*i*s", "5/7", d);
        assert_eq!(heis_mul(&HeisPoint::origin(d), &p), p);
        assert_eq!(heis_mul(&hp("1", "0", d), &hp("i", "0", d)), hp("1+i", "-2", d));
        assert_eq!(heis_mul(&p, &p.inverse()), HeisPoint::origin(d));
    }

    #[test]
    fn cygan_examples() {
        let d = 7;
        let o = HeisPoint::origin(d);
        let p = hp("w", "s", d);
        assert!(cygan_gap(&p, &p).is_zero());
        assert_eq!(cygan_gap(&o, &hp("1", "0", d)), RQuad::one(d));
        assert_eq!(cygan_gap(&o, &hp("0", "1", d)), RQuad::one(d));
        let a = hs("w", "s", "1/3", d);
        assert!(ext_cygan_gap(&a, &a).is_zero());
        assert_eq!(ext_cygan_gap(&p.lifted(), &o.lifted()), cygan_gap(&p, &o));
        assert_eq!(ext_cygan_gap(&hs("0", "0", "0", d), &hs("0", "0", "1", d)), RQuad::one(d));
    }

    #[test]
    fn lift_examples() {
        let d = 2;
        let l = standard_lift(&hs("0", "0", "0", d));
        assert_eq!(l.0, [CQuad::zero(d), CQuad::zero(d), CQuad::one(d)]);
        let l = standard_lift(&hs("0", "0", "1", d));
        assert_eq!(l.0[0], parse_complex("-1/2", d).unwrap());
        let l = standard_lift(&hs("1", "s", "0", d));
        assert_eq!(l.0[0], parse_complex("(-1+i*s)/2", d).unwrap());
        assert_eq!(l.0[1], CQuad::one(d));
    }

    #[test]
    fn action_examples() {
        let d = 2;
        let z0 = parse_complex("1/2 - i*s/3", d).unwrap();
        let v = parse_real("3*s/5", d).unwrap();
        let got = act_boundary(&translation(&z0, &v), &HeisPoint::origin(d)).unwrap();
        assert_eq!(got, BoundaryImage::Point(HeisPoint::new(z0, v)));

        let i0 = Mat3::from_fn(|j, k| match (j, k) {
            (0, 2) => parse_complex("i/s", d).unwrap(),
            (1, 1) => CQuad::one(d),
            (2, 0) => parse_complex("i*s", d).unwrap(),
            _ => CQuad::zero(d),
        });
        assert_eq!(act_boundary(&i0, &HeisPoint::origin(d)), Ok(BoundaryImage::Infinity));

        let half_turn = rotation(&CQuad::from_int(-1, d));
        let p = hp("3/4 + i*s", "-1/9", d);
        assert_eq!(act_finite(&half_turn, &p).unwrap(), hp("-3/4 - i*s", "-1/9", d));
    }

    #[test]
    fn pi_star_examples() {
        let d = 2;
        let t = translation(&CQuad::zero(d), &parse_real("s", d).unwrap());
        assert!(pi_star(&t).unwrap().is_identity());
        let r2 = Mat3::from_fn(|j, k| {
            let rows = [["1", "2", "-2"], ["0", "-1", "2"], ["0", "0", "1"]];
            parse_complex(rows[j][k], d).unwrap()
        });
        let p = pi_star(&r2).unwrap();
        assert_eq!(p, PlaneIsom::new(CQuad::from_int(-1, d), CQuad::from_int(2, d)));
        assert_eq!(p.fixed_point(), Some(CQuad::one(d)));
        let dil = dilation(&RQuad::from_int(2, d)).unwrap();
        assert!(matches!(pi_star(&dil), Err(HeisError::NotHeisenbergIsometry(_))));
        assert!(dilation(&RQuad::zero(d)).is_err());
    }

    #[test]
    fn dilation_scales() {
        let d = 11;
        let r = parse_real("2", d).unwrap();
        let p = hp("1 + i", "3", d);
        let img = act_finite(&dilation(&r).unwrap(), &p).unwrap();
        assert_eq!(img, hp("2 + 2*i", "12", d));
    }
}
