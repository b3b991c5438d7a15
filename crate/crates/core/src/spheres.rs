//! Cygan spheres: isometric spheres of matrices, exact membership, images
//! under Heisenberg isometries, and the per-field sphere catalogs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::FieldData;
use crate::exactnum::{rat, CQuad, RQuad, RQuadJson};
use crate::grouplin::{eval_word, parse_word, proj_eq, LinError, Mat3};
use crate::heis::{act_boundary, ext_cygan_gap, pi_star, BoundaryImage, HSpacePoint, HeisPoint, HeisPointJson};
use crate::report::{Claim, Status};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SphereError {
    #[error("matrix fixes infinity and has no isometric sphere")]
    FixesInfinity,
    #[error("matrix is not J-unitary")]
    NotUnitary,
    #[error("word is not a Heisenberg isometry without dilation")]
    NotIsometry,
    #[error("unknown sphere {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Cygan sphere `{ ρ(center, p)⁴ = r4 }`. `r_sq` is present when `√r4`
/// lies in `Q(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyganSphere {
    pub center: HeisPoint,
    pub r4: RQuad,
    pub r_sq: Option<RQuad>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Open,
    Boundary,
    Closed,
}

impl CyganSphere {
    pub fn new(center: HeisPoint, r4: RQuad) -> Self {
        assert!(r4.is_positive(), "sphere radius must be positive");
        let r_sq = r4.sqrt_exact();
        CyganSphere { center, r4, r_sq }
    }

    pub fn d(&self) -> u32 {
        self.r4.d
    }

    /// `ρ̃(center, p)⁴`.
    pub fn gap(&self, p: &HSpacePoint) -> RQuad {
        ext_cygan_gap(&self.center.lifted(), p)
    }

    /// `r4 − ρ̃(center, p)⁴`; positive exactly on the open interior.
    pub fn margin(&self, p: &HeisPoint) -> RQuad {
        &self.r4 - &self.gap(&p.lifted())
    }

    /// Float `margin`, for triage and pre-ordering only.
    pub fn margin_f64(&self, p: &[f64; 3]) -> f64 {
        let c = self.center.to_f64();
        let dx = p[0] - c[0];
        let dy = p[1] - c[1];
        let re = dx * dx + dy * dy;
        // t − t0 + 2·Im(z·z̄0)
        let im = p[2] - c[2] + 2.0 * (p[1] * c[0] - p[0] * c[1]);
        self.r4.to_f64() - (re * re + im * im)
    }

    /// `(cx, cy, t, r)` with `r` the Cygan radius.
    pub fn float_params(&self) -> [f64; 4] {
        let c = self.center.to_f64();
        [c[0], c[1], c[2], libm::sqrt(libm::sqrt(self.r4.to_f64()))]
    }
}

pub fn sphere_contains(s: &CyganSphere, p: &HSpacePoint, mode: Mode) -> bool {
    let m = &s.r4 - &s.gap(p);
    match mode {
        Mode::Open => m.is_positive(),
        Mode::Boundary => m.is_zero(),
        Mode::Closed => !m.is_negative(),
    }
}

pub fn contains_point(s: &CyganSphere, p: &HeisPoint, mode: Mode) -> bool {
    sphere_contains(s, &p.lifted(), mode)
}

/// Isometric sphere of `g`: centre `g⁻¹(q_∞) = (z̄32/z̄31, 2·Im(z̄33/z̄31))`
/// and `r⁴ = 4/|z31|²`.
pub fn isometric_sphere(g: &Mat3) -> Result<CyganSphere, SphereError> {
    if !g.is_unitary_j() {
        return Err(SphereError::NotUnitary);
    }
    let z31 = g.z(3, 1);
    if z31.is_zero() {
        return Err(SphereError::FixesInfinity);
    }
    let inv = z31.conj().checked_inv().expect("nonzero");
    let z0 = &g.z(3, 2).conj() * &inv;
    let w = &g.z(3, 3).conj() * &inv;
    let t0 = &w.im + &w.im;
    let d = g.d();
    let r4 = &RQuad::from_int(4, d) * &z31.norm_sq().checked_inv().expect("nonzero");
    Ok(CyganSphere::new(HeisPoint::new(z0, t0), r4))
}

/// Image of a sphere under a Heisenberg isometry without dilation.
pub fn transform_sphere(w: &Mat3, s: &CyganSphere) -> Result<CyganSphere, SphereError> {
    pi_star(w).map_err(|_| SphereError::NotIsometry)?;
    let c = act_boundary(w, &s.center).ok().and_then(BoundaryImage::point).ok_or(SphereError::NotIsometry)?;
    Ok(CyganSphere { center: c, r4: s.r4.clone(), r_sq: s.r_sq.clone() })
}

/// Named spheres for one field, in listing order.
#[derive(Debug, Clone)]
pub struct SphereCatalog {
    pub d: u32,
    /// Covering spheres.
    pub spheres: Vec<(String, CyganSphere)>,
    /// Base spheres that only seed images.
    pub auxiliary: Vec<(String, CyganSphere)>,
    /// Recomputed defining matrices of the base spheres.
    pub base_matrices: Vec<(String, Mat3)>,
}

impl SphereCatalog {
    pub fn get(&self, label: &str) -> Option<&CyganSphere> {
        self.spheres.iter().chain(&self.auxiliary).find(|(l, _)| l == label).map(|(_, s)| s)
    }

    pub fn require(&self, label: &str) -> Result<&CyganSphere, SphereError> {
        self.get(label).ok_or_else(|| SphereError::Unknown(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.spheres.iter().map(|(l, _)| l.as_str())
    }
}

/// Build every catalog sphere from its defining word.
pub fn build_catalog(f: &FieldData) -> Result<SphereCatalog, SphereError> {
    let mut spheres = Vec::new();
    let mut auxiliary = Vec::new();
    let mut base_matrices = Vec::new();
    for b in &f.spheres.bases {
        let m = eval_word(&f.generators, &parse_word(&b.word)?)?;
        let entry = (b.label.clone(), isometric_sphere(&m)?);
        if b.cover {
            spheres.push(entry);
        } else {
            auxiliary.push(entry);
        }
        base_matrices.push((b.label.clone(), m));
    }
    for img in &f.spheres.images {
        let base = spheres
            .iter()
            .chain(&auxiliary)
            .find(|(l, _)| *l == img.base)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| SphereError::Unknown(img.base.clone()))?;
        let w = eval_word(&f.generators, &parse_word(&img.word)?)?;
        spheres.push((img.label.clone(), transform_sphere(&w, &base)?));
    }
    Ok(SphereCatalog { d: f.d, spheres, auxiliary, base_matrices })
}

/// Listed product matrices and sphere equations against the recomputed
/// catalog, plus radius agreement between `G` and `G⁻¹`.
pub fn verify_catalog(f: &FieldData, cat: &SphereCatalog) -> Vec<Claim> {
    let d = f.d;
    let mut out = Vec::new();
    for b in &f.spheres.bases {
        let Some((_, m)) = cat.base_matrices.iter().find(|(l, _)| *l == b.label) else { continue };
        let inv_ok =
            m.inverse().ok().and_then(|mi| isometric_sphere(&mi).ok()).is_some_and(|s| Some(&s.r4) == cat.get(&b.label).map(|c| &c.r4));
        out.push(Claim::pass_if(
            format!("d{d}/sphere/{}/inverse-radius", b.label),
            "isometric sphere radius",
            inv_ok,
            "G and G^-1 give the same radius",
        ));
        if let Some(listed) = &b.listed_matrix {
            let id = format!("d{d}/sphere/{}/listed-matrix", b.label);
            let claim = if proj_eq(m, listed) == Ok(true) {
                Claim::new(id, "listed product matrix", Status::Pass, format!("{} recomputed exactly", b.word))
            } else {
                let diffs: Vec<String> = (1..=3)
                    .flat_map(|j| (1..=3).map(move |k| (j, k)))
                    .filter(|&(j, k)| m.z(j, k) != listed.z(j, k))
                    .map(|(j, k)| format!("z{j}{k}: listed {:?}, recomputed {:?}", listed.z(j, k), m.z(j, k)))
                    .collect();
                Claim::new(
                    id,
                    "listed product matrix",
                    Status::Discrepancy,
                    format!("recomputed {} differs; {}; sphere taken from the recomputed word", b.word, diffs.join("; ")),
                )
            };
            out.push(claim);
        }
    }
    for e in &f.spheres.listed_equations {
        let id = format!("d{d}/sphere/{}/listed-equation", e.label);
        let Some(s) = cat.get(&e.label) else {
            out.push(Claim::new(id, "listed sphere equation", Status::Fail, "sphere not in catalog"));
            continue;
        };
        let geom_ok = s.center.z == e.z0 && s.center.t == e.t0 && s.r4 == e.r4;
        let c_ok = e.c == e.z0.conj();
        let (status, ev) = match (geom_ok, c_ok) {
            (true, true) => (Status::Pass, String::from("centre and radius match")),
            (true, false) => (
                Status::Discrepancy,
                format!("centre and radius match; cross-term coefficient listed {:?}, expected {:?}", e.c, e.z0.conj()),
            ),
            _ => (Status::Fail, format!("computed centre {:?} r4 {}, listed centre ({:?}, {}) r4 {}", s.center, s.r4, e.z0, e.t0, e.r4)),
        };
        out.push(Claim::new(id, "listed sphere equation", status, ev));
    }
    out
}

/// `S0` has centre the origin and `r² = 2/√d`; for `d = 2`, `S1` has centre
/// `(1, 0)` and `r² = 1`.
pub fn verify_sphere_parameters(cat: &SphereCatalog) -> Vec<Claim> {
    let d = cat.d;
    let mut out = Vec::new();
    if let Some(s0) = cat.get("S0") {
        let want = RQuad::new(rat(0, 1), rat(2, d as i64), d);
        let ok = s0.center == HeisPoint::origin(d) && s0.r_sq.as_ref() == Some(&want);
        out.push(Claim::pass_if(
            format!("d{d}/sphere/S0/parameters"),
            "isometric sphere of I0",
            ok,
            format!("centre {:?}, r_sq {:?}", s0.center, s0.r_sq),
        ));
    }
    if d == 2 {
        if let Some(s1) = cat.get("S1") {
            let ok = s1.center == HeisPoint::new(CQuad::one(d), RQuad::zero(d)) && s1.r_sq == Some(RQuad::one(d));
            out.push(Claim::pass_if(
                "d2/sphere/S1/parameters",
                "isometric sphere of I0 R3 I0",
                ok,
                format!("centre {:?}, r_sq {:?}", s1.center, s1.r_sq),
            ));
        }
    }
    out
}

/// Exact points on `S0 = { |ζ|⁴ + t² = 4/d }` with `ζ = (a + i√d·b)/D` and
/// `t ∈ Q ∪ √d·Q`, rotated by rational unit complex numbers.
pub fn s0_boundary_points(d: u32, n: usize, seed: u64) -> Vec<HeisPoint> {
    let r4 = rat(4, d as i64);
    let mut bases: Vec<(CQuad, RQuad)> = Vec::new();
    'search: for den in 1i64..=40 {
        for a in 0..=3 * den {
            for b in 0..=2 * den {
                if a == 0 && b == 0 {
                    continue;
                }
                let rho = rat(a * a + d as i64 * b * b, den * den);
                let t2 = &r4 - &rho * &rho;
                if t2 <= rat(0, 1) {
                    continue;
                }
                if let Some(t) = RQuad::from_rational(t2, d).sqrt_exact() {
                    let z = CQuad::new(RQuad::frac(a, den, d), RQuad::new(rat(0, 1), rat(b, den), d));
                    bases.push((z, t));
                    if bases.len() >= 8 {
                        break 'search;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(d));
    let mut out = Vec::with_capacity(n);
    if bases.is_empty() {
        return out;
    }
    while out.len() < n {
        let (z, t) = &bases[rng.gen_range(0..bases.len())];
        let (m, k) = (rng.gen_range(1i64..=12), rng.gen_range(0i64..=12));
        let den = m * m + k * k;
        let unit = CQuad::new(RQuad::frac(m * m - k * k, den, d), RQuad::frac(2 * m * k, den, d));
        let t = if rng.gen_bool(0.5) { t.clone() } else { -t };
        out.push(HeisPoint::new(z * &unit, t));
    }
    out
}

/// Heisenberg dilation of a boundary point by a rational factor.
fn dilate(p: &HeisPoint, l: &RQuad) -> HeisPoint {
    HeisPoint::new(p.z.scale(l), &p.t * &l.square())
}

/// `I0` exchanges the inside and outside of `S0` and preserves `S0`.
pub fn verify_i0_sphere_symmetry(f: &FieldData, n: usize, seed: u64) -> Vec<Claim> {
    let d = f.d;
    let i0 = &f.generators["I0"];
    let s0 = isometric_sphere(i0).expect("I0 has an isometric sphere");
    let mut out = Vec::new();
    let sq = i0.mul(i0);
    let r1 = &f.generators["R1"];
    let sq_note = if sq.is_projective_identity() {
        (Status::Pass, String::from("I0^2 is the identity"))
    } else if proj_eq(&sq, r1) == Ok(true) && sq.mul(&sq).is_projective_identity() {
        (Status::Discrepancy, String::from("I0^2 equals R1 projectively, not the identity; I0^4 is the identity"))
    } else {
        (Status::Fail, format!("I0^2 = {sq:?}"))
    };
    out.push(Claim::new(format!("d{d}/I0/square"), "I0 symmetry", sq_note.0, sq_note.1));

    let pts = s0_boundary_points(d, n, seed);
    let on = pts.iter().filter(|p| contains_point(&s0, p, Mode::Boundary)).count();
    let mapped = pts
        .iter()
        .filter(|p| act_boundary(i0, p).ok().and_then(BoundaryImage::point).is_some_and(|q| contains_point(&s0, &q, Mode::Boundary)))
        .count();
    out.push(Claim::pass_if(
        format!("d{d}/I0/boundary"),
        "I0 symmetry",
        pts.len() == n && on == n && mapped == n,
        format!("{on}/{n} seeded points on S0, {mapped}/{n} images on S0"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1) ^ u64::from(d));
    let mut swapped = 0;
    let mut checked = 0;
    for p in &pts {
        let k = rng.gen_range(1i64..=9);
        for (l, inside) in [(RQuad::frac(k, 10, d), true), (RQuad::frac(10 + k, 10, d), false)] {
            let q = dilate(p, &l);
            checked += 1;
            let img = act_boundary(i0, &q).ok().and_then(BoundaryImage::point);
            let ok = if inside {
                contains_point(&s0, &q, Mode::Open) && img.is_some_and(|r| !contains_point(&s0, &r, Mode::Closed))
            } else {
                !contains_point(&s0, &q, Mode::Closed) && img.is_some_and(|r| contains_point(&s0, &r, Mode::Open))
            };
            if ok {
                swapped += 1;
            }
        }
    }
    let center = matches!(act_boundary(i0, &s0.center), Ok(BoundaryImage::Infinity));
    out.push(Claim::pass_if(
        format!("d{d}/I0/swap"),
        "I0 symmetry",
        swapped == checked && center,
        format!("{swapped}/{checked} inside/outside points swapped; centre to infinity: {center}"),
    ));
    out
}

/// JSON form of a sphere for geometry export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereJson {
    pub label: String,
    pub center: HeisPointJson,
    pub r4: RQuadJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sq: Option<RQuadJson>,
    pub float: [f64; 4],
}

impl SphereJson {
    pub fn from_sphere(label: &str, s: &CyganSphere) -> Self {
        SphereJson {
            label: label.to_string(),
            center: HeisPointJson::from_value(&s.center),
            r4: RQuadJson::from_value(&s.r4),
            r_sq: s.r_sq.as_ref().map(RQuadJson::from_value),
            float: s.float_params(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_complex, parse_real};
    use crate::grouplin::SUPPORTED_D;

    fn hp(z: &str, t: &str, d: u32) -> HeisPoint {
        HeisPoint::new(parse_complex(z, d).unwrap(), parse_real(t, d).unwrap())
    }

    #[test]
    fn catalog_sizes_and_parameters() {
        for (d, n) in [(2, 5), (7, 6), (11, 10)] {
            let f = FieldData::load(d).unwrap();
            let cat = build_catalog(&f).unwrap();
            assert_eq!(cat.spheres.len(), n);
            for c in verify_sphere_parameters(&cat) {
                assert_eq!(c.status, Status::Pass, "{c:?}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        let f = FieldData::load(2).unwrap();
        let cat = build_catalog(&f).unwrap();
        let s0 = cat.get("S0").unwrap();
        assert!(contains_point(s0, &HeisPoint::origin(2), Mode::Open));
        // |z|² = √2 needs z outside Q(√2, i) in general; (1, 1) has |z|⁴ + t² = 2
        assert!(contains_point(s0, &hp("1", "1", 2), Mode::Boundary));
        assert!(!contains_point(s0, &hp("1 - i*s/2", "s/2", 2), Mode::Closed));
        let t_s1 = cat.get("T(S1)").unwrap();
        assert_eq!(t_s1.center, hp("1", "s", 2));
        assert_eq!(t_s1.r_sq, Some(RQuad::one(2)));
    }

    #[test]
    fn fixing_infinity_has_no_sphere() {
        let f = FieldData::load(7).unwrap();
        assert_eq!(isometric_sphere(&f.generators["T"]), Err(SphereError::FixesInfinity));
    }

    #[test]
    fn listed_equations_and_matrices() {
        for d in SUPPORTED_D {
            let f = FieldData::load(d).unwrap();
            let cat = build_catalog(&f).unwrap();
            for c in verify_catalog(&f, &cat) {
                assert_ne!(c.status, Status::Fail, "{c:?}");
            }
        }
    }

    #[test]
    fn i0_swaps_inside_and_outside() {
        for d in SUPPORTED_D {
            let f = FieldData::load(d).unwrap();
            let claims = verify_i0_sphere_symmetry(&f, 20, 3);
            assert_eq!(claims[0].status, Status::Discrepancy);
            for c in &claims[1..] {
                assert_eq!(c.status, Status::Pass, "{c:?}");
            }
        }
    }

    mod props {
        use super::*;
        use crate::exactnum::rat;
        use proptest::prelude::*;

        fn small(n: i64, den: i64, d: u32) -> RQuad {
            RQuad::from_rational(rat(n, den), d)
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

            #[test]
            fn transform_commutes_with_membership(
                k in 0usize..3,
                idx in 0usize..16,
                word in prop::collection::vec((0usize..4, any::<bool>()), 0..5),
                c in prop::array::uniform3(-24i64..=24),
                den in 1i64..=12,
                seed in any::<u64>(),
            ) {
                let d = SUPPORTED_D[k];
                let f = FieldData::load(d).unwrap();
                let cat = build_catalog(&f).unwrap();
                let names = ["R1", "R2", "R3", "T"];
                let w = word.iter().fold(Mat3::identity(d), |acc, &(j, inv)| {
                    let g = &f.generators[names[j]];
                    acc.mul(&if inv { g.j_inverse() } else { g.clone() })
                });
                let (_, s) = &cat.spheres[idx % cat.spheres.len()];
                let p = HeisPoint::new(CQuad::new(small(c[0], den, d), small(c[1], den, d)), small(c[2], den, d));
                let ts = transform_sphere(&w, s).unwrap();
                let wp = act_boundary(&w, &p).unwrap().point().unwrap();
                for mode in [Mode::Open, Mode::Boundary, Mode::Closed] {
                    prop_assert_eq!(contains_point(&ts, &wp, mode), contains_point(s, &p, mode));
                }
                prop_assert_eq!(ts.margin(&wp), s.margin(&p));
                let s0 = isometric_sphere(&f.generators["I0"]).unwrap();
                let ts0 = transform_sphere(&w, &s0).unwrap();
                for q in s0_boundary_points(d, 2, seed) {
                    let wq = act_boundary(&w, &q).unwrap().point().unwrap();
                    prop_assert!(contains_point(&ts0, &wq, Mode::Boundary));
                }
            }
        }
    }
}
