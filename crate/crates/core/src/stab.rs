//! Stabilizer of infinity: generator checks, the prism over the fundamental
//! triangle, side pairings, relators and closed-form actions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::FieldData;
use crate::exactnum::{rat, CQuad, RQuad};
use crate::grouplin::{eval_word, format_word, in_group, parse_word, GroupTag, LinError, Mat3, Word};
use crate::heis::{act_finite, pi_star, HeisPoint};
use crate::report::{Claim, Status};

/// `f(z) = c0 + cx·Re z + cy·Im z`, the centre height of a sheared prism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shear {
    pub c0: RQuad,
    pub cx: RQuad,
    pub cy: RQuad,
}

impl Shear {
    pub fn at(&self, z: &CQuad) -> RQuad {
        &(&self.c0 + &(&self.cx * &z.re)) + &(&self.cy * &z.im)
    }
}

/// Triangle × height interval, optionally sheared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prism {
    pub triangle: [CQuad; 3],
    pub half_height: RQuad,
    pub shear: Option<Shear>,
}

fn cross(u: &CQuad, v: &CQuad) -> RQuad {
    &(&u.re * &v.im) - &(&u.im * &v.re)
}

/// Signs of the three edge tests, normalised so that interior points give `+1`.
fn edge_signs(tri: &[CQuad; 3], z: &CQuad) -> [i8; 3] {
    let orient = cross(&(&tri[1] - &tri[0]), &(&tri[2] - &tri[0])).sign();
    let mut out = [0i8; 3];
    for k in 0..3 {
        let a = &tri[k];
        let b = &tri[(k + 1) % 3];
        out[k] = cross(&(b - a), &(z - a)).sign() * orient;
    }
    out
}

pub fn point_in_triangle(tri: &[CQuad; 3], z: &CQuad, closed: bool) -> bool {
    let s = edge_signs(tri, z);
    if closed {
        s.iter().all(|&x| x >= 0)
    } else {
        s.iter().all(|&x| x > 0)
    }
}

impl Prism {
    pub fn d(&self) -> u32 {
        self.half_height.d
    }

    pub fn center_height(&self, z: &CQuad) -> RQuad {
        match &self.shear {
            Some(s) => s.at(z),
            None => RQuad::zero(self.d()),
        }
    }

    /// Height interval `[lo, hi]` above `z`.
    pub fn height_range(&self, z: &CQuad) -> (RQuad, RQuad) {
        let c = self.center_height(z);
        (&c - &self.half_height, &c + &self.half_height)
    }
}

/// Exact membership in the prism; `closed` selects the closed or open prism.
pub fn point_in_prism(p: &HeisPoint, prism: &Prism, closed: bool) -> bool {
    if !point_in_triangle(&prism.triangle, &p.z, closed) {
        return false;
    }
    let off = (&p.t - &prism.center_height(&p.z)).abs();
    let gap = &prism.half_height - &off;
    if closed {
        !gap.is_negative()
    } else {
        gap.is_positive()
    }
}

fn gens_word(gens: &BTreeMap<String, Mat3>, src: &str) -> Result<Mat3, LinError> {
    eval_word(gens, &parse_word(src)?)
}

/// Every operational generator is J-unitary and in the sister group;
/// alternate listings are compared against them.
pub fn verify_generators(f: &FieldData) -> Vec<Claim> {
    let d = f.d;
    let mut out = Vec::new();
    for (name, m) in &f.generators {
        let id = format!("d{d}/generators/{name}");
        let unitary = m.is_unitary_j();
        let member = unitary && in_group(m, GroupTag::Sister(d)) == Ok(true);
        out.push(Claim::pass_if(id, "generator listing", member, format!("J-unitary: {unitary}, sister member: {member}")));
    }
    for alt in &f.alternate_listings {
        let id = format!("d{d}/generators/{}/{}", alt.name, alt.context.replace(' ', "-"));
        let op = &f.generators[&alt.name];
        let claim = if alt.matrix == *op {
            Claim::new(id, "alternate generator listing", Status::Pass, "equal to the operational listing")
        } else {
            let unitary = alt.matrix.is_unitary_j();
            let member = unitary && in_group(&alt.matrix, GroupTag::Sister(d)) == Ok(true);
            Claim::new(
                id,
                "alternate generator listing",
                Status::Discrepancy,
                format!("differs from the operational listing; J-unitary: {unitary}, sister member: {member}"),
            )
        };
        out.push(claim);
    }
    out
}

/// Vertical translation length of `T`, in exact form `2/√d`.
pub fn vertical_step(d: u32) -> RQuad {
    RQuad::new(rat(0, 1), rat(2, d as i64), d)
}

/// Projections of `R1, R2, R3` to plane half-turns with the listed fixed
/// points, and `T` as a pure vertical translation by `2/√d`.
pub fn verify_pi_star_structure(f: &FieldData) -> Vec<Claim> {
    let d = f.d;
    let mut out = Vec::new();
    for r in &f.plane_rotations {
        let id = format!("d{d}/plane-rotation/{}", r.name);
        let got = match pi_star(&f.generators[&r.name]) {
            Ok(g) => g,
            Err(e) => {
                out.push(Claim::new(id, "plane projection", Status::Fail, e.to_string()));
                continue;
            }
        };
        let fixed = got.fixed_point();
        let shape_ok = got == r.iso && got.is_half_turn();
        let listed_ok = fixed.as_ref() == Some(&r.listed_fixed);
        let corrected_ok = r.corrected_fixed.is_some() && fixed == r.corrected_fixed;
        let status = match (shape_ok, listed_ok, corrected_ok) {
            (true, true, _) => Status::Pass,
            (true, false, true) => Status::Discrepancy,
            _ => Status::Fail,
        };
        out.push(Claim::new(
            id,
            "plane projection",
            status,
            format!("projection {got:?}; fixed point {fixed:?}, listed {:?}", r.listed_fixed),
        ));
    }
    let t = &f.generators["T"];
    let id = format!("d{d}/plane-rotation/T");
    let claim = match pi_star(t) {
        Ok(g) if g.is_identity() => {
            let step = vertical_step(d);
            let p = HeisPoint::new(CQuad::omega(d), RQuad::frac(1, 3, d));
            let moved = act_finite(t, &p).ok();
            let ok = moved == Some(p.with_t(&p.t + &step));
            Claim::pass_if(id, "plane projection", ok, format!("identity projection, vertical step {step}"))
        }
        other => Claim::new(id, "plane projection", Status::Fail, format!("{other:?}")),
    };
    out.push(claim);
    out
}

/// Result of checking one side-pairing row against a point table.
fn pairing_mismatches(f: &FieldData, m: &Mat3, src: &[String], dst: &[String], corrected: bool) -> Vec<String> {
    let table = &f.prism_points;
    let mut bad = Vec::new();
    for (s, t) in src.iter().zip(dst) {
        let (Some(p), Some(q)) = (table.get(s, corrected), table.get(t, corrected)) else {
            bad.push(format!("{s}->{t} unknown label"));
            continue;
        };
        if act_finite(m, p).ok().as_ref() != Some(q) {
            bad.push(format!("{s}->{t}"));
        }
    }
    bad
}

/// Each listed vertex-mapping row holds exactly.
pub fn verify_side_pairings(f: &FieldData) -> Vec<Claim> {
    let d = f.d;
    f.side_pairings
        .iter()
        .map(|row| {
            let id = format!("d{d}/side-pairing/{}", row.word.replace(' ', ""));
            let m = match gens_word(&f.generators, &row.word) {
                Ok(m) => m,
                Err(e) => return Claim::new(id, "side pairing", Status::Fail, e.to_string()),
            };
            let listed = pairing_mismatches(f, &m, &row.src, &row.dst, false);
            if listed.is_empty() {
                return Claim::new(id, "side pairing", Status::Pass, format!("{} vertices map as listed", row.src.len()));
            }
            let corrected = pairing_mismatches(f, &m, &row.src, &row.dst, true);
            let status = if corrected.is_empty() { Status::Discrepancy } else { Status::Fail };
            let mut ev = format!("listed coordinates fail for {}", listed.join(", "));
            if corrected.is_empty() {
                ev.push_str("; corrected coordinates pass");
            } else {
                ev.push_str(&format!("; corrected coordinates still fail for {}", corrected.join(", ")));
            }
            Claim::new(id, "side pairing", status, ev)
        })
        .collect()
}

/// Variants of `word` with the fewest exponent sign changes that evaluate to
/// a projective identity.
pub fn nearest_identity_variants(gens: &BTreeMap<String, Mat3>, word: &Word, max_flips: usize) -> Vec<Word> {
    let n = word.len();
    if n > 16 {
        return Vec::new();
    }
    for flips in 1..=max_flips.min(n) {
        let mut found = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != flips {
                continue;
            }
            let w: Word = word.iter().enumerate().map(|(k, (g, e))| (g.clone(), if mask & (1 << k) != 0 { -e } else { *e })).collect();
            if eval_word(gens, &w).is_ok_and(|m| m.is_projective_identity()) {
                found.push(w);
            }
        }
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

/// Each relator evaluates to a scalar multiple of the identity. Failures
/// report the nearest sign-flip variants that do.
pub fn verify_relators(f: &FieldData) -> Vec<Claim> {
    let d = f.d;
    f.relators
        .iter()
        .map(|src| {
            let id = format!("d{d}/relator/{}", src.replace(' ', ""));
            let word = match parse_word(src) {
                Ok(w) => w,
                Err(e) => return Claim::new(id, "relator", Status::Fail, e.to_string()),
            };
            let m = match eval_word(&f.generators, &word) {
                Ok(m) => m,
                Err(e) => return Claim::new(id, "relator", Status::Fail, e.to_string()),
            };
            if m.is_projective_identity() {
                return Claim::new(id, "relator", Status::Pass, "projective identity");
            }
            let variants = nearest_identity_variants(&f.generators, &word, 2);
            let shown: Vec<String> = variants.iter().map(format_word).collect();
            let mut ev = format!("evaluates to {m:?}");
            let tr = m.mul(&f.generators["T"].pow(8).unwrap_or_else(|_| Mat3::identity(d)));
            if tr.is_projective_identity() {
                ev.push_str(" = T^-8");
            }
            if shown.is_empty() {
                Claim::new(id, "relator", Status::Fail, ev)
            } else {
                ev.push_str(&format!("; nearest identity variants: {}", shown.join(" | ")));
                Claim::new(id, "relator", Status::Discrepancy, ev)
            }
        })
        .collect()
}

type ClosedForm = fn(&HeisPoint) -> Option<HeisPoint>;

fn c_int(n: i64, d: u32) -> CQuad {
    CQuad::from_int(n, d)
}

/// `Im(ω̄·z)`.
fn im_wbar_z(z: &CQuad) -> RQuad {
    (&CQuad::omega(z.d()).conj() * z).im
}

fn inv_sqrt_d(d: u32) -> RQuad {
    RQuad::new(rat(0, 1), rat(1, d as i64), d)
}

fn cf_r1(p: &HeisPoint) -> Option<HeisPoint> {
    Some(HeisPoint::new(-&p.z, p.t.clone()))
}

fn cf_t(p: &HeisPoint) -> Option<HeisPoint> {
    Some(p.with_t(&p.t + &vertical_step(p.d())))
}

fn cf_r2_d2(p: &HeisPoint) -> Option<HeisPoint> {
    let d = p.d();
    let four_im = &p.z.im * &RQuad::from_int(4, d);
    Some(HeisPoint::new(&(-&p.z) + &c_int(2, d), &p.t + &four_im))
}

fn cf_r3_d2(p: &HeisPoint) -> Option<HeisPoint> {
    let d = p.d();
    let shift = &(&p.z.re * &RQuad::sqrt_d(d)) * &RQuad::from_int(2, d);
    Some(HeisPoint::new(&(-&p.z) + &CQuad::i_sqrt_d(d), &p.t - &shift))
}

fn cf_r2_odd(p: &HeisPoint) -> Option<HeisPoint> {
    let d = p.d();
    let two_im = &p.z.im + &p.z.im;
    Some(HeisPoint::new(&(-&p.z) + &CQuad::one(d), &(&p.t + &two_im) + &inv_sqrt_d(d)))
}

fn cf_r3_d7_listed(p: &HeisPoint) -> Option<HeisPoint> {
    let k = im_wbar_z(&p.z);
    Some(HeisPoint::new(&(-&p.z) + &CQuad::omega(p.d()), &p.t - &(&k + &k)))
}

fn cf_r3_d7(p: &HeisPoint) -> Option<HeisPoint> {
    let k = im_wbar_z(&p.z);
    Some(HeisPoint::new(&(-&p.z) + &CQuad::omega(p.d()), &p.t + &(&k + &k)))
}

fn cf_r3_d11(p: &HeisPoint) -> Option<HeisPoint> {
    let d = p.d();
    let k = im_wbar_z(&p.z);
    Some(HeisPoint::new(&(-&p.z) + &CQuad::omega(d), &(&p.t + &(&k + &k)) + &inv_sqrt_d(d)))
}

/// The listed form uses `ω_7`, which is not an element of `Q(i√11)`.
fn cf_r3_d11_listed(_: &HeisPoint) -> Option<HeisPoint> {
    None
}

/// `(generator, listed form, corrected form if the listed one is known to be off)`.
fn closed_forms(d: u32) -> Vec<(&'static str, ClosedForm, Option<ClosedForm>)> {
    match d {
        2 => alloc::vec![("R1", cf_r1 as ClosedForm, None), ("R2", cf_r2_d2, None), ("R3", cf_r3_d2, None), ("T", cf_t, None)],
        7 => alloc::vec![
            ("R1", cf_r1 as ClosedForm, None),
            ("R2", cf_r2_odd, None),
            ("R3", cf_r3_d7_listed, Some(cf_r3_d7 as ClosedForm)),
            ("T", cf_t, None),
        ],
        _ => alloc::vec![
            ("R1", cf_r1 as ClosedForm, None),
            ("R2", cf_r2_odd, None),
            ("R3", cf_r3_d11_listed, Some(cf_r3_d11 as ClosedForm)),
            ("T", cf_t, None),
        ],
    }
}

/// A random boundary point with small rational coordinates.
pub fn random_point(d: u32, rng: &mut ChaCha8Rng) -> HeisPoint {
    let mut r = |scale: i64| {
        let a = rat(rng.gen_range(-40..=40), rng.gen_range(1..=12));
        let b = if scale == 0 { rat(0, 1) } else { rat(rng.gen_range(-40..=40), rng.gen_range(1..=12)) };
        (a, b)
    };
    let (x, _) = r(0);
    let (_, y) = r(1);
    let (ta, tb) = r(1);
    HeisPoint::new(CQuad::new(RQuad::new(x, rat(0, 1), d), RQuad::new(rat(0, 1), y, d)), RQuad::new(ta, tb, d))
}

fn form_agrees(m: &Mat3, form: ClosedForm, pts: &[HeisPoint]) -> Result<(), String> {
    for p in pts {
        let want = form(p).ok_or_else(|| "not evaluable in this field".to_string())?;
        if act_finite(m, p).ok().as_ref() != Some(&want) {
            return Err(format!("disagrees at {p:?}"));
        }
    }
    Ok(())
}

/// Closed-form actions of the stabilizer generators agree with the matrix
/// action on `n` seeded random points.
pub fn verify_closed_forms(f: &FieldData, n: usize, seed: u64) -> Vec<Claim> {
    let d = f.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(d));
    let pts: Vec<HeisPoint> = (0..n).map(|_| random_point(d, &mut rng)).collect();
    closed_forms(d)
        .into_iter()
        .map(|(name, listed, corrected)| {
            let id = format!("d{d}/closed-form/{name}");
            let m = &f.generators[name];
            match form_agrees(m, listed, &pts) {
                Ok(()) => Claim::new(id, "closed-form action", Status::Pass, format!("agrees on {n} points")),
                Err(why) => match corrected.map(|c| form_agrees(m, c, &pts)) {
                    Some(Ok(())) => Claim::new(
                        id,
                        "closed-form action",
                        Status::Discrepancy,
                        format!("listed form {why}; corrected form agrees on {n} points"),
                    ),
                    _ => Claim::new(id, "closed-form action", Status::Fail, why),
                },
            }
        })
        .collect()
}

/// Every labelled prism point lies in the closed prism.
pub fn verify_table_points(f: &FieldData) -> Vec<Claim> {
    let d = f.d;
    let table = &f.prism_points;
    table
        .listed
        .iter()
        .map(|(label, p)| {
            let id = format!("d{d}/prism-point/{label}");
            if point_in_prism(p, &f.prism, true) {
                return Claim::new(id, "prism point", Status::Pass, "in closed prism");
            }
            match table.corrected.get(label) {
                Some((q, note)) if point_in_prism(q, &f.prism, true) => Claim::new(
                    id,
                    "prism point",
                    Status::Discrepancy,
                    format!("listed point outside the prism; corrected reading inside ({note})"),
                ),
                _ => Claim::new(id, "prism point", Status::Fail, "outside the prism"),
            }
        })
        .collect()
}

/// All stabilizer suites for one field.
pub fn verify_all(f: &FieldData, seed: u64) -> Vec<Claim> {
    let mut out = verify_generators(f);
    out.extend(verify_pi_star_structure(f));
    out.extend(verify_side_pairings(f));
    out.extend(verify_relators(f));
    out.extend(verify_closed_forms(f, 100, seed));
    out.extend(verify_table_points(f));
    out
}
