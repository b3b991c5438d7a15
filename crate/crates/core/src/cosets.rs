//! Coset decomposition of the Picard and sister groups over their common
//! subgroup `H = Picard(d) ∩ Sister(d)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactnum::{in_od, integer_parts, parse_complex, CQuad, RQuad};
use crate::grouplin::{check_d, eval_word, format_word, in_group, sister_corner_parts, GroupTag, LinError, Mat3, Word};
use crate::heis::{act_boundary, translation, BoundaryImage, HeisPoint};
use crate::report::{Claim, Status};

/// Default seed for the random word corpora.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CosetError {
    #[error("matrix is not in the {0} group")]
    NotMember(&'static str),
    #[error("residue rule chose coset {m} but g_m^-1 g is not in H")]
    RuleFailed { m: usize },
    #[error("no residue rule applies")]
    NoRule,
    #[error(transparent)]
    Lin(#[from] LinError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Picard,
    Sister,
}

impl Family {
    pub fn tag(self, d: u32) -> GroupTag {
        match self {
            Family::Picard => GroupTag::Picard(d),
            Family::Sister => GroupTag::Sister(d),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Picard => "picard",
            Family::Sister => "sister",
        }
    }
}

fn c(src: &str, d: u32) -> CQuad {
    parse_complex(src, d).expect("constant expression")
}

fn mat(rows: [[&str; 3]; 3], d: u32) -> Mat3 {
    Mat3::from_fn(|j, k| c(rows[j][k], d))
}

/// Coset representatives for both groups relative to `H`.
#[derive(Debug, Clone)]
pub struct CosetReps {
    pub d: u32,
    pub picard: Vec<Mat3>,
    pub sister: Vec<Mat3>,
}

impl CosetReps {
    pub fn new(d: u32) -> Result<Self, LinError> {
        check_d(d)?;
        let id = Mat3::identity(d);
        let g1 = mat([["0", "0", "1"], ["0", "-1", "0"], ["1", "0", "0"]], d);
        let i0 = mat([["0", "0", "i/s"], ["0", "1", "0"], ["i*s", "0", "0"]], d);
        let mut picard = vec![id.clone(), g1];
        let mut sister = vec![id, i0];
        if d == 2 {
            picard.push(mat([["1", "0", "0"], ["-i*s", "-1", "0"], ["-1", "i*s", "1"]], d));
            sister.push(translation(&CQuad::zero(d), &RQuad::new(Zero::zero(), crate::exactnum::rat(1, 1), d)));
        } else {
            let w = CQuad::omega(d);
            for k in 1..=((d as i64 - 1) / 2) {
                let kq = CQuad::from_int(k, d);
                let corner = -(&CQuad::from_int(k * k, d) * &w);
                let zero = CQuad::zero(d);
                let one = CQuad::one(d);
                picard.push(Mat3([
                    [one.clone(), zero.clone(), zero.clone()],
                    [kq.clone(), one.clone(), zero.clone()],
                    [corner.clone(), -&kq, one.clone()],
                ]));
                picard.push(Mat3([[one.clone(), zero.clone(), zero.clone()], [-&kq, one.clone(), zero], [corner, kq, one]]));
                // vertical translations with z13 = ±i·k/√d
                let t = RQuad::new(Zero::zero(), crate::exactnum::rat(2 * k, d as i64), d);
                sister.push(translation(&CQuad::zero(d), &t));
                sister.push(translation(&CQuad::zero(d), &-&t));
            }
        }
        Ok(CosetReps { d, picard, sister })
    }

    pub fn reps(&self, family: Family) -> &[Mat3] {
        match family {
            Family::Picard => &self.picard,
            Family::Sister => &self.sister,
        }
    }
}

/// Residues of the integer coordinates used by the classification rules,
/// reduced into `0..d`. Entries that are off their lattice are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueProfile {
    pub d: u32,
    pub x11: Option<u32>,
    pub x21: Option<u32>,
    pub x31: Option<u32>,
    pub x32: Option<u32>,
    pub x33: Option<u32>,
    pub x13: Option<u32>,
    pub y13: Option<u32>,
    /// Imaginary lattice coordinates of `z21` and `z32`; they carry the
    /// parity information for `d = 2`, where `x21` and `x32` are always even.
    pub y21: Option<u32>,
    pub y32: Option<u32>,
}

fn modd(x: &BigInt, d: u32) -> u32 {
    let r = x.mod_floor(&BigInt::from(d));
    u32::try_from(r).expect("residue fits")
}

fn xres(z: &CQuad) -> Option<u32> {
    integer_parts(z).ok().map(|(x, _)| modd(&x, z.d()))
}

fn yres(z: &CQuad) -> Option<u32> {
    integer_parts(z).ok().map(|(_, y)| modd(&y, z.d()))
}

pub fn residue_profile(a: &Mat3) -> ResidueProfile {
    let d = a.d();
    let corner = sister_corner_parts(a.z(1, 3));
    ResidueProfile {
        d,
        x11: xres(a.z(1, 1)),
        x21: xres(a.z(2, 1)),
        x31: xres(a.z(3, 1)),
        x32: xres(a.z(3, 2)),
        x33: xres(a.z(3, 3)),
        x13: corner.as_ref().map(|(x, _)| modd(x, d)),
        y13: corner.as_ref().map(|(_, y)| modd(y, d)),
        y21: yres(a.z(2, 1)),
        y32: yres(a.z(3, 2)),
    }
}

fn xint(z: &CQuad) -> BigInt {
    integer_parts(z).expect("integral entry").0
}

fn yint(z: &CQuad) -> BigInt {
    integer_parts(z).expect("integral entry").1
}

/// The two congruences read off the unitarity rows
/// `2·Re(z̄11·z31) + |z21|² = 0` and `2·Re(z̄31·z33) + |z32|² = 0`.
///
/// For `d ≡ 3 (mod 4)`, with entries `(x + i√d·y)/2`: `x21² ≡ −2·x11·x31` and
/// `x32² ≡ −2·x31·x33` mod `d`.
/// For `d = 2` the rows force `x21`, `x32` even and reduce to
/// `y21² ≡ −x11·x31` and `y32² ≡ −x31·x33` mod 2.
pub fn congruence_check(a: &Mat3) -> Result<bool, CosetError> {
    let d = a.d();
    if !in_group(a, GroupTag::Picard(d))? {
        return Err(CosetError::NotMember("picard"));
    }
    let m = BigInt::from(d);
    let holds = |lhs: BigInt, rhs: BigInt| (lhs - rhs).is_multiple_of(&m);
    let (x11, x31, x33) = (xint(a.z(1, 1)), xint(a.z(3, 1)), xint(a.z(3, 3)));
    if d == 2 {
        let (x21, x32) = (xint(a.z(2, 1)), xint(a.z(3, 2)));
        let (y21, y32) = (yint(a.z(2, 1)), yint(a.z(3, 2)));
        return Ok(x21.is_even() && x32.is_even() && holds(&y21 * &y21, -(&x11 * &x31)) && holds(&y32 * &y32, -(&x31 * &x33)));
    }
    let cst = BigInt::from(-2);
    let (x21, x32) = (xint(a.z(2, 1)), xint(a.z(3, 2)));
    Ok(holds(&x21 * &x21, &cst * &x11 * &x31) && holds(&x32 * &x32, &cst * &x31 * &x33))
}

/// The congruences in their listed form: `x21² ≡ c·x11·x31` and
/// `x32² ≡ c·x31·x33` mod `d`, `c = −1` for `d = 2` and `d − 1` otherwise.
/// Kept for comparison with [`congruence_check`]; `None` outside the Picard group.
pub fn listed_congruence(a: &Mat3) -> Option<bool> {
    let d = a.d();
    if !in_group(a, GroupTag::Picard(d)).ok()? {
        return None;
    }
    let m = BigInt::from(d);
    let cst = if d == 2 { BigInt::from(-1) } else { BigInt::from(d - 1) };
    let (x11, x21, x31) = (xint(a.z(1, 1)), xint(a.z(2, 1)), xint(a.z(3, 1)));
    let (x32, x33) = (xint(a.z(3, 2)), xint(a.z(3, 3)));
    let holds = |lhs: BigInt, rhs: BigInt| (lhs - rhs).is_multiple_of(&m);
    Some(holds(&x21 * &x21, &cst * &x11 * &x31) && holds(&x32 * &x32, &cst * &x31 * &x33))
}

/// Compare the listed congruence form with the derived one on the Picard
/// representatives.
pub fn verify_congruence_forms(reps: &CosetReps) -> Vec<Claim> {
    let d = reps.d;
    let mut out = Vec::new();
    let derived: Vec<bool> = reps.picard.iter().map(|g| congruence_check(g) == Ok(true)).collect();
    out.push(Claim::pass_if(
        format!("d{d}/congruence/derived"),
        "unitarity congruences",
        derived.iter().all(|&b| b),
        format!("holds on {}/{} representatives", derived.iter().filter(|&&b| b).count(), derived.len()),
    ));
    let bad: Vec<String> =
        reps.picard.iter().enumerate().filter(|(_, g)| listed_congruence(g) != Some(true)).map(|(i, _)| format!("g{i}")).collect();
    let claim = if bad.is_empty() {
        Claim::new(format!("d{d}/congruence/listed"), "unitarity congruences", Status::Pass, "listed form holds on all representatives")
    } else {
        Claim::new(
            format!("d{d}/congruence/listed"),
            "unitarity congruences",
            Status::Discrepancy,
            format!("listed form fails on {}; derived form holds", bad.join(", ")),
        )
    };
    out.push(claim);
    out
}

/// Residue rule for the Picard group.
fn picard_rule(a: &Mat3) -> Option<usize> {
    let d = a.d();
    let p = residue_profile(a);
    let (x11, x21, x31) = (p.x11?, p.x21?, p.x31?);
    if d == 2 {
        // y21 plays the role of x21 here
        return Some(match (p.y21?, x31) {
            (0, 0) => 0,
            (0, _) => 1,
            _ => 2,
        });
    }
    if x21 == 0 {
        return Some(if x31 == 0 { 0 } else { 1 });
    }
    for k in 1..=(d - 1) / 2 {
        if (k * x11) % d == x21 {
            return Some(2 * k as usize);
        }
        if (k * x11) % d == (d - x21) % d {
            return Some(2 * k as usize + 1);
        }
    }
    None
}

/// Residue rule for the sister group.
fn sister_rule(a: &Mat3) -> Option<usize> {
    let d = a.d();
    let p = residue_profile(a);
    let (y13, x33) = (p.y13?, p.x33?);
    if y13 == 0 {
        return Some(0);
    }
    if x33 == 0 {
        return Some(1);
    }
    if d == 2 {
        return Some(2);
    }
    for k in 1..=(d - 1) / 2 {
        if (k * x33) % d == y13 {
            return Some(2 * k as usize);
        }
        if (k * x33) % d == (d - y13) % d {
            return Some(2 * k as usize + 1);
        }
    }
    None
}

fn classify(g: &Mat3, family: Family, reps: &CosetReps) -> Result<usize, CosetError> {
    let d = g.d();
    if !in_group(g, family.tag(d))? {
        return Err(CosetError::NotMember(family.name()));
    }
    let m = match family {
        Family::Picard => picard_rule(g),
        Family::Sister => sister_rule(g),
    }
    .ok_or(CosetError::NoRule)?;
    let h = reps.reps(family)[m].j_inverse().mul(g);
    if in_group(&h, GroupTag::Intersection(d))? {
        Ok(m)
    } else {
        Err(CosetError::RuleFailed { m })
    }
}

/// Index `m` with `g_m⁻¹·g ∈ H`, by the residue rule and then verified.
pub fn coset_index_picard(g: &Mat3, reps: &CosetReps) -> Result<usize, CosetError> {
    classify(g, Family::Picard, reps)
}

/// Index `m` with `g'_m⁻¹·g ∈ H`, by the residue rule and then verified.
pub fn coset_index_sister(g: &Mat3, reps: &CosetReps) -> Result<usize, CosetError> {
    classify(g, Family::Sister, reps)
}

pub fn coset_index(g: &Mat3, family: Family, reps: &CosetReps) -> Result<usize, CosetError> {
    classify(g, family, reps)
}

/// First reason a J-unitary matrix fails to be in `H`, if any.
pub fn h_violation(a: &Mat3) -> Option<String> {
    let d = a.d();
    if !a.is_unitary_j() {
        return Some("not J-unitary".to_string());
    }
    for j in 1..=3 {
        for k in 1..=3 {
            if !in_od(a.z(j, k)).unwrap_or(false) {
                return Some(format!("z{j}{k} not in O_{d}"));
            }
        }
    }
    for (j, k) in [(2, 1), (3, 1), (3, 2)] {
        let x = xint(a.z(j, k));
        if !x.is_multiple_of(&BigInt::from(d)) {
            return Some(format!("x{j}{k} = {x} not divisible by {d}"));
        }
    }
    match sister_corner_parts(a.z(1, 3)) {
        None => Some("z13 off the sister lattice".to_string()),
        Some((x, y)) if d % 4 == 3 && x.is_even() != y.is_even() => Some("x13, y13 of different parity".to_string()),
        Some(_) => None,
    }
}

/// Every pair of distinct representatives lies in different cosets of `H`.
pub fn verify_coset_disjointness(reps: &CosetReps) -> Vec<Claim> {
    let d = reps.d;
    let mut out = Vec::new();
    for family in [Family::Picard, Family::Sister] {
        let list = reps.reps(family);
        for i in 0..list.len() {
            for j in 0..list.len() {
                if i == j {
                    continue;
                }
                let q = list[i].j_inverse().mul(&list[j]);
                let id = format!("d{d}/cosets/{}/{i}-{j}", family.name());
                let claim = match h_violation(&q) {
                    Some(why) => Claim::new(id, "coset disjointness", Status::Pass, why),
                    None => Claim::new(id, "coset disjointness", Status::Fail, "quotient lies in H"),
                };
                out.push(claim);
            }
        }
    }
    out
}

/// `I0` is in the sister group and sends the origin to infinity.
pub fn one_cusp_witness(d: u32) -> Result<bool, LinError> {
    check_d(d)?;
    let i0 = mat([["0", "0", "i/s"], ["0", "1", "0"], ["i*s", "0", "0"]], d);
    let to_inf = matches!(act_boundary(&i0, &HeisPoint::origin(d)), Ok(BoundaryImage::Infinity));
    Ok(to_inf && in_group(&i0, GroupTag::Sister(d))?)
}

/// Elements of `H` used to build the Picard corpus and to test that the
/// classification is constant on cosets.
pub fn known_h_elements(d: u32) -> Vec<(String, Mat3)> {
    let r1 = Mat3::diag(CQuad::one(d), CQuad::from_int(-1, d), CQuad::one(d));
    let two_sqrt_d = RQuad::new(Zero::zero(), crate::exactnum::rat(2, 1), d);
    let mut out = vec![("R1".to_string(), r1), ("V".to_string(), translation(&CQuad::zero(d), &two_sqrt_d))];
    if d == 2 {
        out.push(("A".to_string(), translation(&CQuad::i_sqrt_d(d), &RQuad::zero(d))));
        out.push(("B".to_string(), translation(&CQuad::from_int(2, d), &RQuad::zero(d))));
    } else {
        out.push(("A".to_string(), translation(&CQuad::one(d), &RQuad::sqrt_d(d))));
    }
    out
}

/// A seeded corpus of group elements with the words that produced them.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub family: Family,
    pub d: u32,
    pub seed: u64,
    pub items: Vec<(Word, Mat3)>,
}

fn random_words(names: &[String], n: usize, max_len: usize, rng: &mut ChaCha8Rng) -> Vec<Word> {
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| {
                    let name = names[rng.gen_range(0..names.len())].clone();
                    (name, if rng.gen_bool(0.5) { 1 } else { -1 })
                })
                .collect()
        })
        .collect()
}

/// Random words of length `1..=max_len` in the sister generators, or in the
/// Picard representatives together with [`known_h_elements`].
pub fn corpus(
    family: Family,
    gens: &BTreeMap<String, Mat3>,
    reps: &CosetReps,
    n: usize,
    max_len: usize,
    seed: u64,
) -> Result<Corpus, LinError> {
    let d = reps.d;
    let alphabet: BTreeMap<String, Mat3> = match family {
        Family::Sister => gens.clone(),
        Family::Picard => {
            let mut a: BTreeMap<String, Mat3> = reps.picard.iter().enumerate().skip(1).map(|(i, m)| (format!("g{i}"), m.clone())).collect();
            a.extend(known_h_elements(d));
            a
        }
    };
    let names: Vec<String> = alphabet.keys().cloned().collect();
    let family_salt = match family {
        Family::Picard => 1,
        Family::Sister => 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(d) << 8) ^ family_salt);
    let items = random_words(&names, n, max_len, &mut rng)
        .into_iter()
        .map(|w| eval_word(&alphabet, &w).map(|m| (w, m)))
        .collect::<Result<_, _>>()?;
    Ok(Corpus { family, d, seed, items })
}

/// Classify one corpus element and confirm the coset is stable under right
/// multiplication by each known `H` element.
pub fn check_corpus_item(word: &Word, g: &Mat3, family: Family, reps: &CosetReps) -> Claim {
    let d = reps.d;
    let id = format!("d{d}/corpus/{}/{}", family.name(), format_word(word));
    let m = match classify(g, family, reps) {
        Ok(m) => m,
        Err(e) => return Claim::new(id, "coset classification", Status::Fail, e.to_string()),
    };
    for (name, h) in known_h_elements(d) {
        match classify(&g.mul(&h), family, reps) {
            Ok(m2) if m2 == m => {}
            other => {
                return Claim::new(
                    id,
                    "coset classification",
                    Status::Fail,
                    format!("coset {m} changed under right multiplication by {name}: {other:?}"),
                )
            }
        }
    }
    if family == Family::Picard {
        match congruence_check(g) {
            Ok(true) => {}
            other => return Claim::new(id, "unitarity congruences", Status::Fail, format!("{other:?}")),
        }
    }
    Claim::new(id, "coset classification", Status::Pass, format!("coset {m}"))
}

/// Classify a seeded corpus: one summary claim, plus one claim per failing
/// element.
pub fn verify_corpus(family: Family, gens: &BTreeMap<String, Mat3>, reps: &CosetReps, n: usize, max_len: usize, seed: u64) -> Vec<Claim> {
    let d = reps.d;
    let id = format!("d{d}/corpus/{}", family.name());
    let c = match corpus(family, gens, reps, n, max_len, seed) {
        Ok(c) => c,
        Err(e) => return vec![Claim::new(id, "coset classification", Status::Fail, e.to_string())],
    };
    let mut counts = vec![0usize; reps.reps(family).len()];
    let mut failed = Vec::new();
    for (w, g) in &c.items {
        let claim = check_corpus_item(w, g, family, reps);
        if claim.status == Status::Pass {
            if let Ok(m) = classify(g, family, reps) {
                counts[m] += 1;
            }
        } else {
            failed.push(claim);
        }
    }
    let ev = format!("{}/{} classified, coset counts {counts:?}, seed {seed:#x}", c.items.len() - failed.len(), c.items.len());
    let mut out = vec![Claim::pass_if(id, "coset classification", failed.is_empty(), ev)];
    out.extend(failed);
    out
}

/// One-cusp witness claim.
pub fn verify_one_cusp(d: u32) -> Claim {
    let id = format!("d{d}/one-cusp/I0-origin");
    match one_cusp_witness(d) {
        Ok(ok) => Claim::pass_if(id, "one cusp", ok, "I0 is in the sister group and sends the origin to infinity"),
        Err(e) => Claim::new(id, "one cusp", Status::Fail, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouplin::{in_h_explicit, SUPPORTED_D};

    #[test]
    fn reps_are_members() {
        for d in SUPPORTED_D {
            let r = CosetReps::new(d).unwrap();
            let n = if d == 2 { 3 } else { d as usize + 1 };
            assert_eq!(r.picard.len(), n);
            assert_eq!(r.sister.len(), n);
            for m in &r.picard {
                assert_eq!(in_group(m, GroupTag::Picard(d)), Ok(true), "d={d} {m:?}");
            }
            for m in &r.sister {
                assert_eq!(in_group(m, GroupTag::Sister(d)), Ok(true), "d={d} {m:?}");
            }
            for (name, h) in known_h_elements(d) {
                assert_eq!(in_group(&h, GroupTag::Intersection(d)), Ok(true), "d={d} {name}");
                assert_eq!(h_violation(&h), None);
            }
        }
    }

    #[test]
    fn classification_examples() {
        for d in SUPPORTED_D {
            let r = CosetReps::new(d).unwrap();
            let id = Mat3::identity(d);
            assert_eq!(coset_index_picard(&id, &r), Ok(0));
            assert_eq!(coset_index_sister(&id, &r), Ok(0));
            for (m, g) in r.picard.iter().enumerate() {
                assert_eq!(coset_index_picard(g, &r), Ok(m), "d={d}");
                for (_, h) in known_h_elements(d) {
                    assert_eq!(coset_index_picard(&g.mul(&h), &r), Ok(m));
                }
            }
            for (m, g) in r.sister.iter().enumerate() {
                assert_eq!(coset_index_sister(g, &r), Ok(m), "d={d}");
            }
            // the sister generator T is the representative g'_2
            let t = mat([["1", "0", "i/s"], ["0", "1", "0"], ["0", "0", "1"]], d);
            assert_eq!(coset_index_sister(&t, &r), Ok(2));
        }
    }

    #[test]
    fn congruences_on_reps() {
        for d in SUPPORTED_D {
            let r = CosetReps::new(d).unwrap();
            for g in &r.picard {
                assert_eq!(congruence_check(g), Ok(true), "d={d} {g:?}");
            }
        }
        let i0 = CosetReps::new(7).unwrap().sister[1].clone();
        assert!(congruence_check(&i0).is_err());
        let g2 = CosetReps::new(2).unwrap().picard[2].clone();
        assert_eq!(listed_congruence(&g2), Some(false));
    }

    #[test]
    fn disjoint_and_cusp() {
        for d in SUPPORTED_D {
            let r = CosetReps::new(d).unwrap();
            for c in verify_coset_disjointness(&r) {
                assert_eq!(c.status, Status::Pass, "{c:?}");
            }
            assert_eq!(one_cusp_witness(d), Ok(true));
        }
    }

    #[test]
    fn explicit_intersection_matches_both_groups() {
        for d in SUPPORTED_D {
            let f = crate::data::FieldData::load(d).unwrap();
            let reps = CosetReps::new(d).unwrap();
            let mut alphabet = f.generators.clone();
            alphabet.extend(reps.picard.iter().enumerate().skip(1).map(|(i, m)| (format!("g{i}"), m.clone())));
            let names: Vec<String> = alphabet.keys().cloned().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ u64::from(d));
            let mut seen = [0usize; 2];
            for w in random_words(&names, 200, 5, &mut rng) {
                let g = eval_word(&alphabet, &w).unwrap();
                let both = in_group(&g, GroupTag::Sister(d)).unwrap() && in_group(&g, GroupTag::Picard(d)).unwrap();
                assert_eq!(in_h_explicit(&g), Ok(both), "d={d} {}", format_word(&w));
                assert_eq!(in_group(&g, GroupTag::Intersection(d)), Ok(both));
                seen[usize::from(both)] += 1;
            }
            assert!(seen[0] > 0 && seen[1] > 0, "d={d} {seen:?}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn h_word(d: u32, picks: &[(usize, bool)]) -> Mat3 {
            let hs = known_h_elements(d);
            picks.iter().fold(Mat3::identity(d), |acc, &(k, inv)| {
                let h = &hs[k % hs.len()].1;
                acc.mul(&if inv { h.j_inverse() } else { h.clone() })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

            #[test]
            fn classification_constant_on_cosets(
                k in 0usize..3,
                sister in any::<bool>(),
                seed in any::<u64>(),
                picks in prop::collection::vec((0usize..8, any::<bool>()), 1..4),
            ) {
                let d = SUPPORTED_D[k];
                let f = crate::data::FieldData::load(d).unwrap();
                let reps = CosetReps::new(d).unwrap();
                let fam = if sister { Family::Sister } else { Family::Picard };
                let c = corpus(fam, &f.generators, &reps, 1, 6, seed).unwrap();
                let g = &c.items[0].1;
                let h = h_word(d, &picks);
                prop_assert_eq!(in_h_explicit(&h), Ok(true));
                let m = coset_index(g, fam, &reps).unwrap();
                prop_assert_eq!(coset_index(&g.mul(&h), fam, &reps).unwrap(), m);
                prop_assert_eq!(coset_index(&reps.reps(fam)[m], fam, &reps).unwrap(), m);
            }
        }
    }
}
