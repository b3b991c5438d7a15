//! Coverage of the stabilizer prisms by sphere interiors: listed point
//! memberships, cell certificates, sampled star-shaped unions and the
//! exact grid check.
//!
//! Per-sample work goes through [`Exec`] so a caller with threads can map
//! samples in parallel; results are always merged in sample order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{CellSpec, FieldData, PointTable, StarUnion};
use crate::exactnum::{CQuad, RQuad};
use crate::grouplin::Mat3;
use crate::heis::{HeisPoint, HeisPointJson};
use crate::report::{Claim, Status};
use crate::spheres::{contains_point, transform_sphere, CyganSphere, Mode, SphereCatalog, SphereError};
use crate::stab::{point_in_prism, Prism};

/// Minimum float margin required of star-union samples.
pub const UNION_MARGIN_FLOOR: f64 = 1e-6;
/// Margins below this are listed as tight in reports.
pub const REPORT_MARGIN_FLOOR: f64 = 1e-9;
pub const DEFAULT_RESOLUTION: usize = 40;
pub const DEFAULT_UNION_SAMPLES: usize = 20_000;
pub const DEFAULT_PARTITION_SAMPLES: usize = 2_000;
const TIGHTEST: usize = 10;

/// Maps an index range to results, preserving order.
pub trait Exec {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Exec for Serial {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).map(f).collect()
    }
}

fn margin_in_field(s: &CyganSphere, p: &HeisPoint) -> RQuad {
    s.margin(p)
}

/// Best exact verdict of `p` against `spheres`, trying them in order of
/// decreasing float margin.
fn best_membership(spheres: &[(&str, &CyganSphere)], p: &HeisPoint) -> (Hit, f64, Option<usize>) {
    let fp = p.to_f64();
    let mut order: Vec<(usize, f64)> = spheres.iter().enumerate().map(|(k, (_, s))| (k, s.margin_f64(&fp))).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let best_float = order.first().map_or(f64::NEG_INFINITY, |o| o.1);
    let mut boundary = None;
    for &(k, _) in &order {
        let m = margin_in_field(spheres[k].1, p);
        if m.is_positive() {
            return (Hit::Inside, best_float, Some(k));
        }
        if m.is_zero() && boundary.is_none() {
            boundary = Some(k);
        }
    }
    match boundary {
        Some(k) => (Hit::Boundary, best_float, Some(k)),
        None => (Hit::Outside, best_float, order.first().map(|o| o.0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hit {
    Inside,
    Boundary,
    Outside,
}

// ---------------------------------------------------------------------------
// Listed memberships

fn fmt_f(x: f64) -> String {
    format!("{x:.3e}")
}

/// Every listed (point, sphere) pair: pass as listed, pass only after the
/// flagged correction (discrepancy), or fail with its exact deficit.
pub fn verify_membership_claims(f: &FieldData, cat: &SphereCatalog) -> Vec<Claim> {
    let d = f.d;
    let pts = &f.coverage.points;
    let mut out = Vec::new();
    for listing in &f.coverage.claims {
        for label in &listing.points {
            for region in &listing.regions {
                out.push(membership_claim(d, pts, cat, label, region));
            }
        }
    }
    out
}

fn membership_claim(d: u32, pts: &PointTable, cat: &SphereCatalog, label: &str, region: &str) -> Claim {
    let id = format!("d{d}/membership/{label}/{region}");
    let anchor = "listed interior membership";
    let Some(s) = cat.get(region) else {
        return Claim::new(id, anchor, Status::Fail, format!("unknown sphere {region}"));
    };
    let Some(listed) = pts.get(label, false) else {
        return Claim::new(id, anchor, Status::Fail, format!("unknown point {label}"));
    };
    let m = s.margin(listed);
    let fm = s.margin_f64(&listed.to_f64());
    if m.is_positive() {
        return Claim::new(id, anchor, Status::Pass, format!("margin {m:?}")).with_margin(fm);
    }
    let deficit = format!("deficit {:?} (float {})", -&m, fmt_f(-fm));
    if pts.is_corrected(label) {
        let c = pts.get(label, true).expect("corrected entry");
        let mc = s.margin(c);
        let fmc = s.margin_f64(&c.to_f64());
        if mc.is_positive() {
            return Claim::new(
                id,
                anchor,
                Status::Discrepancy,
                format!("listed point outside, {deficit}; corrected point inside, margin {}", fmt_f(fmc)),
            )
            .with_margin(fm);
        }
        return Claim::new(
            id,
            anchor,
            Status::Fail,
            format!("listed and corrected points outside; listed {deficit}; corrected float margin {}", fmt_f(fmc)),
        )
        .with_margin(fm);
    }
    Claim::new(id, anchor, Status::Fail, format!("outside, {deficit}")).with_margin(fm)
}

// ---------------------------------------------------------------------------
// Cells

fn cell_points(pts: &PointTable, cell: &CellSpec, corrected: bool) -> Result<Vec<HeisPoint>, String> {
    cell.vertices.iter().map(|l| pts.get(l, corrected).cloned().ok_or_else(|| format!("unknown point {l}"))).collect()
}

/// Single-sphere cells: every vertex open-inside, exactly. Balls for the
/// Cygan metric are convex, so this certifies the whole hull.
pub fn verify_single_sphere_cell(d: u32, pts: &PointTable, cat: &SphereCatalog, cell: &CellSpec) -> Claim {
    let id = format!("d{d}/cell/{}/{}", cell.name, cell.region);
    let anchor = "cell inside its sphere";
    let s = match cat.get(&cell.region) {
        Some(s) => s,
        None => return Claim::new(id, anchor, Status::Fail, format!("unknown sphere {}", cell.region)),
    };
    let corrected = match cell_points(pts, cell, true) {
        Ok(v) => v,
        Err(e) => return Claim::new(id, anchor, Status::Fail, e),
    };
    let mut outside = Vec::new();
    let mut min_f = f64::INFINITY;
    for (l, p) in cell.vertices.iter().zip(&corrected) {
        min_f = min_f.min(s.margin_f64(&p.to_f64()));
        if !contains_point(s, p, Mode::Open) {
            outside.push(l.clone());
        }
    }
    let mut note = String::new();
    if !cell.duplicates.is_empty() {
        note = format!("; listing repeats {}", cell.duplicates.join(" "));
    }
    if !outside.is_empty() {
        return Claim::new(id, anchor, Status::Fail, format!("vertices outside: {}{note}", outside.join(" "))).with_margin(min_f);
    }
    let listed_bad: Vec<&str> = cell
        .vertices
        .iter()
        .filter(|l| pts.is_corrected(l))
        .filter(|l| pts.get(l, false).map_or(true, |p| !contains_point(s, p, Mode::Open)))
        .map(String::as_str)
        .collect();
    if listed_bad.is_empty() {
        Claim::new(id, anchor, Status::Pass, format!("{} vertices inside{note}", cell.vertices.len())).with_margin(min_f)
    } else {
        Claim::new(
            id,
            anchor,
            Status::Discrepancy,
            format!("inside after correcting {}; listed coordinates fall outside{note}", listed_bad.join(" ")),
        )
        .with_margin(min_f)
    }
}

/// Outcome of sampling a cell against a star-shaped union.
#[derive(Debug, Clone, Serialize)]
pub struct UnionSampling {
    pub samples: usize,
    pub outside: usize,
    pub boundary: usize,
    pub min_margin: f64,
    pub worst: Option<HeisPointJson>,
}

/// Exact rational convex combination `Σ wᵢ·vᵢ / Σ wᵢ`.
pub fn convex_combination(pts: &[HeisPoint], w: &[u64]) -> HeisPoint {
    let d = pts[0].d();
    let total: u64 = w.iter().sum();
    let mut z = CQuad::zero(d);
    let mut t = RQuad::zero(d);
    for (p, &wi) in pts.iter().zip(w) {
        if wi == 0 {
            continue;
        }
        let k = RQuad::from_int(wi as i64, d);
        z = &z + &p.z.scale(&k);
        t = &t + &(&p.t * &k);
    }
    let inv = RQuad::frac(1, total as i64, d);
    HeisPoint::new(z.scale(&inv), &t * &inv)
}

/// Seeded convex weights: even samples spread over all vertices
/// (exponential weights), odd samples on at most three vertices.
pub fn convex_weights(n_vertices: usize, rng: &mut ChaCha8Rng, sparse: bool) -> Vec<u64> {
    let mut w = alloc::vec![0u64; n_vertices];
    if sparse {
        let k = rng.gen_range(1..=3.min(n_vertices));
        for _ in 0..k {
            let j = rng.gen_range(0..n_vertices);
            w[j] += rng.gen_range(1..=1000);
        }
    } else {
        for wi in w.iter_mut() {
            let u: f64 = rng.gen_range(1e-9..1.0);
            *wi = (-libm::log(u) * 1000.0) as u64 + 1;
        }
    }
    w
}

pub fn union_samples(pts: &[HeisPoint], n: usize, seed: u64) -> Vec<HeisPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let w = convex_weights(pts.len(), &mut rng, k % 2 == 1);
            convex_combination(pts, &w)
        })
        .collect()
}

fn label_seed(seed: u64, d: u32, label: &str) -> u64 {
    // FNV-1a over the label keeps per-cell streams stable under reordering.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    seed ^ (u64::from(d) << 8) ^ h
}

pub fn sample_union<E: Exec>(exec: &E, members: &[(&str, &CyganSphere)], samples: &[HeisPoint]) -> UnionSampling {
    let hits = exec.map(samples.len(), |k| best_membership(members, &samples[k]));
    let mut out = UnionSampling { samples: samples.len(), outside: 0, boundary: 0, min_margin: f64::INFINITY, worst: None };
    for (k, (hit, m, _)) in hits.iter().enumerate() {
        match hit {
            Hit::Inside => {}
            Hit::Boundary => out.boundary += 1,
            Hit::Outside => out.outside += 1,
        }
        if *m < out.min_margin {
            out.min_margin = *m;
            out.worst = Some(HeisPointJson::from_value(&samples[k]));
        }
    }
    out
}

/// Star-union cells: the centre must be open-inside every member, then
/// `n` seeded points of the cell hull must lie in the union with float
/// margin above [`UNION_MARGIN_FLOOR`].
pub fn verify_union_cell<E: Exec>(
    exec: &E,
    d: u32,
    pts: &PointTable,
    cat: &SphereCatalog,
    union: &StarUnion,
    cell: &CellSpec,
    n: usize,
    seed: u64,
) -> Claim {
    let id = format!("d{d}/cell/{}/{}", cell.name, union.name);
    let anchor = "cell inside star-shaped union";
    let members: Result<Vec<(&str, &CyganSphere)>, String> =
        union.spheres.iter().map(|l| cat.get(l).map(|s| (l.as_str(), s)).ok_or_else(|| format!("unknown sphere {l}"))).collect();
    let members = match members {
        Ok(m) => m,
        Err(e) => return Claim::new(id, anchor, Status::Fail, e),
    };
    let verts = match cell_points(pts, cell, true) {
        Ok(v) => v,
        Err(e) => return Claim::new(id, anchor, Status::Fail, e),
    };
    let samples = union_samples(&verts, n, label_seed(seed, d, &cell.name));
    let r = sample_union(exec, &members, &samples);
    let ok = r.outside == 0 && r.boundary == 0 && r.min_margin > UNION_MARGIN_FLOOR;
    let mut ev = format!("{} samples, {} outside, {} on boundary, min margin {}", r.samples, r.outside, r.boundary, fmt_f(r.min_margin));
    if !cell.duplicates.is_empty() {
        ev.push_str(&format!("; listing repeats {}", cell.duplicates.join(" ")));
    }
    if let Some(w) = &r.worst {
        ev.push_str(&format!("; tightest at {w:?}"));
    }
    Claim::pass_if(id, anchor, ok, ev).with_margin(r.min_margin)
}

/// The union centre lies open-inside every member sphere.
pub fn verify_star_center(d: u32, pts: &PointTable, cat: &SphereCatalog, union: &StarUnion) -> Claim {
    let id = format!("d{d}/star-center/{}", union.name);
    let anchor = "star centre inside every member";
    let Some(c) = pts.get(&union.center, true) else {
        return Claim::new(id, anchor, Status::Fail, format!("unknown point {}", union.center));
    };
    let mut bad = Vec::new();
    let mut min_f = f64::INFINITY;
    for l in &union.spheres {
        match cat.get(l) {
            Some(s) => {
                min_f = min_f.min(s.margin_f64(&c.to_f64()));
                if !contains_point(s, c, Mode::Open) {
                    bad.push(l.clone());
                }
            }
            None => bad.push(format!("{l} (unknown)")),
        }
    }
    let ev = if bad.is_empty() {
        format!("{} inside {}", union.center, union.spheres.join(", "))
    } else {
        format!("outside {}", bad.join(", "))
    };
    Claim::pass_if(id, anchor, bad.is_empty(), ev).with_margin(min_f)
}

pub fn verify_cell_containment<E: Exec>(exec: &E, f: &FieldData, cat: &SphereCatalog, n: usize, seed: u64) -> Vec<Claim> {
    let d = f.d;
    let pts = &f.coverage.points;
    let mut out: Vec<Claim> = f.coverage.star_unions.iter().map(|u| verify_star_center(d, pts, cat, u)).collect();
    for cell in &f.coverage.cells {
        match f.coverage.star_unions.iter().find(|u| u.name == cell.region) {
            Some(u) => out.push(verify_union_cell(exec, d, pts, cat, u, cell, n, seed)),
            None => out.push(verify_single_sphere_cell(d, pts, cat, cell)),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Grid coverage

#[derive(Debug, Clone)]
pub struct Sample {
    pub point: HeisPoint,
    pub label: Option<String>,
}

/// The six corners of a prism, top face first.
pub fn prism_vertices(prism: &Prism) -> Vec<HeisPoint> {
    let mut out = Vec::with_capacity(6);
    for top in [true, false] {
        for z in &prism.triangle {
            let (lo, hi) = prism.height_range(z);
            out.push(HeisPoint::new(z.clone(), if top { hi } else { lo }));
        }
    }
    out
}

/// Barycentric grid `(i·a + j·b + k·c)/n` on the triangle crossed with
/// `n + 1` evenly spaced heights; `n = 1` gives the six corners.
pub fn grid_samples(prism: &Prism, n: usize) -> Vec<Sample> {
    assert!(n >= 1, "resolution must be positive");
    let d = prism.d();
    let [a, b, c] = &prism.triangle;
    let nn = n as i64;
    let mut out = Vec::new();
    for i in 0..=nn {
        for j in 0..=(nn - i) {
            let k = nn - i - j;
            let z = (&(&a.scale(&RQuad::from_int(i, d)) + &b.scale(&RQuad::from_int(j, d))) + &c.scale(&RQuad::from_int(k, d)))
                .scale(&RQuad::frac(1, nn, d));
            let (lo, hi) = prism.height_range(&z);
            let span = &hi - &lo;
            for m in 0..=nn {
                let t = &lo + &(&span * &RQuad::frac(m, nn, d));
                out.push(Sample { point: HeisPoint::new(z.clone(), t), label: None });
            }
        }
    }
    out
}

/// Grid samples plus the labelled table points lying in the closed prism.
pub fn coverage_samples(prism: &Prism, n: usize, table: &PointTable) -> Vec<Sample> {
    let mut out = grid_samples(prism, n);
    let labels: Vec<&String> = table.listed.keys().chain(table.corrected.keys()).collect();
    let mut seen = Vec::new();
    for l in labels {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        if let Some(p) = table.get(l, true) {
            if point_in_prism(p, prism, true) {
                out.push(Sample { point: p.clone(), label: Some(l.clone()) });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TightSample {
    pub index: usize,
    pub label: Option<String>,
    pub point: HeisPointJson,
    pub float: [f64; 3],
    pub margin: f64,
    pub sphere: Option<String>,
    pub hit: Hit,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageSummary {
    pub samples: usize,
    pub inside: usize,
    pub boundary: usize,
    pub outside: usize,
    pub fraction: f64,
    pub min_margin: f64,
    /// Covered samples whose float margin is below [`REPORT_MARGIN_FLOOR`].
    pub below_floor: usize,
    pub tightest: Vec<TightSample>,
    pub uncovered: Vec<TightSample>,
    /// Number of samples whose best sphere is each label.
    pub usage: BTreeMap<String, usize>,
}

impl CoverageSummary {
    pub fn complete(&self) -> bool {
        self.inside == self.samples && self.min_margin > 0.0
    }
}

pub fn check_samples<E: Exec>(exec: &E, spheres: &[(String, CyganSphere)], samples: &[Sample]) -> CoverageSummary {
    let members: Vec<(&str, &CyganSphere)> = spheres.iter().map(|(l, s)| (l.as_str(), s)).collect();
    let hits = exec.map(samples.len(), |k| best_membership(&members, &samples[k].point));
    let tight = |k: usize, (hit, m, s): &(Hit, f64, Option<usize>)| TightSample {
        index: k,
        label: samples[k].label.clone(),
        point: HeisPointJson::from_value(&samples[k].point),
        float: samples[k].point.to_f64(),
        margin: *m,
        sphere: s.map(|j| members[j].0.to_string()),
        hit: *hit,
    };
    let mut sum = CoverageSummary {
        samples: samples.len(),
        inside: 0,
        boundary: 0,
        outside: 0,
        fraction: 0.0,
        min_margin: f64::INFINITY,
        below_floor: 0,
        tightest: Vec::new(),
        uncovered: Vec::new(),
        usage: BTreeMap::new(),
    };
    for (k, h) in hits.iter().enumerate() {
        match h.0 {
            Hit::Inside => {
                sum.inside += 1;
                if h.1 < REPORT_MARGIN_FLOOR {
                    sum.below_floor += 1;
                }
                if let Some(j) = h.2 {
                    *sum.usage.entry(members[j].0.to_string()).or_default() += 1;
                }
            }
            Hit::Boundary => sum.boundary += 1,
            Hit::Outside => sum.outside += 1,
        }
        if h.0 != Hit::Inside {
            sum.uncovered.push(tight(k, h));
        }
        sum.min_margin = sum.min_margin.min(h.1);
    }
    let mut order: Vec<usize> = (0..hits.len()).collect();
    order.sort_by(|&a, &b| hits[a].1.total_cmp(&hits[b].1).then(a.cmp(&b)));
    sum.tightest = order.iter().take(TIGHTEST).map(|&k| tight(k, &hits[k])).collect();
    sum.fraction = if sum.samples == 0 { 1.0 } else { sum.inside as f64 / sum.samples as f64 };
    sum
}

/// The catalog together with its images under `T^{±1}`.
pub fn extend_by_translation(f: &FieldData, cat: &SphereCatalog) -> Result<Vec<(String, CyganSphere)>, SphereError> {
    let t = f.generators.get("T").ok_or_else(|| SphereError::Unknown("T".to_string()))?;
    let ti: Mat3 = t.j_inverse();
    let mut out = cat.spheres.clone();
    for (l, s) in &cat.spheres {
        out.push((format!("T({l})"), transform_sphere(t, s)?));
        out.push((format!("T^-1({l})"), transform_sphere(&ti, s)?));
    }
    Ok(out)
}

fn summary_evidence(s: &CoverageSummary) -> String {
    let mut ev = format!(
        "{}/{} samples strictly inside, {} on a boundary, {} outside; min float margin {}; {} inside with float margin below {}",
        s.inside,
        s.samples,
        s.boundary,
        s.outside,
        fmt_f(s.min_margin),
        s.below_floor,
        fmt_f(REPORT_MARGIN_FLOOR)
    );
    if let Some(u) = s.uncovered.first() {
        ev.push_str(&format!("; first uncovered {:?} nearest {}", u.float, u.sphere.as_deref().unwrap_or("-")));
    }
    ev
}

/// Which prisms are checked for a field: the listed one always, plus the
/// sheared alternative when present.
pub fn prisms(f: &FieldData) -> Vec<(&'static str, &Prism)> {
    let mut out = alloc::vec![("prism", &f.prism)];
    if let Some(p) = &f.alt_prism {
        out.push(("alt-prism", p));
    }
    out
}

/// The prism whose coverage decides the field's verdict: the sheared
/// alternative when one is listed.
pub fn decisive_prism(f: &FieldData) -> (&'static str, &Prism) {
    match &f.alt_prism {
        Some(p) => ("alt-prism", p),
        None => ("prism", &f.prism),
    }
}

/// Exact grid coverage of each prism by the open sphere interiors. An
/// incomplete grid is rechecked against the `T^{±1}`-extended catalog as
/// supporting evidence.
pub fn verify_prism_coverage<E: Exec>(
    exec: &E,
    f: &FieldData,
    cat: &SphereCatalog,
    resolution: usize,
) -> (Vec<Claim>, Vec<(String, CoverageSummary)>) {
    let d = f.d;
    let mut claims = Vec::new();
    let mut sums = Vec::new();
    for (name, prism) in prisms(f) {
        let samples = coverage_samples(prism, resolution, &f.prism_points);
        let s = check_samples(exec, &cat.spheres, &samples);
        let id = format!("d{d}/coverage/{name}/grid-{resolution}");
        claims.push(Claim::pass_if(id, "prism inside union of interiors", s.complete(), summary_evidence(&s)).with_margin(s.min_margin));
        if !s.complete() {
            if let Ok(ext) = extend_by_translation(f, cat) {
                let pts: Vec<Sample> = s.uncovered.iter().map(|u| samples[u.index].clone()).collect();
                let e = check_samples(exec, &ext, &pts);
                let id = format!("d{d}/coverage/{name}/uncovered-with-vertical-translates");
                let ev =
                    format!("{} of {} uncovered samples inside a T^(+-1) image; min margin {}", e.inside, e.samples, fmt_f(e.min_margin));
                let st = if e.complete() { Status::Discrepancy } else { Status::Fail };
                claims.push(Claim::new(id, "uncovered samples against translated catalog", st, ev).with_margin(e.min_margin));
            }
        }
        sums.push((name.to_string(), s));
    }
    (claims, sums)
}

// ---------------------------------------------------------------------------
// Cell partition sanity

type P3 = [RQuad; 3];

fn coords(p: &HeisPoint) -> P3 {
    [p.z.re.clone(), p.z.im.clone(), p.t.clone()]
}

fn det3(a: &P3, b: &P3, c: &P3) -> RQuad {
    let m1 = &(&b[1] * &c[2]) - &(&b[2] * &c[1]);
    let m2 = &(&b[0] * &c[2]) - &(&b[2] * &c[0]);
    let m3 = &(&b[0] * &c[1]) - &(&b[1] * &c[0]);
    &(&(&a[0] * &m1) - &(&a[1] * &m2)) + &(&a[2] * &m3)
}

fn sub3(a: &P3, b: &P3) -> P3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3f(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn subf(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Exact closed-tetrahedron membership by Cramer's rule.
pub fn in_tetrahedron(v: [&HeisPoint; 4], p: &HeisPoint) -> bool {
    let o = coords(v[0]);
    let e: [P3; 3] = [sub3(&coords(v[1]), &o), sub3(&coords(v[2]), &o), sub3(&coords(v[3]), &o)];
    let q = sub3(&coords(p), &o);
    let den = det3(&e[0], &e[1], &e[2]);
    if den.is_zero() {
        return false;
    }
    let l1 = &det3(&q, &e[1], &e[2]) / &den;
    let l2 = &det3(&e[0], &q, &e[2]) / &den;
    let l3 = &det3(&e[0], &e[1], &q) / &den;
    let l0 = &(&(&RQuad::one(p.d()) - &l1) - &l2) - &l3;
    [l0, l1, l2, l3].iter().all(|l| !l.is_negative())
}

/// Exact closed convex-hull membership: some tetrahedron on four of the
/// vertices contains `p`. Float barycentrics pick candidates.
pub fn in_hull(verts: &[HeisPoint], p: &HeisPoint) -> bool {
    let fv: Vec<[f64; 3]> = verts.iter().map(HeisPoint::to_f64).collect();
    let fp = p.to_f64();
    let n = verts.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for e in c + 1..n {
                    let (o, x, y, z) = (fv[a], subf(fv[b], fv[a]), subf(fv[c], fv[a]), subf(fv[e], fv[a]));
                    let q = subf(fp, o);
                    let den = det3f(x, y, z);
                    if den.abs() < 1e-14 {
                        continue;
                    }
                    let l1 = det3f(q, y, z) / den;
                    let l2 = det3f(x, q, z) / den;
                    let l3 = det3f(x, y, q) / den;
                    let tol = -1e-9;
                    if l1 >= tol
                        && l2 >= tol
                        && l3 >= tol
                        && 1.0 - l1 - l2 - l3 >= tol
                        && in_tetrahedron([&verts[a], &verts[b], &verts[c], &verts[e]], p)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// A seeded point of the closed prism with rational barycentrics.
pub fn random_prism_point(prism: &Prism, rng: &mut ChaCha8Rng) -> HeisPoint {
    let d = prism.d();
    let w: [i64; 3] = [rng.gen_range(0..=1000), rng.gen_range(0..=1000), rng.gen_range(1..=1000)];
    let total: i64 = w.iter().sum();
    let mut z = CQuad::zero(d);
    for (v, &wi) in prism.triangle.iter().zip(&w) {
        z = &z + &v.scale(&RQuad::frac(wi, total, d));
    }
    let (lo, hi) = prism.height_range(&z);
    let t = &lo + &(&(&hi - &lo) * &RQuad::frac(rng.gen_range(0..=1000), 1000, d));
    HeisPoint::new(z, t)
}

/// Index of the first cell whose hull contains `p`.
pub fn containing_cell(cells: &[(String, Vec<HeisPoint>)], p: &HeisPoint) -> Option<usize> {
    cells.iter().position(|(_, v)| in_hull(v, p))
}

/// Fraction of seeded prism points lying in some listed cell. The listed
/// decompositions have gaps, so a shortfall is a discrepancy, not a failure.
pub fn verify_cell_partition_sanity<E: Exec>(exec: &E, f: &FieldData, n: usize, seed: u64) -> Claim {
    let d = f.d;
    let id = format!("d{d}/cells/partition-sample");
    let cells: Vec<(String, Vec<HeisPoint>)> =
        f.coverage.cells.iter().filter_map(|c| cell_points(&f.coverage.points, c, true).ok().map(|v| (c.name.clone(), v))).collect();
    let prism = &f.prism;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(d) << 8) ^ 0xCE11);
    let pts: Vec<HeisPoint> = (0..n).map(|_| random_prism_point(prism, &mut rng)).collect();
    let found = exec.map(n, |k| containing_cell(&cells, &pts[k]).is_some());
    let hit = found.iter().filter(|&&b| b).count();
    let frac = if n == 0 { 1.0 } else { hit as f64 / n as f64 };
    let st = if hit == n { Status::Pass } else { Status::Discrepancy };
    Claim::new(id, "cells fill the prism", st, format!("{hit}/{n} sampled prism points in some cell hull ({:.2}%)", 100.0 * frac))
}

// ---------------------------------------------------------------------------
// Export

#[derive(Debug, Clone, Serialize)]
pub struct CellExport {
    pub name: String,
    pub region: String,
    pub vertices: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrismExport {
    pub name: String,
    pub vertices: Vec<[f64; 3]>,
    pub coverage: Option<CoverageSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionExport {
    pub name: String,
    pub spheres: Vec<String>,
    pub center: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryExport {
    pub d: u32,
    pub prisms: Vec<PrismExport>,
    pub cells: Vec<CellExport>,
    pub spheres: Vec<crate::spheres::SphereJson>,
    pub star_unions: Vec<UnionExport>,
}

/// Plotting document for one field. Coverage summaries are attached when
/// supplied.
pub fn geometry_export(f: &FieldData, cat: &SphereCatalog, coverage: &[(String, CoverageSummary)]) -> GeometryExport {
    let prisms = prisms(f)
        .into_iter()
        .map(|(name, p)| PrismExport {
            name: name.to_string(),
            vertices: prism_vertices(p).iter().map(HeisPoint::to_f64).collect(),
            coverage: coverage.iter().find(|(n, _)| n == name).map(|(_, s)| s.clone()),
        })
        .collect();
    let cells = f
        .coverage
        .cells
        .iter()
        .map(|c| CellExport {
            name: c.name.clone(),
            region: c.region.clone(),
            vertices: c.vertices.iter().filter_map(|l| f.coverage.points.get(l, true)).map(HeisPoint::to_f64).collect(),
        })
        .collect();
    let spheres = cat.spheres.iter().map(|(l, s)| crate::spheres::SphereJson::from_sphere(l, s)).collect();
    let star_unions = f
        .coverage
        .star_unions
        .iter()
        .map(|u| UnionExport {
            name: u.name.clone(),
            spheres: u.spheres.clone(),
            center: f.coverage.points.get(&u.center, true).map_or([f64::NAN; 3], HeisPoint::to_f64),
        })
        .collect();
    GeometryExport { d: f.d, prisms, cells, spheres, star_unions }
}
