//! Embedded per-field data: generators, prism tables, side pairings, relators,
//! sphere definitions and the coverage plan.
//!
//! Coordinates are stored as expressions over `i`, `s = √d`, `w = ω` and
//! `wb = ω̄`. Every listed value is kept verbatim; where a listed value is
//! inconsistent, a corrected reading is stored next to it.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Deserialize;

use crate::exactnum::{parse_complex, parse_real, CQuad, ExactError, RQuad};
use crate::grouplin::{check_d, LinError, Mat3};
use crate::heis::{HeisPoint, PlaneIsom};
use crate::stab::{Prism, Shear};

const FIELDS_JSON: &str = include_str!("../data/fields.json");

/// Version of the embedded data document.
pub const DATA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("embedded data is malformed: {0}")]
    Json(String),
    #[error("no data for d = {0}")]
    Missing(u32),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

#[derive(Deserialize)]
struct RawDoc {
    version: u32,
    fields: Vec<RawField>,
}

type RawMatrix = [[String; 3]; 3];

#[derive(Deserialize)]
struct RawField {
    d: u32,
    generators: BTreeMap<String, RawMatrix>,
    alternate_listings: Vec<RawListing>,
    relators: Vec<String>,
    plane_rotations: Vec<RawRotation>,
    prism: RawPrism,
    alt_prism: Option<RawPrism>,
    prism_points: RawPrismPoints,
    side_pairings: Vec<RawPairing>,
    spheres: RawSpheres,
    coverage: RawCoverage,
}

#[derive(Deserialize)]
struct RawListing {
    name: String,
    context: String,
    entries: RawMatrix,
}

#[derive(Deserialize)]
struct RawRotation {
    name: String,
    rot: String,
    trans: String,
    fixed: String,
    #[serde(default)]
    fixed_corrected: Option<String>,
}

#[derive(Deserialize)]
struct RawPrism {
    triangle: [String; 3],
    half_height: String,
    #[serde(default)]
    shear: Option<RawShear>,
}

#[derive(Deserialize)]
struct RawShear {
    c0: String,
    cx: String,
    cy: String,
}

#[derive(Deserialize)]
struct RawCorrection {
    label: String,
    z: String,
    t: String,
    note: String,
}

#[derive(Deserialize)]
struct RawPrismPoints {
    pm: Vec<[String; 3]>,
    single: Vec<[String; 3]>,
    corrections: Vec<RawCorrection>,
}

#[derive(Deserialize)]
struct RawPairing {
    word: String,
    src: String,
    dst: String,
}

#[derive(Deserialize)]
struct RawBase {
    label: String,
    word: String,
    #[serde(default)]
    listed_matrix: Option<RawMatrix>,
    #[serde(default = "yes")]
    cover: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
struct RawImage {
    label: String,
    word: String,
    base: String,
}

#[derive(Deserialize)]
struct RawEquation {
    label: String,
    z0: String,
    t0: String,
    c: String,
    r4: String,
}

#[derive(Deserialize)]
struct RawSpheres {
    bases: Vec<RawBase>,
    images: Vec<RawImage>,
    listed_equations: Vec<RawEquation>,
    s0_boundary_seeds: Vec<[String; 2]>,
}

#[derive(Deserialize)]
struct RawCell {
    name: String,
    vertices: String,
    region: String,
}

#[derive(Deserialize)]
struct RawStar {
    name: String,
    spheres: String,
    center: String,
}

#[derive(Deserialize)]
struct RawCoverage {
    points: Vec<[String; 3]>,
    vertex_labels: BTreeMap<String, String>,
    corrections: Vec<RawCorrection>,
    claims: Vec<[String; 2]>,
    cells: Vec<RawCell>,
    star_unions: Vec<RawStar>,
    extra_points: Vec<[String; 3]>,
}

/// A generator listing that differs from the one used operationally.
#[derive(Debug, Clone)]
pub struct AltListing {
    pub name: String,
    pub context: String,
    pub matrix: Mat3,
}

/// Listed plane rotation for a stabilizer generator.
#[derive(Debug, Clone)]
pub struct PlaneRotation {
    pub name: String,
    pub iso: PlaneIsom,
    pub listed_fixed: CQuad,
    pub corrected_fixed: Option<CQuad>,
}

/// A labelled point set with optional corrected readings.
#[derive(Debug, Clone, Default)]
pub struct PointTable {
    pub listed: BTreeMap<String, HeisPoint>,
    pub corrected: BTreeMap<String, (HeisPoint, String)>,
}

impl PointTable {
    /// The listed point, or its corrected reading when `corrected` is set.
    pub fn get(&self, label: &str, corrected: bool) -> Option<&HeisPoint> {
        if corrected {
            if let Some((p, _)) = self.corrected.get(label) {
                return Some(p);
            }
        }
        self.listed.get(label)
    }

    pub fn require(&self, label: &str, corrected: bool) -> Result<&HeisPoint, DataError> {
        self.get(label, corrected).ok_or_else(|| DataError::UnknownLabel(label.to_string()))
    }

    pub fn is_corrected(&self, label: &str) -> bool {
        self.corrected.contains_key(label)
    }
}

#[derive(Debug, Clone)]
pub struct SidePairing {
    pub word: String,
    pub src: Vec<String>,
    pub dst: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BaseSphere {
    pub label: String,
    pub word: String,
    pub listed_matrix: Option<Mat3>,
    /// False for spheres used only as a base for images.
    pub cover: bool,
}

#[derive(Debug, Clone)]
pub struct ImageSphere {
    pub label: String,
    pub word: String,
    pub base: String,
}

/// A listed sphere equation `||z − z0|² + i(t − t0) + 2i·Im(z·c)| = r`,
/// stored with `r⁴`. Consistency requires `c = z̄0`.
#[derive(Debug, Clone)]
pub struct ListedEquation {
    pub label: String,
    pub z0: CQuad,
    pub t0: RQuad,
    pub c: CQuad,
    pub r4: RQuad,
}

#[derive(Debug, Clone)]
pub struct SphereSpec {
    pub bases: Vec<BaseSphere>,
    pub images: Vec<ImageSphere>,
    pub listed_equations: Vec<ListedEquation>,
    pub s0_boundary_seeds: Vec<(CQuad, RQuad)>,
}

/// A membership claim: each point lies inside each region.
#[derive(Debug, Clone)]
pub struct ClaimSpec {
    pub points: Vec<String>,
    pub regions: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CellSpec {
    pub name: String,
    /// Vertex labels in listed order, duplicates removed.
    pub vertices: Vec<String>,
    /// Duplicated labels found in the listing.
    pub duplicates: Vec<String>,
    /// A sphere label or a star-union name.
    pub region: String,
}

#[derive(Debug, Clone)]
pub struct StarUnion {
    pub name: String,
    pub spheres: Vec<String>,
    pub center: String,
}

#[derive(Debug, Clone)]
pub struct CoverageSpec {
    pub points: PointTable,
    pub claims: Vec<ClaimSpec>,
    pub cells: Vec<CellSpec>,
    pub star_unions: Vec<StarUnion>,
}

/// Everything known about one field `Q(i√d)`.
#[derive(Debug, Clone)]
pub struct FieldData {
    pub d: u32,
    pub generators: BTreeMap<String, Mat3>,
    pub alternate_listings: Vec<AltListing>,
    pub relators: Vec<String>,
    pub plane_rotations: Vec<PlaneRotation>,
    pub prism: Prism,
    pub alt_prism: Option<Prism>,
    pub prism_points: PointTable,
    pub side_pairings: Vec<SidePairing>,
    pub spheres: SphereSpec,
    pub coverage: CoverageSpec,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(ToString::to_string).collect()
}

fn matrix(raw: &RawMatrix, d: u32) -> Result<Mat3, DataError> {
    let mut entries = Vec::with_capacity(9);
    for row in raw {
        for e in row {
            entries.push(parse_complex(e, d)?);
        }
    }
    let mut it = entries.into_iter();
    Ok(Mat3::from_fn(|_, _| it.next().expect("nine entries")))
}

fn point(z: &str, t: &str, d: u32) -> Result<HeisPoint, DataError> {
    Ok(HeisPoint::new(parse_complex(z, d)?, parse_real(t, d)?))
}

fn prism(raw: &RawPrism, d: u32) -> Result<Prism, DataError> {
    let tri = [parse_complex(&raw.triangle[0], d)?, parse_complex(&raw.triangle[1], d)?, parse_complex(&raw.triangle[2], d)?];
    let shear = match &raw.shear {
        Some(s) => Some(Shear { c0: parse_real(&s.c0, d)?, cx: parse_real(&s.cx, d)?, cy: parse_real(&s.cy, d)? }),
        None => None,
    };
    Ok(Prism { triangle: tri, half_height: parse_real(&raw.half_height, d)?, shear })
}

fn prism_points(raw: &RawPrismPoints, d: u32) -> Result<PointTable, DataError> {
    let mut table = PointTable::default();
    for [name, z, t] in &raw.pm {
        let p = point(z, t, d)?;
        let mut name_plus = name.clone();
        name_plus.push('+');
        let mut name_minus = name.clone();
        name_minus.push('-');
        table.listed.insert(name_minus, p.with_t(-&p.t));
        table.listed.insert(name_plus, p);
    }
    for [name, z, t] in &raw.single {
        table.listed.insert(name.clone(), point(z, t, d)?);
    }
    for c in &raw.corrections {
        table.corrected.insert(c.label.clone(), (point(&c.z, &c.t, d)?, c.note.clone()));
    }
    Ok(table)
}

fn coverage(raw: &RawCoverage, table: &PointTable, d: u32) -> Result<CoverageSpec, DataError> {
    let mut points = PointTable { listed: table.listed.clone(), corrected: BTreeMap::new() };
    for [name, z, t] in raw.points.iter().chain(&raw.extra_points) {
        points.listed.insert(name.clone(), point(z, t, d)?);
    }
    for (from, to) in &raw.vertex_labels {
        for sign in ['+', '-'] {
            let mut src = from.clone();
            src.push(sign);
            let mut dst = to.clone();
            dst.push(sign);
            let p = table.require(&dst, false)?.clone();
            let mut note = String::from("vertex label read as ");
            note.push_str(&dst);
            points.corrected.insert(src, (p, note));
        }
    }
    for c in &raw.corrections {
        points.corrected.insert(c.label.clone(), (point(&c.z, &c.t, d)?, c.note.clone()));
    }
    let claims = raw.claims.iter().map(|[p, r]| ClaimSpec { points: words(p), regions: words(r) }).collect();
    let cells = raw
        .cells
        .iter()
        .map(|c| {
            let mut vertices: Vec<String> = Vec::new();
            let mut duplicates = Vec::new();
            for v in words(&c.vertices) {
                if vertices.contains(&v) {
                    duplicates.push(v);
                } else {
                    vertices.push(v);
                }
            }
            CellSpec { name: c.name.clone(), vertices, duplicates, region: c.region.clone() }
        })
        .collect();
    let star_unions =
        raw.star_unions.iter().map(|s| StarUnion { name: s.name.clone(), spheres: words(&s.spheres), center: s.center.clone() }).collect();
    Ok(CoverageSpec { points, claims, cells, star_unions })
}

fn spheres(raw: &RawSpheres, d: u32) -> Result<SphereSpec, DataError> {
    let bases = raw
        .bases
        .iter()
        .map(|b| {
            Ok(BaseSphere {
                label: b.label.clone(),
                word: b.word.clone(),
                listed_matrix: b.listed_matrix.as_ref().map(|m| matrix(m, d)).transpose()?,
                cover: b.cover,
            })
        })
        .collect::<Result<_, DataError>>()?;
    let images = raw.images.iter().map(|i| ImageSphere { label: i.label.clone(), word: i.word.clone(), base: i.base.clone() }).collect();
    let listed_equations = raw
        .listed_equations
        .iter()
        .map(|e| {
            Ok(ListedEquation {
                label: e.label.clone(),
                z0: parse_complex(&e.z0, d)?,
                t0: parse_real(&e.t0, d)?,
                c: parse_complex(&e.c, d)?,
                r4: parse_real(&e.r4, d)?,
            })
        })
        .collect::<Result<_, DataError>>()?;
    let s0_boundary_seeds =
        raw.s0_boundary_seeds.iter().map(|[z, t]| Ok((parse_complex(z, d)?, parse_real(t, d)?))).collect::<Result<_, DataError>>()?;
    Ok(SphereSpec { bases, images, listed_equations, s0_boundary_seeds })
}

fn field(raw: &RawField) -> Result<FieldData, DataError> {
    let d = raw.d;
    let generators = raw.generators.iter().map(|(k, m)| Ok((k.clone(), matrix(m, d)?))).collect::<Result<_, DataError>>()?;
    let alternate_listings = raw
        .alternate_listings
        .iter()
        .map(|l| Ok(AltListing { name: l.name.clone(), context: l.context.clone(), matrix: matrix(&l.entries, d)? }))
        .collect::<Result<_, DataError>>()?;
    let plane_rotations = raw
        .plane_rotations
        .iter()
        .map(|r| {
            Ok(PlaneRotation {
                name: r.name.clone(),
                iso: PlaneIsom::new(parse_complex(&r.rot, d)?, parse_complex(&r.trans, d)?),
                listed_fixed: parse_complex(&r.fixed, d)?,
                corrected_fixed: r.fixed_corrected.as_deref().map(|s| parse_complex(s, d)).transpose()?,
            })
        })
        .collect::<Result<_, DataError>>()?;
    let table = prism_points(&raw.prism_points, d)?;
    let coverage = coverage(&raw.coverage, &table, d)?;
    Ok(FieldData {
        d,
        generators,
        alternate_listings,
        relators: raw.relators.clone(),
        plane_rotations,
        prism: prism(&raw.prism, d)?,
        alt_prism: raw.alt_prism.as_ref().map(|p| prism(p, d)).transpose()?,
        prism_points: table,
        side_pairings: raw
            .side_pairings
            .iter()
            .map(|s| SidePairing { word: s.word.clone(), src: words(&s.src), dst: words(&s.dst) })
            .collect(),
        spheres: spheres(&raw.spheres, d)?,
        coverage,
    })
}

impl FieldData {
    /// Parse the embedded document and build the exact data for `d`.
    pub fn load(d: u32) -> Result<FieldData, DataError> {
        check_d(d)?;
        let doc: RawDoc = serde_json::from_str(FIELDS_JSON).map_err(|e| DataError::Json(e.to_string()))?;
        if doc.version != DATA_VERSION {
            return Err(DataError::Json("unexpected version".to_string()));
        }
        let raw = doc.fields.iter().find(|f| f.d == d).ok_or(DataError::Missing(d))?;
        field(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouplin::SUPPORTED_D;

    #[test]
    fn loads_every_field() {
        for d in SUPPORTED_D {
            let f = FieldData::load(d).unwrap();
            assert_eq!(f.generators.len(), 5);
            for m in f.generators.values() {
                assert_eq!(m.d(), d);
            }
            for c in &f.coverage.cells {
                for v in &c.vertices {
                    assert!(f.coverage.points.get(v, true).is_some(), "d={d} {v}");
                }
            }
            for s in &f.side_pairings {
                assert_eq!(s.src.len(), s.dst.len());
                for l in s.src.iter().chain(&s.dst) {
                    assert!(f.prism_points.get(l, false).is_some(), "d={d} {l}");
                }
            }
        }
        assert!(FieldData::load(5).is_err());
    }

    #[test]
    fn duplicate_cell_vertex_is_recorded() {
        let f = FieldData::load(11).unwrap();
        let p8 = f.coverage.cells.iter().find(|c| c.name == "P8").unwrap();
        assert_eq!(p8.duplicates, ["p13"]);
    }
}
