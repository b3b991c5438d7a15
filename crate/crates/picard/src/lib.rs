//! Verification runner for `picard-core`: suite selection, parallel
//! execution, JSON and text reports, and geometry export.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use picard_core::cosets::{self, CosetReps, Family};
use picard_core::coverage::{self, Exec};
use picard_core::data::FieldData;
use picard_core::report::{Claim, Report, Status, Tally};
use picard_core::spheres::{self, SphereCatalog};
use picard_core::stab;
use rayon::prelude::*;
use serde::Serialize;

pub use picard_core;

pub const SUPPORTED_D: [u32; 3] = [2, 7, 11];
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const REPORT_VERSION: u32 = 1;

/// Rayon-backed [`Exec`]; `collect` keeps index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Exec for Parallel {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).into_par_iter().map(&f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Membership,
    Cosets,
    Stabilizer,
    Relators,
    Spheres,
    Coverage,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Membership, Suite::Cosets, Suite::Stabilizer, Suite::Spheres, Suite::Coverage];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Membership => "membership",
            Suite::Cosets => "cosets",
            Suite::Stabilizer => "stabilizer",
            Suite::Relators => "relators",
            Suite::Spheres => "spheres",
            Suite::Coverage => "coverage",
        }
    }
}

/// Parse a comma-separated suite list; `all` expands to every suite.
pub fn parse_suites(src: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part {
            "all" => out.extend(Suite::ALL),
            other => out.push(Suite::from_str(other)?),
        }
    }
    if out.is_empty() {
        bail!("no suites selected");
    }
    out.sort();
    out.dedup();
    // Relators are part of the stabilizer suite.
    if out.contains(&Suite::Stabilizer) {
        out.retain(|s| *s != Suite::Relators);
    }
    Ok(out)
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "membership" => Suite::Membership,
            "cosets" => Suite::Cosets,
            "stabilizer" => Suite::Stabilizer,
            "relators" => Suite::Relators,
            "spheres" => Suite::Spheres,
            "coverage" => Suite::Coverage,
            _ => bail!("unknown suite {s:?}"),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub ds: Vec<u32>,
    pub suites: Vec<Suite>,
    pub resolution: usize,
    pub seed: u64,
    pub strict: bool,
    pub union_samples: usize,
    pub corpus_size: usize,
    pub corpus_max_len: usize,
    pub partition_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ds: SUPPORTED_D.to_vec(),
            suites: Suite::ALL.to_vec(),
            resolution: coverage::DEFAULT_RESOLUTION,
            seed: DEFAULT_SEED,
            strict: false,
            union_samples: coverage::DEFAULT_UNION_SAMPLES,
            corpus_size: 500,
            corpus_max_len: 8,
            partition_samples: coverage::DEFAULT_PARTITION_SAMPLES,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ds.is_empty() {
            bail!("no fields selected");
        }
        if let Some(d) = self.ds.iter().find(|d| !SUPPORTED_D.contains(d)) {
            bail!("unsupported d = {d}; expected one of 2, 7, 11");
        }
        if self.suites.is_empty() {
            bail!("no suites selected");
        }
        if self.resolution < 1 {
            bail!("resolution must be at least 1");
        }
        Ok(())
    }
}

/// Claims for one field, grouped by suite in execution order.
#[derive(Debug, Clone, Serialize)]
pub struct FieldReport {
    pub d: u32,
    pub report: Report,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub config: RunConfig,
    pub fields: Vec<FieldReport>,
    pub summary: Tally,
    pub ok: bool,
}

impl RunReport {
    pub fn claims(&self) -> impl Iterator<Item = &Claim> {
        self.fields.iter().flat_map(|f| f.report.claims())
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

pub fn load(d: u32) -> Result<(FieldData, SphereCatalog)> {
    let f = FieldData::load(d).with_context(|| format!("loading data for d = {d}"))?;
    let c = spheres::build_catalog(&f).with_context(|| format!("building sphere catalog for d = {d}"))?;
    Ok((f, c))
}

pub fn membership_suite(f: &FieldData) -> Vec<Claim> {
    stab::verify_generators(f)
}

pub fn cosets_suite(f: &FieldData, cfg: &RunConfig) -> Result<Vec<Claim>> {
    let reps = CosetReps::new(f.d)?;
    let mut out = cosets::verify_congruence_forms(&reps);
    out.extend(cosets::verify_coset_disjointness(&reps));
    let per_family: Vec<Vec<Claim>> = [Family::Picard, Family::Sister]
        .par_iter()
        .map(|&fam| cosets::verify_corpus(fam, &f.generators, &reps, cfg.corpus_size, cfg.corpus_max_len, cfg.seed))
        .collect();
    out.extend(per_family.into_iter().flatten());
    out.push(cosets::verify_one_cusp(f.d));
    Ok(out)
}

pub fn stabilizer_suite(f: &FieldData, cfg: &RunConfig) -> Vec<Claim> {
    let mut out = stab::verify_pi_star_structure(f);
    out.extend(stab::verify_side_pairings(f));
    out.extend(stab::verify_relators(f));
    out.extend(stab::verify_closed_forms(f, 100, cfg.seed));
    out.extend(stab::verify_table_points(f));
    out
}

pub fn spheres_suite(f: &FieldData, cat: &SphereCatalog, cfg: &RunConfig) -> Vec<Claim> {
    let mut out = spheres::verify_catalog(f, cat);
    out.extend(spheres::verify_sphere_parameters(cat));
    out.extend(spheres::verify_i0_sphere_symmetry(f, 100, cfg.seed));
    out
}

pub fn coverage_suite(f: &FieldData, cat: &SphereCatalog, cfg: &RunConfig) -> Vec<Claim> {
    let mut out = coverage::verify_membership_claims(f, cat);
    out.extend(coverage::verify_cell_containment(&Parallel, f, cat, cfg.union_samples, cfg.seed));
    out.extend(coverage::verify_prism_coverage(&Parallel, f, cat, cfg.resolution).0);
    out.push(coverage::verify_cell_partition_sanity(&Parallel, f, cfg.partition_samples, cfg.seed));
    out
}

pub fn run_field(d: u32, cfg: &RunConfig) -> Result<FieldReport> {
    let (f, cat) = load(d)?;
    let mut report = Report::default();
    for &s in &cfg.suites {
        let claims = match s {
            Suite::Membership => membership_suite(&f),
            Suite::Cosets => cosets_suite(&f, cfg)?,
            Suite::Stabilizer => stabilizer_suite(&f, cfg),
            Suite::Relators => stab::verify_relators(&f),
            Suite::Spheres => spheres_suite(&f, &cat, cfg),
            Suite::Coverage => coverage_suite(&f, &cat, cfg),
        };
        report.push(s.name(), claims);
    }
    Ok(FieldReport { d, report })
}

/// Run every selected suite for every selected field. Fields run
/// concurrently; the report lists them in configuration order.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let fields: Vec<FieldReport> = cfg.ds.par_iter().map(|&d| run_field(d, cfg)).collect::<Result<_>>()?;
    let all: Vec<Claim> = fields.iter().flat_map(|f| f.report.claims().cloned()).collect();
    let summary = Tally::of(&all);
    let ok = summary.fail == 0 && (!cfg.strict || summary.discrepancy == 0);
    Ok(RunReport { version: REPORT_VERSION, config: cfg.clone(), fields, summary, ok })
}

pub fn to_json(r: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Discrepancy => "DISC",
    }
}

pub fn to_text(r: &RunReport) -> String {
    let mut out = String::new();
    for f in &r.fields {
        for sec in &f.report.sections {
            let t = Tally::of(&sec.claims);
            let _ = writeln!(out, "== d={} {} ({} pass, {} fail, {} discrepancy)", f.d, sec.name, t.pass, t.fail, t.discrepancy);
            for c in &sec.claims {
                let _ = writeln!(out, "{} {}: {}", status_word(c.status), c.id, c.evidence);
            }
        }
    }
    let s = r.summary;
    let _ = writeln!(
        out,
        "summary: {} claims, {} pass, {} fail, {} discrepancy -> {}",
        s.total(),
        s.pass,
        s.fail,
        s.discrepancy,
        if r.ok { "ok" } else { "not ok" }
    );
    out
}

/// Geometry document for one field; coverage summaries are computed at
/// `resolution` unless it is zero.
pub fn export_geometry(d: u32, resolution: usize) -> Result<coverage::GeometryExport> {
    let (f, cat) = load(d)?;
    let sums = if resolution == 0 { Vec::new() } else { coverage::verify_prism_coverage(&Parallel, &f, &cat, resolution).1 };
    Ok(coverage::geometry_export(&f, &cat, &sums))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing() {
        assert_eq!(parse_suites("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(parse_suites("relators").unwrap(), vec![Suite::Relators]);
        assert_eq!(parse_suites("relators,stabilizer").unwrap(), vec![Suite::Stabilizer]);
        assert!(parse_suites("bogus").is_err());
        assert!(parse_suites("").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.ds = vec![3];
        assert!(c.validate().is_err());
        c.ds.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn parallel_matches_serial() {
        let v = Parallel.map(1000, |k| k * k);
        assert_eq!(v, coverage::Serial.map(1000, |k| k * k));
    }

    #[test]
    fn relators_d7_pass() {
        let cfg = RunConfig { ds: vec![7], suites: vec![Suite::Relators], ..RunConfig::default() };
        let r = run(&cfg).unwrap();
        assert!(r.claims().count() > 0);
        assert!(r.claims().all(|c| c.status == Status::Pass), "{:?}", r.claims().find(|c| c.status != Status::Pass));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn export_sphere_counts() {
        for (d, n, u) in [(2, 5, 0), (7, 6, 0), (11, 10, 2)] {
            let g = export_geometry(d, 0).unwrap();
            assert_eq!(g.spheres.len(), n, "d={d}");
            assert_eq!(g.star_unions.len(), u, "d={d}");
            assert!(!g.cells.is_empty());
            assert_eq!(g.prisms[0].vertices.len(), 6);
        }
    }
}
