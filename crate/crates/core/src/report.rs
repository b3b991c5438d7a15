//! Verification claims and their outcomes.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The listed data fails but a recorded corrected reading passes, or the
    /// outcome is reported without a verdict.
    Discrepancy,
}

/// One checked statement with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub evidence: String,
    /// Smallest float margin seen, when the check is quantitative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl Claim {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, status: Status, evidence: impl Into<String>) -> Self {
        Claim { id: id.into(), anchor: anchor.into(), status, evidence: evidence.into(), margin: None }
    }

    pub fn pass_if(id: impl Into<String>, anchor: impl Into<String>, ok: bool, evidence: impl Into<String>) -> Self {
        Self::new(id, anchor, if ok { Status::Pass } else { Status::Fail }, evidence)
    }

    /// Attach a float margin; non-finite values are dropped.
    pub fn with_margin(mut self, m: f64) -> Self {
        self.margin = m.is_finite().then_some(m);
        self
    }
}

/// Pass, fail and discrepancy counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub discrepancy: usize,
}

impl Tally {
    pub fn of(claims: &[Claim]) -> Tally {
        let mut t = Tally::default();
        for c in claims {
            match c.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Discrepancy => t.discrepancy += 1,
            }
        }
        t
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.discrepancy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub claims: Vec<Claim>,
}

/// Claims grouped by suite name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, claims: Vec<Claim>) {
        self.sections.push(Section { name: name.into(), claims });
    }

    pub fn claims(&self) -> impl Iterator<Item = &Claim> {
        self.sections.iter().flat_map(|s| s.claims.iter())
    }

    pub fn tally(&self) -> Tally {
        let all: Vec<Claim> = self.claims().cloned().collect();
        Tally::of(&all)
    }

    /// No `Fail`; with `strict`, no `Discrepancy` either.
    pub fn ok(&self, strict: bool) -> bool {
        let t = self.tally();
        t.fail == 0 && (!strict || t.discrepancy == 0)
    }
}
