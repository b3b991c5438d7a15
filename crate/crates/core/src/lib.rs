//! Exact verification toolkit for the sister Picard modular groups over
//! `Q(i√d)`, `d ∈ {2, 7, 11}`: quadratic-field arithmetic, `U(2,1)` matrices,
//! Heisenberg geometry, coset classification, stabilizer data, Cygan spheres
//! and prism coverage.
#![no_std]
extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod cosets;
pub mod coverage;
pub mod data;
pub mod exactnum;
pub mod grouplin;
pub mod heis;
pub mod report;
pub mod spheres;
pub mod stab;
