//! Orbifold Chern numbers of the anticanonical model.
//!
//! Contracting the (-2)-configuration produces ADE singularities; each local
//! quotient by a group of order `|G|` replaces an Euler contribution `n + 1`
//! by `1/|G|`, so
//!
//! ```text
//! c1^2 = 9 - r,    c2 = (3 + r) - sum over components (n + 1 - 1/|G|),
//! ```
//!
//! and the second Segre number is `s2 = c1^2 - c2`.

use crate::curves::{dynkin_type, AdeType};
use crate::error::Result;
use crate::num::{rat_int, Rat};
use crate::picard::SurfaceModel;

/// Local data of an ADE singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdeLocalData {
    pub kind: AdeType,
    pub exceptional_count: usize,
    pub group_order: u64,
}

pub fn ade_local_data(kind: AdeType) -> AdeLocalData {
    let group_order = match kind {
        AdeType::A(n) => n as u64 + 1,
        AdeType::D(n) => 4 * (n as u64 - 2),
        AdeType::E(6) => 24,
        AdeType::E(7) => 48,
        AdeType::E(8) => 120,
        AdeType::E(n) => panic!("E{n} is not a Dynkin type"),
    };
    AdeLocalData {
        kind,
        exceptional_count: kind.rank(),
        group_order,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbifoldInvariants {
    pub c1_sq: Rat,
    pub c2: Rat,
    pub s2: Rat,
}

/// Exact orbifold Chern numbers of the anticanonical model of `s`.
pub fn orbifold_invariants(s: &SurfaceModel) -> Result<OrbifoldInvariants> {
    let report = dynkin_type(s)?;
    let r = s.r() as i64;
    let c1_sq = rat_int(9 - r);
    let mut c2 = rat_int(3 + r);
    for comp in &report.components {
        let data = ade_local_data(comp.kind);
        let n = data.exceptional_count as i64;
        c2 -= rat_int(n + 1) - Rat::new(1.into(), (data.group_order as i64).into());
    }
    let s2 = &c1_sq - &c2;
    Ok(OrbifoldInvariants { c1_sq, c2, s2 })
}
