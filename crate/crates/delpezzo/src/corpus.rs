//! The fixture corpus (one configuration per surface treated in the
//! classification, plus its certificates) and the batch verification suite.
//!
//! Fixtures are embedded in the binary; a directory with the same layout
//! (`configs/NAME.json`, `certs/NAME.json`) can override them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use serde::Serialize;

use crate::certify::{self, Certificate, SearchMode};
use crate::curves::dynkin_type;
use crate::elliptic::{
    elliptic_nonbig_identity, enumerate_assignments, enumerate_double_nonreduced, FiberAssignment,
    KodairaTag,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::hierarchy::{
    self, classification_report, DagName, Fact, Status, CROSS_DEGREE_CHECKSUM, DEGREE3_CHECKSUM,
    DEGREE4_CHECKSUM,
};
use crate::num::{format_rat, rat};
use crate::orbifold::orbifold_invariants;
use crate::picard::{BubbleConfig, SurfaceModel};

/// Expected invariants of a fixture: line count, (-2) count, ADE label, and
/// the hierarchy node it corresponds to (when one exists).
#[derive(Debug, Clone, Copy)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub degree: i64,
    pub lines: usize,
    pub minus2: usize,
    pub dynkin: &'static str,
    pub node: Option<&'static str>,
}

pub const FIXTURES: &[FixtureInfo] = &[
    FixtureInfo {
        name: "five_point",
        degree: 4,
        lines: 16,
        minus2: 0,
        dynkin: "empty",
        node: Some("empty"),
    },
    FixtureInfo {
        name: "2A1_9",
        degree: 4,
        lines: 9,
        minus2: 2,
        dynkin: "2A1",
        node: Some("2A1_9"),
    },
    FixtureInfo {
        name: "2A1_8",
        degree: 4,
        lines: 8,
        minus2: 2,
        dynkin: "2A1",
        node: Some("2A1_8"),
    },
    FixtureInfo {
        name: "A3_4",
        degree: 4,
        lines: 4,
        minus2: 3,
        dynkin: "A3",
        node: Some("A3_4"),
    },
    FixtureInfo {
        name: "2A2",
        degree: 3,
        lines: 7,
        minus2: 4,
        dynkin: "2A2",
        node: Some("2A2"),
    },
    FixtureInfo {
        name: "A2_2A1",
        degree: 3,
        lines: 8,
        minus2: 4,
        dynkin: "A2+2A1",
        node: Some("A2+2A1"),
    },
    FixtureInfo {
        name: "D4",
        degree: 3,
        lines: 6,
        minus2: 4,
        dynkin: "D4",
        node: Some("D4"),
    },
    FixtureInfo {
        name: "A4",
        degree: 3,
        lines: 6,
        minus2: 4,
        dynkin: "A4",
        node: Some("A4"),
    },
    FixtureInfo {
        name: "A3_A1",
        degree: 3,
        lines: 7,
        minus2: 4,
        dynkin: "A3+A1",
        node: Some("A3+A1"),
    },
    FixtureInfo {
        name: "4A1",
        degree: 3,
        lines: 9,
        minus2: 4,
        dynkin: "4A1",
        node: Some("4A1"),
    },
    FixtureInfo {
        name: "A3_2A1",
        degree: 3,
        lines: 5,
        minus2: 5,
        dynkin: "A3+2A1",
        node: Some("A3+2A1"),
    },
    FixtureInfo {
        name: "E6",
        degree: 3,
        lines: 1,
        minus2: 6,
        dynkin: "E6",
        node: Some("E6"),
    },
    FixtureInfo {
        name: "3A2",
        degree: 3,
        lines: 3,
        minus2: 6,
        dynkin: "3A2",
        node: Some("3A2"),
    },
    FixtureInfo {
        name: "2A3_A1",
        degree: 2,
        lines: 4,
        minus2: 7,
        dynkin: "2A3+A1",
        node: None,
    },
];

static EMBEDDED_CONFIGS: &[(&str, &str)] = &[
    (
        "five_point",
        include_str!("../../../corpus/configs/five_point.json"),
    ),
    ("2A1_9", include_str!("../../../corpus/configs/2A1_9.json")),
    ("2A1_8", include_str!("../../../corpus/configs/2A1_8.json")),
    ("A3_4", include_str!("../../../corpus/configs/A3_4.json")),
    ("2A2", include_str!("../../../corpus/configs/2A2.json")),
    (
        "A2_2A1",
        include_str!("../../../corpus/configs/A2_2A1.json"),
    ),
    ("D4", include_str!("../../../corpus/configs/D4.json")),
    ("A4", include_str!("../../../corpus/configs/A4.json")),
    ("A3_A1", include_str!("../../../corpus/configs/A3_A1.json")),
    ("4A1", include_str!("../../../corpus/configs/4A1.json")),
    (
        "A3_2A1",
        include_str!("../../../corpus/configs/A3_2A1.json"),
    ),
    ("E6", include_str!("../../../corpus/configs/E6.json")),
    ("3A2", include_str!("../../../corpus/configs/3A2.json")),
    (
        "2A3_A1",
        include_str!("../../../corpus/configs/2A3_A1.json"),
    ),
];

static EMBEDDED_CERTS: &[(&str, &str)] = &[
    (
        "nonbig_five_point",
        include_str!("../../../corpus/certs/nonbig_five_point.json"),
    ),
    (
        "nonbig_A3_4",
        include_str!("../../../corpus/certs/nonbig_A3_4.json"),
    ),
    (
        "nonbig_2A2",
        include_str!("../../../corpus/certs/nonbig_2A2.json"),
    ),
    (
        "nonbig_A2_2A1",
        include_str!("../../../corpus/certs/nonbig_A2_2A1.json"),
    ),
    (
        "nonbig_D4",
        include_str!("../../../corpus/certs/nonbig_D4.json"),
    ),
    (
        "nonbig_A4",
        include_str!("../../../corpus/certs/nonbig_A4.json"),
    ),
    (
        "nonbig_A3_A1",
        include_str!("../../../corpus/certs/nonbig_A3_A1.json"),
    ),
    (
        "nonbig_4A1",
        include_str!("../../../corpus/certs/nonbig_4A1.json"),
    ),
    (
        "nonbig_2A3_A1",
        include_str!("../../../corpus/certs/nonbig_2A3_A1.json"),
    ),
    (
        "big_2A1_9",
        include_str!("../../../corpus/certs/big_2A1_9.json"),
    ),
    (
        "big_A3_2A1",
        include_str!("../../../corpus/certs/big_A3_2A1.json"),
    ),
    (
        "orbifold_E6",
        include_str!("../../../corpus/certs/orbifold_E6.json"),
    ),
];

/// Where fixtures are read from.
#[derive(Debug, Clone, Default)]
pub enum CorpusSource {
    #[default]
    Embedded,
    Dir(PathBuf),
}

impl CorpusSource {
    pub fn from_dir(dir: Option<&Path>) -> Self {
        match dir {
            Some(d) => CorpusSource::Dir(d.to_path_buf()),
            None => CorpusSource::Embedded,
        }
    }

    fn read(&self, kind: &str, name: &str) -> Result<String> {
        match self {
            CorpusSource::Embedded => {
                let table = if kind == "configs" {
                    EMBEDDED_CONFIGS
                } else {
                    EMBEDDED_CERTS
                };
                table
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, text)| text.to_string())
                    .ok_or_else(|| {
                        Error::MalformedConfig(format!("no embedded {kind} entry named {name}"))
                    })
            }
            CorpusSource::Dir(dir) => {
                let path = dir.join(kind).join(format!("{name}.json"));
                Ok(std::fs::read_to_string(path)?)
            }
        }
    }
}

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

pub fn certificate_names() -> Vec<&'static str> {
    EMBEDDED_CERTS.iter().map(|(n, _)| *n).collect()
}

pub fn load_config(source: &CorpusSource, name: &str) -> Result<BubbleConfig> {
    BubbleConfig::from_json(&source.read("configs", name)?)
}

pub fn load_certificate(source: &CorpusSource, name: &str) -> Result<Certificate> {
    Certificate::from_json(&source.read("certs", name)?)
}

pub fn surface(source: &CorpusSource, name: &str) -> Result<SurfaceModel> {
    SurfaceModel::build(load_config(source, name)?)
}

/// Verifies the seed certificates of a classification degree and returns the
/// corresponding facts, including the external toric citation for `3A2`.
pub fn classification_seeds(source: &CorpusSource, degree: u8) -> Result<Vec<Fact>> {
    let mut seeds = Vec::new();
    let mut add_cert = |cert_name: &str, node: &str, status: Status| -> Result<()> {
        let cert = load_certificate(source, cert_name)?;
        let s = surface(source, &cert.surface)?;
        let verdict = certify::verify(&s, &cert)?;
        if !verdict.is_accept() {
            return Err(Error::InvalidCertificate(format!(
                "{cert_name}: {}",
                verdict.reason().unwrap_or("rejected")
            )));
        }
        seeds.push(Fact::certificate(node, status, cert_name));
        Ok(())
    };
    match degree {
        4 => {
            add_cert("big_2A1_9", "2A1_9", Status::Big)?;
            add_cert("nonbig_A3_4", "A3_4", Status::NotBig)?;
        }
        3 => {
            add_cert("nonbig_2A2", "2A2", Status::NotBig)?;
            add_cert("nonbig_A2_2A1", "A2+2A1", Status::NotBig)?;
            add_cert("nonbig_D4", "D4", Status::NotBig)?;
            add_cert("nonbig_A4", "A4", Status::NotBig)?;
            add_cert("nonbig_A3_A1", "A3+A1", Status::NotBig)?;
            add_cert("nonbig_4A1", "4A1", Status::NotBig)?;
            add_cert("big_A3_2A1", "A3+2A1", Status::Big)?;
            add_cert("orbifold_E6", "E6", Status::Big)?;
            seeds.push(Fact::external(
                "3A2",
                Status::Big,
                "smooth toric surface, tangent bundle big",
            ));
        }
        other => {
            return Err(Error::UnknownDag(format!(
                "no classification for degree {other}"
            )))
        }
    }
    Ok(seeds)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

type Check = (String, Box<dyn Fn() -> Result<String> + Sync + Send>);

fn fixture_check(source: CorpusSource, info: &'static FixtureInfo) -> Check {
    (
        format!("fixture/{}", info.name),
        Box::new(move || {
            let s = surface(&source, info.name)?;
            if s.degree() != info.degree {
                return Err(Error::MalformedConfig(format!(
                    "degree {} != {}",
                    s.degree(),
                    info.degree
                )));
            }
            let report = dynkin_type(&s)?;
            if s.lines().len() != info.lines
                || s.irreducible_minus2().len() != info.minus2
                || report.label() != info.dynkin
            {
                return Err(Error::MalformedConfig(format!(
                    "expected ({} lines, {} (-2)s, {}), computed ({}, {}, {})",
                    info.lines,
                    info.minus2,
                    info.dynkin,
                    s.lines().len(),
                    s.irreducible_minus2().len(),
                    report.label()
                )));
            }
            Ok(format!(
                "degree {}, {} lines, type {}",
                s.degree(),
                info.lines,
                report.label()
            ))
        }),
    )
}

fn certificate_check(source: CorpusSource, name: &'static str) -> Check {
    (
        format!("certificate/{name}"),
        Box::new(move || {
            let cert = load_certificate(&source, name)?;
            let s = surface(&source, &cert.surface)?;
            let verdict = certify::verify(&s, &cert)?;
            match verdict {
                certify::Verdict::Accept(info) => {
                    let mut detail = format!("{} accepted", cert.kind.as_str());
                    if let Some(rank) = info.rank {
                        detail.push_str(&format!(", rank {rank}"));
                    }
                    if let Some(s2) = info.s2 {
                        detail.push_str(&format!(", s2 = {}", format_rat(&s2)));
                    }
                    Ok(detail)
                }
                certify::Verdict::Reject { reason } => {
                    Err(Error::InvalidCertificate(format!("{name}: {reason}")))
                }
            }
        }),
    )
}

/// Assembles the full verification suite over a corpus.
fn suite_checks(source: &CorpusSource) -> Vec<Check> {
    let mut checks: Vec<Check> = Vec::new();
    for info in FIXTURES {
        checks.push(fixture_check(source.clone(), info));
    }
    for (name, _) in EMBEDDED_CERTS {
        checks.push(certificate_check(source.clone(), name));
    }
    for degree in [4u8, 3] {
        let source = source.clone();
        checks.push((
            format!("classification/degree{degree}"),
            Box::new(move || {
                let seeds = classification_seeds(&source, degree)?;
                let report = classification_report(degree, &seeds)?;
                if report.matches_expectation() {
                    Ok(format!(
                        "matches the published degree-{degree} classification"
                    ))
                } else {
                    Err(Error::InvalidCertificate(format!(
                        "classification discrepancy: {}",
                        report.discrepancies.join("; ")
                    )))
                }
            }),
        ));
    }
    checks.push((
        "elliptic/double-nonreduced".into(),
        Box::new(|| {
            let found = enumerate_double_nonreduced(12);
            if found == vec![vec![KodairaTag::IStar(0), KodairaTag::IStar(0)]] {
                Ok("only two I0* at Euler total 12".into())
            } else {
                Err(Error::MalformedConfig(format!(
                    "unexpected double-non-reduced list: {found:?}"
                )))
            }
        }),
    ));
    checks.push((
        "elliptic/identities".into(),
        Box::new(|| {
            let assignments = enumerate_assignments(12, 1);
            let n = assignments.len();
            for tags in &assignments {
                let a = FiberAssignment::new(tags, 1)?;
                let identity = elliptic_nonbig_identity(&a)?;
                if identity.k > 2 {
                    return Err(Error::IdentityNotFound(identity.k));
                }
            }
            Ok(format!("{n} assignments, all with k <= 2"))
        }),
    ));
    {
        let source = source.clone();
        checks.push((
            "orbifold/E6".into(),
            Box::new(move || {
                let s = surface(&source, "E6")?;
                let inv = orbifold_invariants(&s)?;
                if inv.c1_sq == rat(3, 1) && inv.c2 == rat(49, 24) && inv.s2 == rat(23, 24) {
                    Ok("(c1^2, c2, s2) = (3, 49/24, 23/24)".into())
                } else {
                    Err(Error::MalformedConfig(format!(
                        "unexpected orbifold invariants ({}, {}, {})",
                        format_rat(&inv.c1_sq),
                        format_rat(&inv.c2),
                        format_rat(&inv.s2)
                    )))
                }
            }),
        ));
    }
    {
        // The Segre hypothesis alone holds on every maximally degenerate
        // fixture; only E6 also carries the effectivity hypothesis, which is
        // why the corpus has exactly one orbifold certificate. In particular
        // s2 > 0 on the non-big 2A3_A1 surface, so `m zeta - Pi*D` cannot be
        // effective there.
        let source = source.clone();
        checks.push((
            "orbifold/positivity".into(),
            Box::new(move || {
                let mut positive = Vec::new();
                for info in FIXTURES {
                    let s = surface(&source, info.name)?;
                    if orbifold_invariants(&s)?.s2.is_positive() {
                        positive.push(info.name);
                    }
                }
                if positive == ["A3_2A1", "E6", "3A2", "2A3_A1"] {
                    Ok("s2 > 0 exactly on A3_2A1, E6, 3A2, 2A3_A1".into())
                } else {
                    Err(Error::MalformedConfig(format!(
                        "fixtures with s2 > 0: {positive:?}"
                    )))
                }
            }),
        ));
    }
    checks.push((
        "dag/checksums".into(),
        Box::new(|| {
            for (name, frozen) in [
                (DagName::Degree4, DEGREE4_CHECKSUM),
                (DagName::Degree3, DEGREE3_CHECKSUM),
                (DagName::CrossDegree, CROSS_DEGREE_CHECKSUM),
            ] {
                let dag = hierarchy::load_dag(name)?;
                if dag.checksum() != frozen {
                    return Err(Error::UnknownDag(format!(
                        "{} checksum drifted: {}",
                        dag.name,
                        dag.checksum()
                    )));
                }
            }
            Ok("3 graphs match their frozen checksums".into())
        }),
    ));
    checks
}

fn run_checks(checks: Vec<Check>, parallel: bool) -> SuiteReport {
    let runner = |i: usize| {
        let (name, f) = &checks[i];
        match f() {
            Ok(detail) => SuiteCheck {
                name: name.clone(),
                ok: true,
                detail,
            },
            Err(e) => SuiteCheck {
                name: name.clone(),
                ok: false,
                detail: e.to_string(),
            },
        }
    };
    let results = if parallel {
        exec::map_indexed(checks.len(), runner)
    } else {
        exec::map_indexed_seq(checks.len(), runner)
    };
    SuiteReport { checks: results }
}

/// Runs every suite check; item order is fixed by fixture name.
pub fn run_suite(source: &CorpusSource) -> SuiteReport {
    run_checks(suite_checks(source), true)
}

/// Sequential twin of [`run_suite`], kept for benchmarking.
pub fn run_suite_seq(source: &CorpusSource) -> SuiteReport {
    run_checks(suite_checks(source), false)
}

/// Outcome of running both searchers over the whole corpus.
#[derive(Debug, Clone, Serialize)]
pub struct SearchMatrix {
    /// fixture -> (nonbig found, big found)
    pub outcomes: BTreeMap<String, (bool, bool)>,
}

/// Runs `search_certificate` in both modes on every fixture, re-verifying
/// every certificate found, and asserts the two modes never both succeed.
pub fn search_matrix(source: &CorpusSource) -> Result<SearchMatrix> {
    let names = fixture_names();
    let results = exec::map_indexed(names.len(), |i| -> Result<(String, bool, bool)> {
        let s = surface(source, names[i])?;
        let nonbig = certify::search_certificate(&s, SearchMode::NonBig, None)?;
        let big = certify::search_certificate(&s, SearchMode::Big, None)?;
        Ok((names[i].to_string(), nonbig.is_some(), big.is_some()))
    });
    let mut outcomes = BTreeMap::new();
    for r in results {
        let (name, nonbig, big) = r?;
        if nonbig && big {
            return Err(Error::InvalidCertificate(format!(
                "both search modes succeeded on {name}"
            )));
        }
        outcomes.insert(name, (nonbig, big));
    }
    Ok(SearchMatrix { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_build_and_match_their_table_row() {
        let source = CorpusSource::Embedded;
        for info in FIXTURES {
            let s = surface(&source, info.name).unwrap();
            assert_eq!(s.degree(), info.degree, "{}", info.name);
            assert_eq!(s.lines().len(), info.lines, "{} lines", info.name);
            assert_eq!(
                s.irreducible_minus2().len(),
                info.minus2,
                "{} minus2",
                info.name
            );
            assert_eq!(
                dynkin_type(&s).unwrap().label(),
                info.dynkin,
                "{}",
                info.name
            );
        }
    }

    #[test]
    fn fixture_metadata_matches_dag_nodes() {
        let d4 = hierarchy::load_dag(DagName::Degree4).unwrap();
        let d3 = hierarchy::load_dag(DagName::Degree3).unwrap();
        for info in FIXTURES {
            let Some(node_id) = info.node else { continue };
            let dag = if info.degree == 4 { &d4 } else { &d3 };
            let node = &dag.nodes[dag.node_index(node_id).unwrap()];
            assert_eq!(node.minus2 as usize, info.minus2, "{node_id}");
            assert_eq!(node.lines, Some(info.lines as u32), "{node_id}");
        }
    }
}
