//! Specialization hierarchies of weak del Pezzo surfaces and fact
//! propagation.
//!
//! The degree-4 and degree-3 hierarchies are transcribed as static data (16
//! and 21 nodes); a small cross-degree graph records the blow-down relations
//! between the degree-2 and degree-1 types discussed alongside them. Each
//! graph carries a frozen SHA-256 checksum of its canonical serialization.
//!
//! Facts propagate by four monotone rules:
//!
//! * bigness flows along specialization edges (general to special),
//! * non-bigness flows against them,
//! * bigness flows along domination edges (blow-up to blow-down),
//! * non-bigness flows against those.
//!
//! A node derivably both big and not big aborts propagation with both
//! derivation chains.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DagNode {
    pub id: String,
    pub degree: u8,
    pub minus2: u32,
    pub lines: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpecDag {
    pub name: String,
    pub nodes: Vec<DagNode>,
    /// general -> special, within one degree.
    pub spec_edges: Vec<[String; 2]>,
    /// blow-up -> blow-down, across degrees.
    pub dom_edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DagName {
    Degree4,
    Degree3,
    CrossDegree,
}

impl DagName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "degree4" => Ok(DagName::Degree4),
            "degree3" => Ok(DagName::Degree3),
            "cross-degree" => Ok(DagName::CrossDegree),
            other => Err(Error::UnknownDag(other.to_string())),
        }
    }
}

impl SpecDag {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dag serialization cannot fail")
    }

    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_json().as_bytes());
        hex_string(&hasher.finalize())
    }

    fn validate(&self) -> Result<()> {
        for e in self.spec_edges.iter().chain(&self.dom_edges) {
            for id in e {
                if self.node_index(id).is_none() {
                    return Err(Error::UnknownDag(format!(
                        "{}: edge references unknown node {}",
                        self.name, id
                    )));
                }
            }
        }
        for e in &self.spec_edges {
            let a = &self.nodes[self.node_index(&e[0]).unwrap()];
            let b = &self.nodes[self.node_index(&e[1]).unwrap()];
            if a.degree != b.degree {
                return Err(Error::UnknownDag(format!(
                    "{}: specialization edge {} -> {} crosses degrees",
                    self.name, e[0], e[1]
                )));
            }
        }
        // Acyclicity over the union of both edge kinds.
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in self.spec_edges.iter().chain(&self.dom_edges) {
            let a = self.node_index(&e[0]).unwrap();
            let b = self.node_index(&e[1]).unwrap();
            adj[a].push(b);
            indeg[b] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &w in &adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if seen != n {
            return Err(Error::UnknownDag(format!("{} contains a cycle", self.name)));
        }
        Ok(())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn node(id: &str, degree: u8, minus2: u32, lines: Option<u32>) -> DagNode {
    DagNode {
        id: id.to_string(),
        degree,
        minus2,
        lines,
    }
}

fn edges(list: &[(&str, &str)]) -> Vec<[String; 2]> {
    list.iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect()
}

/// Built-in hierarchy graphs.
pub fn load_dag(name: DagName) -> Result<SpecDag> {
    let dag = match name {
        DagName::Degree4 => SpecDag {
            name: "degree4".into(),
            nodes: vec![
                node("empty", 4, 0, Some(16)),
                node("A1", 4, 1, Some(12)),
                node("2A1_9", 4, 2, Some(9)),
                node("2A1_8", 4, 2, Some(8)),
                node("A2", 4, 2, Some(8)),
                node("3A1", 4, 3, Some(6)),
                node("A2+A1", 4, 3, Some(6)),
                node("A3_5", 4, 3, Some(5)),
                node("A3_4", 4, 3, Some(4)),
                node("4A1", 4, 4, Some(4)),
                node("A2+2A1", 4, 4, Some(4)),
                node("A3+A1", 4, 4, Some(3)),
                node("A4", 4, 4, Some(3)),
                node("D4", 4, 4, Some(2)),
                node("A3+2A1", 4, 5, Some(2)),
                node("D5", 4, 5, Some(1)),
            ],
            spec_edges: edges(&[
                ("empty", "A1"),
                ("A1", "2A1_9"),
                ("A1", "2A1_8"),
                ("A1", "A2"),
                ("2A1_9", "3A1"),
                ("2A1_9", "A2+A1"),
                ("2A1_9", "A3_5"),
                ("2A1_8", "3A1"),
                ("2A1_8", "A3_4"),
                ("A2", "A2+A1"),
                ("A2", "A3_5"),
                ("A2", "A3_4"),
                ("3A1", "4A1"),
                ("3A1", "A2+2A1"),
                ("3A1", "A3+A1"),
                ("3A1", "D4"),
                ("A2+A1", "A2+2A1"),
                ("A2+A1", "A3+A1"),
                ("A2+A1", "A4"),
                ("A3_5", "A4"),
                ("A3_5", "D4"),
                ("A3_4", "A3+A1"),
                ("A3_4", "D4"),
                ("4A1", "A3+2A1"),
                ("A2+2A1", "A3+2A1"),
                ("A2+2A1", "D5"),
                ("A3+A1", "A3+2A1"),
                ("A3+A1", "D5"),
                ("A4", "D5"),
                ("D4", "D5"),
            ]),
            dom_edges: Vec::new(),
        },
        DagName::Degree3 => SpecDag {
            name: "degree3".into(),
            nodes: vec![
                node("empty", 3, 0, Some(27)),
                node("A1", 3, 1, Some(21)),
                node("2A1", 3, 2, Some(16)),
                node("A2", 3, 2, Some(15)),
                node("3A1", 3, 3, Some(12)),
                node("A2+A1", 3, 3, Some(11)),
                node("A3", 3, 3, Some(10)),
                node("4A1", 3, 4, Some(9)),
                node("A2+2A1", 3, 4, Some(8)),
                node("2A2", 3, 4, Some(7)),
                node("A3+A1", 3, 4, Some(7)),
                node("D4", 3, 4, Some(6)),
                node("A4", 3, 4, Some(6)),
                node("A3+2A1", 3, 5, Some(5)),
                node("2A2+A1", 3, 5, Some(5)),
                node("A4+A1", 3, 5, Some(4)),
                node("D5", 3, 5, Some(3)),
                node("A5", 3, 5, Some(3)),
                node("3A2", 3, 6, Some(3)),
                node("A5+A1", 3, 6, Some(2)),
                node("E6", 3, 6, Some(1)),
            ],
            spec_edges: edges(&[
                ("empty", "A1"),
                ("A1", "A2"),
                ("A1", "2A1"),
                ("A2", "A3"),
                ("A2", "A2+A1"),
                ("2A1", "A3"),
                ("2A1", "A2+A1"),
                ("2A1", "3A1"),
                ("A3", "A4"),
                ("A3", "A3+A1"),
                ("A3", "D4"),
                ("A2+A1", "A4"),
                ("A2+A1", "2A2"),
                ("A2+A1", "A3+A1"),
                ("A2+A1", "D4"),
                ("A2+A1", "A2+2A1"),
                ("3A1", "D4"),
                ("3A1", "A2+2A1"),
                ("3A1", "4A1"),
                ("A4", "A5"),
                ("A4", "A4+A1"),
                ("A4", "D5"),
                ("4A1", "A3+2A1"),
                ("A3+A1", "A5"),
                ("A3+A1", "A4+A1"),
                ("A3+A1", "D5"),
                ("A3+A1", "A3+2A1"),
                ("2A2", "A5"),
                ("2A2", "2A2+A1"),
                ("A2+2A1", "D5"),
                ("A2+2A1", "A3+2A1"),
                ("A2+2A1", "2A2+A1"),
                ("D4", "D5"),
                ("A5", "A5+A1"),
                ("A5", "E6"),
                ("A4+A1", "A5+A1"),
                ("A4+A1", "E6"),
                ("D5", "E6"),
                ("A3+2A1", "A5+A1"),
                ("2A2+A1", "A5+A1"),
                ("2A2+A1", "E6"),
                ("2A2+A1", "3A2"),
            ]),
            dom_edges: Vec::new(),
        },
        DagName::CrossDegree => SpecDag {
            name: "cross-degree".into(),
            nodes: vec![
                node("D4", 3, 4, Some(6)),
                node("2A3+A1", 2, 7, Some(4)),
                node("3A1+D4", 2, 7, None),
                node("A7+A1", 1, 8, None),
                node("A3+D5", 1, 8, None),
                node("2D4", 1, 8, None),
                node("E6+2A1", 1, 8, None),
            ],
            spec_edges: Vec::new(),
            dom_edges: edges(&[
                ("A7+A1", "2A3+A1"),
                ("A3+D5", "2A3+A1"),
                ("3A1+D4", "D4"),
                ("2D4", "3A1+D4"),
                ("E6+2A1", "3A1+D4"),
            ]),
        },
    };
    dag.validate()?;
    Ok(dag)
}

/// Frozen checksums of the built-in graphs; the acceptance suite re-derives
/// them so any edit to the tables is loud.
pub const DEGREE4_CHECKSUM: &str =
    "05c4c0829469483ded8dbbde1750a60105f04f96744cadd8ad531c545c54882f";
pub const DEGREE3_CHECKSUM: &str =
    "23ecf63294c9f9b4feca9a86cdcf0a7580cc03221dc0f3f695b2db6ac0e4c24e";
pub const CROSS_DEGREE_CHECKSUM: &str =
    "7b59913166b9fb23b188ab6826c7dac807e8fa70abe4e24e390039f43e32c2f3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Big,
    NotBig,
}

/// A seeded or derived fact with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub node: String,
    pub status: Status,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Certificate(String),
    External(String),
    Propagated { rule: &'static str, from: String },
}

impl Fact {
    pub fn certificate(node: &str, status: Status, reference: &str) -> Self {
        Fact {
            node: node.to_string(),
            status,
            provenance: Provenance::Certificate(reference.to_string()),
        }
    }

    pub fn external(node: &str, status: Status, reference: &str) -> Self {
        Fact {
            node: node.to_string(),
            status,
            provenance: Provenance::External(reference.to_string()),
        }
    }
}

/// Result of a propagation run: per-node status with provenance.
#[derive(Debug, Clone, Default)]
pub struct Labeling {
    pub labels: BTreeMap<String, (Status, Provenance)>,
}

impl Labeling {
    pub fn status(&self, node: &str) -> Option<Status> {
        self.labels.get(node).map(|(s, _)| *s)
    }

    pub fn undetermined<'a>(&self, dag: &'a SpecDag) -> Vec<&'a str> {
        dag.nodes
            .iter()
            .filter(|n| !self.labels.contains_key(&n.id))
            .map(|n| n.id.as_str())
            .collect()
    }

    /// Renders the derivation chain of a node back to its seed.
    pub fn chain(&self, node: &str) -> String {
        let mut parts = Vec::new();
        let mut cur = node.to_string();
        loop {
            let Some((status, prov)) = self.labels.get(&cur) else {
                parts.push(format!("{cur}: undetermined"));
                break;
            };
            match prov {
                Provenance::Certificate(r) => {
                    parts.push(format!("{cur}: {status:?} [certificate {r}]"));
                    break;
                }
                Provenance::External(r) => {
                    parts.push(format!("{cur}: {status:?} [external {r}]"));
                    break;
                }
                Provenance::Propagated { rule, from } => {
                    parts.push(format!("{cur}: {status:?} [{rule} from {from}]"));
                    cur = from.clone();
                }
            }
        }
        parts.join("\n  <- ")
    }
}

/// Least fixpoint of the four propagation rules over the seeds.
pub fn propagate(dag: &SpecDag, seeds: &[Fact]) -> Result<Labeling> {
    let mut labeling = Labeling::default();
    let mut queue: Vec<String> = Vec::new();

    let assign = |labeling: &mut Labeling,
                  queue: &mut Vec<String>,
                  node: &str,
                  status: Status,
                  prov: Provenance|
     -> Result<()> {
        match labeling.labels.get(node) {
            Some((existing, _)) if *existing == status => Ok(()),
            Some((existing, _)) => {
                let mut probe = labeling.clone();
                probe
                    .labels
                    .insert(format!("{node}'"), (status, prov.clone()));
                let detail = format!(
                    "derived {:?} but already {:?}\nexisting chain:\n  {}\nnew chain:\n  {}",
                    status,
                    existing,
                    labeling.chain(node),
                    match &prov {
                        Provenance::Propagated { rule, from } => format!(
                            "{node}: {status:?} [{rule} from {from}]\n  <- {}",
                            labeling.chain(from)
                        ),
                        Provenance::Certificate(r) =>
                            format!("{node}: {status:?} [certificate {r}]"),
                        Provenance::External(r) => format!("{node}: {status:?} [external {r}]"),
                    }
                );
                Err(Error::Conflict {
                    node: node.to_string(),
                    detail,
                })
            }
            None => {
                labeling.labels.insert(node.to_string(), (status, prov));
                queue.push(node.to_string());
                Ok(())
            }
        }
    };

    for seed in seeds {
        if dag.node_index(&seed.node).is_none() {
            return Err(Error::UnknownDag(format!(
                "seed references unknown node {}",
                seed.node
            )));
        }
        assign(
            &mut labeling,
            &mut queue,
            &seed.node,
            seed.status,
            seed.provenance.clone(),
        )?;
    }

    while let Some(cur) = queue.pop() {
        let status = labeling.status(&cur).expect("queued nodes are labeled");
        for e in &dag.spec_edges {
            match status {
                Status::Big if e[0] == cur => assign(
                    &mut labeling,
                    &mut queue,
                    &e[1].clone(),
                    Status::Big,
                    Provenance::Propagated {
                        rule: "specialization",
                        from: cur.clone(),
                    },
                )?,
                Status::NotBig if e[1] == cur => assign(
                    &mut labeling,
                    &mut queue,
                    &e[0].clone(),
                    Status::NotBig,
                    Provenance::Propagated {
                        rule: "generalization",
                        from: cur.clone(),
                    },
                )?,
                _ => {}
            }
        }
        for e in &dag.dom_edges {
            match status {
                Status::Big if e[0] == cur => assign(
                    &mut labeling,
                    &mut queue,
                    &e[1].clone(),
                    Status::Big,
                    Provenance::Propagated {
                        rule: "domination",
                        from: cur.clone(),
                    },
                )?,
                Status::NotBig if e[1] == cur => assign(
                    &mut labeling,
                    &mut queue,
                    &e[0].clone(),
                    Status::NotBig,
                    Provenance::Propagated {
                        rule: "anti-domination",
                        from: cur.clone(),
                    },
                )?,
                _ => {}
            }
        }
    }
    Ok(labeling)
}

/// The classification a labeling must reproduce.
pub fn expected_classification(
    degree: u8,
) -> (Vec<&'static str>, Vec<&'static str>, Vec<&'static str>) {
    match degree {
        4 => (
            vec!["empty", "A1", "2A1_8", "A2", "A3_4"],
            vec![
                "2A1_9", "3A1", "A2+A1", "A3_5", "4A1", "A2+2A1", "A3+A1", "A4", "D4", "A3+2A1",
                "D5",
            ],
            vec![],
        ),
        3 => (
            vec![
                "empty", "A1", "2A1", "A2", "3A1", "A2+A1", "A3", "4A1", "A2+2A1", "2A2", "A3+A1",
                "D4", "A4",
            ],
            vec!["A3+2A1", "A5+A1", "E6", "3A2"],
            vec!["A5", "A4+A1", "D5", "2A2+A1"],
        ),
        _ => (vec![], vec![], vec![]),
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub degree: u8,
    pub labeling: Labeling,
    pub discrepancies: Vec<String>,
}

impl ClassificationReport {
    pub fn matches_expectation(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Propagates the seeds over the hierarchy of the given degree and compares
/// node by node against the published classification.
pub fn classification_report(degree: u8, seeds: &[Fact]) -> Result<ClassificationReport> {
    let dag = match degree {
        4 => load_dag(DagName::Degree4)?,
        3 => load_dag(DagName::Degree3)?,
        other => {
            return Err(Error::UnknownDag(format!(
                "no classification hierarchy for degree {other}"
            )))
        }
    };
    let labeling = propagate(&dag, seeds)?;
    let (notbig, big, undetermined) = expected_classification(degree);
    let mut discrepancies = Vec::new();
    for id in notbig {
        if labeling.status(id) != Some(Status::NotBig) {
            discrepancies.push(format!(
                "{id}: expected NotBig, got {:?}",
                labeling.status(id)
            ));
        }
    }
    for id in big {
        if labeling.status(id) != Some(Status::Big) {
            discrepancies.push(format!("{id}: expected Big, got {:?}", labeling.status(id)));
        }
    }
    for id in undetermined {
        if labeling.status(id).is_some() {
            discrepancies.push(format!(
                "{id}: expected Undetermined, got {:?}",
                labeling.status(id)
            ));
        }
    }
    Ok(ClassificationReport {
        degree,
        labeling,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dag_shapes() {
        let d4 = load_dag(DagName::Degree4).unwrap();
        assert_eq!(d4.nodes.len(), 16);
        assert_eq!(d4.spec_edges.len(), 30);
        assert!(d4
            .spec_edges
            .contains(&["2A1_9".to_string(), "3A1".to_string()]));
        let d3 = load_dag(DagName::Degree3).unwrap();
        assert_eq!(d3.nodes.len(), 21);
        assert!(d3
            .spec_edges
            .contains(&["A3+2A1".to_string(), "A5+A1".to_string()]));
        // E6 has exactly four incoming edges.
        let inbound: Vec<&str> = d3
            .spec_edges
            .iter()
            .filter(|e| e[1] == "E6")
            .map(|e| e[0].as_str())
            .collect();
        assert_eq!(inbound, vec!["A5", "A4+A1", "D5", "2A2+A1"]);
        assert!(load_dag(DagName::CrossDegree).is_ok());
    }

    #[test]
    fn degree4_fixpoint_partitions() {
        let dag = load_dag(DagName::Degree4).unwrap();
        let seeds = vec![
            Fact::certificate("2A1_9", Status::Big, "big_2A1_9"),
            Fact::certificate("A3_4", Status::NotBig, "nonbig_A3_4"),
        ];
        let labeling = propagate(&dag, &seeds).unwrap();
        let big = labeling
            .labels
            .values()
            .filter(|(s, _)| *s == Status::Big)
            .count();
        let notbig = labeling
            .labels
            .values()
            .filter(|(s, _)| *s == Status::NotBig)
            .count();
        assert_eq!((big, notbig), (11, 5));
        assert!(labeling.undetermined(&dag).is_empty());
    }

    #[test]
    fn conflict_fires_on_poisoned_seed() {
        let dag = load_dag(DagName::Degree4).unwrap();
        let seeds = vec![
            Fact::certificate("2A1_9", Status::Big, "big_2A1_9"),
            Fact::certificate("A3_4", Status::NotBig, "nonbig_A3_4"),
            Fact::certificate("A3_4", Status::Big, "poison"),
        ];
        match propagate(&dag, &seeds) {
            Err(Error::Conflict { node, .. }) => assert_eq!(node, "A3_4"),
            other => panic!("expected conflict, got {other:?}"),
        }
    }

    #[test]
    fn empty_seeds_leave_everything_undetermined() {
        let dag = load_dag(DagName::Degree3).unwrap();
        let labeling = propagate(&dag, &[]).unwrap();
        assert_eq!(labeling.undetermined(&dag).len(), 21);
    }

    #[test]
    fn checksums_are_frozen() {
        assert_eq!(
            load_dag(DagName::Degree4).unwrap().checksum(),
            DEGREE4_CHECKSUM
        );
        assert_eq!(
            load_dag(DagName::Degree3).unwrap().checksum(),
            DEGREE3_CHECKSUM
        );
        assert_eq!(
            load_dag(DagName::CrossDegree).unwrap().checksum(),
            CROSS_DEGREE_CHECKSUM
        );
    }

    #[test]
    fn domination_rules() {
        let dag = load_dag(DagName::CrossDegree).unwrap();
        // Non-bigness of the degree-2 surface flows up to its blow-ups.
        let seeds = vec![Fact::certificate("2A3+A1", Status::NotBig, "nonbig_2A3_A1")];
        let labeling = propagate(&dag, &seeds).unwrap();
        assert_eq!(labeling.status("A7+A1"), Some(Status::NotBig));
        assert_eq!(labeling.status("A3+D5"), Some(Status::NotBig));
        assert_eq!(labeling.status("D4"), None);
        // Non-bigness of degree-3 D4 flows up the chain of blow-ups.
        let seeds = vec![Fact::certificate("D4", Status::NotBig, "nonbig_D4")];
        let labeling = propagate(&dag, &seeds).unwrap();
        assert_eq!(labeling.status("3A1+D4"), Some(Status::NotBig));
        assert_eq!(labeling.status("2D4"), Some(Status::NotBig));
        assert_eq!(labeling.status("E6+2A1"), Some(Status::NotBig));
    }
}
