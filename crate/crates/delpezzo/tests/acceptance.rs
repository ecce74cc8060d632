//! Acceptance suite: one test per published criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use std::time::Instant;

use delpezzo::certify::{self, CertKind, SearchMode};
use delpezzo::corpus::{self, CorpusSource, FIXTURES};
use delpezzo::elliptic::{
    elliptic_nonbig_identity, enumerate_assignments, enumerate_double_nonreduced, verify_identity,
    FiberAssignment, KodairaTag,
};
use delpezzo::fibration::{pencil, vmrt_class, PencilSpec};
use delpezzo::hierarchy::{classification_report, load_dag, propagate, DagName, Fact, Status};
use delpezzo::lp::{check_feasible, lp_solve, LpOutcome, LpProblem};
use delpezzo::num::{rat, rat_int, Rat};
use delpezzo::orbifold::orbifold_invariants;
use delpezzo::picard::{DivisorClass, SurfaceModel};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn source() -> CorpusSource {
    CorpusSource::Embedded
}

fn surface(name: &str) -> SurfaceModel {
    corpus::surface(&source(), name).expect("fixture builds")
}

fn pass(n: u32, title: &str) {
    println!("ACCEPTANCE {n} ({title}): PASS");
}

/// Criterion 1: line and (-2) counts match all figure captions exactly.
#[test]
fn criterion_1_line_and_minus2_counts() {
    let expected: &[(&str, usize, usize)] = &[
        ("2A1_9", 9, 2),
        ("A3_4", 4, 3),
        ("2A2", 7, 4),
        ("A2_2A1", 8, 4),
        ("D4", 6, 4),
        ("A4", 6, 4),
        ("A3_A1", 7, 4),
        ("4A1", 9, 4),
        ("A3_2A1", 5, 5),
        ("E6", 1, 6),
        ("3A2", 3, 6),
        ("2A3_A1", 4, 7),
    ];
    for &(name, lines, minus2) in expected {
        let t = Instant::now();
        let s = surface(name);
        assert_eq!(s.lines().len(), lines, "{name}: line count");
        assert_eq!(s.irreducible_minus2().len(), minus2, "{name}: (-2) count");
        let elapsed = t.elapsed();
        assert!(elapsed.as_secs_f64() < 1.0, "{name} took {elapsed:?}");
    }
    pass(1, "12 fixture line/(-2) counts, < 1 s each");
}

/// Every VMRT class displayed in the proofs, in the strict basis. The table
/// lists `(fixture, pencil, strict coordinates of the pulled-back base)`;
/// the zeta-coefficient is 1 throughout.
const DISPLAYED_VMRT: &[(&str, &str, &[i64])] = &[
    // Five-point configuration.
    ("five_point", "line:5", &[-1, 1, 1, 1, 1, -1]),
    ("five_point", "conic:1,2,3,4", &[1, -1, -1, -1, -1, 1]),
    // 2A1 with 9 lines, degree 4.
    ("2A1_9", "line:1", &[-1, -1, 1, 1, 1, 1]),
    ("2A1_9", "line:2", &[-1, 1, -1, 1, 1, 1]),
    ("2A1_9", "line:3", &[-1, 1, 1, -1, 1, 1]),
    ("2A1_9", "line:4", &[-1, 1, 1, 1, -1, 1]),
    ("2A1_9", "line:5", &[-1, 1, 1, 1, 1, -1]),
    ("2A1_9", "conic:1,2,3,4", &[1, -1, -1, -1, -1, 0]),
    // A3 with 4 lines, degree 4.
    ("A3_4", "line:5", &[-1, 1, 2, 3, 1, -1]),
    ("A3_4", "conic:1,2,3,4", &[1, -1, -2, -3, -1, 1]),
    // 2A2, degree 3.
    ("2A2", "conic:1,2,3,4", &[1, -1, -2, -3, -1, 0, 1]),
    ("2A2", "conic:1,4,5,6", &[1, -1, 0, 1, -1, -2, -3]),
    // A2+2A1, degree 3.
    ("A2_2A1", "line:2", &[-1, 1, -1, 1, 1, 1, 2]),
    ("A2_2A1", "conic:1,4,5,6", &[1, -1, 1, 1, -1, -1, -2]),
    // D4, degree 3.
    ("D4", "conic:1,2,4,5", &[0, 0, 0, 1, -1, -1, 2]),
    ("D4", "conic:1,3,4,6", &[0, 0, 1, 0, -1, 2, -1]),
    ("D4", "conic:2,3,5,6", &[0, 1, 0, 0, 2, -1, -1]),
    // A4, degree 3.
    ("A4", "conic:1,2,3,6", &[1, -1, -2, -3, 1, 2, -1]),
    ("A4", "conic:1,4,5,6", &[1, -1, 0, 1, -1, -2, -1]),
    // A3+A1, degree 3.
    ("A3_A1", "line:4", &[-1, 1, 2, 3, -1, 1, 1]),
    ("A3_A1", "conic:1,2,5,6", &[1, -1, -2, -1, 1, -1, -1]),
    // 4A1, degree 3.
    ("4A1", "line:1", &[-1, -1, 1, 1, 1, 1, 1]),
    ("4A1", "line:2", &[-1, 1, -1, 1, 1, 1, 1]),
    ("4A1", "line:3", &[-1, 1, 1, -1, 1, 1, 1]),
    ("4A1", "line:4", &[-1, 1, 1, 1, -1, 1, 1]),
    ("4A1", "line:5", &[-1, 1, 1, 1, 1, -1, 1]),
    ("4A1", "line:6", &[-1, 1, 1, 1, 1, 1, -1]),
    ("4A1", "conic:1,2,3,6", &[1, -1, -1, -1, 0, 0, -1]),
    ("4A1", "conic:1,2,4,5", &[1, -1, -1, 0, -1, -1, 0]),
    ("4A1", "conic:3,4,5,6", &[1, 0, 0, -1, -1, -1, -1]),
    // A3+2A1, degree 3.
    ("A3_2A1", "line:1", &[-1, -1, 1, 1, 0, 2, 2]),
    ("A3_2A1", "line:2", &[-1, 1, -1, 1, 2, 0, 2]),
    ("A3_2A1", "line:3", &[-1, 1, 1, -1, 1, 1, 0]),
    ("A3_2A1", "conic:1,2,4,5", &[0, 0, 0, 0, -1, -1, 1]),
    ("A3_2A1", "conic:1,2,3,6", &[1, -1, -1, -1, 0, 0, -2]),
    // E6, degree 3.
    ("E6", "line:1", &[-1, -1, 0, 0, 1, 2, 3]),
    // 2A3+A1, degree 2.
    ("2A3_A1", "line:7", &[-1, 1, 1, 1, 2, 2, 1, -1]),
    ("2A3_A1", "conic:1,2,4,5", &[0, 0, 0, 0, -1, -1, 1, 1]),
    ("2A3_A1", "conic:1,2,3,6", &[1, -1, -1, -1, 0, 0, -2, 0]),
];

/// Displayed pullback classes, `(fixture, total coords, strict coords)`.
const DISPLAYED_PULLBACKS: &[(&str, &[i64], &[i64])] = &[
    ("2A1_9", &[1, -1, 0, -1, 0, -1], &[1, -1, 0, -1, 0, -1]),
    ("2A1_9", &[1, 0, -1, 0, -1, -1], &[1, 0, -1, 0, -1, -1]),
    (
        "A3_2A1",
        &[1, -1, -1, 0, 0, 0, 0],
        &[1, -1, -1, 0, -1, -1, 0],
    ),
    (
        "A3_2A1",
        &[1, -1, 0, -1, -1, 0, 0],
        &[1, -1, 0, -1, -2, 0, -1],
    ),
    (
        "A3_2A1",
        &[1, 0, -1, -1, 0, -1, 0],
        &[1, 0, -1, -1, 0, -2, -1],
    ),
];

fn parse_spec(spec: &str) -> PencilSpec {
    if let Some(p) = spec.strip_prefix("line:") {
        PencilSpec::LineThrough(p.parse().unwrap())
    } else {
        let ids = spec
            .strip_prefix("conic:")
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        PencilSpec::ConicThrough(ids)
    }
}

/// Criterion 2: the displayed VMRT and pullback classes reproduce bit-exactly
/// in the strict basis (39 VMRT lines and 5 pullbacks, a superset of the 19
/// conic-pencil displays the criterion names).
#[test]
fn criterion_2_displayed_classes_reproduce() {
    for (name, spec, strict) in DISPLAYED_VMRT {
        let s = surface(name);
        let p = pencil(&s, &parse_spec(spec)).unwrap_or_else(|e| panic!("{name} {spec}: {e}"));
        let v = vmrt_class(&s, &p).unwrap();
        assert_eq!(v.zeta, rat_int(1), "{name} {spec}: zeta");
        assert_eq!(
            s.to_strict(&v.base),
            DivisorClass::strict_i64(strict),
            "{name} {spec}: strict base"
        );
    }
    for (name, total, strict) in DISPLAYED_PULLBACKS {
        let s = surface(name);
        let cls = DivisorClass::total_i64(total);
        assert_eq!(
            s.to_strict(&cls),
            DivisorClass::strict_i64(strict),
            "{name} pullback"
        );
    }
    pass(
        2,
        "39 displayed VMRT classes + 5 pullbacks, bit-exact in the strict basis",
    );
}

/// Criterion 3: the six named certificate sums verify exactly with their
/// stated zeta-multiples, residuals, and ranks.
#[test]
fn criterion_3_certificate_sums() {
    struct Expect {
        cert: &'static str,
        k_or_m: i64,
        residual_strict: Option<&'static [i64]>,
        rank: Option<usize>,
    }
    let cases = [
        Expect {
            cert: "nonbig_A3_4",
            k_or_m: 2,
            residual_strict: Some(&[0, 0, 0, 0, 0, 0]),
            rank: None,
        },
        Expect {
            cert: "nonbig_D4",
            k_or_m: 3,
            residual_strict: Some(&[0, 1, 1, 1, 0, 0, 0]),
            rank: None,
        },
        Expect {
            cert: "nonbig_4A1",
            k_or_m: 12,
            residual_strict: Some(&[0, 0, 0, 0, 0, 0, 0]),
            rank: None,
        },
        Expect {
            cert: "nonbig_2A3_A1",
            k_or_m: 3,
            residual_strict: Some(&[0, 0, 0, 0, 1, 1, 0, 0]),
            rank: None,
        },
        Expect {
            cert: "big_2A1_9",
            k_or_m: 6,
            residual_strict: None,
            rank: Some(7),
        },
        Expect {
            cert: "big_A3_2A1",
            k_or_m: 10,
            residual_strict: None,
            rank: Some(8),
        },
    ];
    for case in &cases {
        let cert = corpus::load_certificate(&source(), case.cert).unwrap();
        let s = surface(&cert.surface);
        let verdict = certify::verify(&s, &cert).unwrap();
        let certify::Verdict::Accept(info) = verdict else {
            panic!("{}: rejected: {:?}", case.cert, verdict.reason());
        };
        assert_eq!(cert.k_or_m, rat_int(case.k_or_m), "{}: k/m", case.cert);
        if let Some(res) = case.residual_strict {
            assert_eq!(
                s.to_strict(&cert.residual),
                DivisorClass::strict_i64(res),
                "{}: residual",
                case.cert
            );
        }
        if let Some(rank) = case.rank {
            assert_eq!(info.rank, Some(rank), "{}: rank", case.cert);
        }
    }
    pass(
        3,
        "2zeta / 3zeta+E1+E2+E3 / 12zeta / 3zeta+E4+E5 / 6zeta rank 7 / 10zeta rank 8",
    );
}

/// Criterion 4: exact orbifold invariants of the E6 fixture.
#[test]
fn criterion_4_orbifold_e6() {
    let s = surface("E6");
    let inv = orbifold_invariants(&s).unwrap();
    assert_eq!(inv.c1_sq, rat_int(3));
    assert_eq!(inv.c2, rat(49, 24));
    assert_eq!(inv.s2, rat(23, 24));
    assert!(inv.s2 > Rat::from_integer(0.into()));
    pass(4, "E6 orbifold invariants (3, 49/24, 23/24), s2 > 0");
}

/// Criterion 5: the Euler-12 enumeration and identity generation.
#[test]
fn criterion_5_elliptic_enumeration() {
    let t = Instant::now();
    let doubles = enumerate_double_nonreduced(12);
    assert_eq!(
        doubles,
        vec![vec![KodairaTag::IStar(0), KodairaTag::IStar(0)]]
    );
    let assignments = enumerate_assignments(12, 1);
    assert_eq!(assignments.len(), 81);
    for tags in &assignments {
        let a = FiberAssignment::new(tags, 1).unwrap();
        let id = elliptic_nonbig_identity(&a).unwrap_or_else(|e| panic!("{}: {e}", a.label()));
        assert!(id.k == 1 || id.k == 2, "{}: k = {}", a.label(), id.k);
        assert!(verify_identity(&a, &id), "{}: identity check", a.label());
    }
    // A Halphen assignment yields the same identity shape.
    let halphen = FiberAssignment::new(
        &[KodairaTag::IStar(0), KodairaTag::I(4), KodairaTag::I(2)],
        2,
    )
    .unwrap();
    assert_eq!(elliptic_nonbig_identity(&halphen).unwrap().k, 1);
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "enumeration took {elapsed:?}");
    pass(
        5,
        "double-non-reduced = {{I0*, I0*}}; 81 assignments with k in {{1,2}}, < 10 s",
    );
}

/// Criterion 6: both classification reports from verified seeds.
#[test]
fn criterion_6_classification_reports() {
    let seeds4 = corpus::classification_seeds(&source(), 4).unwrap();
    let report4 = classification_report(4, &seeds4).unwrap();
    assert!(
        report4.matches_expectation(),
        "degree 4: {:?}",
        report4.discrepancies
    );
    let dag4 = load_dag(DagName::Degree4).unwrap();
    assert!(report4.labeling.undetermined(&dag4).is_empty());
    for id in ["empty", "A1", "2A1_8", "A2", "A3_4"] {
        assert_eq!(report4.labeling.status(id), Some(Status::NotBig), "{id}");
    }

    let seeds3 = corpus::classification_seeds(&source(), 3).unwrap();
    let report3 = classification_report(3, &seeds3).unwrap();
    assert!(
        report3.matches_expectation(),
        "degree 3: {:?}",
        report3.discrepancies
    );
    let dag3 = load_dag(DagName::Degree3).unwrap();
    let undetermined = report3.labeling.undetermined(&dag3);
    let mut sorted = undetermined.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec!["2A2+A1", "A4+A1", "A5", "D5"]);
    pass(
        6,
        "degree-4 exception list exact; degree-3 undetermined = {A5, A4+A1, D5, 2A2+A1}",
    );
}

/// Criterion 7: searcher soundness over the whole corpus.
#[test]
fn criterion_7_searcher_soundness() {
    let t = Instant::now();
    let matrix = corpus::search_matrix(&source()).unwrap();
    let nonbig_expected = [
        "five_point",
        "A3_4",
        "2A2",
        "A2_2A1",
        "D4",
        "A4",
        "A3_A1",
        "4A1",
        "2A3_A1",
    ];
    for name in nonbig_expected {
        assert_eq!(matrix.outcomes[name], (true, false), "{name}");
    }
    for name in ["2A1_9", "A3_2A1"] {
        assert_eq!(matrix.outcomes[name], (false, true), "{name}");
    }
    // Searching is sound, not complete: the two fixtures whose bigness the
    // proofs settle by other routes come back empty-handed in both modes.
    for name in ["E6", "3A2"] {
        assert_eq!(matrix.outcomes[name], (false, false), "{name}");
    }
    // Every found certificate re-verifies (search_certificate re-verifies
    // internally; spot-check one of each kind end to end anyway).
    let s = surface("D4");
    let cert = certify::search_certificate(&s, SearchMode::NonBig, None)
        .unwrap()
        .unwrap();
    assert_eq!(cert.kind, CertKind::NonBig);
    assert!(certify::verify(&s, &cert).unwrap().is_accept());
    let s = surface("2A1_9");
    let cert = certify::search_certificate(&s, SearchMode::Big, None)
        .unwrap()
        .unwrap();
    assert!(certify::verify(&s, &cert).unwrap().is_accept());

    let suite = corpus::run_suite(&source());
    assert!(suite.ok(), "{}", suite.to_json());
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "full suite took {elapsed:?}");
    pass(
        7,
        "search outcomes as published, certificates re-verify, suite < 60 s",
    );
}

/// Criterion 8: property suites.
#[test]
fn criterion_8_property_suites() {
    // (a) Basis round-trip on 1000 random classes, with pairing invariance.
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let fixtures: Vec<SurfaceModel> = FIXTURES.iter().map(|f| surface(f.name)).collect();
    for i in 0..1000 {
        let s = &fixtures[i % fixtures.len()];
        let coords: Vec<i64> = (0..s.rank()).map(|_| rng.gen_range(-9..=9)).collect();
        let c = DivisorClass::total_i64(&coords);
        let strict = s.to_strict(&c);
        assert_eq!(s.to_total(&strict), c, "round trip");
        let other: Vec<i64> = (0..s.rank()).map(|_| rng.gen_range(-9..=9)).collect();
        let d = DivisorClass::total_i64(&other);
        let lhs = s.intersect(&c, &d).unwrap();
        let rhs = s.intersect(&strict, &s.to_strict(&d)).unwrap();
        assert_eq!(lhs, rhs, "pairing preserved under change of basis");
    }

    // (b) LP agreement with a brute-force vertex oracle on 200 random systems.
    for case in 0..200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=10);
        let a: Vec<Vec<Rat>> = (0..m)
            .map(|_| (0..n).map(|_| rat_int(rng.gen_range(-3..=3))).collect())
            .collect();
        let b: Vec<Rat> = (0..m).map(|_| rat_int(rng.gen_range(-5..=5))).collect();
        let p = LpProblem::new(a.clone(), b.clone());
        let fast = lp_solve(&p);
        let slow = vertex_oracle_feasible(&a, &b);
        match (&fast, slow) {
            (LpOutcome::Feasible(x), true) => assert!(check_feasible(&p, x), "case {case}"),
            (LpOutcome::Infeasible, false) => {}
            other => panic!("case {case}: simplex/oracle disagree: {other:?}"),
        }
    }

    // (c) Conflict detection fires on a poisoned seed.
    let dag = load_dag(DagName::Degree4).unwrap();
    let mut seeds = corpus::classification_seeds(&source(), 4).unwrap();
    seeds.push(Fact::certificate("A3_4", Status::Big, "poison"));
    assert!(matches!(
        propagate(&dag, &seeds),
        Err(delpezzo::Error::Conflict { .. })
    ));

    // (d) Fixpoint monotonicity under seed removal: withholding the A3+2A1
    // certificate turns exactly it and A5+A1 undetermined, and the labeled
    // set of any seed subset is contained in the full labeling.
    let full_seeds = corpus::classification_seeds(&source(), 3).unwrap();
    let dag3 = load_dag(DagName::Degree3).unwrap();
    let full = propagate(&dag3, &full_seeds).unwrap();
    let withheld: Vec<Fact> = full_seeds
        .iter()
        .filter(|f| f.node != "A3+2A1")
        .cloned()
        .collect();
    let partial = propagate(&dag3, &withheld).unwrap();
    assert_eq!(partial.status("A3+2A1"), None);
    assert_eq!(partial.status("A5+A1"), None);
    for (node, (status, _)) in &partial.labels {
        assert_eq!(full.status(node), Some(*status), "monotonicity at {node}");
    }
    for k in 0..full_seeds.len() {
        let subset: Vec<Fact> = full_seeds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, f)| f.clone())
            .collect();
        let sub = propagate(&dag3, &subset).unwrap();
        for (node, (status, _)) in &sub.labels {
            assert_eq!(full.status(node), Some(*status), "subset {k} at {node}");
        }
    }
    pass(
        8,
        "basis round-trip x1000, LP vs vertex oracle x200, conflict, monotonicity",
    );
}

/// Independent feasibility oracle: enumerate independent column subsets,
/// solve each square subsystem exactly, and test nonnegativity. A feasible
/// program always has a basic feasible solution, so this is complete.
fn vertex_oracle_feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let m = a.len();
    let n = a[0].len();
    let cols: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..m).map(|i| a[i][j].clone()).collect())
        .collect();
    let zero = b.iter().all(|v| v == &rat_int(0));
    if zero {
        return true;
    }
    let mut subset = Vec::new();
    subsets_feasible(&cols, b, 0, m, &mut subset)
}

fn subsets_feasible(
    cols: &[Vec<Rat>],
    b: &[Rat],
    from: usize,
    max_size: usize,
    subset: &mut Vec<usize>,
) -> bool {
    if !subset.is_empty() {
        let chosen: Vec<Vec<Rat>> = subset.iter().map(|&j| cols[j].clone()).collect();
        match delpezzo::linalg::solve_columns(&chosen, b) {
            delpezzo::linalg::SolveOutcome::Unique(x) => {
                if x.iter().all(|v| v >= &rat_int(0)) {
                    return true;
                }
            }
            delpezzo::linalg::SolveOutcome::NoSolution => {}
            // Dependent columns: every basic solution already appears for a
            // smaller independent subset.
            delpezzo::linalg::SolveOutcome::Ambiguous => return false,
        }
    }
    if subset.len() == max_size {
        return false;
    }
    for j in from..cols.len() {
        subset.push(j);
        if subsets_feasible(cols, b, j + 1, max_size, subset) {
            subset.pop();
            return true;
        }
        subset.pop();
    }
    false
}
