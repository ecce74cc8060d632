//! Kodaira fiber bookkeeping for relatively minimal rational elliptic
//! surfaces, and the formal identities showing their tangent bundles are not
//! big.
//!
//! Everything here is symbolic: a fiber assignment is a multiset of singular
//! fiber types with Euler numbers summing to 12, plus the multiplicity of the
//! single possible multiple fiber (1 when the fibration has a section). The
//! divisor `Y = zeta + Pi*(F - E_0)` on `P(T_S)` satisfies an identity
//! `k Y = k zeta + Pi*(effective)` once the fiber relations
//! `F = sum of m_i C_i` are substituted; the identity is verified by exact
//! linear algebra over the free module on the fiber-component symbols.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{solve_columns, SolveOutcome};
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::num::{rat_int, Rat};

/// Kodaira type of a singular elliptic fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KodairaTag {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaTag {
    /// Canonical ordering key: Euler number first, then family.
    fn key(&self) -> (u32, u32, u32) {
        match *self {
            KodairaTag::I(n) => (n, 0, n),
            KodairaTag::II => (2, 1, 0),
            KodairaTag::III => (3, 1, 0),
            KodairaTag::IV => (4, 1, 0),
            KodairaTag::IStar(n) => (6 + n, 2, n),
            KodairaTag::IVStar => (8, 3, 0),
            KodairaTag::IIIStar => (9, 3, 0),
            KodairaTag::IIStar => (10, 3, 0),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let tag = match s {
            "II" => KodairaTag::II,
            "III" => KodairaTag::III,
            "IV" => KodairaTag::IV,
            "IV*" => KodairaTag::IVStar,
            "III*" => KodairaTag::IIIStar,
            "II*" => KodairaTag::IIStar,
            _ => {
                let (body, star) = match s.strip_suffix('*') {
                    Some(b) => (b, true),
                    None => (s, false),
                };
                let n: u32 = body
                    .strip_prefix('I')
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::UnknownFiberTag(s.to_string()))?;
                if star {
                    KodairaTag::IStar(n)
                } else {
                    if n == 0 {
                        return Err(Error::UnknownFiberTag("I0 is a smooth fiber".into()));
                    }
                    KodairaTag::I(n)
                }
            }
        };
        Ok(tag)
    }
}

impl PartialOrd for KodairaTag {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KodairaTag {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for KodairaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KodairaTag::I(n) => write!(f, "I{n}"),
            KodairaTag::II => write!(f, "II"),
            KodairaTag::III => write!(f, "III"),
            KodairaTag::IV => write!(f, "IV"),
            KodairaTag::IStar(n) => write!(f, "I{n}*"),
            KodairaTag::IVStar => write!(f, "IV*"),
            KodairaTag::IIIStar => write!(f, "III*"),
            KodairaTag::IIStar => write!(f, "II*"),
        }
    }
}

/// Euler number and component multiplicities of a fiber type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KodairaType {
    pub tag: KodairaTag,
    pub euler: u32,
    pub component_multiplicities: Vec<u32>,
    pub nonreduced: bool,
}

/// The classical table.
pub fn kodaira_data(tag: KodairaTag) -> Result<KodairaType> {
    let (euler, mults): (u32, Vec<u32>) = match tag {
        KodairaTag::I(0) => return Err(Error::UnknownFiberTag("I0 is a smooth fiber".into())),
        KodairaTag::I(n) => (n, vec![1; n as usize]),
        KodairaTag::II => (2, vec![1]),
        KodairaTag::III => (3, vec![1, 1]),
        KodairaTag::IV => (4, vec![1, 1, 1]),
        KodairaTag::IStar(n) => {
            let mut m = vec![1, 1, 1, 1];
            m.extend(vec![2; n as usize + 1]);
            (6 + n, m)
        }
        KodairaTag::IVStar => (8, vec![1, 1, 1, 2, 2, 2, 3]),
        KodairaTag::IIIStar => (9, vec![1, 1, 2, 2, 2, 3, 3, 4]),
        KodairaTag::IIStar => (10, vec![1, 2, 2, 3, 3, 4, 4, 5, 6]),
    };
    let nonreduced = mults.iter().any(|&m| m >= 2);
    Ok(KodairaType {
        tag,
        euler,
        component_multiplicities: mults,
        nonreduced,
    })
}

/// A multiset of singular fibers with total Euler number 12, plus the
/// multiplicity of the (at most one) multiple fiber; 1 means a section
/// exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberAssignment {
    pub fibers: Vec<KodairaType>,
    pub halphen_multiplicity: u32,
}

impl FiberAssignment {
    pub fn new(tags: &[KodairaTag], halphen_multiplicity: u32) -> Result<Self> {
        if halphen_multiplicity == 0 {
            return Err(Error::MalformedConfig(
                "halphen multiplicity must be >= 1".into(),
            ));
        }
        let mut sorted = tags.to_vec();
        sorted.sort();
        let fibers: Vec<KodairaType> = sorted
            .into_iter()
            .map(kodaira_data)
            .collect::<Result<_>>()?;
        let total: u32 = fibers.iter().map(|f| f.euler).sum();
        if total != 12 {
            return Err(Error::MalformedConfig(format!(
                "singular fibers have Euler total {total}, expected 12"
            )));
        }
        Ok(FiberAssignment {
            fibers,
            halphen_multiplicity,
        })
    }

    pub fn nonreduced_count(&self) -> usize {
        self.fibers.iter().filter(|f| f.nonreduced).count()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.fibers.iter().map(|f| f.tag.to_string()).collect();
        parts.join(" + ")
    }
}

/// All multisets of singular fiber types with the given Euler total; those
/// with fewer than `min_nonreduced` non-reduced members are dropped.
pub fn enumerate_assignments(total_euler: u32, min_nonreduced: usize) -> Vec<Vec<KodairaTag>> {
    let mut universe: Vec<(KodairaTag, u32)> = Vec::new();
    for n in 1..=total_euler {
        universe.push((KodairaTag::I(n), n));
    }
    for tag in [KodairaTag::II, KodairaTag::III, KodairaTag::IV] {
        universe.push((tag, kodaira_data(tag).unwrap().euler));
    }
    if total_euler >= 6 {
        for n in 0..=(total_euler - 6) {
            universe.push((KodairaTag::IStar(n), 6 + n));
        }
    }
    for tag in [KodairaTag::IVStar, KodairaTag::IIIStar, KodairaTag::IIStar] {
        let e = kodaira_data(tag).unwrap().euler;
        if e <= total_euler {
            universe.push((tag, e));
        }
    }
    universe.sort_by_key(|(t, _)| *t);

    let mut out = Vec::new();
    let mut current = Vec::new();
    multiset_scan(&universe, 0, total_euler, &mut current, &mut out);
    out.retain(|tags| {
        tags.iter()
            .filter(|t| kodaira_data(**t).unwrap().nonreduced)
            .count()
            >= min_nonreduced
    });
    out
}

fn multiset_scan(
    universe: &[(KodairaTag, u32)],
    from: usize,
    remaining: u32,
    current: &mut Vec<KodairaTag>,
    out: &mut Vec<Vec<KodairaTag>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for i in from..universe.len() {
        let (tag, euler) = universe[i];
        if euler <= remaining {
            current.push(tag);
            multiset_scan(universe, i, remaining - euler, current, out);
            current.pop();
        }
    }
}

/// Exhaustive list of fiber multisets with at least two non-reduced members.
pub fn enumerate_double_nonreduced(total_euler: u32) -> Vec<Vec<KodairaTag>> {
    enumerate_assignments(total_euler, 2)
}

/// Symbol of the free module the identity lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symbol {
    /// The fiber class `F`.
    FiberClass,
    /// Component `comp` of singular fiber `fiber`.
    Component { fiber: usize, comp: usize },
}

impl Symbol {
    pub fn render(&self, a: &FiberAssignment) -> String {
        match *self {
            Symbol::FiberClass => "F".into(),
            Symbol::Component { fiber, comp } => {
                format!("C[{}#{},{}]", a.fibers[fiber].tag, fiber + 1, comp + 1)
            }
        }
    }
}

/// `k Y = k zeta + Pi*(right)`, with `right` a nonzero nonnegative
/// combination of the fiber class and fiber components.
#[derive(Debug, Clone)]
pub struct FormalPTIdentity {
    pub k: u32,
    pub right: Vec<(Symbol, Rat)>,
}

impl FormalPTIdentity {
    pub fn render(&self, a: &FiberAssignment) -> String {
        let terms: Vec<String> = self
            .right
            .iter()
            .map(|(sym, c)| {
                if c == &Rat::one() {
                    sym.render(a)
                } else {
                    format!("{} {}", crate::num::format_rat(c), sym.render(a))
                }
            })
            .collect();
        format!(
            "{k} Y = {k} zeta + Pi*({sum})",
            k = self.k,
            sum = terms.join(" + ")
        )
    }
}

fn symbol_space(a: &FiberAssignment) -> Vec<Symbol> {
    let mut syms = vec![Symbol::FiberClass];
    for (fi, f) in a.fibers.iter().enumerate() {
        for ci in 0..f.component_multiplicities.len() {
            syms.push(Symbol::Component {
                fiber: fi,
                comp: ci,
            });
        }
    }
    syms
}

fn coords(syms: &[Symbol], terms: &[(Symbol, Rat)]) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); syms.len()];
    for (sym, c) in terms {
        let idx = syms.iter().position(|s| s == sym).expect("known symbol");
        v[idx] += c;
    }
    v
}

/// `k (F - E_0) - right` must lie in the span of the fiber relations
/// `F - sum of m_i C_i`.
pub fn verify_identity(a: &FiberAssignment, identity: &FormalPTIdentity) -> bool {
    if identity.k == 0 {
        return false;
    }
    if identity.right.iter().any(|(_, c)| c.is_negative()) {
        return false;
    }
    if identity.right.iter().all(|(_, c)| c.is_zero()) {
        return false;
    }
    let syms = symbol_space(a);
    let mut target = vec![Rat::zero(); syms.len()];
    // k (F - E_0).
    target[0] = rat_int(identity.k as i64);
    for (fi, f) in a.fibers.iter().enumerate() {
        for (ci, &m) in f.component_multiplicities.iter().enumerate() {
            if m >= 2 {
                let idx = syms
                    .iter()
                    .position(|s| {
                        *s == Symbol::Component {
                            fiber: fi,
                            comp: ci,
                        }
                    })
                    .unwrap();
                target[idx] = -rat_int(identity.k as i64) * rat_int(m as i64 - 1);
            }
        }
    }
    for (v, r) in target.iter_mut().zip(coords(&syms, &identity.right)) {
        *v -= r;
    }
    // Fiber relations as columns.
    let relations: Vec<Vec<Rat>> = (0..a.fibers.len())
        .map(|fi| {
            let mut col = vec![Rat::zero(); syms.len()];
            col[0] = Rat::one();
            for (ci, &m) in a.fibers[fi].component_multiplicities.iter().enumerate() {
                let idx = syms
                    .iter()
                    .position(|s| {
                        *s == Symbol::Component {
                            fiber: fi,
                            comp: ci,
                        }
                    })
                    .unwrap();
                col[idx] = -rat_int(m as i64);
            }
            col
        })
        .collect();
    matches!(solve_columns(&relations, &target), SolveOutcome::Unique(_))
}

/// Produces and verifies the identity `k Y = k zeta + Pi*(effective)`.
///
/// With at most one non-reduced fiber the rewriting uses `k = 1`; with two,
/// `k = 2` spreads the two fiber relations. The multiple-fiber multiplicity
/// plays no role: the relative tangent class is `-F + E_0` either way. A
/// generic exact-LP search over `k <= 4` backs up the two rewritings.
pub fn elliptic_nonbig_identity(a: &FiberAssignment) -> Result<FormalPTIdentity> {
    let nonreduced: Vec<usize> = (0..a.fibers.len())
        .filter(|&i| a.fibers[i].nonreduced)
        .collect();
    let candidate = match nonreduced.len() {
        0 => Some(FormalPTIdentity {
            k: 1,
            right: vec![(Symbol::FiberClass, Rat::one())],
        }),
        1 => {
            let fi = nonreduced[0];
            let right = (0..a.fibers[fi].component_multiplicities.len())
                .map(|ci| {
                    (
                        Symbol::Component {
                            fiber: fi,
                            comp: ci,
                        },
                        Rat::one(),
                    )
                })
                .collect();
            Some(FormalPTIdentity { k: 1, right })
        }
        2 => {
            let all_le2 = nonreduced.iter().all(|&fi| {
                a.fibers[fi]
                    .component_multiplicities
                    .iter()
                    .all(|&m| m <= 2)
            });
            if all_le2 {
                let mut right = Vec::new();
                for &fi in &nonreduced {
                    for (ci, &m) in a.fibers[fi].component_multiplicities.iter().enumerate() {
                        if m < 2 {
                            right.push((
                                Symbol::Component {
                                    fiber: fi,
                                    comp: ci,
                                },
                                rat_int(2 - m as i64),
                            ));
                        }
                    }
                }
                Some(FormalPTIdentity { k: 2, right })
            } else {
                None
            }
        }
        _ => None,
    };
    if let Some(identity) = candidate {
        if verify_identity(a, &identity) {
            return Ok(identity);
        }
    }
    for k in 1..=4u32 {
        if let Some(identity) = identity_by_lp(a, k) {
            if verify_identity(a, &identity) {
                return Ok(identity);
            }
        }
    }
    Err(Error::IdentityNotFound(4))
}

/// LP search at fixed `k`: nonnegative `right`, free relation multipliers,
/// and total `right` mass at least one to force a nonzero effective side.
fn identity_by_lp(a: &FiberAssignment, k: u32) -> Option<FormalPTIdentity> {
    let syms = symbol_space(a);
    let ns = syms.len();
    let nf = a.fibers.len();
    // Variables: right (ns) | lambda+ (nf) | lambda- (nf) | slack (1).
    let nvars = ns + 2 * nf + 1;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for (si, sym) in syms.iter().enumerate() {
        let mut row = vec![Rat::zero(); nvars];
        row[si] = Rat::one();
        for fi in 0..nf {
            let coeff = match sym {
                Symbol::FiberClass => Rat::one(),
                Symbol::Component { fiber, comp } => {
                    if *fiber == fi {
                        -rat_int(a.fibers[fi].component_multiplicities[*comp] as i64)
                    } else {
                        Rat::zero()
                    }
                }
            };
            row[ns + fi] = coeff.clone();
            row[ns + nf + fi] = -coeff;
        }
        let target = match sym {
            Symbol::FiberClass => rat_int(k as i64),
            Symbol::Component { fiber, comp } => {
                let m = a.fibers[*fiber].component_multiplicities[*comp];
                -rat_int(k as i64) * rat_int(m as i64 - 1)
            }
        };
        rows.push(row);
        rhs.push(target);
    }
    // sum(right) - slack = 1.
    let mut mass = vec![Rat::zero(); nvars];
    for v in mass.iter_mut().take(ns) {
        *v = Rat::one();
    }
    mass[nvars - 1] = -Rat::one();
    rows.push(mass);
    rhs.push(Rat::one());

    match lp_solve(&LpProblem::new(rows, rhs)) {
        LpOutcome::Feasible(x) => {
            let right: Vec<(Symbol, Rat)> = syms
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (*s, c.clone()))
                .collect();
            Some(FormalPTIdentity { k, right })
        }
        LpOutcome::Infeasible => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kodaira_table() {
        let i0s = kodaira_data(KodairaTag::IStar(0)).unwrap();
        assert_eq!(i0s.euler, 6);
        assert_eq!(i0s.component_multiplicities, vec![1, 1, 1, 1, 2]);
        assert!(i0s.nonreduced);
        let ii = kodaira_data(KodairaTag::II).unwrap();
        assert_eq!(ii.euler, 2);
        assert!(!ii.nonreduced);
        let i3 = kodaira_data(KodairaTag::I(3)).unwrap();
        assert_eq!(i3.euler, 3);
        assert_eq!(i3.component_multiplicities, vec![1, 1, 1]);
        assert!(kodaira_data(KodairaTag::I(0)).is_err());
        let iis = kodaira_data(KodairaTag::IIStar).unwrap();
        assert_eq!(iis.euler, 10);
        assert_eq!(iis.component_multiplicities.iter().sum::<u32>(), 30);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "I1", "I12", "I0*", "I4*", "II", "III", "IV", "II*", "III*", "IV*",
        ] {
            let t = KodairaTag::parse(s).unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!(KodairaTag::parse("I0").is_err());
        assert!(KodairaTag::parse("V").is_err());
    }

    #[test]
    fn double_nonreduced_at_twelve_is_two_i0_star() {
        let found = enumerate_double_nonreduced(12);
        assert_eq!(
            found,
            vec![vec![KodairaTag::IStar(0), KodairaTag::IStar(0)]]
        );
        assert!(enumerate_double_nonreduced(11).is_empty());
        let at_14 = enumerate_double_nonreduced(14);
        assert!(at_14.contains(&vec![KodairaTag::IStar(0), KodairaTag::IVStar]));
    }

    #[test]
    fn identities_for_the_three_paper_cases() {
        // One I1*, rest reduced.
        let a = FiberAssignment::new(
            &[KodairaTag::IStar(1), KodairaTag::I(4), KodairaTag::I(1)],
            1,
        )
        .unwrap();
        let id = elliptic_nonbig_identity(&a).unwrap();
        assert_eq!(id.k, 1);
        assert!(verify_identity(&a, &id));

        // Two I0*.
        let a = FiberAssignment::new(&[KodairaTag::IStar(0), KodairaTag::IStar(0)], 1).unwrap();
        let id = elliptic_nonbig_identity(&a).unwrap();
        assert_eq!(id.k, 2);
        assert_eq!(id.right.len(), 8);
        assert!(verify_identity(&a, &id));

        // Halphen with multiplicity 3, no non-reduced fiber: same k = 1 shape.
        let a = FiberAssignment::new(
            &[
                KodairaTag::I(9),
                KodairaTag::I(1),
                KodairaTag::I(1),
                KodairaTag::I(1),
            ],
            3,
        )
        .unwrap();
        let id = elliptic_nonbig_identity(&a).unwrap();
        assert_eq!(id.k, 1);
        assert!(verify_identity(&a, &id));
    }

    #[test]
    fn corrupted_identity_fails_verification() {
        let a = FiberAssignment::new(&[KodairaTag::IStar(0), KodairaTag::IStar(0)], 1).unwrap();
        let mut id = elliptic_nonbig_identity(&a).unwrap();
        id.right[0].1 += Rat::one();
        assert!(!verify_identity(&a, &id));
    }

    #[test]
    fn euler_total_is_checked() {
        assert!(FiberAssignment::new(&[KodairaTag::I(5)], 1).is_err());
        assert!(FiberAssignment::new(&[KodairaTag::I(12)], 0).is_err());
    }
}
