//! Conic and line pencils, their reducible members, and the total dual VMRT
//! class on the projectivized tangent bundle.
//!
//! For a genus-0 fibration with fiber class `F` on a rational surface the
//! relative tangent class is `-K + f*K_B + D_corr` with `f*K_B = -2F`, so the
//! total dual VMRT is
//!
//! ```text
//! zeta + Pi*(K + 2F - D_corr),
//! ```
//!
//! where `D_corr` collects each fiber component with multiplicity one less
//! than its multiplicity in the fiber. Members supported on negative curves
//! are reconstructed exactly: the irreducible negative curves orthogonal to
//! `F` split into connected components of the pairing graph, and each
//! component assembles into a fiber by a unique positive integral solution of
//! a linear system.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{solve_columns, SolveOutcome};
use crate::num::{int, Int, Rat};
use crate::picard::{pair_raw, Basis, DivisorClass, Nefness, SurfaceModel};

/// How a pencil was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PencilSource {
    /// Strict transforms of lines through a closed point (1-based id).
    LineThrough(usize),
    /// Strict transforms of conics through four bubble points.
    ConicThrough(Vec<usize>),
    /// `|-K - l - E|` where `E` is the accumulated fixed part.
    FromLine {
        line: DivisorClass,
        fixed_part: Vec<(DivisorClass, u32)>,
    },
}

/// A base-point-free pencil class with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilClass {
    pub class: DivisorClass,
    pub source: PencilSource,
}

/// A fiber supported on irreducible negative curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibleMember {
    pub components: Vec<(DivisorClass, u32)>,
}

impl ReducibleMember {
    pub fn is_reduced(&self) -> bool {
        self.components.iter().all(|(_, m)| *m == 1)
    }

    pub fn total(&self, rank: usize) -> DivisorClass {
        let mut acc = vec![Int::zero(); rank];
        for (c, m) in &self.components {
            for (a, v) in acc.iter_mut().zip(c.coords()) {
                *a += v * int(*m as i64);
            }
        }
        DivisorClass::total(acc)
    }
}

/// A numerical class on `P(T_S)`: rational multiple of the tautological class
/// plus a pulled-back divisor class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTClass {
    pub zeta: Rat,
    pub base: DivisorClass,
    pub is_vmrt: bool,
    pub is_pullback_effective: bool,
}

impl PTClass {
    pub fn pullback(base: DivisorClass, effective: bool) -> Self {
        PTClass {
            zeta: Rat::zero(),
            base,
            is_vmrt: false,
            is_pullback_effective: effective,
        }
    }

    /// Componentwise sum. Evidence flags do not survive arithmetic; they
    /// propagate only under the certificate rules.
    pub fn add(&self, other: &PTClass) -> PTClass {
        assert_eq!(self.base.len(), other.base.len());
        let base = self
            .base
            .coords()
            .iter()
            .zip(other.base.coords())
            .map(|(a, b)| a + b)
            .collect();
        PTClass {
            zeta: &self.zeta + &other.zeta,
            base: DivisorClass::total(base),
            is_vmrt: false,
            is_pullback_effective: false,
        }
    }

    /// Componentwise integer multiple.
    pub fn scale(&self, c: i64) -> PTClass {
        PTClass {
            zeta: &self.zeta * Rat::from_integer(int(c)),
            base: DivisorClass::total(self.base.coords().iter().map(|v| v * int(c)).collect()),
            is_vmrt: false,
            is_pullback_effective: false,
        }
    }

    pub fn display(&self, s: &SurfaceModel, basis: Basis) -> String {
        let base = s.change_basis(&self.base, basis);
        let mut out = String::new();
        if !self.zeta.is_zero() {
            if self.zeta == Rat::one() {
                out.push_str("zeta");
            } else {
                out.push_str(&format!("{} zeta", crate::num::format_rat(&self.zeta)));
            }
        }
        if !base.is_zero() {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("Pi*({})", base.display()));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Either a family of lines through a closed point or of conics through four
/// bubble points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PencilSpec {
    LineThrough(usize),
    ConicThrough(Vec<usize>),
}

/// Builds the pencil class for a spec and validates it: `F^2 = 0`, `F` nef,
/// `F.(-K)` in {1, 2}.
pub fn pencil(s: &SurfaceModel, spec: &PencilSpec) -> Result<PencilClass> {
    let r = s.r();
    let (class, source) = match spec {
        PencilSpec::LineThrough(p) => {
            if *p == 0 || *p > r {
                return Err(Error::NotAPencil(format!("no point with id {p}")));
            }
            let mut coords = vec![Int::zero(); r + 1];
            coords[0] = int(1);
            coords[*p] = int(-1);
            (DivisorClass::total(coords), PencilSource::LineThrough(*p))
        }
        PencilSpec::ConicThrough(ids) => {
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != 4 {
                return Err(Error::NotAPencil(
                    "a conic pencil needs four distinct points".into(),
                ));
            }
            if sorted.iter().any(|&q| q == 0 || q > r) {
                return Err(Error::NotAPencil("unknown point id".into()));
            }
            let mut coords = vec![Int::zero(); r + 1];
            coords[0] = int(2);
            for &q in &sorted {
                coords[q] = int(-1);
            }
            (
                DivisorClass::total(coords),
                PencilSource::ConicThrough(sorted),
            )
        }
    };
    validate_pencil(s, &class)?;
    Ok(PencilClass { class, source })
}

fn validate_pencil(s: &SurfaceModel, class: &DivisorClass) -> Result<()> {
    let sq = s.self_intersection(class)?;
    if !sq.is_zero() {
        return Err(Error::NotAPencil(format!(
            "{} has self-intersection {}",
            class.display(),
            sq
        )));
    }
    let pos = s.nef_status(class)?;
    if let Nefness::NotNef { witness } = pos.nefness {
        return Err(Error::NotAPencil(format!(
            "{} is negative against {}",
            class.display(),
            witness.display()
        )));
    }
    let k = s.canonical_class(Basis::Total);
    let deg = -s.intersect(class, &k)?;
    if deg != int(1) && deg != int(2) {
        return Err(Error::NotAPencil(format!(
            "{} has -K-degree {}",
            class.display(),
            deg
        )));
    }
    Ok(())
}

/// The conic pencil `|-K - l - E|` of a line `l` on a degree-3 surface,
/// accumulating into `E` every irreducible (-2)-curve the running class is
/// negative against.
pub fn pencil_from_line(s: &SurfaceModel, l: &DivisorClass) -> Result<PencilClass> {
    if s.degree() != 3 {
        return Err(Error::NotAPencil(
            "line-residual pencils are defined on degree-3 surfaces".into(),
        ));
    }
    let lt = s.to_total(l);
    if !s.lines().contains(&lt) {
        return Err(Error::NotAPencil(format!(
            "{} is not a line of {}",
            lt.display(),
            s.name()
        )));
    }
    let k = s.canonical_class(Basis::Total);
    let mut cur: Vec<Int> = k
        .coords()
        .iter()
        .zip(lt.coords())
        .map(|(kc, lc)| -kc.clone() - lc)
        .collect();
    let mut fixed: Vec<(DivisorClass, u32)> = Vec::new();
    // The subtraction count is bounded by the coefficients of the fixed part,
    // not by the number of roots; the cap only guards against bugs.
    let cap = 1000usize;
    let mut steps = 0usize;
    loop {
        let neg = s
            .irreducible_minus2()
            .iter()
            .find(|m| pair_raw(&cur, m.coords()).is_negative());
        let Some(m) = neg else { break };
        for (c, v) in cur.iter_mut().zip(m.coords()) {
            *c -= v;
        }
        match fixed.iter_mut().find(|(cls, _)| cls == m) {
            Some((_, n)) => *n += 1,
            None => fixed.push((m.clone(), 1)),
        }
        steps += 1;
        if steps > cap {
            return Err(Error::FixedPointFailure);
        }
    }
    let class = DivisorClass::total(cur);
    validate_pencil(s, &class)?;
    let deg = -s.intersect(&class, &k)?;
    debug_assert_eq!(deg, int(2));
    Ok(PencilClass {
        class,
        source: PencilSource::FromLine {
            line: lt,
            fixed_part: fixed,
        },
    })
}

/// Fibers of the pencil supported on negative curves: connected components of
/// the pairing graph on the curves orthogonal to `F`, each solved exactly for
/// its positive integral multiplicities.
pub fn reducible_members(s: &SurfaceModel, pencil: &PencilClass) -> Result<Vec<ReducibleMember>> {
    let f = &pencil.class;
    let comps: Vec<&DivisorClass> = s
        .negative_curves()
        .filter(|c| pair_raw(c.coords(), f.coords()).is_zero())
        .collect();
    let n = comps.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if pair_raw(comps[i].coords(), comps[j].coords()).is_positive() {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut members = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut group = Vec::new();
        while let Some(v) = stack.pop() {
            group.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        group.sort_unstable();
        let cols: Vec<Vec<Rat>> = group
            .iter()
            .map(|&i| {
                comps[i]
                    .coords()
                    .iter()
                    .map(|c| Rat::from_integer(c.clone()))
                    .collect()
            })
            .collect();
        let target: Vec<Rat> = f
            .coords()
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let mults = match solve_columns(&cols, &target) {
            SolveOutcome::Unique(x) => x,
            SolveOutcome::NoSolution => {
                return Err(Error::NoIntegralSolution(format!(
                    "component of {} cannot assemble the fiber class {}",
                    comps[group[0]].display(),
                    f.display()
                )))
            }
            SolveOutcome::Ambiguous => {
                return Err(Error::NoIntegralSolution(format!(
                    "fiber components of {} are linearly dependent",
                    f.display()
                )))
            }
        };
        let mut components = Vec::new();
        for (&i, m) in group.iter().zip(&mults) {
            if !m.is_integer() || !m.is_positive() {
                return Err(Error::NoIntegralSolution(format!(
                    "multiplicity {} of {} is not a positive integer",
                    crate::num::format_rat(m),
                    comps[i].display()
                )));
            }
            let v = m.to_integer();
            components.push((
                comps[i].clone(),
                u32::try_from(v).expect("small multiplicity"),
            ));
        }
        members.push(ReducibleMember { components });
    }
    members.sort_by(|a, b| a.components.cmp(&b.components));
    Ok(members)
}

/// Serrano correction `sum over members of (multiplicity - 1) * component`.
pub fn correction_divisor(s: &SurfaceModel, pencil: &PencilClass) -> Result<DivisorClass> {
    let members = reducible_members(s, pencil)?;
    let mut acc = vec![Int::zero(); s.rank()];
    for member in &members {
        for (c, m) in &member.components {
            if *m > 1 {
                for (a, v) in acc.iter_mut().zip(c.coords()) {
                    *a += v * int(*m as i64 - 1);
                }
            }
        }
    }
    Ok(DivisorClass::total(acc))
}

/// Total dual VMRT class `zeta + Pi*(K + 2F - D_corr)` of a pencil.
pub fn vmrt_class(s: &SurfaceModel, pencil: &PencilClass) -> Result<PTClass> {
    let d_corr = correction_divisor(s, pencil)?;
    let k = s.canonical_class(Basis::Total);
    let base: Vec<Int> = (0..s.rank())
        .map(|i| &k.coords()[i] + int(2) * &pencil.class.coords()[i] - &d_corr.coords()[i])
        .collect();
    Ok(PTClass {
        zeta: Rat::one(),
        base: DivisorClass::total(base),
        is_vmrt: true,
        is_pullback_effective: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::{BubbleConfig, Incidence, PointSpec};

    fn surface(name: &str, parents: &[Option<u32>], triples: &[&[u32]]) -> SurfaceModel {
        let config = BubbleConfig {
            name: name.into(),
            points: parents
                .iter()
                .enumerate()
                .map(|(i, p)| PointSpec {
                    id: i as u32 + 1,
                    parent: *p,
                })
                .collect(),
            incidences: triples
                .iter()
                .map(|t| Incidence {
                    deg: 1,
                    through: t.to_vec(),
                })
                .collect(),
        };
        SurfaceModel::build(config).unwrap()
    }

    #[test]
    fn generic_conic_pencil_members_are_line_pairs() {
        let s = surface("gen4", &[None, None, None, None], &[]);
        let p = pencil(&s, &PencilSpec::ConicThrough(vec![1, 2, 3, 4])).unwrap();
        let members = reducible_members(&s, &p).unwrap();
        assert_eq!(members.len(), 3);
        for m in &members {
            assert!(m.is_reduced());
            assert_eq!(m.components.len(), 2);
            assert_eq!(m.total(s.rank()), p.class);
        }
        let v = vmrt_class(&s, &p).unwrap();
        assert_eq!(v.zeta, Rat::one());
        // K + 2F with empty correction.
        assert_eq!(v.base, DivisorClass::total_i64(&[1, -1, -1, -1, -1]));
    }

    #[test]
    fn line_pencil_through_infinitely_near_point_is_rejected() {
        let s = surface("chain", &[None, Some(1), None], &[]);
        let err = pencil(&s, &PencilSpec::LineThrough(2)).unwrap_err();
        assert!(matches!(err, Error::NotAPencil(_)));
        assert!(pencil(&s, &PencilSpec::LineThrough(1)).is_ok());
    }

    #[test]
    fn nonreduced_member_of_the_nine_line_surface() {
        let s = surface(
            "2A1_9",
            &[None, None, None, None, None],
            &[&[1, 3, 5], &[2, 4, 5]],
        );
        let p = pencil(&s, &PencilSpec::ConicThrough(vec![1, 2, 3, 4])).unwrap();
        let members = reducible_members(&s, &p).unwrap();
        assert_eq!(members.len(), 3);
        let nonreduced: Vec<_> = members.iter().filter(|m| !m.is_reduced()).collect();
        assert_eq!(nonreduced.len(), 1);
        let m = nonreduced[0];
        // (h-e1-e3-e5) + (h-e2-e4-e5) + 2 e5.
        let e5 = DivisorClass::total_i64(&[0, 0, 0, 0, 0, 1]);
        assert!(m.components.contains(&(e5, 2)));
        let d = correction_divisor(&s, &p).unwrap();
        assert_eq!(d, DivisorClass::total_i64(&[0, 0, 0, 0, 0, 1]));
        // D_corr is supported in fibers.
        assert_eq!(s.intersect(&d, &p.class).unwrap(), int(0));
    }

    #[test]
    fn from_line_pencil_on_e6_has_nonempty_fixed_part() {
        let s = surface(
            "E6",
            &[None, Some(1), Some(2), Some(3), Some(4), Some(5)],
            &[&[1, 2, 3]],
        );
        assert_eq!(s.lines().len(), 1);
        let l = s.lines()[0].clone();
        let p = pencil_from_line(&s, &l).unwrap();
        assert_eq!(p.class, DivisorClass::total_i64(&[1, -1, 0, 0, 0, 0, 0]));
        match &p.source {
            PencilSource::FromLine { fixed_part, .. } => {
                assert!(!fixed_part.is_empty());
                let total: u32 = fixed_part.iter().map(|(_, n)| n).sum();
                // Sixteen subtractions in all, far more than the root count.
                assert_eq!(total, 16);
            }
            other => panic!("unexpected source {other:?}"),
        }
        assert_eq!(s.self_intersection(&p.class).unwrap(), int(0));
    }

    #[test]
    fn from_line_on_generic_cubic_surface() {
        let s = surface("gen6", &[None; 6], &[]);
        let e6 = DivisorClass::total_i64(&[0, 0, 0, 0, 0, 0, 1]);
        let p = pencil_from_line(&s, &e6).unwrap();
        // -K - e6 with empty fixed part.
        assert_eq!(
            p.class,
            DivisorClass::total_i64(&[3, -1, -1, -1, -1, -1, -2])
        );
        match &p.source {
            PencilSource::FromLine { fixed_part, .. } => assert!(fixed_part.is_empty()),
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn pt_class_arithmetic_is_componentwise() {
        let s = surface("gen5", &[None; 5], &[]);
        let p1 = pencil(&s, &PencilSpec::LineThrough(5)).unwrap();
        let p2 = pencil(&s, &PencilSpec::ConicThrough(vec![1, 2, 3, 4])).unwrap();
        let a = vmrt_class(&s, &p1).unwrap();
        let b = vmrt_class(&s, &p2).unwrap();
        let sum = a.add(&b);
        assert_eq!(sum.zeta, crate::num::rat_int(2));
        // The five-point relation: the two VMRTs sum to 2 zeta.
        assert!(sum.base.is_zero());
        assert!(!sum.is_vmrt);
        let doubled = a.scale(2);
        assert_eq!(doubled.zeta, crate::num::rat_int(2));
        assert_eq!(doubled.base, DivisorClass::total_i64(&[-2, 2, 2, 2, 2, -2]));
    }

    #[test]
    fn d4_conic_member_multiplicities() {
        let s = surface(
            "D4",
            &[None, None, None, Some(1), Some(2), Some(3)],
            &[&[1, 2, 3]],
        );
        let p = pencil(&s, &PencilSpec::ConicThrough(vec![1, 4, 2, 5])).unwrap();
        let members = reducible_members(&s, &p).unwrap();
        let nonreduced: Vec<_> = members.iter().filter(|m| !m.is_reduced()).collect();
        assert_eq!(nonreduced.len(), 1);
        let m = nonreduced[0];
        // 2(collinear line) + E1 + E2 + 2E3 + 2E6 in the strict basis.
        let line = DivisorClass::total_i64(&[1, -1, -1, -1, 0, 0, 0]);
        let root1 = DivisorClass::total_i64(&[0, 1, 0, 0, -1, 0, 0]);
        let root2 = DivisorClass::total_i64(&[0, 0, 1, 0, 0, -1, 0]);
        let root3 = DivisorClass::total_i64(&[0, 0, 0, 1, 0, 0, -1]);
        let e6 = DivisorClass::total_i64(&[0, 0, 0, 0, 0, 0, 1]);
        assert!(m.components.contains(&(line, 2)));
        assert!(m.components.contains(&(root1, 1)));
        assert!(m.components.contains(&(root2, 1)));
        assert!(m.components.contains(&(root3, 2)));
        assert!(m.components.contains(&(e6, 2)));
    }

    #[test]
    fn distinct_members_are_pairwise_orthogonal() {
        let s = surface(
            "4A1",
            &[None; 6],
            &[&[1, 4, 6], &[2, 5, 6], &[1, 3, 5], &[2, 3, 4]],
        );
        let p = pencil(&s, &PencilSpec::ConicThrough(vec![1, 2, 3, 6])).unwrap();
        let members = reducible_members(&s, &p).unwrap();
        assert_eq!(members.len(), 3);
        for (i, a) in members.iter().enumerate() {
            assert_eq!(a.total(s.rank()), p.class);
            for b in members.iter().skip(i + 1) {
                for (ca, _) in &a.components {
                    for (cb, _) in &b.components {
                        assert_eq!(pair_raw(ca.coords(), cb.coords()), int(0));
                    }
                }
            }
        }
    }
}
