//! Picard lattice of a blow-up of the plane at bubble points.
//!
//! A surface is described combinatorially by a [`BubbleConfig`]: an ordered
//! list of points, each either closed or infinitely near an earlier point,
//! together with declared incidences (collinear triples and the like). The
//! lattice carries two bases:
//!
//! * the *total-transform* basis `(h, e_1, .., e_r)` with intersection form
//!   `diag(1, -1, .., -1)`, used for all internal arithmetic;
//! * the *strict-transform* basis `(H, E_1, .., E_r)` with
//!   `E_i = e_i - sum of e_j over immediate successors j of i`, which is how
//!   classes are usually displayed.
//!
//! Building a [`SurfaceModel`] validates the configuration: the anticanonical
//! class must be nef against every irreducible negative curve the
//! configuration produces, and `K^2` must be positive.

use serde::{Deserialize, Serialize};

use num_traits::{Signed, Zero};

use crate::curves;
use crate::error::{Error, Result};
use crate::num::{int, Int};

/// Which basis a divisor class is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    Total,
    Strict,
}

/// A point of the bubble configuration. `parent = Some(p)` means the point is
/// infinitely near `p` at the first level.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointSpec {
    pub id: u32,
    pub parent: Option<u32>,
}

/// An irreducible plane curve of the stated degree whose strict transform
/// passes simply through each listed bubble point.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Incidence {
    pub deg: u8,
    pub through: Vec<u32>,
}

/// Declarative description of a blow-up of the plane.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BubbleConfig {
    pub name: String,
    pub points: Vec<PointSpec>,
    pub incidences: Vec<Incidence>,
}

impl BubbleConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

/// Integer vector in the Picard lattice, tagged with the basis it is
/// expressed in. Index 0 is the hyperplane coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorClass {
    basis: Basis,
    coords: Vec<Int>,
}

impl DivisorClass {
    pub fn total(coords: Vec<Int>) -> Self {
        DivisorClass {
            basis: Basis::Total,
            coords,
        }
    }

    pub fn strict(coords: Vec<Int>) -> Self {
        DivisorClass {
            basis: Basis::Strict,
            coords,
        }
    }

    pub fn total_i64(coords: &[i64]) -> Self {
        DivisorClass::total(coords.iter().map(|&v| int(v)).collect())
    }

    pub fn strict_i64(coords: &[i64]) -> Self {
        DivisorClass::strict(coords.iter().map(|&v| int(v)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass::total(vec![Int::zero(); rank])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Renders as e.g. `h - e1 - e3 - e5` or `-3H + E1 + 2E2`.
    pub fn display(&self) -> String {
        let (hyp, exc) = match self.basis {
            Basis::Total => ("h", "e"),
            Basis::Strict => ("H", "E"),
        };
        let mut out = String::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sym = if i == 0 {
                hyp.to_string()
            } else {
                format!("{exc}{i}")
            };
            let mag = c.abs();
            let coeff = if mag == int(1) {
                String::new()
            } else {
                mag.to_string()
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&coeff);
            out.push_str(&sym);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Exact intersection pairing in the diagonal total-transform basis.
pub(crate) fn pair_raw(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = &a[0] * &b[0];
    for i in 1..a.len() {
        acc -= &a[i] * &b[i];
    }
    acc
}

/// Nefness verdict for a surface class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nefness {
    NotNef { witness: DivisorClass },
    Nef,
    Ample,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Positivity {
    pub nefness: Nefness,
    pub big: bool,
}

/// A validated blow-up of the plane: configuration, canonical class, and the
/// enumerated negative-curve data. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    config: BubbleConfig,
    parent: Vec<Option<usize>>,
    canonical: DivisorClass,
    minus2: Vec<DivisorClass>,
    lines: Vec<DivisorClass>,
    all_roots: Vec<DivisorClass>,
    all_minus1: Vec<DivisorClass>,
}

/// Builds and validates a surface from a configuration.
pub fn build_surface(config: BubbleConfig) -> Result<SurfaceModel> {
    SurfaceModel::build(config)
}

impl SurfaceModel {
    pub fn build(config: BubbleConfig) -> Result<Self> {
        let parent = validate_points(&config.points)?;
        let r = parent.len();
        let incidences = normalize_incidences(&config.incidences, &parent)?;

        if 9 - (r as i64) <= 0 {
            return Err(Error::NotWeakDelPezzo {
                reason: format!("K^2 = {} is not positive", 9 - r as i64),
                witness: canonical_coords(r).display(),
            });
        }

        // Irreducible negative classes forced by the configuration.
        let mut minus2: Vec<Vec<Int>> = Vec::new();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); r];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        for (i, kids) in children.iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            let mut coords = vec![Int::zero(); r + 1];
            coords[i + 1] = int(1);
            for &k in kids {
                coords[k + 1] = int(-1);
            }
            let cls = DivisorClass::total(coords.clone());
            if kids.len() >= 2 {
                return Err(Error::NotWeakDelPezzo {
                    reason: "a point has several immediate infinitely-near successors".into(),
                    witness: cls.display(),
                });
            }
            minus2.push(coords);
        }
        for inc in &incidences {
            let mut coords = vec![Int::zero(); r + 1];
            coords[0] = int(inc.deg as i64);
            for &q in &inc.through {
                coords[q as usize] = int(-1);
            }
            let k_degree = 3 * inc.deg as i64 - inc.through.len() as i64;
            if k_degree < 0 {
                return Err(Error::NotWeakDelPezzo {
                    reason: format!(
                        "declared degree-{} incidence has -K-degree {}",
                        inc.deg, k_degree
                    ),
                    witness: DivisorClass::total(coords).display(),
                });
            }
            if k_degree == 0 && !minus2.contains(&coords) {
                minus2.push(coords);
            }
            // Positive -K-degree incidences (a line through two points, a conic
            // through up to five) hold automatically and add no negative curve.
        }

        // Deterministic order, then the ADE sanity bound on pairwise products.
        minus2.sort();
        for i in 0..minus2.len() {
            for j in (i + 1)..minus2.len() {
                let p = pair_raw(&minus2[i], &minus2[j]);
                if p < Int::zero() || p > int(1) {
                    return Err(Error::NotWeakDelPezzo {
                        reason: format!(
                            "(-2)-curves {} and {} meet with multiplicity {}",
                            DivisorClass::total(minus2[i].clone()).display(),
                            DivisorClass::total(minus2[j].clone()).display(),
                            p
                        ),
                        witness: DivisorClass::total(minus2[j].clone()).display(),
                    });
                }
            }
        }

        let all_roots = curves::enumerate_lattice(r, curves::ClassKind::Root);
        let all_minus1 = curves::enumerate_lattice(r, curves::ClassKind::Minus1);

        // A (-1)-class is an irreducible curve iff it meets every irreducible
        // (-2)-curve nonnegatively.
        let lines: Vec<Vec<Int>> = all_minus1
            .iter()
            .filter(|c| minus2.iter().all(|m| pair_raw(c, m) >= Int::zero()))
            .cloned()
            .collect();

        let model = SurfaceModel {
            config: BubbleConfig {
                name: config.name,
                points: config.points,
                incidences,
            },
            parent,
            canonical: canonical_coords(r),
            minus2: minus2.into_iter().map(DivisorClass::total).collect(),
            lines: lines.into_iter().map(DivisorClass::total).collect(),
            all_roots: all_roots.into_iter().map(DivisorClass::total).collect(),
            all_minus1: all_minus1.into_iter().map(DivisorClass::total).collect(),
        };
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn config(&self) -> &BubbleConfig {
        &self.config
    }

    pub fn r(&self) -> usize {
        self.parent.len()
    }

    pub fn rank(&self) -> usize {
        self.r() + 1
    }

    pub fn degree(&self) -> i64 {
        9 - self.r() as i64
    }

    /// Immediate parent of a point (0-based), if infinitely near.
    pub fn parent_of(&self, idx: usize) -> Option<usize> {
        self.parent[idx]
    }

    pub fn is_closed_point(&self, idx: usize) -> bool {
        self.parent[idx].is_none()
    }

    pub fn irreducible_minus2(&self) -> &[DivisorClass] {
        &self.minus2
    }

    pub fn lines(&self) -> &[DivisorClass] {
        &self.lines
    }

    pub fn all_roots(&self) -> &[DivisorClass] {
        &self.all_roots
    }

    pub fn all_minus1(&self) -> &[DivisorClass] {
        &self.all_minus1
    }

    /// Every irreducible negative curve: the (-2)-curves followed by the lines.
    pub fn negative_curves(&self) -> impl Iterator<Item = &DivisorClass> {
        self.minus2.iter().chain(self.lines.iter())
    }

    pub fn canonical_class(&self, basis: Basis) -> DivisorClass {
        self.change_basis(&self.canonical, basis)
    }

    pub fn check_ambient(&self, c: &DivisorClass) -> Result<()> {
        if c.len() != self.rank() {
            return Err(Error::MismatchedAmbient);
        }
        Ok(())
    }

    pub fn to_total(&self, c: &DivisorClass) -> DivisorClass {
        self.change_basis(c, Basis::Total)
    }

    pub fn to_strict(&self, c: &DivisorClass) -> DivisorClass {
        self.change_basis(c, Basis::Strict)
    }

    /// Re-expresses a class in the requested basis; a unimodular change of
    /// coordinates, so the round trip is the identity.
    #[allow(clippy::needless_range_loop)] // coordinates recurse on parent entries
    pub fn change_basis(&self, c: &DivisorClass, target: Basis) -> DivisorClass {
        assert_eq!(c.len(), self.rank(), "class has wrong rank for surface");
        if c.basis == target {
            return c.clone();
        }
        let r = self.r();
        let mut out = vec![Int::zero(); r + 1];
        out[0] = c.coords[0].clone();
        match (c.basis, target) {
            (Basis::Total, Basis::Strict) => {
                // s_j = t_j + s_parent(j), walking parents in id order.
                for j in 1..=r {
                    let add = match self.parent[j - 1] {
                        Some(p) => out[p + 1].clone(),
                        None => Int::zero(),
                    };
                    out[j] = &c.coords[j] + add;
                }
                DivisorClass::strict(out)
            }
            (Basis::Strict, Basis::Total) => {
                // t_j = s_j - s_parent(j).
                for j in 1..=r {
                    let sub = match self.parent[j - 1] {
                        Some(p) => c.coords[p + 1].clone(),
                        None => Int::zero(),
                    };
                    out[j] = &c.coords[j] - sub;
                }
                DivisorClass::total(out)
            }
            _ => unreachable!(),
        }
    }

    /// Symmetric bilinear intersection number.
    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Int> {
        self.check_ambient(a)?;
        self.check_ambient(b)?;
        let a = self.to_total(a);
        let b = self.to_total(b);
        Ok(pair_raw(a.coords(), b.coords()))
    }

    pub fn self_intersection(&self, a: &DivisorClass) -> Result<Int> {
        self.intersect(a, a)
    }

    /// Nef / ample test against every irreducible negative curve, with the
    /// bigness flag `nef && A^2 > 0`.
    pub fn nef_status(&self, a: &DivisorClass) -> Result<Positivity> {
        self.check_ambient(a)?;
        let at = self.to_total(a);
        let mut strict = true;
        for c in self.negative_curves() {
            let p = pair_raw(at.coords(), c.coords());
            if p.is_negative() {
                return Ok(Positivity {
                    nefness: Nefness::NotNef { witness: c.clone() },
                    big: false,
                });
            }
            if p.is_zero() {
                strict = false;
            }
        }
        let sq = pair_raw(at.coords(), at.coords());
        let big = sq.is_positive();
        let nefness = if strict && big {
            Nefness::Ample
        } else {
            Nefness::Nef
        };
        Ok(Positivity { nefness, big })
    }
}

fn canonical_coords(r: usize) -> DivisorClass {
    let mut coords = vec![int(1); r + 1];
    coords[0] = int(-3);
    DivisorClass::total(coords)
}

fn validate_points(points: &[PointSpec]) -> Result<Vec<Option<usize>>> {
    let r = points.len();
    let mut parent = vec![None; r];
    for (i, p) in points.iter().enumerate() {
        if p.id as usize != i + 1 {
            return Err(Error::MalformedConfig(format!(
                "point ids must be 1-based and contiguous; found id {} at position {}",
                p.id,
                i + 1
            )));
        }
        if let Some(q) = p.parent {
            if q == 0 || q as usize >= p.id as usize {
                return Err(Error::MalformedConfig(format!(
                    "parent {} of point {} does not strictly precede it",
                    q, p.id
                )));
            }
            parent[i] = Some(q as usize - 1);
        }
    }
    Ok(parent)
}

/// Checks incidence well-formedness, closes each under parents implicitly
/// required (a curve through an infinitely near point passes through its
/// parent), and merges incidences that describe the same curve.
fn normalize_incidences(
    incidences: &[Incidence],
    parent: &[Option<usize>],
) -> Result<Vec<Incidence>> {
    let r = parent.len();
    let mut work: Vec<(u8, Vec<u32>)> = Vec::new();
    for inc in incidences {
        if inc.deg != 1 && inc.deg != 2 {
            return Err(Error::MalformedConfig(format!(
                "incidence degree must be 1 or 2, found {}",
                inc.deg
            )));
        }
        let mut through = inc.through.clone();
        through.sort_unstable();
        let before = through.len();
        through.dedup();
        if through.len() != before {
            return Err(Error::MalformedConfig(
                "incidence lists a point twice".into(),
            ));
        }
        if through.iter().any(|&q| q == 0 || q as usize > r) {
            return Err(Error::MalformedConfig(
                "incidence references an unknown point id".into(),
            ));
        }
        if inc.deg == 1 && through.len() < 2 {
            return Err(Error::MalformedConfig(
                "a declared line must pass through at least two bubble points".into(),
            ));
        }
        for &q in &through {
            if let Some(p) = parent[q as usize - 1] {
                if !through.contains(&(p as u32 + 1)) {
                    return Err(Error::MalformedConfig(format!(
                        "incidence passes through point {} but not its parent {}",
                        q,
                        p + 1
                    )));
                }
            }
        }
        work.push((inc.deg, through));
    }

    // Two distinct lines share at most one point; two distinct conics at most
    // four. Incidences exceeding that bound describe one curve and are merged.
    loop {
        let mut merged = false;
        'outer: for i in 0..work.len() {
            for j in (i + 1)..work.len() {
                if work[i].0 != work[j].0 {
                    continue;
                }
                let shared = work[i].1.iter().filter(|q| work[j].1.contains(q)).count();
                let bound = if work[i].0 == 1 { 2 } else { 5 };
                if shared >= bound {
                    let (deg, other) = work.remove(j);
                    debug_assert_eq!(deg, work[i].0);
                    let mut union = work[i].1.clone();
                    union.extend(other);
                    union.sort_unstable();
                    union.dedup();
                    work[i].1 = union;
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    work.sort();
    work.dedup();
    Ok(work
        .into_iter()
        .map(|(deg, through)| Incidence { deg, through })
        .collect())
}
