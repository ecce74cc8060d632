//! Negative-curve enumeration, ADE recognition, and the effectivity oracle.
//!
//! The lattice scans are exhaustive: a class `c = d*h + sum c_i e_i` with
//! `(c^2, c.K) = (-1, -1)` or `(-2, 0)` satisfies Cauchy-Schwarz bounds that
//! confine `d` to a short range for `r <= 8`, and the coordinate recursion
//! prunes on the remaining sum and sum of squares.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::num::{int, Int, Rat};
use crate::picard::{pair_raw, DivisorClass, SurfaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    /// `c^2 = -1`, `c.K = -1`.
    Minus1,
    /// `c^2 = -2`, `c.K = 0`.
    Root,
}

/// All lattice classes of the requested kind on an `r`-point blow-up, in
/// lexicographic coordinate order. Roots come in `+-` pairs.
pub(crate) fn enumerate_lattice(r: usize, kind: ClassKind) -> Vec<Vec<Int>> {
    assert!(r <= 8, "lattice scan requires r <= 8");
    let mut out = Vec::new();
    // c.K = -3d - sum(c_i); c^2 = d^2 - sum(c_i^2).
    for d in -4i64..=7 {
        let (sum, sq) = match kind {
            ClassKind::Minus1 => (1 - 3 * d, d * d + 1),
            ClassKind::Root => (-3 * d, d * d + 2),
        };
        if sq < 0 {
            continue;
        }
        let mut prefix = vec![d];
        extend_coords(&mut prefix, r, sum, sq, &mut out);
    }
    out.into_iter()
        .map(|v| v.into_iter().map(int).collect())
        .collect()
}

fn extend_coords(prefix: &mut Vec<i64>, r: usize, sum: i64, sq: i64, out: &mut Vec<Vec<i64>>) {
    let left = r + 1 - prefix.len();
    if left == 0 {
        if sum == 0 && sq == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if sq < 0 {
        return;
    }
    // Cauchy-Schwarz: the remaining coordinates can reach `sum` only if
    // sum^2 <= left * sq.
    if sum * sum > (left as i64) * sq {
        return;
    }
    let bound = isqrt(sq);
    for c in -bound..=bound {
        prefix.push(c);
        extend_coords(prefix, r, sum - c, sq - c * c, out);
        prefix.pop();
    }
}

fn isqrt(v: i64) -> i64 {
    let mut x = (v as f64).sqrt() as i64;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

/// Full list of lattice classes of a kind, from the model's cache.
pub fn enumerate_classes(s: &SurfaceModel, kind: ClassKind) -> &[DivisorClass] {
    match kind {
        ClassKind::Minus1 => s.all_minus1(),
        ClassKind::Root => s.all_roots(),
    }
}

/// Irreducible (-2)-curves of the configuration: strict exceptional classes of
/// points with an immediate successor, and declared incidences of K-degree 0.
pub fn irreducible_minus2(s: &SurfaceModel) -> &[DivisorClass] {
    s.irreducible_minus2()
}

/// Irreducible (-1)-curves: the (-1)-classes meeting every irreducible
/// (-2)-curve nonnegatively.
pub fn lines(s: &SurfaceModel) -> &[DivisorClass] {
    s.lines()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdeType {
    A(usize),
    D(usize),
    E(usize),
}

impl AdeType {
    pub fn rank(&self) -> usize {
        match *self {
            AdeType::A(n) | AdeType::D(n) | AdeType::E(n) => n,
        }
    }

    pub fn positive_root_count(&self) -> usize {
        match *self {
            AdeType::A(n) => n * (n + 1) / 2,
            AdeType::D(n) => n * (n - 1),
            AdeType::E(6) => 36,
            AdeType::E(7) => 63,
            AdeType::E(8) => 120,
            AdeType::E(n) => panic!("E{n} is not a Dynkin type"),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AdeType::A(n) => format!("A{n}"),
            AdeType::D(n) => format!("D{n}"),
            AdeType::E(n) => format!("E{n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DynkinComponent {
    pub kind: AdeType,
    pub members: Vec<DivisorClass>,
}

#[derive(Debug, Clone)]
pub struct DynkinReport {
    pub components: Vec<DynkinComponent>,
    pub line_count: usize,
}

impl DynkinReport {
    /// `A3+2A1` style label; `empty` when there are no (-2)-curves.
    pub fn label(&self) -> String {
        if self.components.is_empty() {
            return "empty".into();
        }
        let mut counts: Vec<(AdeType, usize)> = Vec::new();
        for c in &self.components {
            match counts.iter_mut().find(|(k, _)| *k == c.kind) {
                Some((_, n)) => *n += 1,
                None => counts.push((c.kind, 1)),
            }
        }
        counts.sort_by_key(|(k, _)| {
            let letter = match k {
                AdeType::A(_) => 0,
                AdeType::D(_) => 1,
                AdeType::E(_) => 2,
            };
            (letter, usize::MAX - k.rank())
        });
        counts
            .iter()
            .map(|(k, n)| {
                if *n == 1 {
                    k.label()
                } else {
                    format!("{n}{}", k.label())
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn minus2_count(&self) -> usize {
        self.components.iter().map(|c| c.kind.rank()).sum()
    }
}

/// Recognizes the ADE type of the (-2)-configuration by explicit diagram
/// shape: components must be trees with at most one branch node, and the arm
/// lengths decide between `A`, `D`, and `E`.
pub fn dynkin_type(s: &SurfaceModel) -> Result<DynkinReport> {
    let nodes = s.irreducible_minus2();
    let n = nodes.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pair_raw(nodes[i].coords(), nodes[j].coords());
            if p == int(1) {
                adj[i].push(j);
                adj[j].push(i);
            } else if !p.is_zero() {
                return Err(Error::NotAde(format!(
                    "{} . {} = {}",
                    nodes[i].display(),
                    nodes[j].display(),
                    p
                )));
            }
        }
    }

    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        let kind = classify_component(&comp, &adj)?;
        components.push(DynkinComponent {
            kind,
            members: comp.iter().map(|&i| nodes[i].clone()).collect(),
        });
    }
    components.sort_by(|a, b| {
        (b.kind.rank(), a.kind.label())
            .partial_cmp(&(a.kind.rank(), b.kind.label()))
            .unwrap()
    });
    Ok(DynkinReport {
        components,
        line_count: s.lines().len(),
    })
}

fn classify_component(comp: &[usize], adj: &[Vec<usize>]) -> Result<AdeType> {
    let n = comp.len();
    let edge_count: usize = comp
        .iter()
        .map(|&v| adj[v].iter().filter(|w| comp.contains(w)).count())
        .sum::<usize>()
        / 2;
    if edge_count != n - 1 {
        return Err(Error::NotAde("component contains a cycle".into()));
    }
    let degree = |v: usize| adj[v].len();
    if comp.iter().any(|&v| degree(v) > 3) {
        return Err(Error::NotAde("node of degree > 3".into()));
    }
    let branches: Vec<usize> = comp.iter().copied().filter(|&v| degree(v) == 3).collect();
    match branches.len() {
        0 => Ok(AdeType::A(n)),
        1 => {
            let center = branches[0];
            let mut arms: Vec<usize> = adj[center]
                .iter()
                .map(|&start| {
                    let mut len = 1;
                    let mut prev = center;
                    let mut cur = start;
                    loop {
                        let next: Vec<usize> =
                            adj[cur].iter().copied().filter(|&w| w != prev).collect();
                        match next.as_slice() {
                            [] => break,
                            [w] => {
                                prev = cur;
                                cur = *w;
                                len += 1;
                            }
                            _ => unreachable!("second branch node was excluded above"),
                        }
                    }
                    len
                })
                .collect();
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, _] => Ok(AdeType::D(n)),
                [1, 2, 2] => Ok(AdeType::E(6)),
                [1, 2, 3] => Ok(AdeType::E(7)),
                [1, 2, 4] => Ok(AdeType::E(8)),
                other => Err(Error::NotAde(format!("branch arms {other:?}"))),
            }
        }
        _ => Err(Error::NotAde("two branch nodes in one component".into())),
    }
}

/// Nonnegative rational combination over a fixed generator menu.
#[derive(Debug, Clone)]
pub struct EffectiveWitness {
    pub terms: Vec<(DivisorClass, Rat)>,
}

impl EffectiveWitness {
    pub fn empty() -> Self {
        EffectiveWitness { terms: Vec::new() }
    }

    /// Recombines to the target, exactly.
    pub fn verify(&self, target: &[Rat]) -> bool {
        let mut acc = vec![Rat::zero(); target.len()];
        for (cls, coeff) in &self.terms {
            if cls.coords().len() != target.len() {
                return false;
            }
            for (a, c) in acc.iter_mut().zip(cls.coords()) {
                *a += coeff * Rat::from_integer(c.clone());
            }
        }
        acc.as_slice() == target
    }
}

/// Generator menu of the effectivity oracle: every irreducible negative
/// curve, the hyperplane class, lines through one point, and lines through
/// each pair of bubble points.
pub fn effectivity_menu(s: &SurfaceModel) -> Vec<DivisorClass> {
    let r = s.r();
    let mut menu: Vec<DivisorClass> = s.negative_curves().cloned().collect();
    let mut h = vec![Int::zero(); r + 1];
    h[0] = int(1);
    menu.push(DivisorClass::total(h));
    for i in 1..=r {
        let mut c = vec![Int::zero(); r + 1];
        c[0] = int(1);
        c[i] = int(-1);
        menu.push(DivisorClass::total(c));
        for j in (i + 1)..=r {
            let mut c = vec![Int::zero(); r + 1];
            c[0] = int(1);
            c[i] = int(-1);
            c[j] = int(-1);
            menu.push(DivisorClass::total(c));
        }
    }
    menu.sort_by(|a, b| a.coords().cmp(b.coords()));
    menu.dedup();
    menu
}

/// Nonnegative decomposition of an integral class over the default menu.
pub fn decompose_effective(s: &SurfaceModel, d: &DivisorClass) -> Option<EffectiveWitness> {
    let dt = s.to_total(d);
    let target: Vec<Rat> = dt
        .coords()
        .iter()
        .map(|c| Rat::from_integer(c.clone()))
        .collect();
    decompose_with_menu(&target, &effectivity_menu(s))
}

/// Exact-LP decomposition of a rational target over an explicit menu.
pub fn decompose_with_menu(target: &[Rat], menu: &[DivisorClass]) -> Option<EffectiveWitness> {
    let rank = target.len();
    debug_assert!(menu.iter().all(|m| m.coords().len() == rank));
    let a: Vec<Vec<Rat>> = (0..rank)
        .map(|i| {
            menu.iter()
                .map(|m| Rat::from_integer(m.coords()[i].clone()))
                .collect()
        })
        .collect();
    match lp_solve(&LpProblem::new(a, target.to_vec())) {
        LpOutcome::Feasible(x) => {
            let witness = EffectiveWitness {
                terms: menu
                    .iter()
                    .zip(&x)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect(),
            };
            debug_assert!(witness.verify(target));
            Some(witness)
        }
        LpOutcome::Infeasible => None,
    }
}
