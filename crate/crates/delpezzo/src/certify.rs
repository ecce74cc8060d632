//! Exact certificates of bigness and non-bigness of the tangent bundle.
//!
//! A *non-bigness* certificate is a nonnegative combination of total dual
//! VMRT classes summing to `k zeta + Pi*(effective)`. A *bigness* certificate
//! exhibits `m zeta` as a strictly positive combination of effective classes
//! on `P(T_S)` whose span has full rank `r + 2`, so the tautological class
//! lies in the interior of the effective cone. The *orbifold* route instead
//! shows `m zeta - Pi*D` effective for `D` the union of (-2)-curves and
//! checks that the anticanonical model has positive second orbifold Segre
//! number.
//!
//! Verifiers recompute every claimed VMRT class from its pencil and accept
//! nothing on faith; searchers only return certificates that re-verify.

use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Serialize};

use crate::curves::{decompose_effective, effectivity_menu, EffectiveWitness};
use crate::error::{Error, Result};
use crate::exec;
use crate::fibration::{pencil, pencil_from_line, vmrt_class, PTClass, PencilSpec};
use crate::linalg::rank_int;
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::num::{denominator_lcm, format_rat, parse_rat, Int, Rat};
use crate::orbifold::orbifold_invariants;
use crate::picard::{DivisorClass, SurfaceModel};

/// How a VMRT term's pencil was specified; enough to recompute the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PencilRef {
    LineThrough(usize),
    ConicThrough(Vec<usize>),
    FromLine(DivisorClass),
}

impl PencilRef {
    pub fn resolve(&self, s: &SurfaceModel) -> Result<crate::fibration::PencilClass> {
        match self {
            PencilRef::LineThrough(p) => pencil(s, &PencilSpec::LineThrough(*p)),
            PencilRef::ConicThrough(ids) => pencil(s, &PencilSpec::ConicThrough(ids.clone())),
            PencilRef::FromLine(l) => pencil_from_line(s, l),
        }
    }

    fn flag(&self) -> String {
        match self {
            PencilRef::LineThrough(p) => format!("vmrt:line:{p}"),
            PencilRef::ConicThrough(ids) => format!(
                "vmrt:conic:{}",
                ids.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            PencilRef::FromLine(l) => format!(
                "vmrt:from-line:{}",
                l.coords()
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    fn parse(flag: &str) -> Result<Self> {
        let rest = flag
            .strip_prefix("vmrt:")
            .ok_or_else(|| Error::InvalidCertificate(format!("unknown flag {flag}")))?;
        if let Some(p) = rest.strip_prefix("line:") {
            let id: usize = p
                .parse()
                .map_err(|_| Error::InvalidCertificate(format!("bad pencil flag {flag}")))?;
            return Ok(PencilRef::LineThrough(id));
        }
        if let Some(ids) = rest.strip_prefix("conic:") {
            let ids: Vec<usize> = ids
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidCertificate(format!("bad pencil flag {flag}")))?;
            return Ok(PencilRef::ConicThrough(ids));
        }
        if let Some(coords) = rest.strip_prefix("from-line:") {
            let coords: Vec<i64> = coords
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidCertificate(format!("bad pencil flag {flag}")))?;
            return Ok(PencilRef::FromLine(DivisorClass::total_i64(&coords)));
        }
        Err(Error::InvalidCertificate(format!("unknown flag {flag}")))
    }
}

/// Effectivity evidence attached to a certificate term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// The class is the total dual VMRT of this pencil.
    Vmrt(PencilRef),
    /// Pullback of an effective divisor class on the surface.
    Pullback,
    /// Produced by the blow-up transfer rule; not re-verifiable from file
    /// data alone, so only constructed programmatically.
    Transfer { detail: String },
}

#[derive(Debug, Clone)]
pub struct CertTerm {
    pub class: PTClass,
    pub coeff: Rat,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    NonBig,
    Big,
    BigOrbifold,
}

impl CertKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertKind::NonBig => "nonbig",
            CertKind::Big => "big",
            CertKind::BigOrbifold => "big-orbifold",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nonbig" => Ok(CertKind::NonBig),
            "big" => Ok(CertKind::Big),
            "big-orbifold" => Ok(CertKind::BigOrbifold),
            other => Err(Error::InvalidCertificate(format!(
                "unknown certificate kind {other}"
            ))),
        }
    }
}

/// A verifiable witness: terms, the zeta multiple, and for non-bigness the
/// effective residual.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub kind: CertKind,
    pub surface: String,
    pub terms: Vec<CertTerm>,
    pub k_or_m: Rat,
    pub residual: DivisorClass,
}

#[derive(Debug, Clone, Default)]
pub struct AcceptInfo {
    pub residual_witness: Option<EffectiveWitness>,
    pub rank: Option<usize>,
    pub s2: Option<Rat>,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Accept(AcceptInfo),
    Reject { reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Accept(_) => None,
            Verdict::Reject { reason } => Some(reason),
        }
    }
}

fn reject(reason: impl Into<String>) -> Verdict {
    Verdict::Reject {
        reason: reason.into(),
    }
}

/// Sum of `coeff * (zeta, base)` over terms, as exact rational vectors.
fn term_sum(terms: &[CertTerm], rank: usize) -> (Rat, Vec<Rat>) {
    let mut zeta = Rat::zero();
    let mut base = vec![Rat::zero(); rank];
    for t in terms {
        zeta += &t.coeff * &t.class.zeta;
        for (b, c) in base.iter_mut().zip(t.class.base.coords()) {
            *b += &t.coeff * Rat::from_integer(c.clone());
        }
    }
    (zeta, base)
}

/// Recomputes a claimed VMRT class from its pencil and compares exactly.
fn check_vmrt_term(s: &SurfaceModel, term: &CertTerm) -> std::result::Result<(), String> {
    let Evidence::Vmrt(ref pref) = term.evidence else {
        return Err("term is not VMRT-flagged".into());
    };
    let p = pref
        .resolve(s)
        .map_err(|e| format!("pencil does not validate: {e}"))?;
    let v = vmrt_class(s, &p).map_err(|e| format!("vmrt recomputation failed: {e}"))?;
    if v.zeta != term.class.zeta || v.base != s.to_total(&term.class.base) {
        return Err(format!(
            "stated class {} differs from recomputed {}",
            term.class.display(s, crate::picard::Basis::Total),
            v.display(s, crate::picard::Basis::Total)
        ));
    }
    Ok(())
}

/// Non-bigness rule: every term must be a genuine total dual VMRT with
/// zeta-coefficient one, the combination must equal `k zeta + Pi*(residual)`
/// exactly, and the residual must decompose over the effectivity menu.
pub fn verify_nonbig(s: &SurfaceModel, cert: &Certificate) -> Result<Verdict> {
    s.check_ambient(&cert.residual)?;
    if !cert.k_or_m.is_positive() {
        return Ok(reject("k must be positive"));
    }
    if cert.terms.is_empty() {
        return Ok(reject("no terms"));
    }
    if cert.terms.iter().any(|t| t.class.base.len() != s.rank()) {
        return Ok(reject("term base has the wrong rank for this surface"));
    }
    for t in &cert.terms {
        if t.coeff.is_negative() {
            return Ok(reject("negative coefficient"));
        }
        if t.class.zeta != Rat::one() || !t.class.is_vmrt {
            return Ok(reject(
                "non-bigness certificates admit only total dual VMRT terms with zeta-coefficient 1",
            ));
        }
        if let Err(e) = check_vmrt_term(s, t) {
            return Ok(reject(e));
        }
    }
    let (zeta, base) = term_sum(&cert.terms, s.rank());
    if zeta != cert.k_or_m {
        return Ok(reject(format!(
            "zeta-coefficients sum to {}, stated k is {}",
            format_rat(&zeta),
            format_rat(&cert.k_or_m)
        )));
    }
    let residual = s.to_total(&cert.residual);
    let stated: Vec<Rat> = residual
        .coords()
        .iter()
        .map(|c| Rat::from_integer(c.clone()))
        .collect();
    if base != stated {
        return Ok(reject("terms do not sum to k zeta + Pi*(residual)"));
    }
    if residual.is_zero() {
        return Ok(Verdict::Accept(AcceptInfo::default()));
    }
    match decompose_effective(s, &residual) {
        Some(w) => Ok(Verdict::Accept(AcceptInfo {
            residual_witness: Some(w),
            ..AcceptInfo::default()
        })),
        None => Ok(reject("residual has no effectivity witness")),
    }
}

fn check_effectivity(s: &SurfaceModel, term: &CertTerm) -> std::result::Result<(), String> {
    match &term.evidence {
        Evidence::Vmrt(_) => check_vmrt_term(s, term),
        Evidence::Pullback => {
            if !term.class.zeta.is_zero() {
                return Err("pullback term carries a zeta-coefficient".into());
            }
            let base = s.to_total(&term.class.base);
            match decompose_effective(s, &base) {
                Some(_) => Ok(()),
                None => Err(format!(
                    "pullback base {} has no effectivity witness",
                    base.display()
                )),
            }
        }
        Evidence::Transfer { .. } => {
            Err("transfer-derived evidence cannot be re-verified from certificate data".into())
        }
    }
}

fn generator_rank(s: &SurfaceModel, terms: &[CertTerm]) -> usize {
    let rows: Vec<Vec<Int>> = terms
        .iter()
        .map(|t| {
            let l = denominator_lcm(std::iter::once(&t.class.zeta));
            let mut row = vec![(&t.class.zeta * Rat::from_integer(l.clone())).to_integer()];
            let base = s.to_total(&t.class.base);
            row.extend(base.coords().iter().map(|c| c * &l));
            row
        })
        .collect();
    rank_int(&rows)
}

/// Interior-of-cone check: strictly positive coefficients, exact equality to
/// `m zeta`, effectivity evidence on every generator, and full generator rank
/// `r + 2`.
pub fn verify_big_interior(s: &SurfaceModel, cert: &Certificate) -> Result<Verdict> {
    if !cert.k_or_m.is_positive() {
        return Ok(reject("m must be positive"));
    }
    if cert.terms.is_empty() {
        return Ok(reject("no terms"));
    }
    if !cert.residual.is_zero() {
        return Ok(reject("bigness certificates carry no residual"));
    }
    if cert.terms.iter().any(|t| t.class.base.len() != s.rank()) {
        return Ok(reject("term base has the wrong rank for this surface"));
    }
    for t in &cert.terms {
        if !t.coeff.is_positive() {
            return Ok(reject(
                "interior certificates need strictly positive coefficients",
            ));
        }
        if let Err(e) = check_effectivity(s, t) {
            return Ok(reject(e));
        }
    }
    let (zeta, base) = term_sum(&cert.terms, s.rank());
    if zeta != cert.k_or_m || base.iter().any(|c| !c.is_zero()) {
        return Ok(reject("terms do not sum to m zeta"));
    }
    let rank = generator_rank(s, &cert.terms);
    if rank != s.rank() + 1 {
        return Ok(reject(format!(
            "generator rank {} is below the Picard rank {} of P(T_S)",
            rank,
            s.rank() + 1
        )));
    }
    Ok(Verdict::Accept(AcceptInfo {
        rank: Some(rank),
        ..AcceptInfo::default()
    }))
}

/// Orbifold route: the combination must recombine to `m zeta - Pi*D` for `D`
/// the sum of all irreducible (-2)-curves, and the anticanonical model must
/// have positive second orbifold Segre number.
pub fn verify_big_orbifold(s: &SurfaceModel, cert: &Certificate) -> Result<Verdict> {
    if !cert.k_or_m.is_positive() {
        return Ok(reject("m must be positive"));
    }
    if !cert.residual.is_zero() {
        return Ok(reject("bigness certificates carry no residual"));
    }
    if cert.terms.iter().any(|t| t.class.base.len() != s.rank()) {
        return Ok(reject("term base has the wrong rank for this surface"));
    }
    for t in &cert.terms {
        if t.coeff.is_negative() {
            return Ok(reject("negative coefficient"));
        }
        if let Err(e) = check_effectivity(s, t) {
            return Ok(reject(e));
        }
    }
    let mut d = vec![Int::zero(); s.rank()];
    for c in s.irreducible_minus2() {
        for (a, v) in d.iter_mut().zip(c.coords()) {
            *a += v;
        }
    }
    let (zeta, base) = term_sum(&cert.terms, s.rank());
    if zeta != cert.k_or_m {
        return Ok(reject("zeta-coefficients do not sum to m"));
    }
    let expected: Vec<Rat> = d.iter().map(|c| Rat::from_integer(-c.clone())).collect();
    if base != expected {
        return Ok(reject(
            "terms do not recombine to m zeta - Pi*(sum of (-2)-curves)",
        ));
    }
    let inv = orbifold_invariants(s)?;
    if !inv.s2.is_positive() {
        return Ok(reject(format!(
            "second orbifold Segre number {} is not positive",
            format_rat(&inv.s2)
        )));
    }
    Ok(Verdict::Accept(AcceptInfo {
        s2: Some(inv.s2),
        ..AcceptInfo::default()
    }))
}

pub fn verify(s: &SurfaceModel, cert: &Certificate) -> Result<Verdict> {
    match cert.kind {
        CertKind::NonBig => verify_nonbig(s, cert),
        CertKind::Big => verify_big_interior(s, cert),
        CertKind::BigOrbifold => verify_big_orbifold(s, cert),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    Plain,
    KVersion(u32),
}

/// Blow-up transfer of an effective class on `P(T_Z)` to `P(T_X)` where `X`
/// is a blow-up of `Z`; the source class must have zeta-coefficient 1 and the
/// exceptional class must be supported on the new points.
///
/// The plain rule gives `zeta + Pi*f*D + Pi*E`; the `k` form, available under
/// a section-growth hypothesis asserted by the caller, gives
/// `k zeta + k Pi*f*D + (k-1) Pi*E`.
pub fn blowup_transfer(
    source: &PTClass,
    exceptional: &DivisorClass,
    mode: TransferMode,
) -> Result<(PTClass, Evidence)> {
    if source.zeta != Rat::one() {
        return Err(Error::InvalidCertificate(
            "transfer source must have zeta-coefficient 1".into(),
        ));
    }
    if !(source.is_vmrt || source.is_pullback_effective) {
        return Err(Error::InvalidCertificate(
            "transfer source carries no effectivity evidence".into(),
        ));
    }
    let z_rank = source.base.len();
    let x_rank = exceptional.len();
    if x_rank <= z_rank {
        return Err(Error::InvalidCertificate(
            "no declared blow-down relation: the target has no new points".into(),
        ));
    }
    let exc = exceptional.coords();
    if !exc[0].is_zero() || exc[1..z_rank].iter().any(|c| !c.is_zero()) {
        return Err(Error::InvalidCertificate(
            "exceptional class must be supported on the blown-up points".into(),
        ));
    }
    // Plain: zeta + Pi*f*D + Pi*E. K-version: k zeta + k Pi*f*D + (k-1) Pi*E.
    let (k, exc_coeff) = match mode {
        TransferMode::Plain => (1u32, 1i64),
        TransferMode::KVersion(k) if k >= 1 => (k, k as i64 - 1),
        TransferMode::KVersion(_) => {
            return Err(Error::InvalidCertificate("k must be positive".into()))
        }
    };
    let mut base = vec![Int::zero(); x_rank];
    for (i, c) in source.base.coords().iter().enumerate() {
        base[i] = c * Int::from(k);
    }
    for (b, e) in base.iter_mut().zip(exc) {
        *b += e * Int::from(exc_coeff);
    }
    let class = PTClass {
        zeta: Rat::from_integer(Int::from(k)),
        base: DivisorClass::total(base),
        is_vmrt: false,
        is_pullback_effective: false,
    };
    let evidence = Evidence::Transfer {
        detail: format!("k={k} transfer along {}", exceptional.display()),
    };
    Ok((class, evidence))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    NonBig,
    Big,
}

/// Generator menu for the searcher.
#[derive(Debug, Clone)]
pub struct SearchMenu {
    pub vmrts: Vec<(PTClass, PencilRef)>,
    pub pullbacks: Vec<DivisorClass>,
}

/// Default menu: VMRTs of line pencils through closed points, conic pencils
/// through four-point subsets, line-residual pencils on degree-3 surfaces,
/// plus pullbacks of every irreducible negative curve.
pub fn default_menu(s: &SurfaceModel) -> SearchMenu {
    let r = s.r();
    let mut vmrts: Vec<(PTClass, PencilRef)> = Vec::new();
    let mut seen: Vec<DivisorClass> = Vec::new();
    let mut push = |p: crate::fibration::PencilClass, pref: PencilRef, s: &SurfaceModel| {
        if seen.contains(&p.class) {
            return;
        }
        if let Ok(v) = vmrt_class(s, &p) {
            seen.push(p.class.clone());
            vmrts.push((v, pref));
        }
    };
    for id in 1..=r {
        if !s.is_closed_point(id - 1) {
            continue;
        }
        if let Ok(p) = pencil(s, &PencilSpec::LineThrough(id)) {
            push(p, PencilRef::LineThrough(id), s);
        }
    }
    for subset in four_subsets(r) {
        if let Ok(p) = pencil(s, &PencilSpec::ConicThrough(subset.clone())) {
            push(p, PencilRef::ConicThrough(subset), s);
        }
    }
    if s.degree() == 3 {
        for l in s.lines() {
            if let Ok(p) = pencil_from_line(s, l) {
                push(p, PencilRef::FromLine(l.clone()), s);
            }
        }
    }
    SearchMenu {
        vmrts,
        pullbacks: s.negative_curves().cloned().collect(),
    }
}

fn four_subsets(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r < 4 {
        return out;
    }
    for a in 1..=r {
        for b in (a + 1)..=r {
            for c in (b + 1)..=r {
                for d in (c + 1)..=r {
                    out.push(vec![a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Searches for a verifier-accepted certificate. `None` is a valid answer and
/// proves nothing.
pub fn search_certificate(
    s: &SurfaceModel,
    mode: SearchMode,
    menu: Option<SearchMenu>,
) -> Result<Option<Certificate>> {
    let menu = menu.unwrap_or_else(|| default_menu(s));
    match mode {
        SearchMode::NonBig => search_nonbig(s, &menu),
        SearchMode::Big => search_big(s, &menu),
    }
}

fn rat_coords(c: &DivisorClass) -> Vec<Rat> {
    c.coords()
        .iter()
        .map(|v| Rat::from_integer(v.clone()))
        .collect()
}

/// Nonnegative `x` over the VMRT menu with `sum x = 1` and
/// `sum x_i base_i` effective: an exact LP over the combined system.
fn search_nonbig(s: &SurfaceModel, menu: &SearchMenu) -> Result<Option<Certificate>> {
    let rank = s.rank();
    let nv = menu.vmrts.len();
    if nv == 0 {
        return Ok(None);
    }
    let eff = effectivity_menu(s);
    let ne = eff.len();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    // Normalization k = 1.
    let mut norm = vec![Rat::zero(); nv + ne];
    for v in norm.iter_mut().take(nv) {
        *v = Rat::one();
    }
    rows.push(norm);
    rhs.push(Rat::one());
    // Base balance: sum x_i b_i - sum y_g g = 0.
    for coord in 0..rank {
        let mut row = vec![Rat::zero(); nv + ne];
        for (i, (v, _)) in menu.vmrts.iter().enumerate() {
            row[i] = Rat::from_integer(v.base.coords()[coord].clone());
        }
        for (g, cls) in eff.iter().enumerate() {
            row[nv + g] = -Rat::from_integer(cls.coords()[coord].clone());
        }
        rows.push(row);
        rhs.push(Rat::zero());
    }
    let LpOutcome::Feasible(x) = lp_solve(&LpProblem::new(rows, rhs)) else {
        return Ok(None);
    };

    // Scale to clear denominators.
    let scale = Rat::from_integer(denominator_lcm(x.iter().take(nv)));
    let mut terms = Vec::new();
    let mut residual = vec![Rat::zero(); rank];
    for (i, (v, pref)) in menu.vmrts.iter().enumerate() {
        let coeff = &x[i] * &scale;
        if coeff.is_zero() {
            continue;
        }
        for (acc, b) in residual.iter_mut().zip(v.base.coords()) {
            *acc += &coeff * Rat::from_integer(b.clone());
        }
        terms.push(CertTerm {
            class: v.clone(),
            coeff,
            evidence: Evidence::Vmrt(pref.clone()),
        });
    }
    let res_scale = denominator_lcm(residual.iter());
    let (terms, residual, k) = if res_scale.is_one() {
        (
            terms,
            residual
                .iter()
                .map(|c| c.to_integer())
                .collect::<Vec<Int>>(),
            scale.clone(),
        )
    } else {
        // Residual still fractional: scale everything once more.
        let f = Rat::from_integer(res_scale);
        (
            terms
                .into_iter()
                .map(|mut t| {
                    t.coeff *= &f;
                    t
                })
                .collect(),
            residual.iter().map(|c| (c * &f).to_integer()).collect(),
            &scale * &f,
        )
    };
    let cert = Certificate {
        kind: CertKind::NonBig,
        surface: s.name().to_string(),
        terms,
        k_or_m: k,
        residual: DivisorClass::total(residual),
    };
    match verify_nonbig(s, &cert)? {
        Verdict::Accept(_) => Ok(Some(cert)),
        Verdict::Reject { reason } => Err(Error::InvalidCertificate(format!(
            "searcher produced a certificate the verifier rejects: {reason}"
        ))),
    }
}

/// For each generator, tests feasibility of a combination using it with
/// coefficient at least one; the sum of all feasible solutions has maximal
/// support, and the certificate exists iff that support spans rank `r + 2`.
fn search_big(s: &SurfaceModel, menu: &SearchMenu) -> Result<Option<Certificate>> {
    let rank = s.rank();
    let nv = menu.vmrts.len();
    let np = menu.pullbacks.len();
    let n = nv + np;
    if nv == 0 {
        return Ok(None);
    }
    let bases: Vec<Vec<Rat>> = menu
        .vmrts
        .iter()
        .map(|(v, _)| rat_coords(&v.base))
        .chain(menu.pullbacks.iter().map(rat_coords))
        .collect();

    // Shared constraint rows: base balance and zeta mass >= 1 (via slack).
    let nvars = n + 1;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for coord in 0..rank {
        let mut row = vec![Rat::zero(); nvars];
        for (j, b) in bases.iter().enumerate() {
            row[j] = b[coord].clone();
        }
        rows.push(row);
        rhs.push(Rat::zero());
    }
    let mut mass = vec![Rat::zero(); nvars];
    for v in mass.iter_mut().take(nv) {
        *v = Rat::one();
    }
    mass[n] = -Rat::one();
    rows.push(mass);
    rhs.push(Rat::one());

    let solutions: Vec<Option<Vec<Rat>>> = exec::map_indexed(n, |g| {
        let mut lower = vec![Rat::zero(); nvars];
        lower[g] = Rat::one();
        let p = LpProblem::new(rows.clone(), rhs.clone()).with_lower(lower);
        match lp_solve(&p) {
            LpOutcome::Feasible(x) => Some(x),
            LpOutcome::Infeasible => None,
        }
    });

    let mut total = vec![Rat::zero(); n];
    let mut any = false;
    for sol in solutions.into_iter().flatten() {
        any = true;
        for (t, v) in total.iter_mut().zip(&sol) {
            *t += v;
        }
    }
    if !any {
        return Ok(None);
    }

    let mut terms = Vec::new();
    for (j, coeff) in total.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let (class, evidence) = if j < nv {
            (
                menu.vmrts[j].0.clone(),
                Evidence::Vmrt(menu.vmrts[j].1.clone()),
            )
        } else {
            (
                PTClass::pullback(menu.pullbacks[j - nv].clone(), true),
                Evidence::Pullback,
            )
        };
        terms.push(CertTerm {
            class,
            coeff: coeff.clone(),
            evidence,
        });
    }
    if generator_rank(s, &terms) != rank + 1 {
        return Ok(None);
    }
    let scale = Rat::from_integer(denominator_lcm(terms.iter().map(|t| &t.coeff)));
    let mut m = Rat::zero();
    let terms: Vec<CertTerm> = terms
        .into_iter()
        .map(|mut t| {
            t.coeff *= &scale;
            m += &t.coeff * &t.class.zeta;
            t
        })
        .collect();
    let cert = Certificate {
        kind: CertKind::Big,
        surface: s.name().to_string(),
        terms,
        k_or_m: m,
        residual: DivisorClass::zero(rank),
    };
    match verify_big_interior(s, &cert)? {
        Verdict::Accept(_) => Ok(Some(cert)),
        Verdict::Reject { reason } => Err(Error::InvalidCertificate(format!(
            "searcher produced a certificate the verifier rejects: {reason}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// JSON serialization of certificates.

#[derive(Serialize, Deserialize)]
struct CertTermFile {
    zeta: String,
    base: Vec<i64>,
    coeff: String,
    flags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CertFile {
    kind: String,
    surface: String,
    terms: Vec<CertTermFile>,
    k_or_m: String,
    residual: Vec<i64>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let flags = match &t.evidence {
                    Evidence::Vmrt(p) => vec![p.flag()],
                    Evidence::Pullback => vec!["pullback".to_string()],
                    Evidence::Transfer { detail } => vec![format!("transfer:{detail}")],
                };
                CertTermFile {
                    zeta: format_rat(&t.class.zeta),
                    base: t
                        .class
                        .base
                        .coords()
                        .iter()
                        .map(|c| i64::try_from(c).expect("small coordinate"))
                        .collect(),
                    coeff: format_rat(&t.coeff),
                    flags,
                }
            })
            .collect();
        let file = CertFile {
            kind: self.kind.as_str().to_string(),
            surface: self.surface.clone(),
            terms,
            k_or_m: format_rat(&self.k_or_m),
            residual: self
                .residual
                .coords()
                .iter()
                .map(|c| i64::try_from(c).expect("small coordinate"))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("certificate serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CertFile = serde_json::from_str(text)?;
        let kind = CertKind::parse(&file.kind)?;
        let mut terms = Vec::new();
        for t in &file.terms {
            let zeta = parse_rat(&t.zeta)
                .ok_or_else(|| Error::InvalidCertificate(format!("bad zeta {}", t.zeta)))?;
            let coeff = parse_rat(&t.coeff)
                .ok_or_else(|| Error::InvalidCertificate(format!("bad coeff {}", t.coeff)))?;
            let evidence = match t.flags.as_slice() {
                [flag] if flag == "pullback" => Evidence::Pullback,
                [flag] if flag.starts_with("vmrt:") => Evidence::Vmrt(PencilRef::parse(flag)?),
                other => {
                    return Err(Error::InvalidCertificate(format!(
                        "unsupported flags {other:?}"
                    )))
                }
            };
            let is_vmrt = matches!(evidence, Evidence::Vmrt(_));
            terms.push(CertTerm {
                class: PTClass {
                    zeta,
                    base: DivisorClass::total_i64(&t.base),
                    is_vmrt,
                    is_pullback_effective: matches!(evidence, Evidence::Pullback),
                },
                coeff,
                evidence,
            });
        }
        let k_or_m = parse_rat(&file.k_or_m)
            .ok_or_else(|| Error::InvalidCertificate(format!("bad k_or_m {}", file.k_or_m)))?;
        Ok(Certificate {
            kind,
            surface: file.surface,
            terms,
            k_or_m,
            residual: DivisorClass::total_i64(&file.residual),
        })
    }
}
