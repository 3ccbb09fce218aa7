//! Lattice criteria for isomorphism, mirror symmetry and derived equivalence
//! of flat tori, with exact certificates and a bounded existence search.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HmsError, Result};
use crate::exact::{common_denominator, Field, RatMatrix, Rational};
use crate::torus::{ChargeVector, DoubledStructure, NamedCheck, TorusData};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Iso,
    Mirror,
    DerivedEq,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Iso => "iso",
            RelationKind::Mirror => "mirror",
            RelationKind::DerivedEq => "derived_eq",
        })
    }
}

impl std::str::FromStr for RelationKind {
    type Err = HmsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iso" => Ok(RelationKind::Iso),
            "mirror" => Ok(RelationKind::Mirror),
            "derived_eq" | "derived-eq" => Ok(RelationKind::DerivedEq),
            other => Err(HmsError::Parse(format!("unknown relation kind {other:?}"))),
        }
    }
}

/// Integral map `Γ₁⊕Γ₁* → Γ₂⊕Γ₂*` with a declared relation kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub kind: RelationKind,
    pub g: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(kind: RelationKind, g: Vec<Vec<i64>>) -> Self {
        LatticeMap { kind, g }
    }

    pub fn identity(kind: RelationKind, d: usize) -> Self {
        let n = 4 * d;
        let g = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        LatticeMap { kind, g }
    }

    pub fn matrix(&self) -> Result<RatMatrix> {
        let rows = self
            .g
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        RatMatrix::from_rows(rows)
    }

    pub fn from_matrix(kind: RelationKind, m: &RatMatrix) -> Result<Self> {
        let g = m
            .to_i64_rows()
            .ok_or_else(|| HmsError::Precondition("lattice map is not integral".into()))?;
        Ok(LatticeMap { kind, g })
    }

    pub fn negated(&self) -> Self {
        let g = self.g.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        LatticeMap { kind: self.kind, g }
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &LatticeMap, kind: RelationKind) -> Result<LatticeMap> {
        let m = second.matrix()?.mul(&self.matrix()?)?;
        LatticeMap::from_matrix(kind, &m)
    }
}

/// Outcome of checking a lattice map: every listed equality with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: RelationKind,
    pub g: Vec<Vec<i64>>,
    pub det: i64,
    pub checks: Vec<NamedCheck>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<String>,
}

impl Certificate {
    pub fn map(&self) -> LatticeMap {
        LatticeMap { kind: self.kind, g: self.g.clone() }
    }
}

pub const CHECK_Q: &str = "g^t q' g = q";

fn equality_checks(
    kind: RelationKind,
    g: &RatMatrix,
    src: &DoubledStructure,
    dst: &DoubledStructure,
) -> Vec<NamedCheck> {
    let intertwines = |a: &RatMatrix, b: &RatMatrix| g.dot(a) == b.dot(g);
    let mut checks = vec![NamedCheck::new(CHECK_Q, g.transpose().dot(&dst.q).dot(g) == src.q)];
    match kind {
        RelationKind::Iso => {
            checks.push(NamedCheck::new("g calI = calI' g", intertwines(&src.cal_i, &dst.cal_i)));
            checks.push(NamedCheck::new("g calJ = calJ' g", intertwines(&src.cal_j, &dst.cal_j)));
        }
        RelationKind::Mirror => {
            checks.push(NamedCheck::new("g calI = calJ' g", intertwines(&src.cal_i, &dst.cal_j)));
            checks.push(NamedCheck::new("g calJ = calI' g", intertwines(&src.cal_j, &dst.cal_i)));
        }
        RelationKind::DerivedEq => {
            checks.push(NamedCheck::new(
                "g calItilde = calItilde' g",
                intertwines(&src.cal_i_tilde, &dst.cal_i_tilde),
            ));
        }
    }
    checks
}

/// Check a declared relation exactly. A failing equality yields a certificate
/// with `valid = false` and the first failing equality named.
pub fn verify_map(source: &TorusData, target: &TorusData, map: &LatticeMap) -> Result<Certificate> {
    if source.d != target.d {
        return Err(HmsError::Dimension(format!(
            "source has d={}, target has d={}",
            source.d, target.d
        )));
    }
    let n = 4 * source.d;
    if map.g.len() != n || map.g.iter().any(|r| r.len() != n) {
        return Err(HmsError::Dimension(format!("lattice map must be {n}x{n}")));
    }
    let g = map.matrix()?;
    let det = g.determinant()?;
    let det = match det.to_i64() {
        Some(v) if v == 1 || v == -1 => v,
        _ => {
            return Err(HmsError::Precondition(format!(
                "lattice map has determinant {det}, expected ±1"
            )))
        }
    };
    let src = source.doubled()?;
    let dst = target.doubled()?;
    let checks = equality_checks(map.kind, &g, &src, &dst);
    let refutation = checks.iter().find(|c| !c.ok).map(|c| c.name.clone());
    Ok(Certificate {
        kind: map.kind,
        g: map.g.clone(),
        det,
        valid: refutation.is_none(),
        checks,
        refutation,
    })
}

/// Basis over ℚ of the linear intertwiner conditions (the `q` condition is not
/// imposed). Each basis matrix has a 1 at its own free entry and 0 at the
/// other free entries, so an integral matrix in the span has integral
/// coordinates.
pub fn intertwiner_space(
    t1: &TorusData,
    t2: &TorusData,
    kind: RelationKind,
) -> Result<Vec<RatMatrix>> {
    if t1.d != t2.d {
        return Err(HmsError::Dimension(format!("d={} vs d={}", t1.d, t2.d)));
    }
    let s1 = t1.doubled()?;
    let s2 = t2.doubled()?;
    let pairs: Vec<(&RatMatrix, &RatMatrix)> = match kind {
        RelationKind::Iso => vec![(&s1.cal_i, &s2.cal_i), (&s1.cal_j, &s2.cal_j)],
        RelationKind::Mirror => vec![(&s1.cal_i, &s2.cal_j), (&s1.cal_j, &s2.cal_i)],
        RelationKind::DerivedEq => vec![(&s1.cal_i_tilde, &s2.cal_i_tilde)],
    };
    let n = 4 * t1.d;
    let unknowns = n * n;
    let mut system = RatMatrix::zeros(pairs.len() * unknowns, unknowns);
    // Row (a, b) of constraint gX = Yg: Σ_c g[a,c] X[c,b] − Σ_c Y[a,c] g[c,b].
    for (k, (x, y)) in pairs.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let row = k * unknowns + a * n + b;
                for c in 0..n {
                    let xv = x.get(c, b);
                    if !xv.is_zero() {
                        let col = a * n + c;
                        let cur = system.get(row, col).add(xv);
                        system.set(row, col, cur);
                    }
                    let yv = y.get(a, c);
                    if !yv.is_zero() {
                        let col = c * n + b;
                        let cur = system.get(row, col).sub(yv);
                        system.set(row, col, cur);
                    }
                }
            }
        }
    }
    system
        .kernel()
        .into_iter()
        .map(|v| {
            let rows = v.chunks(n).map(|r| r.to_vec()).collect();
            RatMatrix::from_rows(rows)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub bound: u32,
    pub node_budget: u64,
}

impl SearchOptions {
    pub fn with_bound(bound: u32) -> Self {
        SearchOptions { bound, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { certificate: Certificate, explored: u64 },
    /// Not a proof of non-existence.
    NoneWithinBound { bound: u32, explored: u64, space_dim: usize },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            SearchOutcome::NoneWithinBound { .. } => None,
        }
    }
}

/// Visit integer vectors of length `k` with entries in `[-bound, bound]`,
/// ordered by L1 norm, then lexicographically with entry order
/// `0, 1, -1, 2, -2, …`. Stops when `visit` returns `false`.
fn enumerate_vectors(k: usize, bound: i64, mut visit: impl FnMut(&[i64], u64) -> bool) {
    fn fill(
        pos: usize,
        remaining: i64,
        bound: i64,
        cur: &mut Vec<i64>,
        level: u64,
        visit: &mut dyn FnMut(&[i64], u64) -> bool,
    ) -> bool {
        let k = cur.len();
        if pos == k {
            return remaining != 0 || visit(cur, level);
        }
        let slots_after = (k - pos - 1) as i64;
        let top = remaining.min(bound);
        for mag in 0..=top {
            if remaining - mag > slots_after * bound {
                continue;
            }
            let signs: &[i64] = if mag == 0 { &[1] } else { &[1, -1] };
            for &s in signs {
                cur[pos] = s * mag;
                if !fill(pos + 1, remaining - mag, bound, cur, level, visit) {
                    return false;
                }
            }
        }
        cur[pos] = 0;
        true
    }
    let mut cur = vec![0i64; k];
    for level in 1..=(k as i64 * bound) {
        if !fill(0, level, bound, &mut cur, level as u64, &mut visit) {
            return;
        }
    }
}

/// Bounded search for a certificate of the given kind, over the intertwiner
/// space with integer coordinates of height at most `bound`.
pub fn search_relation(
    t1: &TorusData,
    t2: &TorusData,
    kind: RelationKind,
    opts: SearchOptions,
) -> Result<SearchOutcome> {
    if opts.bound == 0 {
        return Err(HmsError::Precondition("coefficient bound must be at least 1".into()));
    }
    let basis = intertwiner_space(t1, t2, kind)?;
    let n = 4 * t1.d;
    let half = 2 * t1.d;
    let denom = common_denominator(basis.iter().flat_map(|b| b.entries()));
    let denom: i128 = i128::try_from(denom)
        .map_err(|_| HmsError::Precondition("intertwiner denominators too large".into()))?;
    let scale = Rational::from_bigint(denom.into());
    let sparse: Vec<Vec<(usize, i128)>> = basis
        .iter()
        .map(|b| {
            b.entries()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(idx, v)| {
                    let iv = v.mul(&scale).to_i64().expect("cleared denominator fits");
                    (idx, iv as i128)
                })
                .collect()
        })
        .collect();

    let mut explored = 0u64;
    let mut acc = vec![0i128; n * n];
    let mut found: Option<Vec<Vec<i64>>> = None;
    let mut exhausted_at: Option<u64> = None;
    enumerate_vectors(basis.len(), i64::from(opts.bound), |coeffs, level| {
        if explored >= opts.node_budget {
            exhausted_at = Some(level);
            return false;
        }
        explored += 1;
        acc.iter_mut().for_each(|x| *x = 0);
        for (c, b) in coeffs.iter().zip(&sparse) {
            if *c != 0 {
                for &(idx, v) in b {
                    acc[idx] += *c as i128 * v;
                }
            }
        }
        if acc.iter().any(|x| x % denom != 0) {
            return true;
        }
        let g: Vec<i128> = acc.iter().map(|x| x / denom).collect();
        // gᵗ q g = q with q pairing coordinate a with a + 2d.
        for i in 0..n {
            for j in i..n {
                let mut s = 0i128;
                for a in 0..half {
                    s += g[a * n + i] * g[(a + half) * n + j] + g[(a + half) * n + i] * g[a * n + j];
                }
                let expected = i128::from(i + half == j || j + half == i);
                if s != expected {
                    return true;
                }
            }
        }
        found = Some(g.chunks(n).map(|r| r.iter().map(|&x| x as i64).collect()).collect());
        false
    });
    if let Some(level) = exhausted_at {
        return Err(HmsError::BudgetExceeded { budget: opts.node_budget, explored, level });
    }
    match found {
        Some(g) => {
            let cert = verify_map(t1, t2, &LatticeMap::new(kind, g))?;
            if !cert.valid {
                return Err(HmsError::Inconsistency(format!(
                    "search candidate fails {}",
                    cert.refutation.unwrap_or_default()
                )));
            }
            Ok(SearchOutcome::Found { certificate: cert, explored })
        }
        None => Ok(SearchOutcome::NoneWithinBound {
            bound: opts.bound,
            explored,
            space_dim: basis.len(),
        }),
    }
}

/// `(q(γ,γ), p²/2, p̄²/2)` for one charge vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectrumTriple {
    pub q: Rational,
    pub p_sq_half: Rational,
    pub pbar_sq_half: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    #[serde(flatten)]
    pub triple: SpectrumTriple,
    pub multiplicity: u64,
}

pub fn spectrum_triple(t: &TorusData, c: &ChargeVector) -> Result<SpectrumTriple> {
    let z = t.zero_mode_momenta(c)?;
    Ok(SpectrumTriple { q: c.q_norm(), p_sq_half: z.p_sq_half, pbar_sq_half: z.pbar_sq_half })
}

/// Visit every integer vector of length `len` with entries in `[-h, h]`.
pub fn for_each_charge(len: usize, h: i64, mut f: impl FnMut(&[i64])) {
    let mut v = vec![-h; len];
    loop {
        f(&v);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            if v[k] < h {
                v[k] += 1;
                break;
            }
            v[k] = -h;
            k += 1;
        }
    }
}

/// Sorted multiset of spectrum triples over all charges of height ≤ `height`.
pub fn spectrum_fingerprint(t: &TorusData, height: u32) -> Result<Vec<SpectrumEntry>> {
    t.ensure_valid()?;
    let ginv = t.metric.inverse().expect("positive definite");
    let half = Rational::new(1, 2);
    let n = t.rank();
    let mut counts: BTreeMap<SpectrumTriple, u64> = BTreeMap::new();
    let gb_plus = t.metric.add(&t.b_field)?;
    let g_minus_b = t.metric.sub(&t.b_field)?;
    for_each_charge(2 * n, i64::from(height), |v| {
        let c = ChargeVector::from_slice(v);
        let w: Vec<Rational> = c.w.iter().map(|&x| Rational::from_int(x)).collect();
        let m: Vec<Rational> = c.m.iter().map(|&x| Rational::from_int(x)).collect();
        let a = gb_plus.apply(&w).expect("shape");
        let b = g_minus_b.apply(&w).expect("shape");
        let p: Vec<Rational> = m.iter().zip(&a).map(|(x, y)| x.sub(y)).collect();
        let pbar: Vec<Rational> = m.iter().zip(&b).map(|(x, y)| x.add(y)).collect();
        let triple = SpectrumTriple {
            q: c.q_norm(),
            p_sq_half: ginv.bilinear(&p, &p).expect("shape").mul(&half),
            pbar_sq_half: ginv.bilinear(&pbar, &pbar).expect("shape").mul(&half),
        };
        *counts.entry(triple).or_insert(0) += 1;
    });
    Ok(counts
        .into_iter()
        .map(|(triple, multiplicity)| SpectrumEntry { triple, multiplicity })
        .collect())
}
