//! Level-truncated bosonic and fermionic Fock spaces in the Fock–Bargmann
//! realization, with exact checks of the oscillator relations and the
//! superconformal vectors.
//!
//! Levels and modes are half-integers stored as twice their value. States are
//! sparse maps from monomials to Gaussian rationals; operators act lazily, so
//! only the part of the space actually touched is ever built.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{HmsError, Result};
use crate::exact::{Field, GaussRational, RatMatrix, Rational};
use crate::torus::{ChargeVector, TorusData};

/// A half-integer `twice / 2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(i64::from(self.0), 2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for HalfInt {
    type Err = HmsError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || HmsError::Parse(format!("not a half-integer: {s:?}"));
        match s.split_once('/') {
            Some((n, "2")) => n.trim().parse().map(HalfInt).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.trim().parse::<i32>().map(HalfInt::from_int).map_err(|_| bad()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Left,
    Right,
}

/// A creation variable `a^i_{-s}`, `ā^i_{-s}`, `θ^i_{-s}` or `θ̄^i_{-s}`,
/// identified by sector, level `s > 0` (twice) and index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Variable {
    pub sector: Sector,
    pub twice_level: u32,
    pub index: usize,
}

impl Variable {
    pub fn is_odd(&self) -> bool {
        self.twice_level % 2 == 1
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.is_odd(), self.sector) {
            (false, Sector::Left) => "a",
            (false, Sector::Right) => "abar",
            (true, Sector::Left) => "theta",
            (true, Sector::Right) => "thetabar",
        };
        write!(f, "{name}^{}_-{}", self.index, HalfInt(self.twice_level as i32))
    }
}

/// Product of even variables (with multiplicity) and distinct odd variables,
/// both kept sorted; odd variables are multiplied in that order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial {
    pub even: Vec<Variable>,
    pub odd: Vec<Variable>,
}

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial::default()
    }

    pub fn twice_level(&self) -> u32 {
        self.even.iter().chain(&self.odd).map(|v| v.twice_level).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.odd.len() % 2 == 1
    }

    /// `x · self`, with the sign from moving an odd `x` into place.
    fn times(&self, x: Variable) -> Option<(bool, Monomial)> {
        let mut out = self.clone();
        if x.is_odd() {
            match out.odd.binary_search(&x) {
                Ok(_) => None,
                Err(pos) => {
                    out.odd.insert(pos, x);
                    Some((pos % 2 == 1, out))
                }
            }
        } else {
            let pos = out.even.partition_point(|v| *v <= x);
            out.even.insert(pos, x);
            Some((false, out))
        }
    }

    /// `∂/∂x` as a left derivative: multiplicity for even `x`, the sign
    /// `(-1)^position` for odd `x`.
    fn derivative(&self, x: Variable) -> Option<(i64, Monomial)> {
        let mut out = self.clone();
        if x.is_odd() {
            let pos = out.odd.binary_search(&x).ok()?;
            out.odd.remove(pos);
            Some((if pos % 2 == 0 { 1 } else { -1 }, out))
        } else {
            let count = out.even.iter().filter(|v| **v == x).count();
            if count == 0 {
                return None;
            }
            let pos = out.even.iter().position(|v| *v == x).expect("present");
            out.even.remove(pos);
            Some((count as i64, out))
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.even.is_empty() && self.odd.is_empty() {
            return write!(f, "|vac>");
        }
        let parts: Vec<String> = self.even.iter().chain(&self.odd).map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Sparse state with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::basis(Monomial::vacuum())
    }

    pub fn basis(m: Monomial) -> Self {
        let mut v = FockVector::zero();
        v.add_term(m, GaussRational::one());
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(GaussRational::zero);
        *e = e.add(&c);
        if e.is_zero() {
            // Re-borrow to remove the cancelled entry.
            let key = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &FockVector) -> FockVector {
        self.add(&o.scale(&GaussRational::one().neg()))
    }

    pub fn scale(&self, s: &GaussRational) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    /// Levels (twice) of the monomials present.
    pub fn twice_levels(&self) -> Vec<u32> {
        let mut l: Vec<u32> = self.terms.keys().map(Monomial::twice_level).collect();
        l.dedup();
        l
    }

    /// `Some(parity)` when every monomial has the same parity.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }
}

/// `Σ_s α^i_s`, `ᾱ`, `ψ`, `ψ̄`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscKind {
    Alpha,
    AlphaBar,
    Psi,
    PsiBar,
}

impl OscKind {
    pub fn is_bosonic(self) -> bool {
        matches!(self, OscKind::Alpha | OscKind::AlphaBar)
    }

    pub fn sector(self) -> Sector {
        match self {
            OscKind::Alpha | OscKind::Psi => Sector::Left,
            OscKind::AlphaBar | OscKind::PsiBar => Sector::Right,
        }
    }
}

impl fmt::Display for OscKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OscKind::Alpha => "alpha",
            OscKind::AlphaBar => "alphabar",
            OscKind::Psi => "psi",
            OscKind::PsiBar => "psibar",
        })
    }
}

/// The truncated space: all monomials of total level at most `cap` in the
/// variables for indices `0..2d`.
#[derive(Clone, Debug)]
pub struct TruncatedFock {
    pub d: usize,
    pub cap: HalfInt,
    pub metric: RatMatrix,
    ginv: RatMatrix,
}

impl TruncatedFock {
    pub fn new(d: usize, cap: HalfInt, metric: RatMatrix) -> Result<Self> {
        let n = 2 * d;
        if metric.rows() != n || metric.cols() != n {
            return Err(HmsError::Dimension(format!("metric must be {n}x{n}")));
        }
        if !metric.is_symmetric() || !metric.is_positive_definite() {
            return Err(HmsError::Precondition("metric must be symmetric positive definite".into()));
        }
        if cap.0 < 0 {
            return Err(HmsError::Truncation("negative level cap".into()));
        }
        let ginv = metric.inverse().expect("positive definite");
        Ok(TruncatedFock { d, cap, metric, ginv })
    }

    pub fn for_torus(t: &TorusData, cap: HalfInt) -> Result<Self> {
        t.ensure_valid()?;
        TruncatedFock::new(t.d, cap, t.metric.clone())
    }

    pub fn metric_inverse(&self) -> &RatMatrix {
        &self.ginv
    }

    fn variables_up_to(&self, twice: u32) -> Vec<Variable> {
        let mut vars = Vec::new();
        for sector in [Sector::Left, Sector::Right] {
            for tl in 1..=twice {
                for index in 0..2 * self.d {
                    vars.push(Variable { sector, twice_level: tl, index });
                }
            }
        }
        vars.sort();
        vars
    }

    /// Monomials of level at most `level`, graded by level and then ordered
    /// lexicographically.
    pub fn basis_up_to(&self, level: HalfInt) -> Vec<Monomial> {
        if level.0 < 0 {
            return Vec::new();
        }
        let twice = level.0.min(self.cap.0) as u32;
        let vars = self.variables_up_to(twice);
        let mut out = Vec::new();
        fn rec(vars: &[Variable], start: usize, budget: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            out.push(cur.clone());
            for k in start..vars.len() {
                let v = vars[k];
                if v.twice_level > budget {
                    continue;
                }
                let (next_start, list) = if v.is_odd() { (k + 1, &mut cur.odd) } else { (k, &mut cur.even) };
                list.push(v);
                rec(vars, next_start, budget - v.twice_level, cur, out);
                if v.is_odd() {
                    cur.odd.pop();
                } else {
                    cur.even.pop();
                }
            }
        }
        rec(&vars, 0, twice, &mut Monomial::vacuum(), &mut out);
        out.sort_by(|a, b| a.twice_level().cmp(&b.twice_level()).then_with(|| a.cmp(b)));
        out
    }

    pub fn basis(&self) -> Vec<Monomial> {
        self.basis_up_to(self.cap)
    }
}

/// One oscillator mode acting on a truncated space.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct OscillatorOp {
    pub kind: OscKind,
    pub index: usize,
    pub mode: HalfInt,
}

pub fn build_oscillator(space: &TruncatedFock, kind: OscKind, index: usize, mode: HalfInt) -> Result<OscillatorOp> {
    if index >= 2 * space.d {
        return Err(HmsError::Dimension(format!("index {index} out of range for d={}", space.d)));
    }
    if mode.0 == 0 {
        return Err(HmsError::Precondition("zero modes are not oscillators".into()));
    }
    if kind.is_bosonic() != mode.is_integer() {
        return Err(HmsError::Precondition(format!("mode {mode} has the wrong parity for {kind}")));
    }
    if mode.abs() > space.cap {
        return Err(HmsError::Truncation(format!("mode {mode} exceeds level cap {}", space.cap)));
    }
    Ok(OscillatorOp { kind, index, mode })
}

impl OscillatorOp {
    pub fn is_creator(&self) -> bool {
        self.mode.0 < 0
    }

    fn variable(&self, index: usize) -> Variable {
        Variable { sector: self.kind.sector(), twice_level: self.mode.0.unsigned_abs(), index }
    }

    pub fn apply(&self, space: &TruncatedFock, v: &FockVector) -> Result<FockVector> {
        let mut out = FockVector::zero();
        if self.is_creator() {
            let x = self.variable(self.index);
            for (m, c) in v.terms() {
                if m.twice_level() + x.twice_level > space.cap.0 as u32 {
                    return Err(HmsError::Truncation(format!(
                        "{self:?} applied at level {} leaves the truncated space",
                        HalfInt(m.twice_level() as i32)
                    )));
                }
                if let Some((neg, img)) = m.times(x) {
                    out.add_term(img, if neg { c.neg() } else { c.clone() });
                }
            }
            return Ok(out);
        }
        let factor = if self.kind.is_bosonic() { self.mode.to_rational() } else { Rational::one() };
        let ginv = space.metric_inverse();
        for j in 0..2 * space.d {
            let g = ginv.get(self.index, j);
            if g.is_zero() {
                continue;
            }
            let coeff = g.mul(&factor);
            let x = self.variable(j);
            for (m, c) in v.terms() {
                if let Some((mult, img)) = m.derivative(x) {
                    let s = coeff.mul(&Rational::from_int(mult));
                    out.add_term(img, c.mul(&GaussRational::real(s)));
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix on the whole truncated basis; components leaving the
    /// space are dropped.
    pub fn matrix(&self, space: &TruncatedFock, max_dim: usize) -> Result<crate::exact::GaussMatrix> {
        let basis = space.basis();
        if basis.len() > max_dim {
            return Err(HmsError::Truncation(format!(
                "truncated space has dimension {} > {max_dim}",
                basis.len()
            )));
        }
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(k, m)| (m, k)).collect();
        let mut out = crate::exact::GaussMatrix::zeros(basis.len(), basis.len());
        for (col, m) in basis.iter().enumerate() {
            if self.is_creator() && m.twice_level() + self.mode.0.unsigned_abs() > space.cap.0 as u32 {
                continue;
            }
            let img = self.apply(space, &FockVector::basis(m.clone()))?;
            for (mm, c) in img.terms() {
                out.set(index[mm], col, c.clone());
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub first: OscKind,
    pub second: OscKind,
    pub i: usize,
    pub j: usize,
    pub s: HalfInt,
    pub p: HalfInt,
    pub expected: Rational,
    pub tested_dim: usize,
    pub verdict: Verdict,
}

fn check_relation(
    space: &TruncatedFock,
    a: OscillatorOp,
    b: OscillatorOp,
    anti: bool,
    expected: Rational,
) -> Result<RelationCheck> {
    let limit = space.cap.0 - a.mode.0.abs() - b.mode.0.abs();
    let relation = if anti { "CAR" } else { "CCR" };
    let mut report = RelationCheck {
        relation,
        first: a.kind,
        second: b.kind,
        i: a.index,
        j: b.index,
        s: a.mode,
        p: b.mode,
        expected: expected.clone(),
        tested_dim: 0,
        verdict: Verdict::Inconclusive,
    };
    if limit < 0 {
        return Ok(report);
    }
    let basis = space.basis_up_to(HalfInt(limit));
    let e = GaussRational::real(expected);
    let mut ok = true;
    for m in &basis {
        let v = FockVector::basis(m.clone());
        let ab = a.apply(space, &b.apply(space, &v)?)?;
        let ba = b.apply(space, &a.apply(space, &v)?)?;
        let lhs = if anti { ab.add(&ba) } else { ab.sub(&ba) };
        if lhs != v.scale(&e) {
            ok = false;
            break;
        }
    }
    report.tested_dim = basis.len();
    report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

fn same_family(a: OscKind, b: OscKind) -> bool {
    a == b
}

/// `[α^i_s, α^j_p] = s(G⁻¹)^{ij}δ_{s,-p}` (and the right-moving and mixed
/// versions) on the subspace of level ≤ cap − |s| − |p|.
pub fn verify_ccr(
    space: &TruncatedFock,
    kinds: (OscKind, OscKind),
    i: usize,
    j: usize,
    s: HalfInt,
    p: HalfInt,
) -> Result<RelationCheck> {
    if !kinds.0.is_bosonic() || !kinds.1.is_bosonic() {
        return Err(HmsError::Precondition("CCR needs bosonic oscillators".into()));
    }
    let a = build_oscillator(space, kinds.0, i, s)?;
    let b = build_oscillator(space, kinds.1, j, p)?;
    let expected = if same_family(kinds.0, kinds.1) && s.0 == -p.0 {
        s.to_rational().mul(space.metric_inverse().get(i, j))
    } else {
        Rational::zero()
    };
    check_relation(space, a, b, false, expected)
}

/// `{ψ^i_s, ψ^j_p} = (G⁻¹)^{ij}δ_{s,-p}` and its right-moving and mixed
/// versions.
pub fn verify_car(
    space: &TruncatedFock,
    kinds: (OscKind, OscKind),
    i: usize,
    j: usize,
    s: HalfInt,
    p: HalfInt,
) -> Result<RelationCheck> {
    if kinds.0.is_bosonic() || kinds.1.is_bosonic() {
        return Err(HmsError::Precondition("CAR needs fermionic oscillators".into()));
    }
    let a = build_oscillator(space, kinds.0, i, s)?;
    let b = build_oscillator(space, kinds.1, j, p)?;
    let expected = if same_family(kinds.0, kinds.1) && s.0 == -p.0 {
        space.metric_inverse().get(i, j).clone()
    } else {
        Rational::zero()
    };
    check_relation(space, a, b, true, expected)
}

/// Every CCR/CAR identity for all index pairs, kind pairs and nonzero modes
/// with `|s|, |p| ≤ cap`.
pub fn verify_all(space: &TruncatedFock) -> Result<Vec<RelationCheck>> {
    let n = 2 * space.d;
    let cap = space.cap.0;
    let modes = |odd: bool| -> Vec<HalfInt> {
        let mut v: Vec<HalfInt> = (1..=cap)
            .filter(|t| (t % 2 == 1) == odd)
            .flat_map(|t| [HalfInt(-t), HalfInt(t)])
            .collect();
        v.sort();
        v
    };
    let mut out = Vec::new();
    let families = [
        (false, [OscKind::Alpha, OscKind::AlphaBar]),
        (true, [OscKind::Psi, OscKind::PsiBar]),
    ];
    for (odd, kinds) in families {
        let ms = modes(odd);
        for &k1 in &kinds {
            for &k2 in &kinds {
                for i in 0..n {
                    for j in 0..n {
                        for &s in &ms {
                            for &p in &ms {
                                let r = if odd {
                                    verify_car(space, (k1, k2), i, j, s, p)?
                                } else {
                                    verify_ccr(space, (k1, k2), i, j, s, p)?
                                };
                                out.push(r);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A state `c · v` where `c` is `1` or the formal `1/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedState {
    pub vector: FockVector,
    pub inv_sqrt2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperconformalStates {
    pub l: TaggedState,
    pub q_plus: TaggedState,
    pub q_minus: TaggedState,
    pub j: TaggedState,
    pub l_bar: TaggedState,
    pub q_plus_bar: TaggedState,
    pub q_minus_bar: TaggedState,
    pub j_bar: TaggedState,
}

fn var(sector: Sector, twice_level: u32, index: usize) -> Variable {
    Variable { sector, twice_level, index }
}

/// `Σ_{ij} M_{ij} x^i y^j |vac⟩`, with `x` applied after `y`.
fn bilinear_state(m: &crate::exact::GaussMatrix, x: (Sector, u32), y: (Sector, u32)) -> FockVector {
    let mut out = FockVector::zero();
    let n = m.rows();
    for i in 0..n {
        for j in 0..n {
            let c = m.get(i, j);
            if c.is_zero() {
                continue;
            }
            let Some((n1, inner)) = Monomial::vacuum().times(var(y.0, y.1, j)) else { continue };
            let Some((n2, mono)) = inner.times(var(x.0, x.1, i)) else { continue };
            out.add_term(mono, if n1 ^ n2 { c.neg() } else { c.clone() });
        }
    }
    out
}

fn sc_sector(t: &TorusData, sector: Sector) -> Result<[TaggedState; 4]> {
    let g = t.metric.to_gauss();
    let omega = t.omega()?.to_gauss();
    let i = GaussRational::i();
    let half = GaussRational::real(Rational::new(1, 2));
    let l = bilinear_state(&g.scale(&half), (sector, 2), (sector, 2))
        .sub(&bilinear_state(&g.scale(&half), (sector, 1), (sector, 3)));
    let pref = i.neg().scale(&Rational::new(1, 4));
    let q = |sign: i64| -> Result<FockVector> {
        let form = g.sub(&omega.scale(&i.scale(&Rational::from_int(sign))))?;
        Ok(bilinear_state(&form.scale(&pref), (sector, 1), (sector, 2)))
    };
    let j = bilinear_state(&omega.scale(&i.neg().scale(&Rational::new(1, 2))), (sector, 1), (sector, 1));
    Ok([
        TaggedState { vector: l, inv_sqrt2: false },
        TaggedState { vector: q(1)?, inv_sqrt2: true },
        TaggedState { vector: q(-1)?, inv_sqrt2: true },
        TaggedState { vector: j, inv_sqrt2: false },
    ])
}

/// `L = ½G(a,a) − ½G(θ_{−1/2},θ_{−3/2})`,
/// `Q± = (−i/4√2)(G ∓ iω)(θ_{−1/2},a_{−1})`, `J = −(i/2)ω(θ_{−1/2},θ_{−1/2})`,
/// and their right-moving copies.
pub fn superconformal_states(space: &TruncatedFock, t: &TorusData) -> Result<SuperconformalStates> {
    if space.cap < HalfInt::from_int(2) {
        return Err(HmsError::Truncation("superconformal states need level cap ≥ 2".into()));
    }
    if space.d != t.d || space.metric != t.metric {
        return Err(HmsError::Dimension("space and torus differ".into()));
    }
    let [l, q_plus, q_minus, j] = sc_sector(t, Sector::Left)?;
    let [l_bar, q_plus_bar, q_minus_bar, j_bar] = sc_sector(t, Sector::Right)?;
    Ok(SuperconformalStates { l, q_plus, q_minus, j, l_bar, q_plus_bar, q_minus_bar, j_bar })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "dX")]
    DX,
    #[serde(rename = "dbarX")]
    DbarX,
    #[serde(rename = "psi")]
    Psi,
    #[serde(rename = "psibar")]
    PsiBar,
}

impl std::str::FromStr for FieldKind {
    type Err = HmsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dX" => Ok(FieldKind::DX),
            "dbarX" => Ok(FieldKind::DbarX),
            "psi" => Ok(FieldKind::Psi),
            "psibar" => Ok(FieldKind::PsiBar),
            other => Err(HmsError::Parse(format!("unknown field {other:?}"))),
        }
    }
}

/// Zero mode `(G⁻¹P)^j` or `(G⁻¹P̄)^j`, acting diagonally on charge sectors.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ZeroModeDescriptor {
    pub index: usize,
    pub sector: Sector,
}

impl ZeroModeDescriptor {
    /// Eigenvalue on the sector `(w, m)`, as `√2` times the true value
    /// (momenta are reported rescaled by `√2`).
    pub fn eigenvalue(&self, t: &TorusData, c: &ChargeVector) -> Result<Rational> {
        let z = t.zero_mode_momenta(c)?;
        let ginv = t.metric.inverse().expect("positive definite");
        let mom = match self.sector {
            Sector::Left => z.p,
            Sector::Right => z.pbar,
        };
        Ok(ginv.apply(&mom)?[self.index].clone())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    Oscillator(OscillatorOp),
    ZeroMode(ZeroModeDescriptor),
}

/// The `s`-th mode of `∂X^j`, `∂̄X^j`, `ψ^j` or `ψ̄^j`.
pub fn field_modes(space: &TruncatedFock, field: FieldKind, j: usize, s: HalfInt) -> Result<FieldMode> {
    if j >= 2 * space.d {
        return Err(HmsError::Dimension(format!("index {j} out of range")));
    }
    let (kind, sector) = match field {
        FieldKind::DX => (OscKind::Alpha, Sector::Left),
        FieldKind::DbarX => (OscKind::AlphaBar, Sector::Right),
        FieldKind::Psi => (OscKind::Psi, Sector::Left),
        FieldKind::PsiBar => (OscKind::PsiBar, Sector::Right),
    };
    if s.0 == 0 && kind.is_bosonic() {
        return Ok(FieldMode::ZeroMode(ZeroModeDescriptor { index: j, sector }));
    }
    Ok(FieldMode::Oscillator(build_oscillator(space, kind, j, s)?))
}

/// Image of a state under the linear relabelling of creation variables
/// `x^i ↦ Σ_k R_{ik} x'^k` (left sector) and `R̄` (right sector).
pub fn relabel_state(v: &FockVector, r: &RatMatrix, rbar: &RatMatrix) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (m, c) in v.terms() {
        // Rebuild the monomial right to left: odd variables last-first, then
        // the even ones.
        let mut acc = FockVector::basis(Monomial::vacuum());
        let vars: Vec<Variable> = m.even.iter().chain(&m.odd).copied().collect();
        for x in vars.iter().rev() {
            let mat = match x.sector {
                Sector::Left => r,
                Sector::Right => rbar,
            };
            let mut next = FockVector::zero();
            for k in 0..mat.cols() {
                let coeff = mat.get(x.index, k);
                if coeff.is_zero() {
                    continue;
                }
                let y = Variable { index: k, ..*x };
                for (mm, cc) in acc.terms() {
                    if let Some((neg, img)) = mm.times(y) {
                        let val = cc.mul(&GaussRational::real(coeff.clone()));
                        next.add_term(img, if neg { val.neg() } else { val });
                    }
                }
            }
            acc = next;
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out)
}

/// Matrices `R`, `R̄` with `G⁻¹p(γ) = R·G′⁻¹p′(gγ)` and likewise for `p̄`,
/// for a lattice map `g` from `t` to `t′`.
pub fn oscillator_identification(
    t: &TorusData,
    tprime: &TorusData,
    g: &RatMatrix,
) -> Result<(RatMatrix, RatMatrix)> {
    let n = t.rank();
    let k = |t: &TorusData, left: bool| -> Result<RatMatrix> {
        let ginv = t.metric.inverse().expect("positive definite");
        let w_part = if left {
            ginv.dot(&t.b_field.add(&t.metric)?).neg()
        } else {
            ginv.dot(&t.metric.sub(&t.b_field)?)
        };
        let mut m = RatMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, w_part.get(r, c).clone());
                m.set(r, n + c, ginv.get(r, c).clone());
            }
        }
        Ok(m)
    };
    let mut out = Vec::new();
    for left in [true, false] {
        let src = k(t, left)?;
        let dst = k(tprime, left)?.dot(g);
        let r = dst
            .solve_left(&src)?
            .ok_or_else(|| HmsError::Inconsistency("momenta are not related linearly".into()))?;
        out.push(r);
    }
    let rbar = out.pop().expect("two");
    let r = out.pop().expect("two");
    Ok((r, rbar))
}
