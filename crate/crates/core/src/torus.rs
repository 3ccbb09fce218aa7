//! Flat tori with B-field and their doubled-lattice structures.
//!
//! Coordinates `0..2d` of the doubled space span `U` (winding), coordinates
//! `2d..4d` span `U*` (momentum). `G` and `B` are read as maps `U → U*`, and
//! `Iᵗ` is the transpose action on `U*`.

use serde::{Deserialize, Serialize};

use crate::error::{HmsError, Result};
use crate::exact::{Field, RatMatrix, Rational};

/// Flat Kähler torus `(ℤ^{2d}, I, G, B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusData {
    pub d: usize,
    #[serde(rename = "I")]
    pub complex_structure: RatMatrix,
    #[serde(rename = "G")]
    pub metric: RatMatrix,
    #[serde(rename = "B")]
    pub b_field: RatMatrix,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub ok: bool,
}

impl NamedCheck {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        NamedCheck { name: name.into(), ok }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub checks: Vec<NamedCheck>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&str> {
        self.checks.iter().find(|c| !c.ok).map(|c| c.name.as_str())
    }
}

/// The standard rotation `[[0,-1],[1,0]]`.
pub fn rotation() -> RatMatrix {
    RatMatrix::from_ints(&[&[0, -1], &[1, 0]])
}

/// Block-diagonal matrix with the given 2×2 blocks.
pub fn block_diagonal(blocks: &[RatMatrix]) -> RatMatrix {
    let mut iter = blocks.iter();
    let first = iter.next().cloned().unwrap_or_else(|| RatMatrix::zeros(0, 0));
    iter.fold(first, |acc, b| RatMatrix::block_diag(&acc, b))
}

impl TorusData {
    pub fn new(
        complex_structure: RatMatrix,
        metric: RatMatrix,
        b_field: RatMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = complex_structure.rows();
        if !n.is_multiple_of(2) {
            return Err(HmsError::Dimension(format!("lattice rank {n} is odd")));
        }
        let t = TorusData { d: n / 2, complex_structure, metric, b_field, label: label.into() };
        t.check_shapes()?;
        Ok(t)
    }

    /// Product of `d` square elliptic curves: `I` block-diagonal rotations,
    /// `G = id`, `B = 0`.
    pub fn square(d: usize) -> Self {
        let i = block_diagonal(&vec![rotation(); d]);
        TorusData {
            d,
            complex_structure: i,
            metric: RatMatrix::identity(2 * d),
            b_field: RatMatrix::zeros(2 * d, 2 * d),
            label: format!("square^{d}"),
        }
    }

    pub fn rank(&self) -> usize {
        2 * self.d
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = 2 * self.d;
        for (name, m) in [
            ("I", &self.complex_structure),
            ("G", &self.metric),
            ("B", &self.b_field),
        ] {
            if m.rows() != n || m.cols() != n {
                return Err(HmsError::Dimension(format!(
                    "{name} is {}x{}, expected {n}x{n} for d={}",
                    m.rows(),
                    m.cols(),
                    self.d
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_shapes()?;
        let n = self.rank();
        let i = &self.complex_structure;
        let g = &self.metric;
        let minus_id = RatMatrix::identity(n).neg();
        let checks = vec![
            NamedCheck::new("I^2 = -id", i.dot(i) == minus_id),
            NamedCheck::new("G = G^t", g.is_symmetric()),
            NamedCheck::new("G positive definite", g.is_positive_definite()),
            NamedCheck::new("I^t G I = G", i.transpose().dot(g).dot(i) == *g),
            NamedCheck::new("B = -B^t", self.b_field.is_skew()),
        ];
        Ok(ValidationReport { ok: checks.iter().all(|c| c.ok), checks })
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate()?;
        match report.first_failure() {
            None => Ok(()),
            Some(name) => Err(HmsError::InvalidTorus(format!(
                "{} fails {name}",
                if self.label.is_empty() { "torus" } else { &self.label }
            ))),
        }
    }

    /// Kähler form `ω = G·I`, skew and invertible for a valid torus.
    pub fn omega(&self) -> Result<RatMatrix> {
        self.ensure_valid()?;
        Ok(self.metric.dot(&self.complex_structure))
    }

    /// The dual torus `U*/Γ*` with `I ↦ -Iᵗ`, `G ↦ G⁻¹`, `B ↦ 0`.
    pub fn dual(&self) -> Result<TorusData> {
        self.ensure_valid()?;
        let ginv = self.metric.inverse().expect("positive definite metric");
        Ok(TorusData {
            d: self.d,
            complex_structure: self.complex_structure.transpose().neg(),
            metric: ginv,
            b_field: RatMatrix::zeros(self.rank(), self.rank()),
            label: format!("dual({})", self.label),
        })
    }

    /// `(0,2)` part of `B` vanishes, i.e. `IᵗBI = B`.
    pub fn b_is_type_11(&self) -> bool {
        let i = &self.complex_structure;
        i.transpose().dot(&self.b_field).dot(i) == self.b_field
    }

    /// Express the torus in the lattice basis given by the columns of `s`
    /// (`s` must be unimodular).
    pub fn change_basis(&self, s: &RatMatrix) -> Result<TorusData> {
        let sinv = unimodular_inverse(s)?;
        let st = s.transpose();
        Ok(TorusData {
            d: self.d,
            complex_structure: sinv.dot(&self.complex_structure).dot(s),
            metric: st.dot(&self.metric).dot(s),
            b_field: st.dot(&self.b_field).dot(s),
            label: self.label.clone(),
        })
    }
}

/// Inverse of an integral matrix with determinant ±1.
pub fn unimodular_inverse(s: &RatMatrix) -> Result<RatMatrix> {
    if !s.is_square() || !s.is_integral() {
        return Err(HmsError::Precondition("basis change must be a square integer matrix".into()));
    }
    let det = s.determinant()?;
    if det.abs() != Rational::one() {
        return Err(HmsError::Precondition(format!("basis change has determinant {det}")));
    }
    Ok(s.inverse().expect("unimodular"))
}

/// `q`, `𝓘`, `𝓙` and `𝓘̃` on `U ⊕ U*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubledStructure {
    pub q: RatMatrix,
    #[serde(rename = "calI")]
    pub cal_i: RatMatrix,
    #[serde(rename = "calJ")]
    pub cal_j: RatMatrix,
    #[serde(rename = "calItilde")]
    pub cal_i_tilde: RatMatrix,
    pub block_convention: String,
}

pub const BLOCK_CONVENTION: &str = "rows/cols 0..2d span U (winding), 2d..4d span U* (momentum)";

/// `[[0, id], [id, 0]]` of size `4d`.
pub fn split_form(d: usize) -> RatMatrix {
    let n = 2 * d;
    let id = RatMatrix::identity(n);
    let z = RatMatrix::zeros(n, n);
    RatMatrix::from_blocks(&z, &id, &id, &z).expect("square blocks")
}

/// `𝓘(I,B) = [[I, 0], [BI + IᵗB, -Iᵗ]]`.
pub fn cal_i(i: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = i.rows();
    let it = i.transpose();
    let lower = b.dot(i).add(&it.dot(b)).expect("same shape");
    RatMatrix::from_blocks(i, &RatMatrix::zeros(n, n), &lower, &it.neg()).expect("square blocks")
}

/// `𝓙(G,I,B) = [[-IG⁻¹B, IG⁻¹], [GI - BIG⁻¹B, BIG⁻¹]]`.
pub fn cal_j(g: &RatMatrix, i: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    let ginv = g
        .inverse()
        .ok_or_else(|| HmsError::InvalidTorus("metric is singular".into()))?;
    let igi = i.dot(&ginv);
    let ul = igi.dot(b).neg();
    let ll = g.dot(i).sub(&b.dot(&igi).dot(b))?;
    let lr = b.dot(&igi);
    RatMatrix::from_blocks(&ul, &igi, &ll, &lr)
}

/// `𝓘̃ = [[I, 0], [0, -Iᵗ]]`.
pub fn cal_i_tilde(i: &RatMatrix) -> RatMatrix {
    let n = i.rows();
    let z = RatMatrix::zeros(n, n);
    RatMatrix::from_blocks(i, &z, &z, &i.transpose().neg()).expect("square blocks")
}

impl TorusData {
    pub fn doubled(&self) -> Result<DoubledStructure> {
        self.ensure_valid()?;
        let i = &self.complex_structure;
        let b = &self.b_field;
        let s = DoubledStructure {
            q: split_form(self.d),
            cal_i: cal_i(i, b),
            cal_j: cal_j(&self.metric, i, b)?,
            cal_i_tilde: cal_i_tilde(i),
            block_convention: BLOCK_CONVENTION.to_string(),
        };
        let minus_id = RatMatrix::identity(4 * self.d).neg();
        for (name, m) in [("calI", &s.cal_i), ("calJ", &s.cal_j), ("calItilde", &s.cal_i_tilde)] {
            if m.dot(m) != minus_id {
                return Err(HmsError::Inconsistency(format!("{name} does not square to -id")));
            }
        }
        Ok(s)
    }

    /// Positive form `𝒢` on `Γ⊕Γ*` with `γᵗ𝒢γ = p²/2 + p̄²/2`:
    /// `[[G - BG⁻¹B, BG⁻¹], [-G⁻¹B, G⁻¹]]`.
    pub fn narain_form(&self) -> Result<RatMatrix> {
        self.ensure_valid()?;
        let g = &self.metric;
        let b = &self.b_field;
        let ginv = g.inverse().expect("positive definite");
        let ul = g.sub(&b.dot(&ginv).dot(b))?;
        let ur = b.dot(&ginv);
        let ll = ginv.dot(b).neg();
        RatMatrix::from_blocks(&ul, &ur, &ll, &ginv)
    }
}

/// Winding and momentum quantum numbers `(w, m) ∈ Γ ⊕ Γ*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChargeVector {
    pub w: Vec<i64>,
    pub m: Vec<i64>,
}

impl ChargeVector {
    pub fn new(w: Vec<i64>, m: Vec<i64>) -> Self {
        ChargeVector { w, m }
    }

    pub fn zero(d: usize) -> Self {
        ChargeVector { w: vec![0; 2 * d], m: vec![0; 2 * d] }
    }

    /// Concatenated coordinates `(w, m)`.
    pub fn to_vec(&self) -> Vec<i64> {
        self.w.iter().chain(&self.m).copied().collect()
    }

    pub fn from_slice(v: &[i64]) -> Self {
        let half = v.len() / 2;
        ChargeVector { w: v[..half].to_vec(), m: v[half..].to_vec() }
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.to_vec().into_iter().map(Rational::from_int).collect()
    }

    /// `q(γ, γ) = 2 l(w, m)`.
    pub fn q_norm(&self) -> Rational {
        Rational::from_int(2 * self.w.iter().zip(&self.m).map(|(a, b)| a * b).sum::<i64>())
    }

    pub fn height(&self) -> i64 {
        self.w.iter().chain(&self.m).map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// Zero-mode momenta rescaled by `√2`: `p = m - (B+G)w`, `p̄ = m + (G-B)w`.
/// The reported norms are `p²/2 = G⁻¹(p,p)/2` and `p̄²/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroModes {
    pub p: Vec<Rational>,
    pub pbar: Vec<Rational>,
    pub p_sq_half: Rational,
    pub pbar_sq_half: Rational,
    /// Always true: `p`, `p̄` are `√2·P`, `√2·P̄`.
    pub sqrt2_rescaled: bool,
}

impl TorusData {
    pub fn zero_mode_momenta(&self, c: &ChargeVector) -> Result<ZeroModes> {
        Ok(self.zero_mode_momenta_batch(std::slice::from_ref(c))?.remove(0))
    }

    /// [`Self::zero_mode_momenta`] for many charges; validates and inverts `G` once.
    pub fn zero_mode_momenta_batch(&self, charges: &[ChargeVector]) -> Result<Vec<ZeroModes>> {
        self.ensure_valid()?;
        let n = self.rank();
        let ginv = self.metric.inverse().expect("positive definite");
        let half = Rational::new(1, 2);
        charges
            .iter()
            .map(|c| {
                if c.w.len() != n || c.m.len() != n {
                    return Err(HmsError::Dimension(format!("charge vector must have length {n}+{n}")));
                }
                let w: Vec<Rational> = c.w.iter().map(|&x| Rational::from_int(x)).collect();
                let m: Vec<Rational> = c.m.iter().map(|&x| Rational::from_int(x)).collect();
                let gw = self.metric.apply(&w)?;
                let bw = self.b_field.apply(&w)?;
                let p: Vec<Rational> = (0..n).map(|k| m[k].sub(&bw[k]).sub(&gw[k])).collect();
                let pbar: Vec<Rational> = (0..n).map(|k| m[k].sub(&bw[k]).add(&gw[k])).collect();
                let p_sq_half = ginv.bilinear(&p, &p)?.mul(&half);
                let pbar_sq_half = ginv.bilinear(&pbar, &pbar)?.mul(&half);
                Ok(ZeroModes { p, pbar, p_sq_half, pbar_sq_half, sqrt2_rescaled: true })
            })
            .collect()
    }
}
