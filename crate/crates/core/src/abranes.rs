//! Coisotropic A-branes on flat symplectic tori: rational affine subtori
//! carrying a line bundle of constant integral curvature.
//!
//! Forms restricted to the brane are written in the coordinates of its
//! `Y_basis`. The transverse bundle `𝓝 = V/𝓛` is modelled by a rational
//! complement of `𝓛` inside `V`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cohomology::holomorphic_one_forms;
use crate::error::{HmsError, Result};
use crate::exact::{grade_basis, ExtElement, Field, GaussRational, RatMatrix, Rational};
use crate::torus::TorusData;

/// `(Y, E, ∇)` with `Y = translation + span(Y_basis)` and curvature `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineBrane {
    #[serde(default)]
    pub torus_ref: String,
    #[serde(rename = "Y_basis")]
    pub y_basis: Vec<Vec<i64>>,
    pub translation: Vec<Rational>,
    #[serde(rename = "F")]
    pub curvature: Vec<Vec<i64>>,
}

impl AffineBrane {
    pub fn new(y_basis: Vec<Vec<i64>>, curvature: Vec<Vec<i64>>) -> Self {
        let len = y_basis.first().map_or(0, Vec::len);
        AffineBrane {
            torus_ref: String::new(),
            y_basis,
            translation: vec![Rational::zero(); len],
            curvature,
        }
    }

    /// The brane `Y = X` with curvature `F`.
    pub fn whole(rank: usize, curvature: Vec<Vec<i64>>) -> Self {
        let basis = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        AffineBrane::new(basis, curvature)
    }

    pub fn dim(&self) -> usize {
        self.y_basis.len()
    }

    /// `Y_basis` as the columns of a `2d × r` matrix.
    pub fn y_matrix(&self) -> Result<RatMatrix> {
        let cols: Vec<Vec<Rational>> = self
            .y_basis
            .iter()
            .map(|v| v.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        RatMatrix::from_columns(&cols)
    }

    pub fn f_matrix(&self) -> Result<RatMatrix> {
        RatMatrix::from_rows(
            self.curvature
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
                .collect(),
        )
    }

    /// Shape, independence, saturation of `span_ℤ(Y_basis)` in `Γ`, and
    /// skew-symmetry of `F`.
    pub fn check_structure(&self, t: &TorusData) -> Result<()> {
        let n = t.rank();
        let r = self.dim();
        if r == 0 {
            return Err(HmsError::Precondition("Y_basis is empty".into()));
        }
        if self.y_basis.iter().any(|v| v.len() != n) {
            return Err(HmsError::Dimension(format!("Y_basis vectors must have length {n}")));
        }
        if self.translation.len() != n {
            return Err(HmsError::Dimension(format!("translation must have length {n}")));
        }
        if self.curvature.len() != r || self.curvature.iter().any(|row| row.len() != r) {
            return Err(HmsError::Dimension(format!("F must be {r}x{r}")));
        }
        let y = self.y_matrix()?;
        if y.rank() != r {
            return Err(HmsError::Precondition("Y_basis is linearly dependent".into()));
        }
        // The lattice spanned by Y_basis is saturated iff the gcd of its
        // maximal minors is 1.
        let mut g = BigInt::zero();
        for rows in grade_basis(n, r) {
            let idx = rows.indices();
            let minor = RatMatrix::from_fn(r, r, |a, b| y.get(idx[a], b).clone());
            g = g.gcd(minor.determinant()?.numer());
        }
        if !g.is_one() {
            return Err(HmsError::Precondition(format!(
                "Y_basis spans a non-primitive sublattice (index {g})"
            )));
        }
        if !self.f_matrix()?.is_skew() {
            return Err(HmsError::Precondition("F must be skew-symmetric".into()));
        }
        Ok(())
    }
}

/// How the complement of `𝓛` in `V` is chosen.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Complement {
    /// Coordinate vectors of `V`, picked greedily.
    #[default]
    Coordinate,
    /// The coordinate complement with the sum of the `𝓛` basis added to each
    /// vector; used to check that nothing depends on the choice.
    Sheared,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoliationData {
    /// Basis of `𝓛 = ker(ω|_V)`, in `Y_basis` coordinates.
    #[serde(rename = "L_basis")]
    pub l_basis: Vec<Vec<Rational>>,
    #[serde(rename = "N_rank")]
    pub n_rank: usize,
    /// Complement of `𝓛` (columns, in `Y_basis` coordinates).
    pub complement: RatMatrix,
    pub sigma: RatMatrix,
    pub f: RatMatrix,
}

/// A named rejection; the variants follow the order in which conditions are
/// tested.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Rejection {
    /// Condition (i): `V^{⊥ω} ⊄ V`, witnessed by an ambient vector.
    NotCoisotropic { witness: Vec<Rational> },
    /// `dim Y ≠ n + 2k` for every integer `k ≥ 0`.
    DimensionLaw { dim_y: usize, n: usize },
    /// Condition (ii): `ι_v F ≠ 0` for a leaf direction `v`.
    FoliationNotAnnihilated { leaf_vector: Vec<Rational>, contraction: Vec<Rational> },
    /// Condition (iii): `(σ⁻¹f)² ≠ −id`.
    NotComplexStructure { square: RatMatrix },
}

impl Rejection {
    pub fn name(&self) -> &'static str {
        match self {
            Rejection::NotCoisotropic { .. } => "condition (i): not coisotropic",
            Rejection::DimensionLaw { .. } => "dimension law: dim Y = n + 2k",
            Rejection::FoliationNotAnnihilated { .. } => "condition (ii): F does not annihilate the foliation",
            Rejection::NotComplexStructure { .. } => "condition (iii): (sigma^-1 f)^2 != -id",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbraneReport {
    pub accepted: bool,
    pub dim_y: usize,
    pub n: usize,
    pub k: Option<usize>,
    pub rejection: Option<Rejection>,
    pub foliation: Option<FoliationData>,
    /// `𝓙 = σ⁻¹f` on the chosen complement.
    pub transverse_complex_structure: Option<RatMatrix>,
    /// `σ(𝓙·,𝓙·) = −σ` and `f(𝓙·,𝓙·) = −f`.
    pub type_20_02: Option<bool>,
}

fn restricted_forms(t: &TorusData, b: &AffineBrane) -> Result<(RatMatrix, RatMatrix, RatMatrix)> {
    b.check_structure(t)?;
    t.ensure_valid()?;
    let y = b.y_matrix()?;
    let omega = t.omega()?;
    let omega_v = y.transpose().dot(&omega).dot(&y);
    Ok((y, omega_v, b.f_matrix()?))
}

/// Extend the rows of `l` (in `ℚ^r`) by coordinate vectors to a basis and
/// return the added ones as columns.
fn coordinate_complement(r: usize, l: &[Vec<Rational>]) -> Result<RatMatrix> {
    let mut rows: Vec<Vec<Rational>> = l.to_vec();
    let mut picked = Vec::new();
    for i in 0..r {
        let e: Vec<Rational> = (0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect();
        rows.push(e.clone());
        if RatMatrix::from_rows(rows.clone())?.rank() == rows.len() {
            picked.push(e);
        } else {
            rows.pop();
        }
    }
    if picked.is_empty() {
        return Ok(RatMatrix::zeros(r, 0));
    }
    RatMatrix::from_columns(&picked)
}

/// Coisotropy check and the transverse data `(𝓛, 𝓝, σ, f)`.
pub fn characteristic_foliation(
    t: &TorusData,
    b: &AffineBrane,
) -> Result<std::result::Result<FoliationData, Rejection>> {
    characteristic_foliation_with(t, b, Complement::Coordinate)
}

pub fn characteristic_foliation_with(
    t: &TorusData,
    b: &AffineBrane,
    choice: Complement,
) -> Result<std::result::Result<FoliationData, Rejection>> {
    let (y, omega_v, f_v) = restricted_forms(t, b)?;
    let r = b.dim();
    // V^{⊥ω} = ker(Yᵗ ω).
    let perp = y.transpose().dot(&t.omega()?).kernel();
    for u in perp {
        if y.solve(&u)?.is_none() {
            return Ok(Err(Rejection::NotCoisotropic { witness: u }));
        }
    }
    let l_basis = omega_v.kernel();
    let mut complement = coordinate_complement(r, &l_basis)?;
    if choice == Complement::Sheared && !l_basis.is_empty() {
        let shift: Vec<Rational> = (0..r)
            .map(|i| l_basis.iter().fold(Rational::zero(), |acc, v| acc.add(&v[i])))
            .collect();
        for c in 0..complement.cols() {
            for i in 0..r {
                let v = complement.get(i, c).add(&shift[i]);
                complement.set(i, c, v);
            }
        }
    }
    let ct = complement.transpose();
    let sigma = ct.dot(&omega_v).dot(&complement);
    let f = ct.dot(&f_v).dot(&complement);
    if sigma.rows() > 0 && sigma.inverse().is_none() {
        return Err(HmsError::Inconsistency("induced transverse form is degenerate".into()));
    }
    Ok(Ok(FoliationData { n_rank: complement.cols(), l_basis, complement, sigma, f }))
}

/// Conditions (i), the dimension law, (ii) and (iii), in that order.
pub fn check_abrane(t: &TorusData, b: &AffineBrane) -> Result<AbraneReport> {
    check_abrane_with(t, b, Complement::Coordinate)
}

pub fn check_abrane_with(t: &TorusData, b: &AffineBrane, choice: Complement) -> Result<AbraneReport> {
    let mut report = AbraneReport {
        accepted: false,
        dim_y: b.dim(),
        n: t.d,
        k: None,
        rejection: None,
        foliation: None,
        transverse_complex_structure: None,
        type_20_02: None,
    };
    let fol = match characteristic_foliation_with(t, b, choice)? {
        Ok(f) => f,
        Err(rej) => {
            report.rejection = Some(rej);
            return Ok(report);
        }
    };
    let (dim_y, n) = (b.dim(), t.d);
    if dim_y < n || (dim_y - n) % 2 != 0 {
        report.rejection = Some(Rejection::DimensionLaw { dim_y, n });
        report.foliation = Some(fol);
        return Ok(report);
    }
    let k = (dim_y - n) / 2;
    report.k = Some(k);
    let f_v = b.f_matrix()?;
    for v in &fol.l_basis {
        let c = f_v.apply(v)?;
        if c.iter().any(|x| !x.is_zero()) {
            report.rejection = Some(Rejection::FoliationNotAnnihilated { leaf_vector: v.clone(), contraction: c });
            report.foliation = Some(fol);
            return Ok(report);
        }
    }
    if fol.n_rank != 4 * k {
        return Err(HmsError::Inconsistency(format!(
            "coisotropic brane of dimension {dim_y} has transverse rank {}",
            fol.n_rank
        )));
    }
    if fol.n_rank > 0 {
        let j = fol.sigma.inverse().expect("nondegenerate").dot(&fol.f);
        let sq = j.dot(&j);
        if !sq.neg().is_identity() {
            report.rejection = Some(Rejection::NotComplexStructure { square: sq });
            report.foliation = Some(fol);
            return Ok(report);
        }
        let jt = j.transpose();
        let ok = jt.dot(&fol.sigma).dot(&j) == fol.sigma.neg() && jt.dot(&fol.f).dot(&j) == fol.f.neg();
        report.type_20_02 = Some(ok);
        report.transverse_complex_structure = Some(j);
    } else {
        report.type_20_02 = Some(true);
        report.transverse_complex_structure = Some(RatMatrix::zeros(0, 0));
    }
    report.accepted = true;
    report.foliation = Some(fol);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeReport {
    pub k: Option<usize>,
    /// `∧^r(f + iσ) ≠ 0` for `r = 0, 1, …`, up to the first vanishing power.
    pub power_nonzero: Vec<bool>,
    /// True when `𝓝 = 0`, where every form of the criterion is vacuous.
    pub vacuous: bool,
    /// `∧^r ≠ 0` for `r < k` and `∧^k = 0`, as written.
    pub literal_holds: Option<bool>,
    /// `∧^r ≠ 0` for `r ≤ k` and `∧^{k+1} = 0`, the pattern of a holomorphic
    /// symplectic form on complex rank `2k`.
    pub shifted_holds: Option<bool>,
    pub condition_iii: bool,
    pub literal_agrees: Option<bool>,
    pub shifted_agrees: Option<bool>,
}

/// Powers of `f + iσ` on `𝓝`, compared against condition (iii).
pub fn wedge_characterization(t: &TorusData, b: &AffineBrane) -> Result<WedgeReport> {
    let report = check_abrane(t, b)?;
    let fol = match &report.rejection {
        None => report.foliation.clone().expect("accepted"),
        Some(Rejection::NotComplexStructure { .. }) | Some(Rejection::DimensionLaw { .. }) => {
            report.foliation.clone().expect("foliation computed")
        }
        Some(r) => {
            return Err(HmsError::Precondition(format!("brane fails {}", r.name())));
        }
    };
    let k = if report.dim_y >= report.n && (report.dim_y - report.n) % 2 == 0 {
        Some((report.dim_y - report.n) / 2)
    } else {
        None
    };
    let condition_iii = report.accepted;
    let nr = fol.n_rank;
    let to_g = |m: &RatMatrix| -> Result<ExtElement<GaussRational>> {
        Ok(ExtElement::from_skew_matrix(m)?.map_coeffs(|c| GaussRational::real(c.clone())))
    };
    let form = to_g(&fol.f)?.add(&to_g(&fol.sigma)?.scale(&GaussRational::i()))?;
    let mut power_nonzero = Vec::new();
    let mut p = ExtElement::one(nr);
    loop {
        let nz = !p.is_zero();
        power_nonzero.push(nz);
        if !nz || power_nonzero.len() > nr / 2 + 2 {
            break;
        }
        p = p.wedge(&form)?;
    }
    let nonzero = |r: usize| power_nonzero.get(r).copied().unwrap_or(false);
    let vacuous = nr == 0;
    let (literal_holds, shifted_holds) = match k {
        _ if vacuous => (Some(true), Some(true)),
        Some(k) => (
            Some((0..k).all(nonzero) && !nonzero(k)),
            Some((0..=k).all(nonzero) && !nonzero(k + 1)),
        ),
        None => (None, None),
    };
    Ok(WedgeReport {
        k,
        power_nonzero,
        vacuous,
        literal_agrees: literal_holds.map(|h| h == condition_iii),
        shifted_agrees: shifted_holds.map(|h| h == condition_iii),
        literal_holds,
        shifted_holds,
        condition_iii,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub k: usize,
    /// Coefficient of the volume form in `Ω|_Y ∧ F^k` (plain power, no `1/k!`).
    pub top_coefficient: GaussRational,
    pub h_constant: bool,
    pub alpha_h_zero: bool,
}

/// `Ω|_Y ∧ F^k = h·vol` with constant `h`, so the Bockstein class vanishes;
/// the top coefficient is checked to be nonzero.
pub fn anomaly_check_affine(t: &TorusData, b: &AffineBrane) -> Result<AnomalyReport> {
    let report = check_abrane(t, b)?;
    if !report.accepted {
        let why = report.rejection.as_ref().map_or("unknown", Rejection::name);
        return Err(HmsError::Precondition(format!("brane is not accepted: {why}")));
    }
    let k = report.k.expect("accepted");
    let r = b.dim();
    let mut omega_hol = ExtElement::one(t.rank());
    for phi in holomorphic_one_forms(t)? {
        omega_hol = omega_hol.wedge(&phi)?;
    }
    let yt = b.y_matrix()?.transpose().map(|c| GaussRational::real(c.clone()));
    let restricted = omega_hol.linear_map(&yt)?;
    let f = ExtElement::from_skew_matrix(&b.f_matrix()?)?.map_coeffs(|c| GaussRational::real(c.clone()));
    let top = restricted.wedge(&f.power(k))?;
    let vol = grade_basis(r, r)[0];
    let top_coefficient = top.coefficient(vol);
    if top_coefficient.is_zero() {
        return Err(HmsError::Inconsistency(
            "Omega|_Y ∧ F^k vanishes on an accepted brane".into(),
        ));
    }
    Ok(AnomalyReport { k, top_coefficient, h_constant: true, alpha_h_zero: true })
}
