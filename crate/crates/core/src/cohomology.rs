//! Rational cohomology of flat tori as the exterior algebra on `Γ*⊗ℚ`.

use serde::{Deserialize, Serialize};

use crate::error::{HmsError, Result};
use crate::exact::{
    binomial, derivation_map, induced_map, wedge_map, Blade, ExtElement, Field, GaussMatrix,
    GaussRational, RatMatrix, Rational,
};
use crate::tduality::LagrangianSplitting;
use crate::torus::TorusData;

/// A rational cohomology class, stored as an exterior-algebra element on the
/// dual lattice basis `e^1..e^{2d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CohClass {
    pub element: ExtElement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradeTerm {
    /// 0-based, strictly increasing generator indices.
    pub indices: Vec<usize>,
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohClassJson {
    pub grade_terms: Vec<GradeTerm>,
}

impl CohClass {
    pub fn new(element: ExtElement) -> Self {
        CohClass { element }
    }

    pub fn rank(&self) -> usize {
        self.element.base_rank()
    }

    pub fn from_json(json: &CohClassJson, rank: usize) -> Result<Self> {
        let mut e = ExtElement::zero(rank);
        for t in &json.grade_terms {
            if t.indices.iter().any(|&i| i >= rank) {
                return Err(HmsError::Dimension(format!(
                    "index in {:?} out of range for rank {rank}",
                    t.indices
                )));
            }
            e.add_term(Blade::from_indices(&t.indices)?, t.coeff.clone());
        }
        Ok(CohClass { element: e })
    }

    pub fn to_json(&self) -> CohClassJson {
        CohClassJson {
            grade_terms: self
                .element
                .terms()
                .map(|(b, c)| GradeTerm { indices: b.indices(), coeff: c.clone() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeDiamond {
    pub d: usize,
    /// `h[p][q]`.
    pub h: Vec<Vec<usize>>,
}

impl HodgeDiamond {
    pub fn total(&self) -> usize {
        self.h.iter().flatten().sum()
    }
}

/// Basis of the `+i` eigenspace of `Iᵗ` on `Γ*⊗ℚ(i)`: the `(1,0)`-forms.
pub fn holomorphic_one_forms(t: &TorusData) -> Result<Vec<ExtElement<GaussRational>>> {
    t.ensure_valid()?;
    let n = t.rank();
    let it: GaussMatrix = t.complex_structure.transpose().to_gauss();
    let shift = GaussMatrix::identity(n).scale(&GaussRational::i());
    let kernel = it.sub(&shift)?.kernel();
    Ok(kernel
        .into_iter()
        .map(|v| ExtElement::from_grade_vector(n, 1, &v).expect("length"))
        .collect())
}

fn conj_element(e: &ExtElement<GaussRational>) -> ExtElement<GaussRational> {
    e.map_coeffs(|c| c.conj())
}

/// `h^{p,q}` as the rank of the span of `φ_I ∧ φ̄_J` with `|I| = p`, `|J| = q`,
/// cross-checked against `C(d,p)·C(d,q)`.
pub fn hodge_diamond(t: &TorusData) -> Result<HodgeDiamond> {
    let one_forms = holomorphic_one_forms(t)?;
    let d = t.d;
    let n = t.rank();
    if one_forms.len() != d {
        return Err(HmsError::Inconsistency(format!(
            "found {} holomorphic 1-forms for d={d}",
            one_forms.len()
        )));
    }
    let anti: Vec<_> = one_forms.iter().map(conj_element).collect();
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        crate::exact::grade_basis(d, k).into_iter().map(|b| b.indices()).collect()
    };
    let wedge_all = |forms: &[ExtElement<GaussRational>], idx: &[usize]| {
        idx.iter().fold(ExtElement::one(n), |acc, &i| acc.wedge(&forms[i]).expect("rank"))
    };
    let mut h = vec![vec![0usize; d + 1]; d + 1];
    for p in 0..=d {
        for q in 0..=d {
            let mut rows = Vec::new();
            for a in subsets(p) {
                let hol = wedge_all(&one_forms, &a);
                for b in subsets(q) {
                    rows.push(hol.wedge(&wedge_all(&anti, &b))?.grade_vector(p + q));
                }
            }
            let rank = GaussMatrix::from_rows(rows)?.rank();
            if rank != binomial(d, p) * binomial(d, q) {
                return Err(HmsError::Inconsistency(format!(
                    "h^({p},{q}) = {rank} disagrees with the binomial count"
                )));
            }
            h[p][q] = rank;
        }
    }
    Ok(HodgeDiamond { d, h })
}

/// `ℚ`-basis of rational classes of type `(p,p)`: the kernel of the
/// derivation extending `Iᵗ` on grade `2p`.
pub fn rational_pp_classes(t: &TorusData, p: usize) -> Result<Vec<CohClass>> {
    t.ensure_valid()?;
    if p > t.d {
        return Err(HmsError::Grade(format!("p={p} exceeds d={}", t.d)));
    }
    let n = t.rank();
    let dmap = derivation_map(&t.complex_structure.transpose(), 2 * p)?;
    dmap.kernel()
        .into_iter()
        .map(|v| Ok(CohClass::new(ExtElement::from_grade_vector(n, 2 * p, &v)?)))
        .collect()
}

/// Dimension of the kernel of `∧ω` from grade `d` to grade `d + 2`.
pub fn lefschetz_kernel_dim(t: &TorusData) -> Result<usize> {
    let omega = ExtElement::from_skew_matrix(&t.omega()?)?;
    let m = wedge_map(&omega, t.d)?;
    Ok(m.cols() - m.rank())
}

/// Cohomological Fourier–Mukai transform along `T = A × B → Â × B`.
///
/// The class is first written in the splitting basis, then pulled back to
/// the algebra on `Γ_A* ⊕ Γ_A ⊕ Γ_B*` (generators `η`, `η̂`, `β`), multiplied
/// by `exp(Σ ηᵢ∧η̂ᵢ)`, and pushed forward by extracting `η₁∧…∧η_d` from the
/// left. The result lives on the mirror basis `(η̂, β)`.
pub fn fm_transform(t: &TorusData, s: &LagrangianSplitting, alpha: &CohClass) -> Result<CohClass> {
    s.check(t)?;
    let d = t.d;
    let n = t.rank();
    if alpha.rank() != n {
        return Err(HmsError::Dimension(format!(
            "class has rank {}, torus has rank {n}",
            alpha.rank()
        )));
    }
    let split = alpha.element.linear_map(&s.change_of_basis()?.transpose())?;
    Ok(CohClass::new(fm_split_basis(d, &split)?))
}

/// The transform on a class already written in a split basis
/// `(A-coordinates, B-coordinates)`.
pub fn fm_split_basis(d: usize, alpha: &ExtElement) -> Result<ExtElement> {
    let n = 2 * d;
    let ambient = 3 * d;
    let embed: Vec<usize> = (0..n).map(|k| if k < d { k } else { d + k }).collect();
    let pulled = alpha.relabel(ambient, &embed)?;
    let mut poincare = ExtElement::zero(ambient);
    for i in 0..d {
        poincare = poincare.add(&ExtElement::monomial(ambient, &[i, d + i])?)?;
    }
    let product = pulled.wedge(&ExtElement::exp_grade2(&poincare)?)?;
    let eta_vol = Blade((1u64 << d) - 1);
    let mut out = ExtElement::zero(n);
    for (b, c) in product.terms() {
        if b.0 & eta_vol.0 != eta_vol.0 {
            continue;
        }
        let rest = Blade(b.0 & !eta_vol.0);
        let neg = eta_vol.wedge_sign(rest).expect("disjoint");
        let target = Blade(rest.0 >> d);
        out.add_term(target, if neg { c.neg() } else { c.clone() });
    }
    Ok(out)
}

/// Sign `s` in the bivector `P = s · Σ_{i<j} (ω⁻¹)_{ij} e_i∧e_j` used for
/// `ι_{ω⁻¹}`; fixed so that images of rational `(p,p)`-classes satisfy the
/// mirror condition.
pub const BIVECTOR_SIGN: i64 = -1;

/// The bivector `ω⁻¹` as a grade-2 element on the dual generators.
pub fn inverse_bivector(omega: &RatMatrix) -> Result<ExtElement> {
    let inv = omega
        .inverse()
        .ok_or_else(|| HmsError::Precondition("symplectic form is degenerate".into()))?;
    Ok(ExtElement::from_skew_matrix(&inv)?.scale(&Rational::from_int(BIVECTOR_SIGN)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorConditionReport {
    pub holds: bool,
    /// `ι_{ω⁻¹}α′ − ω∧α′`.
    pub residual: ExtElement,
}

pub fn mirror_class_condition(tprime: &TorusData, alphaprime: &CohClass) -> Result<MirrorConditionReport> {
    let omega = tprime.omega()?;
    if alphaprime.rank() != tprime.rank() {
        return Err(HmsError::Dimension("class and torus ranks differ".into()));
    }
    let w = ExtElement::from_skew_matrix(&omega)?;
    let p = inverse_bivector(&omega)?;
    let residual = ExtElement::interior(&p, &alphaprime.element)?.sub(&w.wedge(&alphaprime.element)?)?;
    Ok(MirrorConditionReport { holds: residual.is_zero(), residual })
}

/// First nonzero integral 2-form `a` (entries of height ≤ `bound`, in
/// enumeration order) with `e^a` satisfying the mirror condition.
pub fn find_exponential_solution(tprime: &TorusData, bound: u32) -> Result<Option<ExtElement>> {
    let n = tprime.rank();
    let blades = crate::exact::grade_basis(n, 2);
    let mut found = None;
    let mut err = None;
    crate::equivalence::for_each_charge(blades.len(), i64::from(bound), |v| {
        if found.is_some() || err.is_some() || v.iter().all(|&x| x == 0) {
            return;
        }
        let coeffs: Vec<Rational> = v.iter().map(|&x| Rational::from_int(x)).collect();
        let a = ExtElement::from_grade_vector(n, 2, &coeffs).expect("length");
        let ea = ExtElement::exp_grade2(&a).expect("grade 2");
        match mirror_class_condition(tprime, &CohClass::new(ea)) {
            Ok(r) if r.holds => found = Some(a),
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub torsion: bool,
    /// Coordinates of the `(0,2)`-part of `B` on `Λ²` (lexicographic basis).
    pub projection: Vec<GaussRational>,
    pub projection_is_zero: bool,
    /// Rational coefficients on the integral basis `e^i∧e^j` reproducing the
    /// projection, when they exist.
    pub coefficients: Option<Vec<Rational>>,
}

/// `(0,2)`-projection of `B` and its membership in the rational span of the
/// projections of integral basis 2-forms.
pub fn beta_torsion(t: &TorusData) -> Result<BetaReport> {
    t.ensure_valid()?;
    let n = t.rank();
    // π^{0,1} = (1 + i·Iᵗ)/2 on 1-forms.
    let it = t.complex_structure.transpose().to_gauss();
    let half = GaussRational::real(Rational::new(1, 2));
    let pi01 = GaussMatrix::identity(n).add(&it.scale(&GaussRational::i()))?.scale(&half);
    let proj = induced_map(&pi01, 2)?;
    let b = ExtElement::from_skew_matrix(&t.b_field)?
        .map_coeffs(|c| GaussRational::real(c.clone()))
        .grade_vector(2);
    let projection = proj.apply(&b)?;
    let split = |v: &[GaussRational]| -> Vec<Rational> {
        v.iter().map(|z| z.re.clone()).chain(v.iter().map(|z| z.im.clone())).collect()
    };
    let cols: Vec<Vec<Rational>> = (0..proj.cols()).map(|j| split(&proj.column(j))).collect();
    let system = RatMatrix::from_columns(&cols)?;
    let coefficients = system.solve(&split(&projection))?;
    Ok(BetaReport {
        torsion: coefficients.is_some(),
        projection_is_zero: projection.iter().all(Field::is_zero),
        projection,
        coefficients,
    })
}
