//! Mirror partners by T-duality along a Lagrangian splitting `T = A × B`.

use serde::{Deserialize, Serialize};

use crate::equivalence::{verify_map, Certificate, LatticeMap, RelationKind};
use crate::error::{HmsError, Result};
use crate::exact::{Field, RatMatrix, Rational};
use crate::torus::{cal_i, cal_j, unimodular_inverse, NamedCheck, TorusData};

/// Lattice basis `(a_1..a_d, b_1..b_d)` with both halves ω-isotropic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangianSplitting {
    #[serde(rename = "A_basis")]
    pub a_basis: Vec<Vec<i64>>,
    #[serde(rename = "B_basis")]
    pub b_basis: Vec<Vec<i64>>,
}

impl LagrangianSplitting {
    pub fn new(a_basis: Vec<Vec<i64>>, b_basis: Vec<Vec<i64>>) -> Self {
        LagrangianSplitting { a_basis, b_basis }
    }

    /// Coordinate splitting `A = span(e_i : i ∈ a)`, `B` the remaining vectors.
    pub fn coordinate(rank: usize, a: &[usize]) -> Self {
        let unit = |i: usize| (0..rank).map(|k| i64::from(k == i)).collect::<Vec<_>>();
        let a_basis = a.iter().map(|&i| unit(i)).collect();
        let b_basis = (0..rank).filter(|i| !a.contains(i)).map(unit).collect();
        LagrangianSplitting { a_basis, b_basis }
    }

    /// Parse `"a1;a2|b1;b2"` with comma-separated integer vectors.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| HmsError::Parse("splitting must have the form A|B".into()))?;
        let vectors = |part: &str| -> Result<Vec<Vec<i64>>> {
            part.split(';')
                .map(|v| {
                    v.split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<i64>()
                                .map_err(|e| HmsError::Parse(format!("bad entry {x:?}: {e}")))
                        })
                        .collect()
                })
                .collect()
        };
        Ok(LagrangianSplitting { a_basis: vectors(a)?, b_basis: vectors(b)? })
    }

    /// Columns `(A_basis | B_basis)`.
    pub fn change_of_basis(&self) -> Result<RatMatrix> {
        let cols: Vec<Vec<Rational>> = self
            .a_basis
            .iter()
            .chain(&self.b_basis)
            .map(|v| v.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        RatMatrix::from_columns(&cols)
    }

    pub fn check(&self, t: &TorusData) -> Result<()> {
        let d = t.d;
        let n = t.rank();
        if self.a_basis.len() != d
            || self.b_basis.len() != d
            || self.a_basis.iter().chain(&self.b_basis).any(|v| v.len() != n)
        {
            return Err(HmsError::Dimension(format!(
                "splitting needs {d}+{d} vectors of length {n}"
            )));
        }
        unimodular_inverse(&self.change_of_basis()?)?;
        let omega = t.omega()?;
        for (name, half) in [("A", &self.a_basis), ("B", &self.b_basis)] {
            if !is_isotropic(&omega, half) {
                return Err(HmsError::Precondition(format!("{name}_basis is not ω-isotropic")));
            }
        }
        Ok(())
    }
}

fn as_rational(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_int(x)).collect()
}

fn is_isotropic(omega: &RatMatrix, vs: &[Vec<i64>]) -> bool {
    vs.iter().enumerate().all(|(i, a)| {
        vs[i + 1..]
            .iter()
            .all(|b| omega.bilinear(&as_rational(a), &as_rational(b)).expect("shape").is_zero())
    })
}

/// Nonzero vectors of height ≤ `bound`, ordered by L1 norm and then by
/// position of the leading entries (so `e1 < e2 < …`).
fn candidate_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    crate::equivalence::for_each_charge(n, bound, |v| {
        if v.iter().any(|&x| x != 0) {
            out.push(v.to_vec());
        }
    });
    let key = |v: &Vec<i64>| {
        let l1: i64 = v.iter().map(|x| x.abs()).sum();
        let pos: Vec<(bool, i64, bool)> = v.iter().map(|&x| (x == 0, x.abs(), x < 0)).collect();
        (l1, pos)
    };
    out.sort_by_key(key);
    out
}

/// Search lattice bases with entries of height ≤ `bound` for a splitting into
/// two ω-isotropic halves. Returns the first one in candidate order.
pub fn find_lagrangian_splitting(t: &TorusData, bound: u32) -> Result<Option<LagrangianSplitting>> {
    let omega = t.omega()?;
    let d = t.d;
    let n = t.rank();
    let cands: Vec<Vec<Rational>> =
        candidate_vectors(n, i64::from(bound)).iter().map(|v| as_rational(v)).collect();
    let ints = candidate_vectors(n, i64::from(bound));

    fn extend(
        chosen: &mut Vec<usize>,
        start: usize,
        size: usize,
        cands: &[Vec<Rational>],
        omega: &RatMatrix,
        prefix: &[Vec<Rational>],
        done: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.len() == size {
            return done(chosen);
        }
        for k in start..cands.len() {
            let ok = chosen
                .iter()
                .all(|&j| omega.bilinear(&cands[j], &cands[k]).expect("shape").is_zero());
            if !ok {
                continue;
            }
            // Keep the partial basis linearly independent.
            let mut cols: Vec<Vec<Rational>> = prefix.to_vec();
            cols.extend(chosen.iter().map(|&j| cands[j].clone()));
            cols.push(cands[k].clone());
            if RatMatrix::from_columns(&cols).expect("shape").rank() < cols.len() {
                continue;
            }
            chosen.push(k);
            if extend(chosen, k + 1, size, cands, omega, prefix, done) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut result = None;
    let mut a_choice = Vec::new();
    extend(&mut a_choice, 0, d, &cands, &omega, &[], &mut |a: &[usize]| {
        let prefix: Vec<Vec<Rational>> = a.iter().map(|&j| cands[j].clone()).collect();
        let mut b_choice = Vec::new();
        extend(&mut b_choice, 0, d, &cands, &omega, &prefix, &mut |b: &[usize]| {
            let s = LagrangianSplitting::new(
                a.iter().map(|&j| ints[j].clone()).collect(),
                b.iter().map(|&j| ints[j].clone()).collect(),
            );
            let det = s.change_of_basis().and_then(|m| m.determinant());
            match det {
                Ok(v) if v.abs().is_one() => {
                    result = Some(s);
                    true
                }
                _ => false,
            }
        })
    });
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorResult {
    pub mirror: TorusData,
    pub duality_map: Certificate,
    pub recovery_report: Vec<NamedCheck>,
}

/// Permutation `(w_A, w_B, m_A, m_B) ↦ (m_A, w_B, w_A, m_B)` on `ℤ^{4d}`.
fn factor_swap(d: usize) -> RatMatrix {
    let n = 4 * d;
    let target = |i: usize| -> usize {
        if i < d {
            i + 2 * d
        } else if (2 * d..3 * d).contains(&i) {
            i - 2 * d
        } else {
            i
        }
    };
    RatMatrix::from_fn(n, n, |r, c| if target(c) == r { Rational::one() } else { Rational::zero() })
}

fn recovery_error(block: &str, detail: impl Into<String>) -> HmsError {
    HmsError::Recovery { block: block.to_string(), detail: detail.into() }
}

/// Dualize the `A` factor: transport `𝓙 ↦ 𝓘′`, `𝓘 ↦ 𝓙′` along the factor
/// swap and read off `(I′, G′, B′)` in the lattice basis `(Â, B)`.
pub fn mirror_via_tduality(t: &TorusData, s: &LagrangianSplitting) -> Result<MirrorResult> {
    s.check(t)?;
    let d = t.d;
    let n = t.rank();
    let sm = s.change_of_basis()?;
    let sinv = unimodular_inverse(&sm)?;
    let ts = t.change_basis(&sm)?;
    let ds = ts.doubled()?;

    let p = factor_swap(d);
    let pinv = p.transpose();
    let to_split = RatMatrix::block_diag(&sinv, &sm.transpose());
    let g_total = p.dot(&to_split);

    let i_prime_full = p.dot(&ds.cal_j).dot(&pinv);
    let j_prime_full = p.dot(&ds.cal_i).dot(&pinv);

    let i_prime = i_prime_full.block(0, 0, n, n);
    if !i_prime_full.block(0, n, n, n).is_zero() {
        return Err(recovery_error("calI' upper-right", "transported block is not zero"));
    }
    let ur = j_prime_full.block(0, n, n, n);
    let ur_inv = ur
        .inverse()
        .ok_or_else(|| recovery_error("calJ' upper-right", "block is singular"))?;
    let ul = j_prime_full.block(0, 0, n, n);
    // Upper-right is I′G′⁻¹ = -ω′⁻¹; upper-left is -I′G′⁻¹B′.
    let omega_prime = ur_inv.neg();
    let metric = ur_inv.dot(&i_prime);
    let b_field = ur_inv.dot(&ul).neg();

    let mut report = vec![
        NamedCheck::new("I'^2 = -id", i_prime.dot(&i_prime) == RatMatrix::identity(n).neg()),
        NamedCheck::new("G' = G'^t", metric.is_symmetric()),
        NamedCheck::new("B' = -B'^t", b_field.is_skew()),
        NamedCheck::new("omega' = G' I'", metric.dot(&i_prime) == omega_prime),
    ];
    for c in &report {
        if !c.ok {
            return Err(recovery_error("recovered data", format!("{} fails", c.name)));
        }
    }
    let i_again = cal_i(&i_prime, &b_field);
    let ok_i = i_again == i_prime_full;
    report.push(NamedCheck::new("calI(I',B') = transported calJ", ok_i));
    if !ok_i {
        let block = if i_again.block(n, 0, n, n) != i_prime_full.block(n, 0, n, n) {
            "calI' lower-left"
        } else {
            "calI' lower-right"
        };
        return Err(recovery_error(block, "re-assembled matrix differs from transported one"));
    }
    let j_again = cal_j(&metric, &i_prime, &b_field)?;
    let ok_j = j_again == j_prime_full;
    report.push(NamedCheck::new("calJ(G',I',B') = transported calI", ok_j));
    if !ok_j {
        let names = ["calJ' upper-left", "calJ' upper-right", "calJ' lower-left", "calJ' lower-right"];
        let block = (0..4)
            .find(|&k| {
                let (r, c) = (k / 2 * n, k % 2 * n);
                j_again.block(r, c, n, n) != j_prime_full.block(r, c, n, n)
            })
            .map(|k| names[k])
            .unwrap_or("calJ'");
        return Err(recovery_error(block, "re-assembled matrix differs from transported one"));
    }

    let mirror = TorusData {
        d,
        complex_structure: i_prime,
        metric,
        b_field,
        label: format!("mirror({})", t.label),
    };
    let validation = mirror.validate()?;
    if let Some(name) = validation.first_failure() {
        return Err(recovery_error("mirror torus", format!("{name} fails")));
    }
    report.extend(validation.checks);

    let map = LatticeMap::from_matrix(RelationKind::Mirror, &g_total)?;
    let cert = verify_map(t, &mirror, &map)?;
    if !cert.valid {
        return Err(HmsError::Inconsistency(format!(
            "duality map fails {}",
            cert.refutation.clone().unwrap_or_default()
        )));
    }
    Ok(MirrorResult { mirror, duality_map: cert, recovery_report: report })
}

/// Splitting of the mirror that dualizes `Â` back: its first `d` lattice
/// vectors.
pub fn dual_splitting(d: usize) -> LagrangianSplitting {
    LagrangianSplitting::coordinate(2 * d, &(0..d).collect::<Vec<_>>())
}
