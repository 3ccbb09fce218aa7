//! The exterior algebra on a based vector space over an exact field.
//!
//! Basis monomials are strictly increasing index tuples, stored as bitmasks.
//! Within a grade they are ordered lexicographically; across grades by grade.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::matrix::Matrix;
use super::rational::{Field, Rational};
use crate::error::{HmsError, Result};

pub const MAX_RANK: usize = 63;

/// A basis monomial `e_{i1} ∧ … ∧ e_{ik}` with `i1 < … < ik`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(pub u64);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_indices(indices: &[usize]) -> Result<Blade> {
        let mut mask = 0u64;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= MAX_RANK {
                return Err(HmsError::Dimension(format!("index {i} exceeds supported rank")));
            }
            if last.is_some_and(|l| i <= l) {
                return Err(HmsError::Parse(format!(
                    "blade indices must be strictly increasing: {indices:?}"
                )));
            }
            mask |= 1 << i;
            last = Some(i);
        }
        Ok(Blade(mask))
    }

    pub fn single(i: usize) -> Blade {
        Blade(1 << i)
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.grade());
        let mut m = self.0;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out.push(i);
            m &= m - 1;
        }
        out
    }

    /// Highest index + 1, or 0 for the scalar blade.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Number of elements strictly below `i`.
    fn count_below(self, i: usize) -> u32 {
        (self.0 & ((1u64 << i) - 1)).count_ones()
    }

    /// Sign of `self ∧ other` relative to the sorted blade, or `None` when the
    /// blades overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<bool> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut m = other.0;
        while m != 0 {
            let y = m.trailing_zeros();
            swaps += (self.0 >> (y + 1)).count_ones();
            m &= m - 1;
        }
        Some(swaps % 2 == 1)
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade().cmp(&other.grade()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("e{}", i + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// All grade-`k` blades of a rank-`n` space in lexicographic order.
pub fn grade_basis(n: usize, k: usize) -> Vec<Blade> {
    fn rec(n: usize, k: usize, start: usize, acc: u64, out: &mut Vec<Blade>) {
        if k == 0 {
            out.push(Blade(acc));
            return;
        }
        for i in start..=(n - k) {
            rec(n, k - 1, i + 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, 0, &mut out);
    }
    out
}

fn basis_index(basis: &[Blade]) -> HashMap<Blade, usize> {
    basis.iter().enumerate().map(|(i, b)| (*b, i)).collect()
}

/// An element of the exterior algebra over a rank-`base_rank` space.
#[derive(Clone, PartialEq)]
pub struct ExtElement<T = Rational> {
    base_rank: usize,
    terms: BTreeMap<Blade, T>,
}

impl<T: Field> ExtElement<T> {
    pub fn zero(base_rank: usize) -> Self {
        ExtElement { base_rank, terms: BTreeMap::new() }
    }

    pub fn scalar(base_rank: usize, c: T) -> Self {
        Self::from_blade(base_rank, Blade::SCALAR, c)
    }

    pub fn one(base_rank: usize) -> Self {
        Self::scalar(base_rank, T::one())
    }

    pub fn from_blade(base_rank: usize, blade: Blade, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(blade, c);
        }
        ExtElement { base_rank, terms }
    }

    /// The generator `e_i`.
    pub fn generator(base_rank: usize, i: usize) -> Self {
        Self::from_blade(base_rank, Blade::single(i), T::one())
    }

    /// The monomial on strictly increasing `indices` with coefficient one.
    pub fn monomial(base_rank: usize, indices: &[usize]) -> Result<Self> {
        Self::from_terms(base_rank, [(indices.to_vec(), T::one())])
    }

    /// Sum of terms; indices must be strictly increasing and below `base_rank`.
    pub fn from_terms(
        base_rank: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, T)>,
    ) -> Result<Self> {
        if base_rank > MAX_RANK {
            return Err(HmsError::Dimension(format!("rank {base_rank} exceeds {MAX_RANK}")));
        }
        let mut out = Self::zero(base_rank);
        for (idx, c) in terms {
            if idx.iter().any(|&i| i >= base_rank) {
                return Err(HmsError::Dimension(format!(
                    "index in {idx:?} outside rank {base_rank}"
                )));
            }
            out.add_term(Blade::from_indices(&idx)?, c);
        }
        Ok(out)
    }

    /// `Σ_{i<j} m[i][j] e_i ∧ e_j` for a skew matrix `m`.
    pub fn from_skew_matrix(m: &Matrix<T>) -> Result<Self> {
        if !m.is_skew() {
            return Err(HmsError::Grade("two-form matrix must be skew-symmetric".into()));
        }
        let n = m.rows();
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                out.add_term(Blade((1 << i) | (1 << j)), m.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Inverse of [`from_skew_matrix`](Self::from_skew_matrix) on the grade-2 part.
    pub fn to_skew_matrix(&self) -> Matrix<T> {
        let n = self.base_rank;
        let mut m = Matrix::zeros(n, n);
        for (b, c) in self.terms.iter().filter(|(b, _)| b.grade() == 2) {
            let idx = b.indices();
            m.set(idx[0], idx[1], c.clone());
            m.set(idx[1], idx[0], c.neg());
        }
        m
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: Blade) -> T {
        self.terms.get(&blade).cloned().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, blade: Blade, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&blade) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&blade);
                }
            }
            None => {
                self.terms.insert(blade, c);
            }
        }
    }

    /// The grade if the element is homogeneous; `None` for zero or mixed.
    pub fn pure_grade(&self) -> Option<usize> {
        let mut grades = self.terms.keys().map(|b| b.grade());
        let g = grades.next()?;
        grades.all(|h| h == g).then_some(g)
    }

    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.terms.keys().all(|b| b.grade() == k)
    }

    pub fn grade_part(&self, k: usize) -> Self {
        ExtElement {
            base_rank: self.base_rank,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == k)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    pub fn max_grade(&self) -> Option<usize> {
        self.terms.keys().map(|b| b.grade()).max()
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.base_rank != other.base_rank {
            return Err(HmsError::Dimension(format!(
                "exterior algebras of rank {} and {}",
                self.base_rank, other.base_rank
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(T::neg)
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.base_rank);
        }
        self.map_coeffs(|c| c.mul(s))
    }

    pub fn map_coeffs<U: Field>(&self, f: impl Fn(&T) -> U) -> ExtElement<U> {
        let mut out = ExtElement::zero(self.base_rank);
        for (b, c) in &self.terms {
            out.add_term(*b, f(c));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = Self::zero(self.base_rank);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(neg) = a.wedge_sign(*b) {
                    let c = ca.mul(cb);
                    out.add_term(Blade(a.0 | b.0), if neg { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ … ∧ self` (`k` factors), with `power(0) = 1`.
    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::one(self.base_rank);
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = acc.wedge(self).expect("same rank");
        }
        acc
    }

    /// Left contraction by the dual basis vector of `e_i`.
    pub fn contract(&self, i: usize) -> Self {
        let mut out = Self::zero(self.base_rank);
        for (b, c) in &self.terms {
            if b.contains(i) {
                let neg = b.count_below(i) % 2 == 1;
                out.add_term(Blade(b.0 & !(1 << i)), if neg { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Contraction by a grade-2 element read as a bivector in the dual space:
    /// each term `c · e_i∧e_j` (`i<j`) acts as `c · ι_j ∘ ι_i`, so
    /// `ι_{e1∧e2}(e1∧e2) = 1`.
    pub fn interior(bivector: &Self, a: &Self) -> Result<Self> {
        bivector.check_rank(a)?;
        if !bivector.is_homogeneous_of(2) {
            return Err(HmsError::Grade("interior multiplication needs a pure bivector".into()));
        }
        let mut out = Self::zero(a.base_rank);
        for (b, c) in &bivector.terms {
            let idx = b.indices();
            let part = a.contract(idx[0]).contract(idx[1]).scale(c);
            out = out.add(&part)?;
        }
        Ok(out)
    }

    /// `Σ_k a^{∧k}/k!` for a pure grade-2 `a`.
    pub fn exp_grade2(a: &Self) -> Result<Self> {
        if !a.is_homogeneous_of(2) {
            return Err(HmsError::Grade("exponential is defined here for pure grade 2".into()));
        }
        let mut sum = Self::one(a.base_rank);
        let mut term = Self::one(a.base_rank);
        let mut k = 0i64;
        loop {
            k += 1;
            term = term.wedge(a)?.scale(&T::from_rational(Rational::new(1, k)));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Functorial action of the linear map `m` (generator `e_i` goes to column
    /// `i` of `m`).
    pub fn linear_map(&self, m: &Matrix<T>) -> Result<Self> {
        if m.cols() != self.base_rank {
            return Err(HmsError::Dimension(format!(
                "{}x{} map on rank {}",
                m.rows(),
                m.cols(),
                self.base_rank
            )));
        }
        let target = m.rows();
        let images: Vec<Self> = (0..m.cols())
            .map(|i| {
                let mut v = Self::zero(target);
                for r in 0..target {
                    v.add_term(Blade::single(r), m.get(r, i).clone());
                }
                v
            })
            .collect();
        let mut out = Self::zero(target);
        for (b, c) in &self.terms {
            let mut img = Self::scalar(target, c.clone());
            for i in b.indices() {
                img = img.wedge(&images[i])?;
                if img.is_zero() {
                    break;
                }
            }
            out = out.add(&img)?;
        }
        Ok(out)
    }

    /// Coefficient vector of the grade-`k` part in the lexicographic basis.
    pub fn grade_vector(&self, k: usize) -> Vec<T> {
        grade_basis(self.base_rank, k).iter().map(|b| self.coefficient(*b)).collect()
    }

    pub fn from_grade_vector(base_rank: usize, k: usize, v: &[T]) -> Result<Self> {
        let basis = grade_basis(base_rank, k);
        if basis.len() != v.len() {
            return Err(HmsError::Dimension("grade vector length".into()));
        }
        let mut out = Self::zero(base_rank);
        for (b, c) in basis.iter().zip(v) {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    /// Basis pairing `⟨e_I, e_J⟩ = δ_IJ`.
    pub fn pairing(&self, other: &Self) -> T {
        self.terms
            .iter()
            .filter_map(|(b, c)| other.terms.get(b).map(|d| c.mul(d)))
            .fold(T::zero(), |acc, x| acc.add(&x))
    }

    /// Insert this element into a larger algebra by renaming generator `i`
    /// to `target[i]`, with Koszul signs from reordering.
    pub fn relabel(&self, new_rank: usize, target: &[usize]) -> Result<Self> {
        if target.len() != self.base_rank || target.iter().any(|&t| t >= new_rank) {
            return Err(HmsError::Dimension("relabel map".into()));
        }
        let mut out = Self::zero(new_rank);
        for (b, c) in &self.terms {
            let mut blade = Blade::SCALAR;
            let mut neg = false;
            for i in b.indices() {
                let g = Blade::single(target[i]);
                match blade.wedge_sign(g) {
                    Some(s) => {
                        neg ^= s;
                        blade = Blade(blade.0 | g.0);
                    }
                    None => return Err(HmsError::Dimension("relabel map is not injective".into())),
                }
            }
            out.add_term(blade, if neg { c.neg() } else { c.clone() });
        }
        Ok(out)
    }
}

impl<T: Field> fmt::Debug for ExtElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("({c}){b:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Matrix of the functorial action of `m` on grade `k`, lexicographic basis.
pub fn induced_map<T: Field>(m: &Matrix<T>, grade: usize) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(HmsError::Dimension("induced map needs a square matrix".into()));
    }
    let n = m.rows();
    let basis = grade_basis(n, grade);
    let index = basis_index(&basis);
    let mut out = Matrix::zeros(basis.len(), basis.len());
    for (col, b) in basis.iter().enumerate() {
        let img = ExtElement::from_blade(n, *b, T::one()).linear_map(m)?;
        for (ib, c) in img.terms() {
            out.set(index[ib], col, c.clone());
        }
    }
    Ok(out)
}

/// Matrix on grade `k` of the derivation extending `m`:
/// `D(v1∧…∧vk) = Σ_r v1∧…∧m·vr∧…∧vk`.
pub fn derivation_map<T: Field>(m: &Matrix<T>, grade: usize) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(HmsError::Dimension("derivation needs a square matrix".into()));
    }
    let n = m.rows();
    let basis = grade_basis(n, grade);
    let index = basis_index(&basis);
    let mut out: Matrix<T> = Matrix::zeros(basis.len(), basis.len());
    for (col, b) in basis.iter().enumerate() {
        for (slot, j) in b.indices().into_iter().enumerate() {
            let rest = Blade(b.0 & !(1 << j));
            for i in 0..n {
                let c = m.get(i, j);
                if c.is_zero() || rest.contains(i) {
                    continue;
                }
                let neg = (slot as u32 + rest.count_below(i)) % 2 == 1;
                let row = index[&Blade(rest.0 | (1 << i))];
                let cur = out.get(row, col).clone();
                out.set(row, col, if neg { cur.sub(c) } else { cur.add(c) });
            }
        }
    }
    Ok(out)
}

/// Matrix of `x ↦ w ∧ x` from grade `k` to grade `k + deg(w)`.
pub fn wedge_map<T: Field>(w: &ExtElement<T>, grade: usize) -> Result<Matrix<T>> {
    let deg = w
        .pure_grade()
        .ok_or_else(|| HmsError::Grade("wedge map needs a homogeneous nonzero element".into()))?;
    let n = w.base_rank();
    let src = grade_basis(n, grade);
    let dst = grade_basis(n, grade + deg);
    let index = basis_index(&dst);
    let mut out = Matrix::zeros(dst.len(), src.len());
    for (col, b) in src.iter().enumerate() {
        let img = w.wedge(&ExtElement::from_blade(n, *b, T::one()))?;
        for (ib, c) in img.terms() {
            out.set(index[ib], col, c.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::RatMatrix;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn e(rank: usize, idx: &[usize]) -> ExtElement {
        ExtElement::monomial(rank, idx).unwrap()
    }

    #[test]
    fn wedge_basis_and_alternation() {
        let e1 = e(2, &[0]);
        let e2 = e(2, &[1]);
        assert_eq!(e1.wedge(&e2).unwrap(), e(2, &[0, 1]));
        assert!(e1.wedge(&e1).unwrap().is_zero());
        assert_eq!(e2.wedge(&e1).unwrap(), e(2, &[0, 1]).neg());
    }

    #[test]
    fn wedge_of_sum_and_difference() {
        // (e1+e2)∧(e1−e2) = −e1∧e2 + e2∧e1 = −2 e12
        let e1 = e(2, &[0]);
        let e2 = e(2, &[1]);
        let lhs = e1.add(&e2).unwrap().wedge(&e1.sub(&e2).unwrap()).unwrap();
        assert_eq!(lhs, e(2, &[0, 1]).scale(&r(-2)));
    }

    #[test]
    fn wedge_rank_mismatch() {
        assert!(matches!(e(2, &[0]).wedge(&e(3, &[0])), Err(HmsError::Dimension(_))));
    }

    #[test]
    fn interior_examples() {
        let b = e(4, &[0, 1]);
        assert_eq!(ExtElement::interior(&b, &e(4, &[0, 1])).unwrap(), ExtElement::one(4));
        assert!(ExtElement::interior(&b, &e(4, &[2, 3])).unwrap().is_zero());
        assert_eq!(ExtElement::interior(&b, &e(4, &[0, 1, 2, 3])).unwrap(), e(4, &[2, 3]));
        assert!(ExtElement::interior(&b, &e(4, &[0])).unwrap().is_zero());
        assert!(ExtElement::interior(&e(4, &[0]), &e(4, &[0, 1])).is_err());
    }

    #[test]
    fn exponential_examples() {
        assert_eq!(ExtElement::exp_grade2(&ExtElement::<Rational>::zero(2)).unwrap(), ExtElement::one(2));
        let a = e(2, &[0, 1]);
        assert_eq!(
            ExtElement::exp_grade2(&a).unwrap(),
            ExtElement::one(2).add(&a).unwrap()
        );
        let b = e(4, &[0, 1]).add(&e(4, &[2, 3])).unwrap();
        let expected = ExtElement::from_terms(
            4,
            [(vec![], r(1)), (vec![0, 1], r(1)), (vec![2, 3], r(1)), (vec![0, 1, 2, 3], r(1))],
        )
        .unwrap();
        assert_eq!(ExtElement::exp_grade2(&b).unwrap(), expected);
        assert!(matches!(ExtElement::exp_grade2(&e(4, &[0])), Err(HmsError::Grade(_))));
    }

    #[test]
    fn induced_map_examples() {
        assert!(induced_map(&RatMatrix::identity(4), 2).unwrap().is_identity());
        let d = RatMatrix::from_ints(&[&[2, 0], &[0, 3]]);
        assert_eq!(induced_map(&d, 2).unwrap(), RatMatrix::from_ints(&[&[6]]));
        let rot = RatMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        assert_eq!(induced_map(&rot, 2).unwrap(), RatMatrix::from_ints(&[&[1]]));
        assert!(induced_map(&RatMatrix::zeros(2, 3), 1).is_err());
    }

    #[test]
    fn blade_order_is_lexicographic() {
        let basis = grade_basis(4, 2);
        let tuples: Vec<Vec<usize>> = basis.iter().map(|b| b.indices()).collect();
        assert_eq!(
            tuples,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut sorted = basis.clone();
        sorted.reverse();
        sorted.sort();
        assert_eq!(sorted, basis);
    }

    #[test]
    fn derivation_on_grade_one_is_the_matrix() {
        let m = RatMatrix::from_ints(&[&[1, 2, 0], &[0, -1, 3], &[4, 0, 5]]);
        assert_eq!(derivation_map(&m, 1).unwrap(), m);
    }

    #[test]
    fn derivation_matches_product_rule() {
        let m = RatMatrix::from_ints(&[&[1, 2, 0], &[0, -1, 3], &[4, 0, 5]]);
        let basis = grade_basis(3, 2);
        let dm = derivation_map(&m, 2).unwrap();
        for (col, b) in basis.iter().enumerate() {
            let idx = b.indices();
            let u = ExtElement::generator(3, idx[0]);
            let v = ExtElement::generator(3, idx[1]);
            let mu = u.linear_map(&m).unwrap();
            let mv = v.linear_map(&m).unwrap();
            let expected = mu.wedge(&v).unwrap().add(&u.wedge(&mv).unwrap()).unwrap();
            assert_eq!(dm.column(col), expected.grade_vector(2));
        }
    }

    #[test]
    fn relabel_tracks_signs() {
        let x = e(2, &[0, 1]);
        // e1 -> slot 2, e2 -> slot 0: e3∧e1 = −e1∧e3
        assert_eq!(x.relabel(3, &[2, 0]).unwrap(), e(3, &[0, 2]).neg());
    }

    #[test]
    fn skew_matrix_round_trip() {
        let m = RatMatrix::from_ints(&[&[0, 2, -1], &[-2, 0, 3], &[1, -3, 0]]);
        let w = ExtElement::from_skew_matrix(&m).unwrap();
        assert_eq!(w.to_skew_matrix(), m);
        assert!(ExtElement::from_skew_matrix(&RatMatrix::identity(2)).is_err());
    }
}
