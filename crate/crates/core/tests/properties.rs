mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_hms::cohomology::fm_split_basis;
use torus_hms::equivalence::{verify_map, LatticeMap, RelationKind};
use torus_hms::exact::{grade_basis, ExtElement, Field, RatMatrix, Rational};
use torus_hms::fock::{verify_all, HalfInt, TruncatedFock, Verdict};
use torus_hms::tduality::{find_lagrangian_splitting, mirror_via_tduality};
use torus_hms::torus::{cal_j, ChargeVector, TorusData};

use common::{r, random_torus};

fn int_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| RatMatrix::from_fn(n, n, |i, j| r(v[i * n + j])))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=7).prop_map(|(a, b)| Rational::new(a, b))
}

/// Random homogeneous element of grade `k` on rank `n`.
fn homogeneous(n: usize, k: usize) -> impl Strategy<Value = ExtElement> {
    let basis = grade_basis(n, k);
    prop::collection::vec(-3i64..=3, basis.len()).prop_map(move |cs| {
        let mut e = ExtElement::zero(n);
        for (b, c) in basis.iter().zip(cs) {
            e.add_term(*b, r(c));
        }
        e
    })
}

fn torus_strategy(max_d: usize) -> impl Strategy<Value = TorusData> {
    (1..=max_d, any::<u64>()).prop_map(|(d, seed)| random_torus(&mut ChaCha8Rng::seed_from_u64(seed), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.sub(&a), Rational::zero());
        if !b.is_zero() {
            prop_assert_eq!(a.div(&b).mul(&b), a);
        }
    }

    #[test]
    fn inverse_is_two_sided(m in int_matrix(4)) {
        if let Some(inv) = m.inverse() {
            prop_assert!(m.dot(&inv).is_identity());
            prop_assert!(inv.dot(&m).is_identity());
            prop_assert_eq!(m.determinant().unwrap().mul(&inv.determinant().unwrap()), Rational::one());
        } else {
            prop_assert!(m.determinant().unwrap().is_zero());
        }
    }

    #[test]
    fn rank_nullity_and_kernel(rows in 1usize..=5, v in prop::collection::vec(-2i64..=2, 25)) {
        let m = RatMatrix::from_fn(rows, 5, |i, j| r(v[i * 5 + j]));
        let ker = m.kernel();
        prop_assert_eq!(m.rank() + ker.len(), 5);
        for k in &ker {
            prop_assert!(m.apply(k).unwrap().iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn wedge_graded_commutative(
        (p, q, a, b) in (0usize..=3, 0usize..=3)
            .prop_flat_map(|(p, q)| (Just(p), Just(q), homogeneous(5, p), homogeneous(5, q)))
    ) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let expected = if (p * q) % 2 == 0 { ba } else { ba.neg() };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn wedge_associative(a in homogeneous(5, 1), b in homogeneous(5, 2), c in homogeneous(5, 1)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn fm_twice_is_global_sign(d in 1usize..=3, seed in any::<u64>()) {
        let n = 2 * d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = ExtElement::zero(n);
        for k in 0..=n {
            for b in grade_basis(n, k) {
                a.add_term(b, r(rand::Rng::gen_range(&mut rng, -2..=2)));
            }
        }
        let sign = if (d * (d - 1) / 2) % 2 == 0 { Rational::one() } else { Rational::one().neg() };
        prop_assert_eq!(fm_split_basis(d, &fm_split_basis(d, &a).unwrap()).unwrap(), a.scale(&sign));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_tori_have_doubled_structure(t in torus_strategy(3)) {
        let ds = t.doubled().unwrap();
        let minus = RatMatrix::identity(4 * t.d).neg();
        prop_assert_eq!(ds.cal_i.dot(&ds.cal_i), minus.clone());
        prop_assert_eq!(ds.cal_j.dot(&ds.cal_j), minus);
        prop_assert_eq!(ds.cal_i.transpose().dot(&ds.q).dot(&ds.cal_i), ds.q.clone());
        prop_assert_eq!(ds.cal_j.transpose().dot(&ds.q).dot(&ds.cal_j), ds.q.clone());
        // The two structures commute.
        prop_assert_eq!(ds.cal_i.dot(&ds.cal_j), ds.cal_j.dot(&ds.cal_i));
    }

    #[test]
    fn identity_is_an_iso_certificate(t in torus_strategy(3)) {
        let c = verify_map(&t, &t, &LatticeMap::identity(RelationKind::Iso, t.d)).unwrap();
        prop_assert!(c.valid, "{:?}", c.checks);
        let neg = verify_map(&t, &t, &LatticeMap::identity(RelationKind::Iso, t.d).negated()).unwrap();
        prop_assert!(neg.valid);
    }

    #[test]
    fn zero_mode_identity(t in torus_strategy(3), v in prop::collection::vec(-5i64..=5, 12)) {
        let n = t.rank();
        let c = ChargeVector::new(v[..n].to_vec(), v[6..6 + n].to_vec());
        let z = t.zero_mode_momenta(&c).unwrap();
        prop_assert_eq!(z.pbar_sq_half.sub(&z.p_sq_half), c.q_norm());
    }

    #[test]
    fn tduality_certificate_verifies(t in torus_strategy(2)) {
        if let Some(s) = find_lagrangian_splitting(&t, 1).unwrap() {
            if let Ok(m) = mirror_via_tduality(&t, &s) {
                prop_assert!(m.duality_map.valid);
                let again = verify_map(&t, &m.mirror, &m.duality_map.map()).unwrap();
                prop_assert!(again.valid);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// `I = [[a, b], [c, -a]]` with `a² + bc = -1` and `G = [[c, -a], [-a, -b]]`
    /// all share `ω = GI`; `𝓙` must not see the difference.
    #[test]
    fn cal_j_depends_only_on_omega(a in -6i64..=6, c in 1i64..=6, a2 in -6i64..=6, c2 in 1i64..=6, bf in rational()) {
        let member = |a: i64, c: i64| {
            let b = Rational::new(-1 - a * a, c);
            let i = RatMatrix::from_rows(vec![vec![r(a), b.clone()], vec![r(c), r(-a)]]).unwrap();
            let g = RatMatrix::from_rows(vec![vec![r(c), r(-a)], vec![r(-a), b.neg()]]).unwrap();
            (i, g)
        };
        let bm = RatMatrix::from_rows(vec![vec![Rational::zero(), bf.clone()], vec![bf.neg(), Rational::zero()]]).unwrap();
        let (i1, g1) = member(a, c);
        let (i2, g2) = member(a2, c2);
        prop_assert_eq!(g1.dot(&i1), g2.dot(&i2));
        prop_assert!(TorusData::new(i1.clone(), g1.clone(), bm.clone(), "x").unwrap().ensure_valid().is_ok());
        prop_assert_eq!(cal_j(&g1, &i1, &bm).unwrap(), cal_j(&g2, &i2, &bm).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ccr_car_hold_for_random_metrics(seed in any::<u64>(), twice_cap in 1i32..=4) {
        let t = random_torus(&mut ChaCha8Rng::seed_from_u64(seed), 1);
        let space = TruncatedFock::new(1, HalfInt(twice_cap), t.metric).unwrap();
        for check in verify_all(&space).unwrap() {
            prop_assert_ne!(check.verdict, Verdict::Fail, "{:?}", check);
        }
    }
}
