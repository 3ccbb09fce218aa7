#![allow(dead_code)]

use rand::Rng;
use torus_hms::exact::{Field, RatMatrix, Rational};
use torus_hms::torus::{block_diagonal, rotation, TorusData};

pub fn r(n: i64) -> Rational {
    Rational::from_int(n)
}

fn random_int_matrix(rng: &mut impl Rng, n: usize, range: i64) -> RatMatrix {
    RatMatrix::from_fn(n, n, |_, _| r(rng.gen_range(-range..=range)))
}

/// Random valid torus of dimension `d`: `I = S J S⁻¹` for a random integral
/// `S`, `G = S⁻ᵗ (M + JᵗMJ) S⁻¹` with `M` positive definite, and a random
/// rational skew `B`.
pub fn random_torus(rng: &mut impl Rng, d: usize) -> TorusData {
    let n = 2 * d;
    let j = block_diagonal(&vec![rotation(); d]);
    let s = loop {
        let s = random_int_matrix(rng, n, 2);
        if s.inverse().is_some() {
            break s;
        }
    };
    let s_inv = s.inverse().unwrap();
    let a = random_int_matrix(rng, n, 2);
    let m = a.transpose().dot(&a).add(&RatMatrix::identity(n)).unwrap();
    let h = m.add(&j.transpose().dot(&m).dot(&j)).unwrap();
    let i = s.dot(&j).dot(&s_inv);
    let g = s_inv.transpose().dot(&h).dot(&s_inv);
    let mut b = RatMatrix::zeros(n, n);
    for x in 0..n {
        for y in (x + 1)..n {
            let v = Rational::new(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3));
            b.set(x, y, v.clone());
            b.set(y, x, v.neg());
        }
    }
    let t = TorusData::new(i, g, b, format!("random d={d}")).unwrap();
    t.ensure_valid().unwrap();
    t
}

/// `G = c·id` with `I` the standard rotation blocks.
pub fn scaled_square(d: usize, c: i64) -> TorusData {
    let n = 2 * d;
    TorusData::new(
        block_diagonal(&vec![rotation(); d]),
        RatMatrix::identity(n).scale(&r(c)),
        RatMatrix::zeros(n, n),
        format!("square x{c}"),
    )
    .unwrap()
}

/// `G = diag(a², b²)` with the compatible `I = [[0, −b/a], [a/b, 0]]`.
pub fn rect(a: i64, b: i64) -> (RatMatrix, RatMatrix) {
    let i = RatMatrix::from_rows(vec![
        vec![Rational::zero(), Rational::new(-b, a)],
        vec![Rational::new(a, b), Rational::zero()],
    ])
    .unwrap();
    (i, RatMatrix::diag(&[r(a * a), r(b * b)]))
}

/// Product of rectangular curves with the given side ratios.
pub fn rect_product(sides: &[(i64, i64)]) -> TorusData {
    let (is, gs): (Vec<_>, Vec<_>) = sides.iter().map(|&(a, b)| rect(a, b)).unzip();
    let n = 2 * sides.len();
    TorusData::new(block_diagonal(&is), block_diagonal(&gs), RatMatrix::zeros(n, n), "rect product").unwrap()
}

/// `E_i^n` with the product metric.
pub fn e_i_power(n: usize) -> TorusData {
    TorusData::square(n)
}
