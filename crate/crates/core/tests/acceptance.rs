//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_hms::abranes::{check_abrane, AffineBrane, Rejection};
use torus_hms::cohomology::{
    fm_transform, hodge_diamond, lefschetz_kernel_dim, mirror_class_condition, rational_pp_classes, CohClass,
};
use torus_hms::equivalence::{for_each_charge, search_relation, RelationKind, SearchOptions};
use torus_hms::exact::{binomial, ExtElement, Field, RatMatrix};
use torus_hms::fock::{verify_all, HalfInt, TruncatedFock, Verdict};
use torus_hms::tduality::{dual_splitting, find_lagrangian_splitting, mirror_via_tduality, LagrangianSplitting};
use torus_hms::torus::{block_diagonal, rotation, ChargeVector, TorusData};

use common::{e_i_power, random_torus, rect_product, scaled_square};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let e = start.elapsed();
    if e > limit {
        Err(format!("took {:.2?}, limit {:.0?}", e, limit))
    } else {
        Ok(e)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Self-mirror square torus, bound ≤ 2, certificate = ±(w¹ ↔ m₁ swap), < 1 s.
fn criterion_1() -> Outcome {
    let t = TorusData::square(1);
    let start = Instant::now();
    let out = search_relation(&t, &t, RelationKind::Mirror, SearchOptions::with_bound(2)).map_err(err)?;
    let elapsed = within(Duration::from_secs(1), start)?;
    let cert = out.certificate().ok_or("no mirror certificate within bound 2")?;
    ensure!(cert.valid, "certificate does not verify");
    let swap = vec![vec![0, 0, 1, 0], vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1]];
    let neg: Vec<Vec<i64>> = swap.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    ensure!(cert.g == swap || cert.g == neg, "certificate {:?} is not ±swap", cert.g);
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/square.json");
    let start = Instant::now();
    let (code, out) = torus_hms::cli::run(["torus-hms", "check-mirror", data, data, "--bound", "2"]);
    within(Duration::from_secs(1), start)?;
    let report: serde_json::Value = serde_json::from_str(&out).map_err(err)?;
    ensure!(code == 0, "check-mirror exited {code}");
    let g: Vec<Vec<i64>> = serde_json::from_value(report["result"]["certificate"]["g"].clone()).map_err(err)?;
    ensure!(g == cert.g, "CLI certificate {g:?} differs from the library's");
    Ok(format!("g = {}swap, {:.2?}; check-mirror exit 0", if cert.g == swap { "" } else { "-" }, elapsed))
}

/// Double T-duality with the dual splitting is iso-certified at bound ≤ 2.
fn criterion_2() -> Outcome {
    let mut b11 = TorusData::square(1);
    b11.b_field = RatMatrix::from_ints(&[&[0, 1], &[-1, 0]]);
    let product = TorusData::new(
        block_diagonal(&[rotation(), rotation()]),
        RatMatrix::block_diag(&scaled_square(1, 4).metric, &scaled_square(1, 3).metric),
        RatMatrix::zeros(4, 4),
        "product",
    )
    .map_err(err)?;
    let cases = [
        TorusData::square(1),
        scaled_square(1, 2),
        b11,
        rect_product(&[(2, 1)]),
        TorusData::square(2),
        product,
        rect_product(&[(1, 2), (3, 1)]),
    ];
    let start = Instant::now();
    for t in &cases {
        let s = find_lagrangian_splitting(t, 1).map_err(err)?.ok_or("no splitting")?;
        let once = mirror_via_tduality(t, &s).map_err(err)?;
        let twice = mirror_via_tduality(&once.mirror, &dual_splitting(t.d)).map_err(err)?;
        let out = search_relation(t, &twice.mirror, RelationKind::Iso, SearchOptions::with_bound(2)).map_err(err)?;
        ensure!(out.certificate().is_some_and(|c| c.valid), "{}: no iso certificate at bound 2", t.label);
    }
    let e = within(Duration::from_secs(10), start)?;
    Ok(format!("{} tori at d = 1, 2, {:.2?}", cases.len(), e))
}

/// Σ_p dim of rational (p,p) classes on E_i^n is C(2n,n): 6 and 20.
fn chern_count(n: usize) -> Result<usize, String> {
    let t = e_i_power(n);
    let mut total = 0;
    for p in 0..=n {
        total += rational_pp_classes(&t, p).map_err(err)?.len();
    }
    Ok(total)
}

fn criterion_3() -> Outcome {
    let c2 = chern_count(2)?;
    ensure!(c2 == 6 && c2 == binomial(4, 2), "n=2: {c2}");
    let start = Instant::now();
    let c3 = chern_count(3)?;
    let e = within(Duration::from_secs(30), start)?;
    ensure!(c3 == 20 && c3 == binomial(6, 3), "n=3: {c3}");
    Ok(format!("n=2: {c2}, n=3: {c3} ({:.2?})", e))
}

fn lefschetz_tori(n: usize) -> Vec<TorusData> {
    let mut rng = ChaCha8Rng::seed_from_u64(4000 + n as u64);
    let mut sides = vec![(1, 1); n];
    sides[0] = (2, 1);
    vec![
        TorusData::square(n),
        scaled_square(n, 3),
        rect_product(&sides),
        random_torus(&mut rng, n),
    ]
}

/// Kernel of ∧ω on H^n is C(2n,n) − C(2n,n+2): 5 and 14, for several ω.
fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    for (n, want) in [(2usize, 5usize), (3, 14)] {
        let tori = lefschetz_tori(n);
        let mut omegas: Vec<RatMatrix> = Vec::new();
        for t in &tori {
            let k = lefschetz_kernel_dim(t).map_err(err)?;
            ensure!(k == want, "n={n}, {}: kernel {k}", t.label);
            let w = t.omega().map_err(err)?;
            if !omegas.contains(&w) {
                omegas.push(w);
            }
        }
        ensure!(omegas.len() >= 3, "only {} distinct ω at n={n}", omegas.len());
        ensure!(want == binomial(2 * n, n) - binomial(2 * n, n + 2), "closed form");
        parts.push(format!("n={n}: {want} on {} distinct ω", omegas.len()));
    }
    Ok(parts.join(", "))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let chern = chern_count(n)?;
        let lef = lefschetz_kernel_dim(&e_i_power(n)).map_err(err)?;
        ensure!(chern > lef, "n={n}: {chern} ≤ {lef}");
        parts.push(format!("{chern} > {lef}"));
    }
    Ok(parts.join(", "))
}

fn mono(n: usize, idx: &[usize]) -> ExtElement {
    ExtElement::monomial(n, idx).unwrap()
}

/// FM images of a basis of (p,p) classes on E_i² satisfy the mirror condition;
/// a non-(p,p) class does not.
fn criterion_6() -> Outcome {
    let t = e_i_power(2);
    let s = LagrangianSplitting::coordinate(4, &[0, 2]);
    s.check(&t).map_err(err)?;
    let mirror = mirror_via_tduality(&t, &s).map_err(err)?.mirror;
    let mut count = 0;
    for p in 0..=2 {
        for a in rational_pp_classes(&t, p).map_err(err)? {
            let img = fm_transform(&t, &s, &a).map_err(err)?;
            let r = mirror_class_condition(&mirror, &img).map_err(err)?;
            ensure!(r.holds, "p={p}: class {:?} fails", a.element);
            count += 1;
        }
    }
    let bad = CohClass::new(mono(4, &[0, 2]).sub(&mono(4, &[1, 3])).map_err(err)?);
    let pp1 = rational_pp_classes(&t, 1).map_err(err)?;
    let in_span = {
        let mut rows: Vec<_> = pp1.iter().map(|c| c.element.grade_vector(2)).collect();
        let before = RatMatrix::from_rows(rows.clone()).map_err(err)?.rank();
        rows.push(bad.element.grade_vector(2));
        RatMatrix::from_rows(rows).map_err(err)?.rank() == before
    };
    ensure!(!in_span, "e13 − e24 is unexpectedly of type (1,1)");
    let img = fm_transform(&t, &s, &bad).map_err(err)?;
    ensure!(!mirror_class_condition(&mirror, &img).map_err(err)?.holds, "non-(p,p) class passes");
    Ok(format!("{count} (p,p) basis classes pass; e13 - e24 fails"))
}

fn t4() -> TorusData {
    let j = RatMatrix::from_ints(&[&[0, 1], &[-1, 0]]);
    TorusData::new(block_diagonal(&[j.clone(), j]), RatMatrix::identity(4), RatMatrix::zeros(4, 4), "T4").unwrap()
}

fn skew(n: usize, entries: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; n]; n];
    for &(i, j, v) in entries {
        m[i][j] = v;
        m[j][i] = -v;
    }
    m
}

/// Integer vectors of length 4 with entries in [-1, 1], one per ± pair.
fn small_vectors() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_charge(4, 1, |v| {
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v.to_vec());
        }
    });
    out
}

/// Coisotropic acceptance on T⁴.
fn criterion_7() -> Outcome {
    let t = t4();
    let omega = t.omega().map_err(err)?;
    let good = AffineBrane::whole(4, skew(4, &[(0, 2, 1), (1, 3, -1)]));
    let r = check_abrane(&t, &good).map_err(err)?;
    ensure!(r.accepted && r.k == Some(1), "T4 example: {:?}", r.rejection);

    let vecs = small_vectors();
    let structurally_ok = |b: &AffineBrane| b.check_structure(&t).is_ok();
    let (mut lagrangians, mut threes) = (0, 0);
    for (ia, a) in vecs.iter().enumerate() {
        for b in &vecs[ia + 1..] {
            let ra: Vec<_> = a.iter().map(|&x| common::r(x)).collect();
            let rb: Vec<_> = b.iter().map(|&x| common::r(x)).collect();
            if !omega.bilinear(&ra, &rb).map_err(err)?.is_zero() {
                continue;
            }
            for f in [1i64, -1, 2] {
                let brane = AffineBrane::new(vec![a.clone(), b.clone()], skew(2, &[(0, 1, f)]));
                if !structurally_ok(&brane) {
                    break;
                }
                let rep = check_abrane(&t, &brane).map_err(err)?;
                ensure!(
                    matches!(rep.rejection, Some(Rejection::FoliationNotAnnihilated { .. })),
                    "Lagrangian {a:?},{b:?} with F={f}: {:?}",
                    rep.rejection
                );
                lagrangians += 1;
            }
        }
    }
    for (ia, a) in vecs.iter().enumerate() {
        for (ib, b) in vecs.iter().enumerate().skip(ia + 1) {
            for c in &vecs[ib + 1..] {
                for f in [skew(3, &[]), skew(3, &[(0, 1, 1), (1, 2, -2)])] {
                    let brane = AffineBrane::new(vec![a.clone(), b.clone(), c.clone()], f);
                    if !structurally_ok(&brane) {
                        break;
                    }
                    let rep = check_abrane(&t, &brane).map_err(err)?;
                    ensure!(
                        rep.rejection == Some(Rejection::DimensionLaw { dim_y: 3, n: 2 }),
                        "3-plane {a:?},{b:?},{c:?}: {:?}",
                        rep.rejection
                    );
                    threes += 1;
                }
            }
        }
    }
    ensure!(lagrangians > 0 && threes > 0, "empty enumeration");
    Ok(format!("k=1 accepted; {lagrangians} Lagrangian cases cite (ii); {threes} 3-dim cases cite n+2k"))
}

/// (p̄² − p²)/2 = q(γ,γ) for 1000 random γ of height ≤ 5 on each of 20 tori.
fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for k in 0..20 {
        let d = 1 + k % 3;
        let t = random_torus(&mut rng, d);
        let n = 2 * d;
        let charges: Vec<ChargeVector> = (0..1000)
            .map(|_| {
                let w: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
                let m: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
                ChargeVector::new(w, m)
            })
            .collect();
        for (c, z) in charges.iter().zip(t.zero_mode_momenta_batch(&charges).map_err(err)?) {
            ensure!(z.pbar_sq_half.sub(&z.p_sq_half) == c.q_norm(), "{c:?} on torus {k}");
            checked += 1;
        }
    }
    Ok(format!("{checked} charge vectors on 20 tori"))
}

/// Every CCR/CAR identity at d ≤ 2, cap ≤ 3.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let start = Instant::now();
    let (mut pass, mut inconclusive) = (0, 0);
    for d in 1..=2usize {
        let metric = random_torus(&mut rng, d).metric;
        for twice in 1..=6 {
            let space = TruncatedFock::new(d, HalfInt(twice), metric.clone()).map_err(err)?;
            for c in verify_all(&space).map_err(err)? {
                match c.verdict {
                    Verdict::Pass => pass += 1,
                    Verdict::Fail => return Err(format!("fail: {c:?}")),
                    Verdict::Inconclusive => {
                        ensure!(c.s.abs().twice() + c.p.abs().twice() > twice, "inconclusive inside guard: {c:?}");
                        inconclusive += 1;
                    }
                }
            }
        }
    }
    let e = within(Duration::from_secs(60), start)?;
    Ok(format!("{pass} pass, 0 fail, {inconclusive} inconclusive outside the guard ({:.2?})", e))
}

/// 𝓘² = 𝓙² = −id and q-orthogonality on 100 random tori.
fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..100 {
        let t = random_torus(&mut rng, 1 + k % 3);
        let ds = t.doubled().map_err(err)?;
        let minus = RatMatrix::identity(4 * t.d).neg();
        ensure!(ds.cal_i.dot(&ds.cal_i) == minus, "calI^2, torus {k}");
        ensure!(ds.cal_j.dot(&ds.cal_j) == minus, "calJ^2, torus {k}");
        ensure!(ds.cal_i.transpose().dot(&ds.q).dot(&ds.cal_i) == ds.q, "calI^t q calI, torus {k}");
        ensure!(ds.cal_j.transpose().dot(&ds.q).dot(&ds.cal_j) == ds.q, "calJ^t q calJ, torus {k}");
    }
    Ok("100 tori".into())
}

/// h^{p,q}(X) = h^{n−p,q}(X′) for T-dual pairs at d ≤ 3.
fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tori = vec![
        TorusData::square(1),
        TorusData::square(2),
        TorusData::square(3),
        scaled_square(2, 5),
        rect_product(&[(1, 2), (3, 1), (1, 1)]),
    ];
    for k in 0..6 {
        tori.push(random_torus(&mut rng, 1 + k % 3));
    }
    let mut pairs = 0;
    for t in &tori {
        let Some(s) = find_lagrangian_splitting(t, 1).map_err(err)? else { continue };
        let Ok(m) = mirror_via_tduality(t, &s) else { continue };
        let (h, hm) = (hodge_diamond(t).map_err(err)?, hodge_diamond(&m.mirror).map_err(err)?);
        let n = t.d;
        for p in 0..=n {
            for q in 0..=n {
                ensure!(h.h[p][q] == hm.h[n - p][q], "{}: h^{p},{q}", t.label);
            }
        }
        pairs += 1;
    }
    ensure!(pairs >= 5, "only {pairs} mirror pairs produced");
    Ok(format!("{pairs} mirror pairs"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("self-mirror square torus", criterion_1),
        ("T-duality round trip", criterion_2),
        ("Chern-image count", criterion_3),
        ("Lefschetz kernel", criterion_4),
        ("HMC-breaking gap", criterion_5),
        ("mirror class condition", criterion_6),
        ("coisotropic acceptance suite", criterion_7),
        ("zero-mode identity", criterion_8),
        ("CCR/CAR suite", criterion_9),
        ("structure invariants", criterion_10),
        ("Hodge rotation", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{:.2?}]", k + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{:.2?}]", k + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
