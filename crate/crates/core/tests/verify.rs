use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cluster_theta::broken_lines::stabilize;
use cluster_theta::fixtures::{a2_seed, extension_basepoint, kronecker_extension_seed, kronecker_seed, torus_seed, LineCache, Model};
use cluster_theta::lattice::{frac, lvec, rvec, to_rational, LatticeVec, RationalVec};
use cluster_theta::matrix::Matrix;
use cluster_theta::seed::{check_linear_morphism, validate_seed};
use cluster_theta::series::{ExponentPair, Specialization};
use cluster_theta::tropical::Covector;
use cluster_theta::verify::{
    adjunction_check, box_points, extension_check, lambda_reciprocity_check, newton_monic_check, reciprocity_check,
    reciprocity_run, specialization_independence_check, superlevel_points, taut_minimizer_check, vit_check_cached, Duality,
};

fn a2_cache() -> &'static LineCache {
    static C: OnceLock<LineCache> = OnceLock::new();
    C.get_or_init(|| {
        let m = Model::a2(8).unwrap();
        LineCache::new(m.diagram.clone(), m.plus.clone(), 8).unwrap()
    })
}

fn covectors() -> Vec<RationalVec> {
    let mut out = Vec::new();
    for (a, b) in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1), (2, 1), (1, 2)] {
        out.push(rvec(&[a, b]));
    }
    for (a, b, d) in [(1, -3, 2), (-5, 2, 3), (3, 4, 2), (-1, -7, 4), (7, -2, 3), (-3, 5, 2), (2, -9, 5), (9, 1, 4), (-4, -3, 3), (5, 7, 6)] {
        out.push(vec![frac(a, d), frac(b, d)]);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a2_valuative_independence(
        terms in prop::collection::vec(((-2i64..=2, -2i64..=2), -3i64..=3), 1..=4),
        w in prop::collection::vec((-6i64..=6, 1i64..=3).prop_map(|(n, d)| frac(n, d)), 2),
    ) {
        let mut coeffs: Vec<(ExponentPair, BigInt)> = Vec::new();
        for ((a, b), c) in terms {
            let u = ExponentPair::from_m(lvec(&[a, b]), 2);
            if !coeffs.iter().any(|(x, _)| *x == u) {
                coeffs.push((u, BigInt::from(c)));
            }
        }
        let rep = vit_check_cached(a2_cache(), &coeffs, &Covector::generic(w, 2), 4).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_json());
    }
}

#[test]
fn kronecker_valuative_independence() {
    let m = Model::kronecker(8).unwrap();
    let cache = LineCache::new(m.diagram.clone(), m.plus.clone(), 8).unwrap();
    let coeffs = vec![
        (m.index(&[1, -1]), BigInt::from(1)),
        (m.index(&[2, -2]), BigInt::from(-1)),
        (m.index(&[0, 1]), BigInt::from(3)),
    ];
    let mut passes = 0;
    for w in covectors() {
        let rep = vit_check_cached(&cache, &coeffs, &Covector::generic(w, 2), 4).unwrap();
        assert!(rep.passed(), "{}", rep.to_json());
        passes += rep.passes;
    }
    assert!(passes >= 10, "only {passes} certified instances");
}

#[test]
fn torus_reciprocity_is_the_pairing() {
    let rep = reciprocity_check(&torus_seed(), 3, 2, Duality::Chiral).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.passes, 48 * 48);
}

#[test]
fn a2_reciprocity_and_tautness() {
    for duality in [Duality::Chiral, Duality::Langlands, Duality::ChiralLanglands] {
        let run = reciprocity_run(&a2_seed(), 2, 4, duality).unwrap();
        assert!(run.report.passed(), "{}", run.report.to_json());
        assert!(run.report.passes > 300, "{duality:?}: {}", run.report.summary());
        let taut = taut_minimizer_check(&run, 4).unwrap();
        assert!(taut.passed(), "{}", taut.to_json());
    }
    let lam = lambda_reciprocity_check(&a2_seed(), 2, 4).unwrap();
    assert!(lam.passed() && lam.passes > 300, "{}", lam.summary());
}

#[test]
fn kronecker_langlands_reciprocity() {
    let rep = reciprocity_check(&kronecker_seed(), 2, 4, Duality::Langlands).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    assert!(rep.passes > 200, "{}", rep.summary());
}

#[test]
fn newton_vertices_are_monic() {
    let torus = Model::torus(6).unwrap();
    let (mono, _) = stabilize(&torus.diagram, &torus.index(&[3, -2]), &torus.plus, 2).unwrap();
    let rep = newton_monic_check(&mono);
    assert!(rep.passed() && rep.passes == 1);
    let k = Model::kronecker(9).unwrap();
    for (m, start) in [([1, -1], 3), ([2, -2], 5), ([0, 1], 3), ([-1, -1], 3)] {
        let (theta, stable) = stabilize(&k.diagram, &k.index(&m), &k.plus, start).unwrap();
        assert!(stable, "{m:?}");
        let rep = newton_monic_check(&theta);
        assert!(rep.passed() && rep.passes >= 1, "{}", rep.to_json());
    }
}

#[test]
fn kronecker_specialization_keeps_independence() {
    let k = Model::kronecker(9).unwrap();
    let thetas: Vec<_> = [([1, -1], 3), ([2, -2], 5), ([1, 0], 3)]
        .into_iter()
        .map(|(m, s)| {
            let (t, stable) = stabilize(&k.diagram, &k.index(&m), &k.plus, s).unwrap();
            assert!(stable);
            t
        })
        .collect();
    let nu = Specialization::new(vec![(BigInt::from(1), lvec(&[0, 0])); 2]).unwrap();
    let grid: Vec<RationalVec> = covectors().into_iter().take(10).collect();
    let combos = vec![vec![1, -1, 0], vec![2, 1, -3], vec![0, 1, 1]];
    let rep = specialization_independence_check(&thetas, &nu, &grid, &combos).unwrap();
    assert!(rep.failures.iter().all(|f| !f.inputs.starts_with("rank")), "{}", rep.to_json());
    assert!(rep.passes >= 1);
}

#[test]
fn adjunction_under_unimodular_maps() {
    let a = [[1i64, 1], [0, 1]];
    let s = a2_seed();
    let am = Matrix::from_int_rows(&[a[0].to_vec(), a[1].to_vec()]).unwrap();
    let inv_t = Matrix::from_int_rows(&[vec![1, 0], vec![-1, 1]]).unwrap();
    let t = validate_seed(am.mul(s.p()).unwrap(), inv_t.mul(s.qbullet()).unwrap(), s.d().to_vec()).unwrap();
    let morphism = check_linear_morphism(&am, &s, &t).unwrap();
    let grid: Vec<LatticeVec> = (-2..=2).flat_map(|x| (-2..=2).map(move |y| lvec(&[x, y]))).collect();
    let rep = adjunction_check(&morphism, &grid, &grid, 3).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    assert!(rep.passes >= 400, "{}", rep.summary());
    let identity = check_linear_morphism(&Matrix::identity(2), &s, &s).unwrap();
    let rep = adjunction_check(&identity, &grid[..5], &grid[..5], 3).unwrap();
    assert!(rep.passed());
}

#[test]
fn extension_preserves_the_loop_element() {
    let p = Model::kronecker(5).unwrap().plus;
    let same = extension_check(&kronecker_seed(), &kronecker_seed(), &[lvec(&[1, -1]), lvec(&[0, 1])], &p, 5).unwrap();
    assert!(same.passed() && same.passes == 2);
    let ext = extension_check(&kronecker_seed(), &kronecker_extension_seed(), &[lvec(&[1, -1])], &extension_basepoint(), 6).unwrap();
    assert!(ext.passed() && ext.passes == 1, "{}", ext.to_json());
    // in the positive quadrant the loop element is not a finite combination for the extension
    let there = extension_check(&kronecker_seed(), &kronecker_extension_seed(), &[lvec(&[1, -1])], &p, 6).unwrap();
    assert!(there.passed() && there.passes == 0 && there.skipped.len() == 1, "{}", there.to_json());
}

#[test]
fn torus_superlevel_is_a_half_plane() {
    let dual = Model::torus(6).unwrap();
    let n0 = lvec(&[1, 2]);
    let (inside, skipped) = superlevel_points(&dual, std::slice::from_ref(&n0), &frac(1, 1), 3, 2).unwrap();
    assert!(skipped.is_empty());
    let mut expected: Vec<LatticeVec> = box_points(3)
        .into_iter()
        .chain([lvec(&[0, 0])])
        .filter(|m| to_rational(m).iter().zip(&to_rational(&n0)).map(|(a, b)| a * b).sum::<BigRational>() >= frac(1, 1))
        .collect();
    expected.sort();
    assert_eq!(inside, expected);
}

#[test]
fn kronecker_superlevel_is_lattice_convex() {
    let dual = Model::new("dual", cluster_theta::seed::chiral_dual(&kronecker_seed()).unwrap(), 8).unwrap();
    let w = [lvec(&[1, -1]), lvec(&[0, 1]), lvec(&[-1, 0])];
    let (inside, _) = superlevel_points(&dual, &w, &frac(-2, 1), 3, 4).unwrap();
    assert!(!inside.is_empty());
    let (high, _) = superlevel_points(&dual, &w, &frac(100, 1), 3, 4).unwrap();
    assert!(high.is_empty() || high == vec![lvec(&[0, 0])]);
    // midpoints of inside points stay inside whenever their values are certified
    let has = |m: &LatticeVec| inside.contains(m);
    for a in &inside {
        for b in &inside {
            let mid: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if mid.iter().all(|x| x % 2 == BigInt::from(0)) {
                let mid: LatticeVec = mid.iter().map(|x| x / 2).collect();
                if box_points(3).contains(&mid) || mid == lvec(&[0, 0]) {
                    assert!(has(&mid) || !certified(&dual, &w, &mid), "{a:?} {b:?} → {mid:?}");
                }
            }
        }
    }
}

fn certified(dual: &Model, w: &[LatticeVec], m: &LatticeVec) -> bool {
    let side = cluster_theta::verify::Side::new(dual.clone(), cluster_theta::fixtures::Chamber::Positive).unwrap();
    w.iter().all(|n| {
        side.val(&ExponentPair::from_m(n.clone(), 2), &Covector::generic(to_rational(m), 2), 4)
            .map(|r| r.is_exact())
            .unwrap_or(false)
    })
}

#[test]
fn reports_serialize_deterministically() {
    let a = reciprocity_check(&a2_seed(), 1, 3, Duality::Chiral).unwrap();
    let b = reciprocity_check(&a2_seed(), 1, 3, Duality::Chiral).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let parsed: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(parsed["name"], "reciprocity-chiral");
}
