use proptest::prelude::*;

use valkit_core::bodies;
use valkit_core::intrinsic::{intrinsic_volumes, mixed_volume, AngleConfig};
use valkit_core::num::{q, qf, QVec};
use valkit_core::Polytope;

fn points(n: usize, min: usize, max: usize) -> impl Strategy<Value = Vec<QVec>> {
    prop::collection::vec(prop::collection::vec((-6i64..=6, 1i64..=3), n), min..=max)
        .prop_map(|pts| pts.into_iter().map(|p| p.into_iter().map(|(a, b)| qf(a, b)).collect()).collect())
}

fn polytope(n: usize) -> impl Strategy<Value = Polytope> {
    points(n, 1, n + 4).prop_map(|pts| Polytope::from_points(&pts).unwrap())
}

fn shift(n: usize) -> impl Strategy<Value = QVec> {
    prop::collection::vec((-9i64..=9, 1i64..=5), n).prop_map(|v| v.into_iter().map(|(a, b)| qf(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hull_is_idempotent(p in polytope(3)) {
        let again = Polytope::from_points(p.vertices()).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn hull_contains_its_generators(pts in points(3, 1, 7)) {
        let p = Polytope::from_points(&pts).unwrap();
        prop_assert!(pts.iter().all(|x| p.contains(x)));
        prop_assert!(p.vertices().iter().all(|v| pts.contains(v)));
    }

    #[test]
    fn minkowski_sum_commutes(a in polytope(2), b in polytope(2)) {
        prop_assert_eq!(a.minkowski_sum(&b).unwrap(), b.minkowski_sum(&a).unwrap());
    }

    #[test]
    fn minkowski_sum_commutes_with_scaling(a in polytope(3), b in polytope(3), l in 1i64..=4) {
        let lam = q(l);
        let lhs = a.minkowski_sum(&b).unwrap().scale(&lam);
        prop_assert_eq!(lhs, a.scale(&lam).minkowski_sum(&b.scale(&lam)).unwrap());
    }

    #[test]
    fn volume_is_homogeneous(p in polytope(3), l in 1i64..=5) {
        let lam = qf(l, 2);
        prop_assert_eq!(p.scale(&lam).volume(), p.volume() * &lam * &lam * &lam);
    }

    #[test]
    fn intrinsic_volumes_are_translation_invariant(p in polytope(3), t in shift(3)) {
        let cfg = AngleConfig::default();
        let a = intrinsic_volumes(&p, &cfg).unwrap();
        let b = intrinsic_volumes(&p.translate(&t).unwrap(), &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.value - y.value).abs() <= 1e-9 * (1.0 + x.value.abs()));
        }
    }

    #[test]
    fn reflection_preserves_intrinsic_volumes(p in polytope(2)) {
        let cfg = AngleConfig::default();
        let a = intrinsic_volumes(&p, &cfg).unwrap();
        let b = intrinsic_volumes(&p.reflect(), &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.value - y.value).abs() <= 1e-12 * (1.0 + x.value.abs()));
        }
    }

    #[test]
    fn mixed_volume_is_symmetric_and_translation_invariant(a in polytope(2), b in polytope(2), t in shift(2)) {
        let ab = mixed_volume(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(&ab, &mixed_volume(&[b.clone(), a.clone()]).unwrap());
        prop_assert_eq!(&ab, &mixed_volume(&[a.translate(&t).unwrap(), b]).unwrap());
    }
}

#[test]
fn clip_and_intersect_agree() {
    let sq = bodies::centered_cube(2, &q(1));
    let half = sq.clip(&[q(1), q(0)], &q(0)).unwrap();
    assert_eq!(half.volume(), q(2));
    let box_ = bodies::cuboid(&[q(5), q(5)]).translate(&[q(-5), q(-3)]).unwrap();
    assert_eq!(sq.intersect(&box_).unwrap().unwrap().volume(), q(2));
}
