use proptest::prelude::*;
use rand::Rng;

use valkit_core::bodies;
use valkit_core::euler::{
    euler_integral, euler_verdier, fn_equal, pointwise_product, pullback_affine, pushforward_affine, random_constructible,
    refinement_points, ConstructibleFn,
};
use valkit_core::mc::shard_rng;
use valkit_core::num::{self, q, qvec, QVec};
use valkit_core::radon::{chi_rp, radon_eval, ProjConstructibleFn};
use valkit_core::{Cone, Polytope};

fn constructible(n: usize) -> impl Strategy<Value = ConstructibleFn> {
    any::<u64>().prop_map(move |seed| random_constructible(&mut shard_rng(seed, 0), n, 3, 3, 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn verdier_is_an_involution(f in constructible(2)) {
        prop_assert!(fn_equal(&euler_verdier(&euler_verdier(&f)), &f).unwrap());
    }

    #[test]
    fn verdier_is_linear(f in constructible(2), g in constructible(2), c in -3i64..=3) {
        let lhs = euler_verdier(&f.add(&g.scale(&q(c))).unwrap());
        let rhs = euler_verdier(&f).add(&euler_verdier(&g).scale(&q(c))).unwrap();
        prop_assert!(fn_equal(&lhs, &rhs).unwrap());
    }

    #[test]
    fn products_commute_and_associate(f in constructible(2), g in constructible(2), h in constructible(2)) {
        let fg = pointwise_product(&f, &g).unwrap();
        prop_assert!(fn_equal(&fg, &pointwise_product(&g, &f).unwrap()).unwrap());
        let left = pointwise_product(&fg, &h).unwrap();
        let right = pointwise_product(&f, &pointwise_product(&g, &h).unwrap()).unwrap();
        prop_assert!(fn_equal(&left, &right).unwrap());
    }

    #[test]
    fn product_is_pointwise(f in constructible(2), g in constructible(2)) {
        let fg = pointwise_product(&f, &g).unwrap();
        for (_, x) in refinement_points(&[&f, &g]) {
            prop_assert_eq!(fg.eval(&x), f.eval(&x) * g.eval(&x));
        }
    }

    #[test]
    fn fubini(f in constructible(3)) {
        let g = pushforward_affine(&f, &[qvec(&[1, 1, 0])], None).unwrap();
        prop_assert_eq!(euler_integral(&g), euler_integral(&f));
    }
}

#[test]
fn verdier_commutes_with_open_restriction() {
    let mut rng = shard_rng(31, 0);
    let window = bodies::centered_cube(2, &q(1));
    let w = ConstructibleFn::indicator(&window);
    for _ in 0..10 {
        let f = random_constructible(&mut rng, 2, 4, 2, 2);
        let clipped_first = euler_verdier(&pointwise_product(&f, &w).unwrap());
        let sigma_first = euler_verdier(&f);
        let inside: Vec<QVec> = refinement_points(&[&clipped_first, &sigma_first, &w])
            .into_iter()
            .map(|(_, x)| x)
            .filter(|x| x.iter().all(|c| num::abs(c) < q(1)))
            .collect();
        assert!(!inside.is_empty());
        for x in inside {
            assert_eq!(clipped_first.eval(&x), sigma_first.eval(&x), "at {x:?}");
        }
    }
}

#[test]
fn pullback_composition_inside_window() {
    let mut rng = shard_rng(32, 0);
    let f = random_constructible(&mut rng, 2, 4, 2, 2);
    let g = vec![qvec(&[1, 2]), qvec(&[0, 1])];
    let h = vec![qvec(&[1, 0]), qvec(&[1, 1])];
    let gh: Vec<QVec> = vec![qvec(&[3, 2]), qvec(&[1, 1])];
    let window = bodies::centered_cube(2, &q(8));
    let two_steps = pullback_affine(&pullback_affine(&f, &g, None, &window).unwrap(), &h, None, &window).unwrap();
    let one_step = pullback_affine(&f, &gh, None, &window).unwrap();
    let small = ConstructibleFn::indicator(&bodies::centered_cube(2, &q(2)));
    let a = pointwise_product(&two_steps, &small).unwrap();
    let b = pointwise_product(&one_step, &small).unwrap();
    assert!(fn_equal(&a, &b).unwrap());
}

/// Cone over `{1} × P`, so that the atom is `P` in the affine chart `x_0 = 1`.
fn cone_over(points: &[QVec]) -> Cone {
    let rays: Vec<QVec> = points.iter().map(|p| std::iter::once(q(1)).chain(p.iter().cloned()).collect()).collect();
    Cone::new(points[0].len() + 1, &rays).unwrap()
}

/// Parametrisation `t ↦ base + B t` of `{x : u_0 + u'·x = 0}`.
fn hyperplane_chart(u: &[num::Rational]) -> (Vec<QVec>, QVec) {
    let normal = &u[1..];
    let n = normal.len();
    let basis = num::nullspace(&[normal.to_vec()], n);
    let matrix: Vec<QVec> = (0..n).map(|r| basis.iter().map(|b| b[r].clone()).collect()).collect();
    let nn = num::dot(normal, normal);
    let base = num::scale(normal, &(-&u[0] / nn));
    (matrix, base)
}

#[test]
fn radon_agrees_with_affine_euler_integral() {
    let mut rng = shard_rng(33, 0);
    let mut checked = 0;
    for t in 0..20 {
        let n = 2 + t % 2;
        let mut atoms = Vec::new();
        let mut affine = ConstructibleFn::zero(n);
        for _ in 0..3 {
            let pts: Vec<QVec> = loop {
                let pts: Vec<QVec> =
                    (0..n + 2).map(|_| (0..n).map(|_| q(rng.random_range(-4..=4))).collect()).collect();
                if Polytope::from_points(&pts).unwrap().is_full_dimensional() {
                    break pts;
                }
            };
            let w = q(rng.random_range(1..=3));
            atoms.push((w.clone(), cone_over(&pts)));
            affine = affine.add(&ConstructibleFn::weighted(w, &Polytope::from_points(&pts).unwrap())).unwrap();
        }
        let full = q(rng.random_range(-2..=2));
        let f = ProjConstructibleFn::new(n, full.clone(), atoms).unwrap();
        let window = bodies::centered_cube(n - 1, &q(1000));
        for _ in 0..5 {
            let u: QVec = loop {
                let u: QVec = (0..=n).map(|_| q(rng.random_range(-6..=6))).collect();
                if !num::is_zero_vec(&u[1..]) {
                    break u;
                }
            };
            let (matrix, base) = hyperplane_chart(&u);
            let restricted = pullback_affine(&affine, &matrix, Some(&base), &window).unwrap();
            let via_chart = euler_integral(&restricted) + &full * chi_rp(n as i64 - 1);
            assert_eq!(radon_eval(&f, &u).unwrap(), via_chart, "u = {u:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}
