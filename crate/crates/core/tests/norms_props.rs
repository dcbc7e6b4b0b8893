mod common;

use dirichlet_lab::multiindex::{ball_monomial_integral, enumerate_up_to};
use dirichlet_lab::norms::{self, mc_integral_norm, relation_check, weight};
use dirichlet_lab::sampling::{mc_means, Domain};
use dirichlet_lab::SpaceParams;
use rand::Rng;

#[test]
fn relation_identity_orders_one_and_two() {
    let mut rng = common::rng(21);
    for n in [2, 3] {
        for q in [1, 2] {
            for _ in 0..100 {
                let alpha = rng.gen_range(-2.0..4.0);
                let params = SpaceParams::new(n, alpha).unwrap();
                let deg = rng.gen_range(0..=6);
                let f = common::random_poly(&mut rng, n, deg, 1.0);
                let (lhs, rhs) = relation_check(&params, &f, q).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs, "n={n} q={q}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn weights_positive_and_monotone_in_alpha() {
    for n in 1..=4 {
        for k in enumerate_up_to(n, 8) {
            let mut prev = 0.0;
            for alpha in [-1.0, -0.5, 0.0, 1.0, 2.5, 4.0] {
                let w = weight(&SpaceParams::new(n, alpha).unwrap(), &k);
                assert!(w > 0.0);
                assert!(w >= prev * (1.0 - 1e-15), "weight decreased in α at k={k}");
                prev = w;
            }
        }
        for alpha in [-1.0, 0.0, 1.0, n as f64] {
            let w0 = weight(&SpaceParams::new(n, alpha).unwrap(), &enumerate_up_to(n, 0)[0]);
            assert!((w0 - (n as f64).powf(alpha)).abs() <= 1e-15 * w0);
        }
    }
}

#[test]
fn bergman_weight_is_ball_integral_over_n() {
    for n in 1..=4 {
        let params = SpaceParams::new(n, -1.0).unwrap();
        for k in enumerate_up_to(n, 10) {
            let ratio = weight(&params, &k) / ball_monomial_integral(&k);
            assert!((ratio - 1.0 / n as f64).abs() < 1e-14, "k={k}: {ratio}");
        }
    }
}

#[test]
fn hardy_norm_is_sphere_mean() {
    let mut rng = common::rng(22);
    for n in [1, 2, 3] {
        let params = SpaceParams::new(n, 0.0).unwrap();
        for seed in 0..4 {
            let f = common::random_poly(&mut rng, n, 3, 1.0);
            let est = mc_means(Domain::Sphere, n, 200_000, 100 + seed, 1, |z, out| {
                out[0] = f.evaluate(z).unwrap().norm_sqr();
            });
            let exact = norms::norm_sq(&params, &f).unwrap().value;
            assert!(
                (est.mean[0] - exact).abs() <= 3.0 * est.std_err[0],
                "n={n}: {} ± {} vs {exact}",
                est.mean[0],
                est.std_err[0]
            );
        }
    }
}

#[test]
fn bergman_norm_matches_ball_mean() {
    let mut rng = common::rng(23);
    for n in [1, 2, 3] {
        let params = SpaceParams::new(n, -1.0).unwrap();
        for seed in 0..4 {
            let deg = rng.gen_range(1..=4);
            let f = common::random_poly(&mut rng, n, deg, 1.0);
            let est = mc_means(Domain::Ball, n, 200_000, 200 + seed, 1, |z, out| {
                out[0] = f.evaluate(z).unwrap().norm_sqr();
            });
            let ratio = est.mean[0] / norms::norm_sq(&params, &f).unwrap().value;
            // the weight is exactly ball/n, so the equivalence constant is n
            assert!((1.0 / 4.0..=4.0).contains(&ratio), "n={n}: ratio {ratio}");
            assert!((ratio - n as f64).abs() <= 4.0 * est.std_err[0] / norms::norm_sq(&params, &f).unwrap().value);
        }
    }
}

#[test]
fn integral_seminorm_is_equivalent() {
    let mut rng = common::rng(24);
    for alpha in [-0.5, 0.0, 0.25] {
        let params = SpaceParams::new(2, alpha).unwrap();
        for seed in 0..3 {
            let f = common::random_poly(&mut rng, 2, 3, 1.0);
            let semi = norms::norm_sq(&params, &f).unwrap().value - params.one_norm_sq() * f.constant_term().norm_sqr();
            let est = mc_integral_norm(&params, &f, 200_000, 300 + seed).unwrap();
            let ratio = est.mean[0] / semi;
            assert!((1.0 / 20.0..=20.0).contains(&ratio), "α={alpha}: ratio {ratio}");
        }
    }
}
