mod common;

use dirichlet_lab::approximant::{self, decay_sweep, diagonal_fast_path, solve, solve_diagonal_restricted};
use dirichlet_lab::diagonal::{lift, DiagonalSpec, OneVarSeries};
use dirichlet_lab::series::model_polynomial;
use dirichlet_lab::{norms, ModelPolynomialSpec, SpaceParams};
use rand::Rng;

#[test]
fn sweep_is_monotone_and_bounded() {
    let mut rng = common::rng(41);
    for _ in 0..10 {
        let alpha = rng.gen_range(-1.0..2.5);
        let params = SpaceParams::new(2, alpha).unwrap();
        let f = common::random_poly(&mut rng, 2, 3, 1.0);
        let rows = decay_sweep(&params, &f, &(0..8).collect::<Vec<_>>()).unwrap();
        let cap = params.one_norm_sq();
        let w0 = cap;
        let a0 = f.constant_term().norm_sqr();
        let rank_one = cap - w0 * w0 * a0 / norms::norm_sq(&params, &f).unwrap().value;
        assert!((rows[0].dist_sq - rank_one).abs() <= 1e-12 * cap);
        for w in rows.windows(2) {
            assert!(w[1].dist_sq <= w[0].dist_sq * (1.0 + 1e-9));
            assert!(w[1].dist_sq >= 0.0 && w[0].dist_sq <= cap * (1.0 + 1e-12));
        }
    }
}

#[test]
fn two_distance_formulas_agree() {
    let mut rng = common::rng(42);
    for _ in 0..10 {
        let params = SpaceParams::new(3, rng.gen_range(-1.0..2.0)).unwrap();
        let f = common::random_poly(&mut rng, 3, 2, 0.7);
        let r = solve(&params, &f, 3).unwrap();
        assert!((r.dist_sq - r.dist_sq_form).abs() <= 1e-8 * r.dist_sq.max(1e-300));
    }
}

#[test]
fn full_problem_beats_diagonal_restriction() {
    for (n, m) in [(2, 1), (2, 2), (3, 2)] {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        let dspec = DiagonalSpec::for_model(&spec);
        let p = model_polynomial(&spec);
        for alpha in [0.0, 1.0, spec.threshold()] {
            let params = SpaceParams::new(n, alpha).unwrap();
            for order in [2, 5] {
                let full = solve(&params, &p, order).unwrap().dist_sq;
                let diag = solve_diagonal_restricted(&params, &dspec, &p, order).unwrap().dist_sq;
                assert!(full <= diag + 1e-10 * diag.max(1.0), "({n},{m}) α={alpha} N={order}");
            }
        }
    }
}

#[test]
fn fast_path_tracks_full_problem() {
    let spec = ModelPolynomialSpec::new(2, 2).unwrap();
    let dspec = DiagonalSpec::for_model(&spec);
    let params = SpaceParams::new(2, 0.0).unwrap();
    let ft = OneVarSeries::from_real(&[1.0, -spec.lambda() / dspec.mu.powf(0.25)], dspec.mu);
    assert_eq!(lift(&ft, &dspec), model_polynomial(&spec));
    let ratios: Vec<f64> = (2..=12)
        .map(|n| diagonal_fast_path(&params, &dspec, &ft, n, true).unwrap().ratio.unwrap())
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo <= 3.0, "ratios {ratios:?}");
}

#[test]
fn lifted_approximant_distance_is_consistent() {
    let spec = ModelPolynomialSpec::new(2, 1).unwrap();
    let dspec = DiagonalSpec::for_model(&spec);
    let params = SpaceParams::new(2, 1.0).unwrap();
    let ft = OneVarSeries::from_real(&[1.0, -spec.lambda() / dspec.mu.powf(0.25)], dspec.mu);
    let r = diagonal_fast_path(&params, &dspec, &ft, 6, false).unwrap();
    let res = r.lifted.mul(&lift(&ft, &dspec)).unwrap().sub(&dirichlet_lab::CoeffSeries::one(2)).unwrap();
    let direct = norms::norm_sq(&params, &res).unwrap().value;
    assert!((direct - r.lifted_dist_sq).abs() <= 1e-12 * direct);
    assert!(approximant::box_basis(2, 6).unwrap().len() == 49);
}
