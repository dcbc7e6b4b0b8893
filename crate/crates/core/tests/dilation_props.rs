use dirichlet_lab::dilation::{
    boundedness_verdict, general_quotient_norm_sq, model_quotient_coeffs, quotient_norm_sq, sweep, Boundedness,
    DEEP_R_GRID, DEFAULT_R_GRID,
};
use dirichlet_lab::series::model_polynomial;
use dirichlet_lab::ModelPolynomialSpec;

const PAIRS: [(usize, usize); 5] = [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)];

#[test]
fn closed_form_matches_reciprocal() {
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        let p = model_polynomial(&spec);
        for r in [0.0, 0.3, 0.9, 0.99] {
            let c = model_quotient_coeffs(&spec, r, 50 / m).unwrap();
            let series = p.mul(&p.dilate(r).reciprocal(50).unwrap()).unwrap();
            let d = spec.diagonal_index();
            for (k, ck) in c.iter().enumerate() {
                let got = series.coeff(&d.scale(k as u32));
                assert!((got.re - ck).abs() <= 1e-12 * ck.abs().max(1.0), "({n},{m}) r={r} k={k}");
            }
        }
    }
}

#[test]
fn bounded_up_to_threshold() {
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        for alpha in [spec.threshold() - 1.0, spec.threshold() - 0.25, spec.threshold()] {
            let s = sweep(&spec, alpha, &DEFAULT_R_GRID, 1e-13).unwrap();
            assert!(s.fitted_exponent < 0.15, "({n},{m}) α={alpha}: {}", s.fitted_exponent);
            assert!(matches!(boundedness_verdict(&s).unwrap().verdict, Boundedness::Bounded { .. }));
        }
    }
}

#[test]
fn increment_exponent_tracks_distance_above_threshold() {
    // ‖p/p_r‖² grows like (1−r)^{−(α−α₀)} above the threshold
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        for delta in [0.25, 0.5] {
            let s = sweep(&spec, spec.threshold() + delta, &DEEP_R_GRID, 1e-13).unwrap();
            let e = s.divergence_exponent.unwrap();
            assert!((e - delta).abs() < 0.25, "({n},{m}) δ={delta}: {e}");
        }
    }
}

#[test]
fn continuous_in_r() {
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        let alpha = spec.threshold();
        for r in [0.5, 0.9, 0.99, 0.999] {
            let h = (1.0 - r) / 20.0;
            let a = quotient_norm_sq(&spec, alpha, r, 1e-13).unwrap();
            let b = quotient_norm_sq(&spec, alpha, r + h, 1e-13).unwrap();
            assert!((b / a - 1.0).abs() < 0.1, "({n},{m}) r={r}: {a} → {b}");
        }
    }
}

#[test]
fn general_path_agrees_with_closed_form() {
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).unwrap();
        let p = model_polynomial(&spec);
        let r = 0.5;
        let exact = quotient_norm_sq(&spec, 1.0, r, 1e-15).unwrap();
        let g = general_quotient_norm_sq(&p, 1.0, r, 240).unwrap();
        assert!((g.value - exact).abs() <= 1e-10 * exact, "({n},{m}): {} vs {exact}", g.value);
        assert!(g.tail_shell < 1e-12 * exact);
    }
}
