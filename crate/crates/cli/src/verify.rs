//! Invariant checks behind `verify`. Each check prints one line; the
//! return value is the number of failures.

use std::time::Instant;

use dirichlet_lab::approximant::{self, decay_sweep, fit_decay_window, DecayFit};
use dirichlet_lab::capacity::{
    cauchy_threshold_bisection, noncyclicity_certificate, riesz_energy, Certificate, CertificateOptions,
    EnergyScheme, EnergyStatus, SphereMeasure,
};
use dirichlet_lab::diagonal::{lift, project, DiagonalSpec, OneVarSeries};
use dirichlet_lab::dilation::{self, threshold_bisection, DEFAULT_R_GRID};
use dirichlet_lab::multiindex::{
    enumerate, enumerate_up_to, factorial_inequality_check, sphere_monomial_integral, MultiIndex,
};
use dirichlet_lab::norms::{self, relation_check};
use dirichlet_lab::sampling::{chunk_rng, mc_means, Domain};
use dirichlet_lab::series::model_polynomial;
use dirichlet_lab::{CoeffSeries, ModelPolynomialSpec, SpaceParams};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn(&mut Ctx) -> Outcome;

const PAIRS: [(usize, usize); 5] = [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)];

struct Ctx {
    quick: bool,
    rng: ChaCha8Rng,
}

impl Ctx {
    fn complex(&mut self) -> Complex64 {
        Complex64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
    }

    fn poly(&mut self, n: usize, degree: u32) -> CoeffSeries {
        let mut terms = vec![(MultiIndex::zero(n), Complex64::new(1.0, 0.0) + 0.1 * self.complex())];
        for k in enumerate_up_to(n, degree).into_iter().skip(1) {
            if self.rng.gen_bool(0.5) {
                terms.push((k, self.complex()));
            }
        }
        CoeffSeries::from_terms(n, None, terms).expect("consistent dimensions")
    }
}

fn e2s(e: dirichlet_lab::Error) -> String {
    e.to_string()
}

pub fn run(quick: bool, seed: u64) -> usize {
    let checks: [(&str, Check); 12] = [
        ("norm identity ‖nf+Rf‖²_(α-2) = ‖f‖²_α", relation),
        ("sphere moments by Monte Carlo", sphere_moments),
        ("reciprocal round trip", reciprocal),
        ("lift/project round trip", lift_project),
        ("approximant orthogonality and rank-one formula", orthogonality),
        ("decay rate for 1 - z_1", decay),
        ("closed-form vs general dilation norm", dilation_paths),
        ("dilation threshold", dilation_threshold),
        ("Cauchy-series threshold", cauchy),
        ("Riesz energy classification", energy),
        ("factorial inequality", factorial),
        ("certificate soundness", certificates),
    ];
    let mut ctx = Ctx {
        quick,
        rng: chunk_rng(seed, 0),
    };
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let outcome = check(&mut ctx);
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({t:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({t:.2}s): {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    failed
}

fn relation(ctx: &mut Ctx) -> Outcome {
    let count = if ctx.quick { 10 } else { 100 };
    let mut worst = 0.0f64;
    for n in [2, 3] {
        for alpha in [-1.0, 0.0, 1.5, 3.0] {
            let params = SpaceParams::new(n, alpha).map_err(e2s)?;
            for i in 0..count {
                let f = ctx.poly(n, 1 + i % 6);
                for q in [1, 2] {
                    let (lhs, rhs) = relation_check(&params, &f, q).map_err(e2s)?;
                    worst = worst.max((lhs - rhs).abs() / rhs);
                }
            }
        }
    }
    if worst > 1e-12 {
        return Err(format!("relative gap {worst:e}"));
    }
    Ok(format!("max relative gap {worst:.1e}"))
}

fn sphere_moments(ctx: &mut Ctx) -> Outcome {
    let (samples, d) = if ctx.quick { (100_000, 2) } else { (1_000_000, 4) };
    let seed = ctx.rng.gen();
    let mut tests = 0;
    for n in 1..=4 {
        let ks = enumerate_up_to(n, d);
        let est = mc_means(Domain::Sphere, n, samples, seed, ks.len(), |z, out| {
            for (o, k) in out.iter_mut().zip(&ks) {
                *o = z.iter().zip(k.entries()).map(|(c, &e)| c.norm_sqr().powi(e as i32)).product();
            }
        });
        for (i, k) in ks.iter().enumerate() {
            let gap = (est.mean[i] - sphere_monomial_integral(k)).abs();
            // a fixed 4σ bar keeps the family-wise false alarm rate small
            if gap > 4.0 * est.std_err[i] + 1e-12 {
                return Err(format!("n={n} k={k}: {:.2}σ", gap / est.std_err[i]));
            }
            tests += 1;
        }
    }
    Ok(format!("{tests} moments within 4σ"))
}

fn reciprocal(ctx: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    for n in [1, 2, 3] {
        for _ in 0..10 {
            let f = ctx.poly(n, 2).scale(Complex64::new(0.3, 0.0)).add(&CoeffSeries::one(n)).map_err(e2s)?;
            let d = if ctx.quick { 6 } else { 12 };
            let prod = f.mul(&f.reciprocal(d).map_err(e2s)?).map_err(e2s)?;
            for (k, c) in prod.iter().filter(|(k, _)| k.degree() <= d) {
                worst = worst.max((c - if k.is_zero() { 1.0 } else { 0.0 }).norm());
            }
        }
    }
    if worst > 1e-12 {
        return Err(format!("residual {worst:e}"));
    }
    Ok(format!("residual {worst:.1e}"))
}

fn lift_project(ctx: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    for (e, m) in [(vec![1, 1], 2), (vec![2, 1, 0], 2), (vec![1, 1, 1], 3)] {
        let spec = DiagonalSpec::new(MultiIndex::new(&e), m).map_err(e2s)?;
        let f = OneVarSeries::new((0..25).map(|_| ctx.complex()).collect(), spec.mu);
        let back = project(&lift(&f, &spec), &spec);
        for (a, b) in back.coeffs.iter().zip(&f.coeffs) {
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    if worst > f64::EPSILON {
        return Err(format!("relative error {worst:e}"));
    }
    Ok(format!("relative error {worst:.1e}"))
}

fn orthogonality(ctx: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_rank_one = 0.0f64;
    let count = if ctx.quick { 4 } else { 12 };
    for _ in 0..count {
        let alpha = ctx.rng.gen_range(-1.0..2.0);
        let params = SpaceParams::new(2, alpha).map_err(e2s)?;
        let f = ctx.poly(2, 3);
        let r0 = approximant::solve(&params, &f, 0).map_err(e2s)?;
        let w0 = params.one_norm_sq();
        let want = w0 - w0 * w0 * f.constant_term().norm_sqr() / norms::norm_sq(&params, &f).map_err(e2s)?.value;
        worst_rank_one = worst_rank_one.max((r0.dist_sq - want).abs() / w0);
        let r = approximant::solve(&params, &f, 4).map_err(e2s)?;
        let res = r.coeffs.mul(&f).map_err(e2s)?.sub(&CoeffSeries::one(2)).map_err(e2s)?;
        let rn = norms::norm_sq(&params, &res).map_err(e2s)?.value.sqrt();
        for j in approximant::box_basis(2, 4).map_err(e2s)? {
            let zf = f.shift(&j).map_err(e2s)?;
            let ip = norms::inner(&params, &res, &zf).map_err(e2s)?;
            worst = worst.max(ip.norm() / (rn * norms::norm_sq(&params, &zf).map_err(e2s)?.value.sqrt()));
        }
    }
    if worst > 1e-9 || worst_rank_one > 1e-12 {
        return Err(format!("orthogonality {worst:e}, rank-one {worst_rank_one:e}"));
    }
    Ok(format!("orthogonality {worst:.1e}, rank-one {worst_rank_one:.1e}"))
}

fn decay(ctx: &mut Ctx) -> Outcome {
    let hi = if ctx.quick { 20 } else { 30 };
    let f = CoeffSeries::from_real(2, &[(&[0, 0], 1.0), (&[1, 0], -1.0)]);
    let params = SpaceParams::new(2, 1.0).map_err(e2s)?;
    let rows = decay_sweep(&params, &f, &(8..=hi).collect::<Vec<_>>()).map_err(e2s)?;
    match fit_decay_window(&rows, 0.0, 8, hi).map_err(e2s)? {
        DecayFit::Power { slope, .. } if (slope + 1.0).abs() <= 0.2 => Ok(format!("α=1 slope {slope:.3} (target -1)")),
        other => Err(format!("{other:?}")),
    }
}

fn dilation_paths(_: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    for (n, m) in PAIRS {
        let spec = ModelPolynomialSpec::new(n, m).map_err(e2s)?;
        let p = model_polynomial(&spec);
        for (alpha, r) in [(0.0, 0.3), (spec.threshold(), 0.8)] {
            let c = dilation::quotient_partial_norm_sq(&spec, alpha, r, 30).map_err(e2s)?;
            let g = dilation::general_quotient_norm_sq(&p, alpha, r, 30 * m as u32).map_err(e2s)?;
            worst = worst.max((g.value - c).abs() / c);
        }
    }
    if worst > 1e-10 {
        return Err(format!("paths differ by {worst:e}"));
    }
    Ok(format!("paths agree to {worst:.1e}"))
}

fn dilation_threshold(ctx: &mut Ctx) -> Outcome {
    let pairs: &[(usize, usize)] = if ctx.quick { &PAIRS[..2] } else { &PAIRS };
    let mut notes = Vec::new();
    for &(n, m) in pairs {
        let spec = ModelPolynomialSpec::new(n, m).map_err(e2s)?;
        let a0 = spec.threshold();
        let t = threshold_bisection(&spec, a0 - 1.0, a0 + 1.0, 1e-2).map_err(e2s)?;
        let s = dilation::sweep(&spec, a0, &DEFAULT_R_GRID, 1e-13).map_err(e2s)?;
        if (t.alpha - a0).abs() >= 0.1 || s.fitted_exponent >= dilation::BOUNDED_SLOPE {
            return Err(format!("({n},{m}): threshold {:.3}, slope at α₀ {:.3}", t.alpha, s.fitted_exponent));
        }
        notes.push(format!("({n},{m}) {:.3}", t.alpha));
    }
    Ok(notes.join(", "))
}

fn cauchy(ctx: &mut Ctx) -> Outcome {
    let k = if ctx.quick { 1000 } else { 4000 };
    let mut notes = Vec::new();
    for (n, m) in PAIRS {
        let a0 = (2 * n + 1 - m) as f64 / 2.0;
        let mid = cauchy_threshold_bisection(n, m, k, a0 - 1.0, a0 + 1.0, 1e-3).map_err(e2s)?;
        if (mid - a0).abs() >= 0.1 {
            return Err(format!("({n},{m}): ρ = -1 at {mid:.3}"));
        }
        notes.push(format!("({n},{m}) {mid:.3}"));
    }
    Ok(notes.join(", "))
}

fn energy(_: &mut Ctx) -> Outcome {
    let mu = SphereMeasure::model_torus(2, 2).map_err(e2s)?;
    let fin = riesz_energy(&mu, 1.75, EnergyScheme::default()).map_err(e2s)?;
    let inf = riesz_energy(&mu, 1.25, EnergyScheme::default()).map_err(e2s)?;
    if fin.status != EnergyStatus::Finite || inf.status != EnergyStatus::Infinite {
        return Err(format!("α=1.75 {:?}, α=1.25 {:?}", fin.status, inf.status));
    }
    Ok("α=1.75 finite, α=1.25 infinite".into())
}

fn factorial(_: &mut Ctx) -> Outcome {
    let mut count = 0;
    for n in 1..=4usize {
        for k in 0..=6u32 {
            for j in enumerate(n, n as u32 * k) {
                if !factorial_inequality_check(&j, k).map_err(e2s)? {
                    return Err(format!("fails at j={j}, k={k}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} cases"))
}

fn certificates(ctx: &mut Ctx) -> Outcome {
    let opts = CertificateOptions {
        cauchy_terms: if ctx.quick { 1000 } else { 4000 },
        ..Default::default()
    };
    let f = CoeffSeries::from_real(2, &[(&[0, 0], 1.0), (&[1, 0], -1.0)]);
    let mu1 = SphereMeasure::model_torus(2, 1).map_err(e2s)?;
    let mu2 = SphereMeasure::model_torus(2, 2).map_err(e2s)?;
    let yes = noncyclicity_certificate(&f, &mu1, 2.25, &opts).map_err(e2s)?;
    let one = noncyclicity_certificate(&CoeffSeries::one(2), &mu2, 1.75, &opts).map_err(e2s)?;
    let g = CoeffSeries::from_real(2, &[(&[0, 0], 1.0), (&[1, 1], -2.0)]);
    let edge = noncyclicity_certificate(&g, &mu2, 1.4, &opts).map_err(e2s)?;
    let got = [yes.verdict, one.verdict, edge.verdict];
    if got != [Certificate::NonCyclic, Certificate::Inconclusive, Certificate::Inconclusive] {
        return Err(format!("{got:?}"));
    }
    Ok("NonCyclic, Inconclusive, Inconclusive".into())
}
