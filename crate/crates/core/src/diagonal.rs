//! Diagonal subspaces: functions of the single monomial
//! `u = z_1^{M_1}⋯z_m^{M_m}`.
//!
//! A one-variable series `f̃(w) = Σ ã_l w^l` lifts to the ball as
//! `f(z) = f̃(μ^{1/4} z^M)`, whose coefficient at `l·M` is `μ^{l/4} ã_l`.
//! [`project`] is the exact inverse on diagonal series and drops every
//! off-diagonal coefficient. The matching one-variable space `d_β` has
//! `‖f̃‖²_{d_β} = Σ μ^{-l/2} (l+1)^β |ã_l|²` with `β(α) = α − n + (m+1)/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::norms::{self, SpaceParams};
use crate::series::{CoeffSeries, ModelPolynomialSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSpec {
    pub n: usize,
    pub m: usize,
    /// `M`, with `M_i ≥ 1` for `i < m` and `M_i = 0` after.
    pub exponents: MultiIndex,
    pub mu: f64,
}

impl DiagonalSpec {
    pub fn new(exponents: MultiIndex, m: usize) -> Result<Self> {
        let n = exponents.dim();
        if m < 1 || m > n {
            return Err(Error::Invalid(format!("need 1 <= m <= n, got m={m}, n={n}")));
        }
        let e = exponents.entries();
        if e[..m].contains(&0) || e[m..].iter().any(|&v| v != 0) {
            return Err(Error::Invalid(format!(
                "M = {exponents} must be positive on the first {m} entries and zero after"
            )));
        }
        let mu = mu_const(&exponents, m);
        Ok(Self {
            n,
            m,
            exponents,
            mu,
        })
    }

    /// `M = (1,...,1,0,...,0)`: the diagonal of the model polynomial.
    pub fn for_model(spec: &ModelPolynomialSpec) -> Self {
        Self::new(spec.diagonal_index(), spec.m).expect("model diagonal is valid")
    }

    pub fn beta(&self, alpha: f64) -> f64 {
        beta_of_alpha(alpha, self.n, self.m)
    }

    /// Largest `l` with `l·M_i ≤ cap` for every `i`.
    pub fn max_level(&self, cap: u32) -> u32 {
        cap / self.exponents.max_entry()
    }
}

/// `μ(m) = (M_1+⋯+M_m)^{M_1+⋯+M_m} / (M_1^{M_1}⋯M_m^{M_m})`.
pub fn mu_const(exponents: &MultiIndex, m: usize) -> f64 {
    let e = &exponents.entries()[..m];
    let s: f64 = e.iter().map(|&v| v as f64).sum();
    let ln = s * s.ln() - e.iter().map(|&v| v as f64 * (v as f64).ln()).sum::<f64>();
    ln.exp()
}

/// `β(α) = α − n + (m+1)/2`.
pub fn beta_of_alpha(alpha: f64, n: usize, m: usize) -> f64 {
    alpha - n as f64 + (m as f64 + 1.0) / 2.0
}

/// One-variable series `Σ ã_l w^l` tagged with the `μ` of its `d_β` weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVarSeries {
    pub coeffs: Vec<Complex64>,
    pub mu: f64,
}

impl OneVarSeries {
    pub fn new(coeffs: Vec<Complex64>, mu: f64) -> Self {
        assert!(mu >= 1.0, "mu must be >= 1");
        Self { coeffs, mu }
    }

    pub fn from_real(coeffs: &[f64], mu: f64) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), mu)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::default())
    }

    /// As a one-dimensional [`CoeffSeries`] (for the shared solver).
    pub fn to_series(&self) -> CoeffSeries {
        CoeffSeries::from_terms(
            1,
            None,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(l, c)| (MultiIndex::new(&[l as u32]), *c)),
        )
        .expect("dimension 1")
    }

    pub fn from_series(s: &CoeffSeries, mu: f64) -> Self {
        let len = s.degree() as usize + 1;
        let mut coeffs = vec![Complex64::default(); len];
        for (k, c) in s.iter() {
            coeffs[k.degree() as usize] = *c;
        }
        Self::new(coeffs, mu)
    }
}

/// `μ^{-l/2} (l+1)^β`.
pub fn dbeta_weight(mu: f64, beta: f64, l: u32) -> f64 {
    (-(l as f64) / 2.0 * mu.ln() + beta * (l as f64 + 1.0).ln()).exp()
}

pub fn dbeta_norm_sq(f: &OneVarSeries, beta: f64) -> f64 {
    crate::par::compensated_sum(
        f.coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| dbeta_weight(f.mu, beta, l as u32) * c.norm_sqr()),
    )
}

// μ^{l/4}; lift multiplies by it and project divides, so the round trip
// sees the same rounded factor.
fn level_scale(mu: f64, l: u32) -> f64 {
    mu.powf(0.25).powi(l as i32)
}

/// `f(z) = f̃(μ^{1/4} z^M)`.
pub fn lift(f: &OneVarSeries, spec: &DiagonalSpec) -> CoeffSeries {
    CoeffSeries::from_terms(
        spec.n,
        None,
        f.coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| (spec.exponents.scale(l as u32), c * level_scale(spec.mu, l as u32))),
    )
    .expect("dimensions match spec")
}

/// Keeps the coefficients at `l·M` and rescales them by `μ^{-l/4}`.
pub fn project(r: &CoeffSeries, spec: &DiagonalSpec) -> OneVarSeries {
    let m0 = spec.exponents.entries()[0];
    let hits: Vec<(u32, Complex64)> = r
        .iter()
        .filter_map(|(k, c)| {
            let l = k.entries()[0] / m0;
            (spec.exponents.scale(l) == *k).then_some((l, *c))
        })
        .collect();
    let len = hits.iter().map(|(l, _)| *l as usize + 1).max().unwrap_or(1);
    let mut coeffs = vec![Complex64::default(); len];
    for (l, c) in hits {
        coeffs[l as usize] = c / level_scale(spec.mu, l);
    }
    OneVarSeries::new(coeffs, spec.mu)
}

/// `φ_β(t) = t^{1-β}` for `β < 1`, `log⁺ t` for `β = 1`.
pub fn phi_beta(t: f64, beta: f64) -> Result<f64> {
    if beta > 1.0 {
        return Err(Error::BetaAboveOne(beta));
    }
    if beta == 1.0 {
        Ok(t.ln().max(0.0))
    } else {
        Ok(t.powf(1.0 - beta))
    }
}

/// `‖lift(f̃)‖²_α / ‖f̃‖²_{d_β(α)}`.
pub fn norm_equivalence_probe(f: &OneVarSeries, spec: &DiagonalSpec, alpha: f64) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let params = SpaceParams::new(spec.n, alpha)?;
    let num = norms::norm_sq(&params, &lift(f, spec))?.value;
    let den = dbeta_norm_sq(f, spec.beta(alpha));
    Ok(num / den)
}

/// The probe ratio for the monomial `w^l`: `w_α(lM) μ^l / (l+1)^β`.
pub fn monomial_ratio(spec: &DiagonalSpec, alpha: f64, l: u32) -> f64 {
    let params = SpaceParams {
        n: spec.n,
        alpha,
    };
    let k = spec.exponents.scale(l);
    (norms::ln_weight(&params, &k) + l as f64 * spec.mu.ln()
        - spec.beta(alpha) * (l as f64 + 1.0).ln())
    .exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m_entries: &[u32], m: usize) -> DiagonalSpec {
        DiagonalSpec::new(MultiIndex::new(m_entries), m).unwrap()
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_const(&MultiIndex::new(&[1, 0]), 1), 1.0);
        assert!((mu_const(&MultiIndex::new(&[1, 1]), 2) - 4.0).abs() < 1e-14);
        assert!((mu_const(&MultiIndex::new(&[2, 1]), 2) - 27.0 / 4.0).abs() < 1e-13);
        for m in 1..=6usize {
            let s = spec(&vec![1; m], m);
            let want = (m as f64).powi(m as i32);
            assert!((s.mu - want).abs() < 1e-12 * want);
        }
        assert!(DiagonalSpec::new(MultiIndex::new(&[1, 0, 1]), 2).is_err());
        assert!(DiagonalSpec::new(MultiIndex::new(&[0, 1]), 2).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_of_alpha(2.0, 2, 1), 1.0);
        assert_eq!(beta_of_alpha(1.5, 2, 2), 1.0);
        for n in 1..=6usize {
            for m in 1..=n {
                let a0 = (2 * n + 1 - m) as f64 / 2.0;
                assert_eq!(beta_of_alpha(a0, n, m), 1.0);
            }
        }
    }

    #[test]
    fn dbeta_examples() {
        assert_eq!(dbeta_norm_sq(&OneVarSeries::from_real(&[1.0], 3.0), 0.7), 1.0);
        let f = OneVarSeries::from_real(&[1.0, -1.0], 1.0);
        assert!((dbeta_norm_sq(&f, 0.0) - 2.0).abs() < 1e-15);
        let f = OneVarSeries::from_real(&[1.0, -1.0], 4.0);
        assert!((dbeta_norm_sq(&f, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lift_examples() {
        let s = spec(&[1, 1], 2);
        assert_eq!(lift(&OneVarSeries::from_real(&[1.0], 4.0), &s), CoeffSeries::one(2));
        let f = lift(&OneVarSeries::from_real(&[1.0, -1.0], 4.0), &s);
        let want = CoeffSeries::from_real(2, &[(&[0, 0], 1.0), (&[1, 1], -2f64.sqrt())]);
        assert!(f.max_abs_diff(&want) < 1e-15);
        // the model polynomial 1 - 2 z1 z2 is the lift of 1 - √2 w
        let g = lift(&OneVarSeries::from_real(&[1.0, -2f64.sqrt()], 4.0), &s);
        let model = crate::series::model_polynomial(&ModelPolynomialSpec::new(2, 2).unwrap());
        assert!(g.max_abs_diff(&model) < 1e-15);
        let s1 = spec(&[1, 0], 1);
        let cube = lift(&OneVarSeries::from_real(&[0.0, 0.0, 0.0, 1.0], 1.0), &s1);
        assert_eq!(cube, CoeffSeries::from_real(2, &[(&[3, 0], 1.0)]));
    }

    #[test]
    fn project_examples() {
        let s = spec(&[1, 1], 2);
        let r = CoeffSeries::from_real(2, &[(&[1, 0], 1.0), (&[1, 1], 1.0)]);
        let p = project(&r, &s);
        assert_eq!(p.coeffs.len(), 2);
        assert_eq!(p.coeffs[0], Complex64::default());
        assert!((p.coeffs[1] - Complex64::new(4f64.powf(-0.25), 0.0)).norm() < 1e-15);

        // random degree-6 bivariate r with M = (2,1): survivors are (2l, l)
        let s21 = spec(&[2, 1], 2);
        let mut terms = Vec::new();
        let mut v = 0.37f64;
        for a in 0..=6u32 {
            for b in 0..=(6 - a) {
                v = (v * 7.31 + 0.113).fract();
                terms.push((MultiIndex::new(&[a, b]), Complex64::new(v - 0.5, 0.0)));
            }
        }
        let r = CoeffSeries::from_terms(2, None, terms).unwrap();
        let back = lift(&project(&r, &s21), &s21);
        let survivors: Vec<_> = back.iter().map(|(k, _)| k.entries().to_vec()).collect();
        let oracle: Vec<Vec<u32>> = r
            .iter()
            .map(|(k, _)| k.entries().to_vec())
            .filter(|e| e[0] == 2 * e[1])
            .collect();
        assert_eq!(survivors, oracle);
        for (k, c) in back.iter() {
            assert!((r.coeff(k) - c).norm() < 1e-15);
        }
    }

    #[test]
    fn lift_project_round_trip_exact() {
        let s = spec(&[2, 1, 0], 2);
        let f = OneVarSeries::new(
            (0..12)
                .map(|l| Complex64::new((l as f64 * 0.7).sin(), (l as f64 * 1.3).cos()))
                .collect(),
            s.mu,
        );
        let back = project(&lift(&f, &s), &s);
        for (a, b) in back.coeffs.iter().zip(&f.coeffs) {
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_beta(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(phi_beta(4.0, 0.0).unwrap(), 4.0);
        assert!((phi_beta(std::f64::consts::E.powi(2), 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(phi_beta(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(phi_beta(2.0, 1.5), Err(Error::BetaAboveOne(1.5)));
    }

    #[test]
    fn probe_examples() {
        let s = spec(&[1, 1], 2);
        let one = OneVarSeries::from_real(&[1.0], s.mu);
        assert!((norm_equivalence_probe(&one, &s, 1.3).unwrap() - 2f64.powf(1.3)).abs() < 1e-13);
        assert!(norm_equivalence_probe(&OneVarSeries::from_real(&[0.0], 4.0), &s, 0.0).is_err());
        // monomials: ratio matches the closed form and is bounded for l ≥ 10
        let ratios: Vec<f64> = (1..=200).map(|l| monomial_ratio(&s, 0.0, l)).collect();
        for l in [1u32, 5, 50] {
            let mut c = vec![0.0; l as usize + 1];
            c[l as usize] = 1.0;
            let probe = norm_equivalence_probe(&OneVarSeries::from_real(&c, s.mu), &s, 0.0).unwrap();
            assert!((probe - ratios[l as usize - 1]).abs() < 1e-10 * probe);
        }
        let tail = &ratios[9..];
        let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
        let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo < 3.0);
    }
}
