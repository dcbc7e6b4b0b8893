//! The `D_α(B_n)` inner-product structure.
//!
//! ```text
//! ‖f‖²_α = Σ_k (n+|k|)^α (n-1)! k! / (n-1+|k|)! |a_k|²
//! ```
//!
//! Monomials are orthogonal, so the inner product is the polarized diagonal
//! form `⟨f, g⟩_α = Σ_k w_α(k) a_k conj(b_k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{ln_factorial, ln_gamma_signed, ln_sphere_monomial_integral, MultiIndex};
use crate::par::{self, KahanSum};
use crate::sampling::{self, Domain, McEstimate};
use crate::series::CoeffSeries;

/// Identifies `D_α(B_n)`. `α = 0` is Hardy, `α = -1` Bergman, `α = n` Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub n: usize,
    pub alpha: f64,
}

impl SpaceParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("dimension must be >= 1".into()));
        }
        if !alpha.is_finite() {
            return Err(Error::Invalid("alpha must be finite".into()));
        }
        Ok(Self { n, alpha })
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    /// `‖1‖²_α = n^α`.
    pub fn one_norm_sq(&self) -> f64 {
        (self.n as f64).powf(self.alpha)
    }

    fn check(&self, f: &CoeffSeries) -> Result<()> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: f.dim(),
            });
        }
        Ok(())
    }
}

/// `ln w_α(k)`.
pub fn ln_weight(params: &SpaceParams, k: &MultiIndex) -> f64 {
    let n = params.n as f64;
    params.alpha * (n + k.degree() as f64).ln() + ln_sphere_monomial_integral(k)
}

/// `w_α(k) = (n+|k|)^α (n-1)! k! / (n-1+|k|)!`.
pub fn weight(params: &SpaceParams, k: &MultiIndex) -> f64 {
    ln_weight(params, k).exp()
}

/// Weight of the diagonal index `l·(1,...,1,0,...,0)` with `m` ones:
/// `(n+ml)^α (n-1)! (l!)^m / (n-1+ml)!`. Needs no multi-index allocation.
pub fn ln_diagonal_weight(n: usize, m: usize, alpha: f64, l: u64) -> f64 {
    let deg = m as u64 * l;
    alpha * ((n as u64 + deg) as f64).ln() + ln_factorial(n as u64 - 1)
        + m as f64 * ln_factorial(l)
        - ln_factorial(n as u64 - 1 + deg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    /// For truncated series: the weighted mass of the last computed degree
    /// shell, a heuristic size for the neglected tail.
    pub tail_shell: Option<f64>,
}

/// `‖f‖²_α`, summed in graded order with compensation.
pub fn norm_sq(params: &SpaceParams, f: &CoeffSeries) -> Result<NormReport> {
    params.check(f)?;
    let terms: Vec<(&MultiIndex, &Complex64)> = f.iter().collect();
    let contributions = par::map_slice(&terms, |(k, c)| weight(params, k) * c.norm_sqr());
    let value = par::compensated_sum(contributions.iter().copied());
    let tail_shell = f.trunc_degree().map(|d| {
        par::compensated_sum(
            terms
                .iter()
                .zip(&contributions)
                .filter(|((k, _), _)| k.degree() == d)
                .map(|(_, v)| *v),
        )
    });
    Ok(NormReport { value, tail_shell })
}

/// `⟨f, g⟩_α = Σ w_α(k) a_k conj(b_k)`.
pub fn inner(params: &SpaceParams, f: &CoeffSeries, g: &CoeffSeries) -> Result<Complex64> {
    params.check(f)?;
    params.check(g)?;
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for (k, a) in f.iter() {
        let b = g.coeff(k);
        if b == Complex64::default() {
            continue;
        }
        let v = a * b.conj() * weight(params, k);
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `R f = Σ z_i ∂_i f`, i.e. `a_k ← |k| a_k`.
pub fn radial_derivative(f: &CoeffSeries) -> CoeffSeries {
    degreewise(f, |d| d as f64)
}

fn degreewise(f: &CoeffSeries, scale: impl Fn(u32) -> f64) -> CoeffSeries {
    let terms = f
        .iter()
        .map(|(k, c)| (k.clone(), c * scale(k.degree())))
        .collect::<Vec<_>>();
    CoeffSeries::from_terms(f.dim(), f.trunc_degree(), terms).expect("same shape")
}

/// `(nI + R)^q f`.
pub fn shifted_radial_power(f: &CoeffSeries, n: usize, q: u32) -> CoeffSeries {
    degreewise(f, |d| ((n as u32 + d) as f64).powi(q as i32))
}

/// Returns `(‖(nI+R)^q f‖²_{α-2q}, ‖f‖²_α)`; the two agree exactly.
pub fn relation_check(params: &SpaceParams, f: &CoeffSeries, q: u32) -> Result<(f64, f64)> {
    if q < 1 {
        return Err(Error::Invalid("q must be >= 1".into()));
    }
    let image = shifted_radial_power(f, params.n, q);
    let lower = params.with_alpha(params.alpha - 2.0 * q as f64);
    Ok((norm_sq(&lower, &image)?.value, norm_sq(params, f)?.value))
}

/// `C(γ,t,k) = Γ(n+1+γ)Γ(n+1+|k|+γ+t) / (Γ(n+1+γ+t)Γ(n+1+|k|+γ))`.
pub fn fractional_coeff(gamma: f64, t: f64, k_deg: u32, n: usize) -> Result<f64> {
    let base = n as f64 + 1.0 + gamma;
    let k = k_deg as f64;
    let (a, sa) = ln_gamma_signed(base)?;
    let (b, sb) = ln_gamma_signed(base + k + t)?;
    let (c, sc) = ln_gamma_signed(base + t)?;
    let (d, sd) = ln_gamma_signed(base + k)?;
    Ok(sa * sb * sc * sd * (a + b - c - d).exp())
}

/// `R^{γ,t} f = Σ C(γ,t,|k|) a_k z^k`.
pub fn apply_fractional(gamma: f64, t: f64, f: &CoeffSeries) -> Result<CoeffSeries> {
    let n = f.dim();
    let top = f.degree();
    let coeffs = (0..=top)
        .map(|d| fractional_coeff(gamma, t, d, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(degreewise(f, |d| coeffs[d as usize]))
}

/// Monte Carlo estimate of
/// `|f|²_α = ∫_B (‖∇f‖² − |Rf|²) / (1−‖z‖²)^α du` for a polynomial `f`.
///
/// The gradient is exact termwise. For `α ≥ 1/2` the integrand has
/// infinite variance near the sphere and the error bar is unreliable.
pub fn mc_integral_norm(
    params: &SpaceParams,
    f: &CoeffSeries,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    params.check(f)?;
    if !(params.alpha > -1.0 && params.alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha: params.alpha,
            range: "(-1, 1)",
        });
    }
    if !f.is_polynomial() {
        return Err(Error::Invalid("integral norm needs a polynomial".into()));
    }
    let n = params.n;
    let grads: Vec<CoeffSeries> = (0..n).map(|i| partial_derivative(f, i)).collect();
    let rf = radial_derivative(f);
    let alpha = params.alpha;
    Ok(sampling::mc_means(Domain::Ball, n, samples, seed, 1, |z, out| {
        let grad2: f64 = grads
            .iter()
            .map(|g| g.evaluate(z).expect("dims checked").norm_sqr())
            .sum();
        let r2 = rf.evaluate(z).expect("dims checked").norm_sqr();
        let rho2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        out[0] = (grad2 - r2) / (1.0 - rho2).powf(alpha);
    }))
}

/// `∂f/∂z_i` of a polynomial.
pub fn partial_derivative(f: &CoeffSeries, i: usize) -> CoeffSeries {
    let n = f.dim();
    let e = MultiIndex::unit(n, i, 1);
    let terms = f
        .iter()
        .filter_map(|(k, c)| {
            let p = k.entries()[i];
            (p > 0).then(|| (k.checked_sub(&e).expect("p > 0"), c * p as f64))
        })
        .collect::<Vec<_>>();
    CoeffSeries::from_terms(n, f.trunc_degree(), terms).expect("same shape")
}
