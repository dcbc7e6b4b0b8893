//! Radial dilations of the model polynomials.
//!
//! For `p = 1 − λu`, `u = z_1⋯z_m`, `λ = m^{m/2}`, the quotient `p/p_r`
//! is `(1 − λu) Σ_k (r^m λ u)^k`. Its coefficients live on the diagonal
//! indices `k·(1,..,1,0,..)`, so the norm is a one-dimensional sum that can
//! be taken exactly. Boundedness of `‖p/p_r‖_α` as `r → 1⁻` is the
//! cyclicity diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::norms::{self, SpaceParams};
use crate::par::{self, KahanSum};
use crate::series::{CoeffSeries, ModelPolynomialSpec};

/// `1 − r` = 10⁻¹ .. 10⁻⁴.
pub const DEFAULT_R_GRID: [f64; 4] = [0.9, 0.99, 0.999, 0.9999];

/// Grid used by the increment estimator in [`threshold_bisection`].
pub const DEEP_R_GRID: [f64; 3] = [1.0 - 1e-3, 1.0 - 1e-4, 1.0 - 1e-5];

/// Slope below which a sweep counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.15;

pub const MAX_TERMS: usize = 10_000_000;

fn check_r(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Invalid(format!("r must lie in [0, 1), got {r}")));
    }
    Ok(())
}

/// `c_0 = 1`, `c_k = λ^k r^{m(k−1)} (r^m − 1)`.
pub fn model_quotient_coeffs(spec: &ModelPolynomialSpec, r: f64, k_max: usize) -> Result<Vec<f64>> {
    check_r(r)?;
    let m = spec.m as i32;
    let lambda = spec.lambda();
    let rm = r.powi(m);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    let mut lead = lambda; // λ^k r^{m(k−1)}
    for _ in 1..=k_max {
        out.push(lead * (rm - 1.0));
        lead *= lambda * rm;
    }
    Ok(out)
}

/// The quotient as a ball series, up to `u^K`.
pub fn model_quotient_series(spec: &ModelPolynomialSpec, r: f64, k_max: usize) -> Result<CoeffSeries> {
    let d = spec.diagonal_index();
    let coeffs = model_quotient_coeffs(spec, r, k_max)?;
    CoeffSeries::from_terms(
        spec.n,
        Some(spec.m as u32 * k_max as u32),
        coeffs
            .into_iter()
            .enumerate()
            .map(|(k, c)| (d.scale(k as u32), c.into())),
    )
}

/// Walks the terms `t_k = w_diag(k) |c_k|²`, `k ≥ 1`, in log space.
///
/// The step `ln(t_{k+1}/t_k)` is built from `ln_1p` of small ratios, so the
/// walk stays accurate over millions of terms.
struct TermWalk {
    n: f64,
    m: f64,
    alpha: f64,
    ln_r2m: f64,
    k: u64,
    ln_t: KahanSum,
}

impl TermWalk {
    fn new(spec: &ModelPolynomialSpec, alpha: f64, r: f64) -> Self {
        let (n, m) = (spec.n, spec.m);
        let ln_r = r.ln();
        let one_minus_rm = -(m as f64 * ln_r).exp_m1();
        let mut ln_t = KahanSum::default();
        ln_t.add(norms::ln_diagonal_weight(n, m, alpha, 1));
        ln_t.add(m as f64 * (m as f64).ln());
        ln_t.add(2.0 * one_minus_rm.ln());
        Self {
            n: n as f64,
            m: m as f64,
            alpha,
            ln_r2m: 2.0 * m as f64 * ln_r,
            k: 1,
            ln_t,
        }
    }

    fn ln_term(&self) -> f64 {
        self.ln_t.value()
    }

    /// `ln(t_{k+1}/t_k)`.
    fn ln_ratio(&self) -> f64 {
        let k = self.k as f64;
        let (n, m) = (self.n, self.m);
        let mut s = self.alpha * (m / (n + m * k)).ln_1p() + self.ln_r2m;
        for i in 1..=self.m as u32 {
            let i = i as f64;
            s += ((m - n + 1.0 - i) / (n - 1.0 + m * k + i)).ln_1p();
        }
        s
    }

    fn step(&mut self, ln_ratio: f64) {
        self.ln_t.add(ln_ratio);
        self.k += 1;
    }
}

/// `‖p/p_r‖²_α`, summed until the geometric tail bound drops below
/// `tol` times the partial sum.
pub fn quotient_norm_sq(spec: &ModelPolynomialSpec, alpha: f64, r: f64, tol: f64) -> Result<f64> {
    check_r(r)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid("tol must be positive".into()));
    }
    let head = (spec.n as f64).powf(alpha);
    let mut walk = TermWalk::new(spec, alpha, r);
    let mut sum = KahanSum::default();
    sum.add(head);
    sum.add(walk.ln_term().exp());
    if r == 0.0 {
        return Ok(sum.value());
    }
    let limit_ratio = walk.ln_r2m.exp();
    for _ in 0..MAX_TERMS {
        let lr = walk.ln_ratio();
        // ratios approach r^{2m} monotonically for large k
        let rho = lr.exp().max(limit_ratio);
        let t = walk.ln_term().exp();
        if rho < 1.0 && t * rho / (1.0 - rho) < tol * sum.value() {
            return Ok(sum.value());
        }
        walk.step(lr);
        sum.add(walk.ln_term().exp());
    }
    Err(Error::NonConvergence(MAX_TERMS))
}

/// `Σ_{k ≤ K} w_diag(k) |c_k|²`: the norm of the quotient truncated at `u^K`.
pub fn quotient_partial_norm_sq(spec: &ModelPolynomialSpec, alpha: f64, r: f64, k_max: usize) -> Result<f64> {
    check_r(r)?;
    let mut sum = KahanSum::default();
    sum.add((spec.n as f64).powf(alpha));
    if k_max == 0 {
        return Ok(sum.value());
    }
    if r == 0.0 {
        sum.add(norms::ln_diagonal_weight(spec.n, spec.m, alpha, 1).exp() * spec.lambda().powi(2));
        return Ok(sum.value());
    }
    let mut walk = TermWalk::new(spec, alpha, r);
    sum.add(walk.ln_term().exp());
    for _ in 1..k_max {
        let lr = walk.ln_ratio();
        walk.step(lr);
        sum.add(walk.ln_term().exp());
    }
    Ok(sum.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralQuotient {
    pub value: f64,
    /// Weighted mass of the top degree shell.
    pub tail_shell: f64,
}

/// `‖p · (1/p_r)‖²_α` with `1/p_r` truncated at degree `D`.
pub fn general_quotient_norm_sq(p: &CoeffSeries, alpha: f64, r: f64, degree: u32) -> Result<GeneralQuotient> {
    check_r(r)?;
    if !p.is_polynomial() {
        return Err(Error::Invalid("p must be a polynomial".into()));
    }
    let params = SpaceParams::new(p.dim(), alpha)?;
    let inv = p.dilate(r).reciprocal(degree)?;
    let q = p.mul(&inv)?;
    let report = norms::norm_sq(&params, &q)?;
    Ok(GeneralQuotient {
        value: report.value,
        tail_shell: report.tail_shell.unwrap_or(0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationSweep {
    pub spec: ModelPolynomialSpec,
    pub alpha: f64,
    pub r_grid: Vec<f64>,
    pub norms: Vec<f64>,
    /// Slope of `log ‖p/p_r‖²` against `−log(1−r)`.
    pub fitted_exponent: f64,
    /// Slope of `log |N(r_{i+1}) − N(r_i)|` against `−log(1−r_i)`. The
    /// bounded part cancels, so this tracks the growth rate on both sides of
    /// the threshold: positive when diverging, negative when converging.
    pub divergence_exponent: Option<f64>,
}

impl DilationSweep {
    pub fn from_norms(spec: ModelPolynomialSpec, alpha: f64, r_grid: Vec<f64>, norms: Vec<f64>) -> Result<Self> {
        if r_grid.len() != norms.len() {
            return Err(Error::Invalid("grid and norms differ in length".into()));
        }
        if r_grid.len() < 2 {
            return Err(Error::InsufficientPoints {
                needed: 2,
                got: r_grid.len(),
            });
        }
        if r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return Err(Error::Invalid("r grid must be strictly ascending in [0, 1)".into()));
        }
        if norms.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::Invalid("norms must be positive".into()));
        }
        let x: Vec<f64> = r_grid.iter().map(|r| -(1.0 - r).ln()).collect();
        let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let fitted_exponent = fit_line(&x, &y)?.slope;
        let divergence_exponent = if norms.len() >= 3 {
            let dy: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs().ln()).collect();
            if dy.iter().all(|v| v.is_finite()) {
                Some(fit_line(&x[..dy.len()], &dy)?.slope)
            } else {
                None
            }
        } else {
            None
        };
        Ok(Self {
            spec,
            alpha,
            r_grid,
            norms,
            fitted_exponent,
            divergence_exponent,
        })
    }
}

/// Norms over the grid, in parallel.
pub fn sweep(spec: &ModelPolynomialSpec, alpha: f64, r_grid: &[f64], tol: f64) -> Result<DilationSweep> {
    let norms = par::map_slice(r_grid, |&r| quotient_norm_sq(spec, alpha, r, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DilationSweep::from_norms(*spec, alpha, r_grid.to_vec(), norms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Boundedness {
    Bounded { slope: f64 },
    Diverging { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub verdict: Boundedness,
    pub note: String,
}

pub fn boundedness_verdict(sweep: &DilationSweep) -> Result<BoundednessReport> {
    if sweep.r_grid.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: sweep.r_grid.len(),
        });
    }
    let widest = 1.0 - sweep.r_grid[0];
    let narrowest = 1.0 - sweep.r_grid[sweep.r_grid.len() - 1];
    let decades = (widest / narrowest).log10();
    if decades < 2.0 - 1e-9 {
        return Err(Error::Invalid(format!(
            "1 - r spans {decades:.2} decades, need at least 2"
        )));
    }
    let s = sweep.fitted_exponent;
    let verdict = if s < BOUNDED_SLOPE {
        Boundedness::Bounded { slope: s }
    } else {
        Boundedness::Diverging { exponent: s }
    };
    let mut note = format!(
        "slope {s:.4} over {} points spanning {decades:.1} decades of 1-r",
        sweep.r_grid.len()
    );
    if let Some(d) = sweep.divergence_exponent {
        note.push_str(&format!("; increment exponent {d:.4}"));
    }
    Ok(BoundednessReport { verdict, note })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub alpha: f64,
    pub threshold: f64,
    pub iterations: usize,
}

/// Bisects `[lo, hi]` for the sign change of the increment exponent on
/// [`DEEP_R_GRID`].
pub fn threshold_bisection(spec: &ModelPolynomialSpec, lo: f64, hi: f64, tol_alpha: f64) -> Result<ThresholdEstimate> {
    let exponent = |alpha: f64| -> Result<f64> {
        sweep(spec, alpha, &DEEP_R_GRID, 1e-13)?
            .divergence_exponent
            .ok_or(Error::NumericallySingular)
    };
    let (mut lo, mut hi) = (lo, hi);
    if exponent(lo)? >= 0.0 || exponent(hi)? <= 0.0 {
        return Err(Error::Invalid(format!("no sign change of the exponent in [{lo}, {hi}]")));
    }
    let mut iterations = 0;
    while hi - lo > tol_alpha {
        let mid = 0.5 * (lo + hi);
        if exponent(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdEstimate {
        alpha: 0.5 * (lo + hi),
        threshold: spec.threshold(),
        iterations,
    })
}
