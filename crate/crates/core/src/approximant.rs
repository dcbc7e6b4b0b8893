//! Optimal polynomial approximants to `1/f`.
//!
//! For a basis of monomials `z^j` the minimizer `p = Σ c_k z^k` of
//! `‖p f − 1‖` solves the normal equations `G c = b` with
//! `G[j,k] = ⟨z^k f, z^j f⟩` and `b[j] = ⟨1, z^j f⟩`. Only `b[0]` is nonzero.
//! The same solver serves `D_α(B_n)` and the one-variable spaces `d_β`; it
//! only needs a weight for each monomial.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagonal::{self, DiagonalSpec, OneVarSeries};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::multiindex::{box_indices, MultiIndex};
use crate::norms::{self, SpaceParams};
use crate::par::{self, KahanSum};
use crate::series::CoeffSeries;

/// Largest basis the dense solver accepts.
pub const MAX_BASIS: usize = 20_000;

/// Relative agreement required between the two distance computations.
pub const DIST_AGREEMENT: f64 = 1e-8;

type WeightFn<'a> = dyn Fn(&MultiIndex) -> f64 + Sync + 'a;

#[derive(Debug, Clone)]
pub struct GramSystem {
    pub basis: Vec<MultiIndex>,
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximantResult {
    pub order: u32,
    pub coeffs: CoeffSeries,
    /// `‖p f − 1‖²`, from the residual itself.
    pub dist_sq: f64,
    /// `‖1‖² − Re⟨b, c⟩`, clamped at zero.
    pub dist_sq_form: f64,
    /// `(max L_ii / min L_ii)²` of the Cholesky factor, a lower bound on
    /// the condition number.
    pub cond_estimate: f64,
    /// The diagonal was shifted by `1e-12·max G_ii` to get a factorization.
    pub regularized: bool,
    pub basis_size: usize,
}

impl ApproximantResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// `⟨z^k f, z^j f⟩_α = Σ_m w(m) a_{m−k} conj(a_{m−j})`.
pub fn gram_entry(
    params: &SpaceParams,
    f: &CoeffSeries,
    k: &MultiIndex,
    j: &MultiIndex,
) -> Result<Complex64> {
    check_dim(params, f)?;
    if let Some(d) = f.trunc_degree() {
        let need = k.degree().max(j.degree());
        if d < need {
            log::warn!("series truncated at degree {d}, Gram entry needs more than {need}");
        }
    }
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for (s, a) in f.iter() {
        let m = k.add(s);
        if let Some(t) = m.checked_sub(j) {
            let b = f.coeff(&t);
            if b != Complex64::default() {
                let v = a * b.conj() * norms::weight(params, &m);
                re.add(v.re);
                im.add(v.im);
            }
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

fn check_dim(params: &SpaceParams, f: &CoeffSeries) -> Result<()> {
    if f.dim() != params.n {
        return Err(Error::DimensionMismatch {
            left: params.n,
            right: f.dim(),
        });
    }
    Ok(())
}

/// Per-variable degree `≤ N`, in graded order.
pub fn box_basis(n: usize, order: u32) -> Result<Vec<MultiIndex>> {
    let size = (order as usize + 1)
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_BASIS)
        .ok_or(Error::BasisTooLarge {
            size: (order as f64 + 1.0).powi(n as i32).min(usize::MAX as f64) as usize,
            limit: MAX_BASIS,
        })?;
    let mut basis = box_indices(n, order);
    debug_assert_eq!(basis.len(), size);
    basis.sort();
    Ok(basis)
}

fn assemble_weighted(f: &CoeffSeries, basis: &[MultiIndex], weight: &WeightFn) -> GramSystem {
    let index: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let terms: Vec<(&MultiIndex, &Complex64)> = f.iter().collect();
    let size = basis.len();
    let rows = par::map_slice(basis, |j| {
        let mut row = vec![Complex64::default(); size];
        for (sj, aj) in &terms {
            let m = j.add(sj);
            let w = weight(&m);
            for (sk, ak) in &terms {
                if let Some(k) = m.checked_sub(sk) {
                    if let Some(&col) = index.get(&k) {
                        row[col] += aj.conj() * **ak * w;
                    }
                }
            }
        }
        row
    });
    let matrix = DMatrix::from_fn(size, size, |r, c| rows[r][c]);
    let mut rhs = DVector::from_element(size, Complex64::default());
    let zero = MultiIndex::zero(f.dim());
    if let Some(&i0) = index.get(&zero) {
        rhs[i0] = f.constant_term().conj() * weight(&zero);
    }
    GramSystem {
        basis: basis.to_vec(),
        matrix,
        rhs,
    }
}

/// Normal equations of `D_α(B_n)` on the given basis.
pub fn assemble(params: &SpaceParams, f: &CoeffSeries, basis: &[MultiIndex]) -> Result<GramSystem> {
    check_dim(params, f)?;
    Ok(assemble_weighted(f, basis, &|m| norms::weight(params, m)))
}

fn factor(matrix: DMatrix<Complex64>) -> Result<(Cholesky<Complex64, Dyn>, bool)> {
    if let Some(ch) = Cholesky::new(matrix.clone()) {
        return Ok((ch, false));
    }
    let max_diag = matrix.diagonal().iter().map(|v| v.re).fold(0.0, f64::max);
    let mut shifted = matrix;
    let eps = 1e-12 * max_diag;
    for i in 0..shifted.nrows() {
        shifted[(i, i)] += eps;
    }
    Cholesky::new(shifted)
        .map(|ch| (ch, true))
        .ok_or(Error::NumericallySingular)
}

fn weighted_norm_sq(f: &CoeffSeries, weight: &WeightFn) -> f64 {
    let terms: Vec<(&MultiIndex, &Complex64)> = f.iter().collect();
    par::compensated_sum(par::map_slice(&terms, |(k, c)| weight(k) * c.norm_sqr()))
}

fn solve_weighted(
    f: &CoeffSeries,
    basis: Vec<MultiIndex>,
    order: u32,
    weight: &WeightFn,
) -> Result<ApproximantResult> {
    if f.is_empty() {
        return Err(Error::ZeroFunction);
    }
    if basis.len() > MAX_BASIS {
        return Err(Error::BasisTooLarge {
            size: basis.len(),
            limit: MAX_BASIS,
        });
    }
    let sys = assemble_weighted(f, &basis, weight);
    let (ch, regularized) = factor(sys.matrix)?;
    let l_diag = ch.l_dirty().diagonal();
    let (lo, hi) = l_diag
        .iter()
        .map(|v| v.re)
        .fold((f64::MAX, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let cond_estimate = (hi / lo).powi(2);
    let c = ch.solve(&sys.rhs);

    let one = weight(&MultiIndex::zero(f.dim()));
    let mut acc = KahanSum::default();
    for (ci, bi) in c.iter().zip(sys.rhs.iter()) {
        acc.add((ci * bi.conj()).re);
    }
    let dist_sq_form = (one - acc.value()).max(0.0);

    let p = CoeffSeries::from_terms(f.dim(), None, sys.basis.into_iter().zip(c.iter().copied()))?;
    let residual = p.mul(f)?.sub(&CoeffSeries::one(f.dim()))?;
    let dist_sq = weighted_norm_sq(&residual, weight);
    let gap = (dist_sq - dist_sq_form).abs();
    if gap > DIST_AGREEMENT * dist_sq.max(f64::EPSILON * one) {
        log::warn!("order {order}: residual {dist_sq:e} vs quadratic form {dist_sq_form:e}");
    }
    Ok(ApproximantResult {
        order,
        coeffs: p,
        dist_sq,
        dist_sq_form,
        cond_estimate,
        regularized,
        basis_size: c.len(),
    })
}

/// Optimal approximant over `P_N^n` (per-variable degree `≤ N`).
pub fn solve(params: &SpaceParams, f: &CoeffSeries, order: u32) -> Result<ApproximantResult> {
    check_dim(params, f)?;
    let basis = box_basis(params.n, order)?;
    solve_with_basis(params, f, basis, order)
}

/// Optimal approximant over an arbitrary monomial basis. `order` is only a
/// label for the result.
pub fn solve_with_basis(
    params: &SpaceParams,
    f: &CoeffSeries,
    basis: Vec<MultiIndex>,
    order: u32,
) -> Result<ApproximantResult> {
    check_dim(params, f)?;
    if let Some(d) = f.trunc_degree() {
        let need = basis.iter().map(|k| k.degree()).max().unwrap_or(0);
        if d < need {
            log::warn!("series truncated at degree {d}, basis reaches degree {need}");
        }
    }
    solve_weighted(f, basis, order, &|m| norms::weight(params, m))
}

/// Approximant restricted to the diagonal monomials `z^{lM}` inside `P_N^n`.
pub fn solve_diagonal_restricted(
    params: &SpaceParams,
    spec: &DiagonalSpec,
    f: &CoeffSeries,
    order: u32,
) -> Result<ApproximantResult> {
    let basis = (0..=spec.max_level(order)).map(|l| spec.exponents.scale(l)).collect();
    solve_with_basis(params, f, basis, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub order: u32,
    pub dist_sq: f64,
}

/// Solves for each order (in parallel) and checks that the distance does
/// not increase.
pub fn decay_sweep(params: &SpaceParams, f: &CoeffSeries, orders: &[u32]) -> Result<Vec<DecayRow>> {
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("orders must be strictly ascending".into()));
    }
    let solved = par::map_slice(orders, |&order| solve(params, f, order));
    let mut rows = Vec::with_capacity(orders.len());
    for r in solved {
        let r = r?;
        rows.push(DecayRow {
            order: r.order,
            dist_sq: r.dist_sq,
        });
    }
    check_monotone(&rows, params.one_norm_sq())?;
    Ok(rows)
}

fn check_monotone(rows: &[DecayRow], scale: f64) -> Result<()> {
    for w in rows.windows(2) {
        if w[1].dist_sq > w[0].dist_sq * (1.0 + 1e-9) + 1e-14 * scale {
            return Err(Error::NotMonotone {
                prev_order: w[0].order,
                prev: w[0].dist_sq,
                order: w[1].order,
                value: w[1].dist_sq,
            });
        }
    }
    Ok(())
}

/// Local slope of `log dist²` against `log(N+1)` between consecutive rows.
pub fn running_slopes(rows: &[DecayRow]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in rows.windows(2) {
        let s = (w[1].dist_sq.ln() - w[0].dist_sq.ln())
            / ((w[1].order as f64 + 1.0).ln() - (w[0].order as f64 + 1.0).ln());
        out.push(s.is_finite().then_some(s));
    }
    out.truncate(rows.len());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayFit {
    /// `β < 1`: `dist² ≈ C (N+1)^slope`, expected slope `−(1−β)`.
    Power {
        slope: f64,
        target: f64,
        residual: f64,
        points: usize,
    },
    /// `β = 1`: profile of `v = dist²·log(N+1)`. `spread` is
    /// `(max v − min v)/min v`; `drift` is the slope of `v` against
    /// `log(N+1)` divided by the mean.
    LogProfile {
        mean: f64,
        spread: f64,
        drift: f64,
        points: usize,
    },
}

/// Fits the upper half of the table.
pub fn fit_decay(rows: &[DecayRow], beta: f64) -> Result<DecayFit> {
    if rows.len() < 5 {
        return Err(Error::InsufficientPoints {
            needed: 5,
            got: rows.len(),
        });
    }
    fit_rows(&rows[rows.len() / 2..], beta)
}

/// Fits the rows with `lo ≤ N ≤ hi`.
pub fn fit_decay_window(rows: &[DecayRow], beta: f64, lo: u32, hi: u32) -> Result<DecayFit> {
    let window: Vec<DecayRow> = rows
        .iter()
        .copied()
        .filter(|r| (lo..=hi).contains(&r.order))
        .collect();
    if window.len() < 5 {
        return Err(Error::InsufficientPoints {
            needed: 5,
            got: window.len(),
        });
    }
    fit_rows(&window, beta)
}

fn fit_rows(rows: &[DecayRow], beta: f64) -> Result<DecayFit> {
    if beta > 1.0 + 1e-12 {
        return Err(Error::BetaAboveOne(beta));
    }
    let rows: Vec<&DecayRow> = rows.iter().filter(|r| r.dist_sq > 0.0).collect();
    if rows.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: rows.len(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.order as f64 + 1.0).ln()).collect();
    if (beta - 1.0).abs() <= 1e-12 {
        let v: Vec<f64> = rows.iter().zip(&x).map(|(r, l)| r.dist_sq * l).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let hi = v.iter().cloned().fold(f64::MIN, f64::max);
        let lo = v.iter().cloned().fold(f64::MAX, f64::min);
        let drift = fit_line(&x, &v)?.slope / mean;
        Ok(DecayFit::LogProfile {
            mean,
            spread: (hi - lo) / lo,
            drift,
            points: v.len(),
        })
    } else {
        let y: Vec<f64> = rows.iter().map(|r| r.dist_sq.ln()).collect();
        let fit = fit_line(&x, &y)?;
        Ok(DecayFit::Power {
            slope: fit.slope,
            target: -(1.0 - beta),
            residual: fit.residual,
            points: y.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalApproximant {
    pub order: u32,
    pub beta: f64,
    /// The one-variable approximant `q_N`.
    pub one_var: OneVarSeries,
    /// `‖q_N f̃ − 1‖²_{d_β}`.
    pub dbeta_dist_sq: f64,
    /// `lift(q_N)`, an approximant to `1/lift(f̃)` in the ball.
    pub lifted: CoeffSeries,
    /// `‖lift(q_N)·lift(f̃) − 1‖²_α`.
    pub lifted_dist_sq: f64,
    pub full: Option<ApproximantResult>,
    /// `full.dist_sq / dbeta_dist_sq`.
    pub ratio: Option<f64>,
}

/// Solves the one-variable `d_β` problem for `f̃` and lifts the answer.
/// With `compare_full`, also solves the multivariate problem for
/// `lift(f̃)` (skipped silently when the basis would be too large).
pub fn diagonal_fast_path(
    params: &SpaceParams,
    spec: &DiagonalSpec,
    f: &OneVarSeries,
    order: u32,
    compare_full: bool,
) -> Result<DiagonalApproximant> {
    if spec.n != params.n {
        return Err(Error::DimensionMismatch {
            left: params.n,
            right: spec.n,
        });
    }
    let beta = spec.beta(params.alpha);
    let mu = spec.mu;
    let weight = move |k: &MultiIndex| diagonal::dbeta_weight(mu, beta, k.degree());
    let basis = (0..=order).map(|l| MultiIndex::new(&[l])).collect();
    let one = solve_weighted(&f.to_series(), basis, order, &weight)?;
    let q = OneVarSeries::from_series(&one.coeffs, mu);
    let lifted = diagonal::lift(&q, spec);
    let lf = diagonal::lift(f, spec);
    let lifted_dist_sq = norms::norm_sq(params, &lifted.mul(&lf)?.sub(&CoeffSeries::one(spec.n))?)?.value;
    let full = if compare_full && box_basis(params.n, order).is_ok() {
        Some(solve(params, &lf, order)?)
    } else {
        None
    };
    let ratio = full.as_ref().map(|r| r.dist_sq / one.dist_sq);
    Ok(DiagonalApproximant {
        order,
        beta,
        one_var: q,
        dbeta_dist_sq: one.dist_sq,
        lifted,
        lifted_dist_sq,
        full,
        ratio,
    })
}
