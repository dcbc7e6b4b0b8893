//! Non-cyclicity certificates from measures on the boundary zero set.
//!
//! A probability measure `μ` on `Z(f) ∩ S_n` whose Cauchy transform lies in
//! `D_{−α}` shows that `f` is not cyclic in `D_α`. The Cauchy norm is
//! compared with the series
//!
//! ```text
//! Σ_k T_k,   T_k = Σ_{|j|=k} (k+1)^{n−1−α} (k!/j!) |μ̄*(j)|²
//! ```
//!
//! whose terms are fitted to a power law. The Riesz energy of `μ` under
//! `K_α(|1 − ⟨ζ,η⟩|)` is reported alongside.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::multiindex::{enumerate_up_to, ln_factorial, MultiIndex};
use crate::par::{self, KahanSum};
use crate::sampling::{chunk_rng, CHUNK};
use crate::series::{CoeffSeries, ModelPolynomialSpec};

/// Largest grid used for the support check on a model torus.
pub const SUPPORT_POINTS: usize = 4096;

/// Support check tolerance for `max |f|` on the measure.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SphereMeasure {
    /// Normalized Haar measure on the `(m−1)`-torus `Z(p) ∩ S_n` of the
    /// model polynomial. For `m = 1` it is the point mass at `e_1`.
    ModelTorus { n: usize, m: usize },
    /// Weighted atoms. Each point is `n` pairs `[re, im]`.
    PointCloud {
        points: Vec<Vec<[f64; 2]>>,
        weights: Vec<f64>,
    },
}

impl SphereMeasure {
    pub fn model_torus(n: usize, m: usize) -> Result<Self> {
        ModelPolynomialSpec::new(n, m)?;
        Ok(Self::ModelTorus { n, m })
    }

    pub fn point_cloud(points: &[Vec<Complex64>], weights: Vec<f64>) -> Result<Self> {
        let points = points
            .iter()
            .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        let mu = Self::PointCloud { points, weights };
        mu.validate()?;
        Ok(mu)
    }

    /// `samples` i.i.d. points of the model torus with equal weights.
    pub fn sample_model_torus(n: usize, m: usize, samples: usize, seed: u64) -> Result<Self> {
        let spec = ModelPolynomialSpec::new(n, m)?;
        if samples == 0 {
            return Err(Error::InsufficientPoints { needed: 1, got: 0 });
        }
        let chunks = samples.div_ceil(CHUNK);
        let points: Vec<Vec<Complex64>> = par::map_range(chunks, |c| {
            let mut rng = chunk_rng(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            (0..count)
                .map(|_| {
                    let angles: Vec<f64> = (0..m - 1)
                        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
                        .collect();
                    spec.zero_set_point(&angles)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        let w = 1.0 / samples as f64;
        let weights = vec![w; samples];
        let points = points
            .iter()
            .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Ok(Self::PointCloud { points, weights })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mu: Self = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        mu.validate()?;
        Ok(mu)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ModelTorus { n, m } => ModelPolynomialSpec::new(*n, *m).map(|_| ()),
            Self::PointCloud { points, weights } => {
                if points.is_empty() {
                    return Err(Error::InsufficientPoints { needed: 1, got: 0 });
                }
                if points.len() != weights.len() {
                    return Err(Error::Invalid(format!(
                        "{} points but {} weights",
                        points.len(),
                        weights.len()
                    )));
                }
                let n = points[0].len();
                if n == 0 {
                    return Err(Error::Invalid("points need dimension >= 1".into()));
                }
                for p in points {
                    if p.len() != n {
                        return Err(Error::DimensionMismatch { left: n, right: p.len() });
                    }
                    let r2: f64 = p.iter().map(|[a, b]| a * a + b * b).sum();
                    if (r2.sqrt() - 1.0).abs() > 1e-10 {
                        return Err(Error::Invalid(format!("point off the unit sphere (|z| = {})", r2.sqrt())));
                    }
                }
                if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
                    return Err(Error::Invalid("weights must be non-negative".into()));
                }
                let total = par::compensated_sum(weights.iter().copied());
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Invalid(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::ModelTorus { n, .. } => *n,
            Self::PointCloud { points, .. } => points[0].len(),
        }
    }

    fn cloud(&self) -> Option<(Vec<Vec<Complex64>>, &[f64])> {
        match self {
            Self::PointCloud { points, weights } => Some((
                points
                    .iter()
                    .map(|p| p.iter().map(|&[a, b]| Complex64::new(a, b)).collect())
                    .collect(),
                weights,
            )),
            Self::ModelTorus { .. } => None,
        }
    }

    /// Points on which `|f|` is checked: the atoms of a cloud, or a uniform
    /// grid of at most [`SUPPORT_POINTS`] torus points.
    pub fn support_points(&self) -> Vec<Vec<Complex64>> {
        match self {
            Self::ModelTorus { n, m } => {
                let spec = ModelPolynomialSpec { n: *n, m: *m };
                let dims = m - 1;
                if dims == 0 {
                    return vec![spec.zero_set_point(&[])];
                }
                let side = (SUPPORT_POINTS as f64).powf(1.0 / dims as f64).floor().max(2.0) as usize;
                let total = side.pow(dims as u32);
                (0..total)
                    .map(|mut idx| {
                        let angles: Vec<f64> = (0..dims)
                            .map(|_| {
                                let a = (idx % side) as f64 / side as f64 * std::f64::consts::TAU;
                                idx /= side;
                                a
                            })
                            .collect();
                        spec.zero_set_point(&angles)
                    })
                    .collect()
            }
            Self::PointCloud { .. } => self.cloud().expect("cloud").0,
        }
    }
}

/// Moments `μ*(j) = ∫ ζ^j dμ` for `|j| ≤ K`. Only nonzero entries are
/// stored; `conj_moments` holds `μ̄*(j) = ∫ ζ̄^j dμ`. `ln_abs` keeps
/// `ln|μ*(j)|` for entries whose value underflows `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub n: usize,
    pub max_degree: u32,
    pub moments: BTreeMap<MultiIndex, Complex64>,
    pub conj_moments: BTreeMap<MultiIndex, Complex64>,
    pub ln_abs: BTreeMap<MultiIndex, f64>,
}

impl MomentTable {
    pub fn get(&self, j: &MultiIndex) -> Complex64 {
        self.moments.get(j).copied().unwrap_or_default()
    }

    pub fn get_conj(&self, j: &MultiIndex) -> Complex64 {
        self.conj_moments.get(j).copied().unwrap_or_default()
    }
}

pub fn moments(mu: &SphereMeasure, max_degree: u32) -> Result<MomentTable> {
    mu.validate()?;
    let n = mu.dim();
    let mut table = MomentTable {
        n,
        max_degree,
        moments: BTreeMap::new(),
        conj_moments: BTreeMap::new(),
        ln_abs: BTreeMap::new(),
    };
    match mu {
        SphereMeasure::ModelTorus { m, .. } => {
            let spec = ModelPolynomialSpec { n, m: *m };
            let d = spec.diagonal_index();
            let ln_m = (*m as f64).ln();
            for l in 0..=max_degree / *m as u32 {
                let ln_v = -(*m as f64) * l as f64 / 2.0 * ln_m;
                let v = Complex64::new(ln_v.exp(), 0.0);
                table.ln_abs.insert(d.scale(l), ln_v);
                table.moments.insert(d.scale(l), v);
                table.conj_moments.insert(d.scale(l), v);
            }
        }
        SphereMeasure::PointCloud { .. } => {
            let (points, weights) = mu.cloud().expect("cloud");
            let k = max_degree as usize;
            // powers[i][t][e] = ζ_{i,t}^e
            let powers: Vec<Vec<Vec<Complex64>>> = par::map_slice(&points, |p| {
                p.iter()
                    .map(|z| {
                        let mut row = Vec::with_capacity(k + 1);
                        let mut acc = Complex64::new(1.0, 0.0);
                        for _ in 0..=k {
                            row.push(acc);
                            acc *= z;
                        }
                        row
                    })
                    .collect()
            });
            let indices = enumerate_up_to(n, max_degree);
            let values = par::map_slice(&indices, |j| {
                let mut re = KahanSum::default();
                let mut im = KahanSum::default();
                for (pw, w) in powers.iter().zip(weights) {
                    let mut v = Complex64::new(*w, 0.0);
                    for (t, &e) in j.entries().iter().enumerate() {
                        v *= pw[t][e as usize];
                    }
                    re.add(v.re);
                    im.add(v.im);
                }
                Complex64::new(re.value(), im.value())
            });
            for (j, v) in indices.into_iter().zip(values) {
                if v != Complex64::default() {
                    table.ln_abs.insert(j.clone(), v.norm().ln());
                    // real weights: the conjugate moment is the conjugate
                    table.conj_moments.insert(j.clone(), v.conj());
                    table.moments.insert(j, v);
                }
            }
        }
    }
    Ok(table)
}

/// `T_0..T_K` of the Cauchy-norm series.
pub fn cauchy_norm_terms(table: &MomentTable, n: usize, alpha: f64, k_max: u32) -> Result<Vec<f64>> {
    if table.n != n {
        return Err(Error::DimensionMismatch { left: n, right: table.n });
    }
    if table.max_degree < k_max {
        return Err(Error::Invalid(format!(
            "moment table reaches degree {}, need {k_max}",
            table.max_degree
        )));
    }
    let mut sums: Vec<KahanSum> = vec![KahanSum::default(); k_max as usize + 1];
    for (j, &ln_v) in &table.ln_abs {
        let k = j.degree();
        if k > k_max || ln_v == f64::NEG_INFINITY {
            continue;
        }
        let ln_t = (n as f64 - 1.0 - alpha) * (k as f64 + 1.0).ln() + ln_factorial(k as u64) - j.ln_factorial()
            + 2.0 * ln_v;
        sums[k as usize].add(ln_t.exp());
    }
    Ok(sums.iter().map(KahanSum::value).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CauchyVerdict {
    Converges { rho: f64, sum_estimate: f64 },
    Diverges { rho: f64 },
    /// `ρ` within 0.1 of −1, or the partial sums did not settle. Raise K.
    Indeterminate { rho: f64 },
}

impl CauchyVerdict {
    pub fn rho(&self) -> f64 {
        match *self {
            Self::Converges { rho, .. } | Self::Diverges { rho } | Self::Indeterminate { rho } => rho,
        }
    }
}

/// Fits `T_k ≈ C (k+1)^ρ` over the nonzero terms with `k` in `window`
/// (default: the upper half).
pub fn cauchy_convergence_verdict(terms: &[f64], window: Option<(usize, usize)>) -> Result<CauchyVerdict> {
    if terms.len() < 20 {
        return Err(Error::InsufficientPoints {
            needed: 20,
            got: terms.len(),
        });
    }
    let last = terms.len() - 1;
    let (lo, hi) = window.unwrap_or((last / 2, last));
    let hi = hi.min(last);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (k, &t) in terms.iter().enumerate().take(hi + 1).skip(lo) {
        if t > 0.0 {
            x.push((k as f64 + 1.0).ln());
            y.push(t.ln());
        }
    }
    if x.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: x.len() });
    }
    let fit = fit_line(&x, &y)?;
    let rho = fit.slope;
    if rho > -0.9 {
        return Ok(CauchyVerdict::Diverges { rho });
    }
    if rho >= -1.1 {
        return Ok(CauchyVerdict::Indeterminate { rho });
    }
    let partial = |upto: usize| par::compensated_sum(terms[..=upto].iter().copied());
    let (s1, s2, s3) = (partial(last / 4), partial(last / 2), partial(last));
    if s3 - s2 >= s2 - s1 && s3 > s2 {
        return Ok(CauchyVerdict::Indeterminate { rho });
    }
    // tail from the fitted power law, thinned by the share of nonzero terms
    let density = x.len() as f64 / (hi - lo + 1) as f64;
    let start = last as f64 + 1.5;
    let tail = density * fit.intercept.exp() * start.powf(rho + 1.0) / (-rho - 1.0);
    Ok(CauchyVerdict::Converges {
        rho,
        sum_estimate: s3 + tail,
    })
}

/// `ρ(α)` for a model torus with `K` terms.
pub fn model_cauchy_rho(n: usize, m: usize, alpha: f64, k_max: u32) -> Result<f64> {
    let table = moments(&SphereMeasure::model_torus(n, m)?, k_max)?;
    let terms = cauchy_norm_terms(&table, n, alpha, k_max)?;
    Ok(cauchy_convergence_verdict(&terms, None)?.rho())
}

/// Bisects `[lo, hi]` for `ρ(α) = −1`, the midpoint of the indeterminate
/// band between the two verdicts.
pub fn cauchy_threshold_bisection(n: usize, m: usize, k_max: u32, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let table = moments(&SphereMeasure::model_torus(n, m)?, k_max)?;
    let rho = |a: f64| -> Result<f64> {
        let terms = cauchy_norm_terms(&table, n, a, k_max)?;
        Ok(cauchy_convergence_verdict(&terms, None)?.rho())
    };
    let (mut lo, mut hi) = (lo, hi);
    if rho(lo)? <= -1.0 || rho(hi)? >= -1.0 {
        return Err(Error::Invalid(format!("rho does not cross -1 in [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rho(mid)? > -1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_alpha(alpha: f64, n: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha <= n as f64) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, n]",
        });
    }
    Ok(())
}

/// `K_α(t) = t^{α−n}` for `0 < α < n`, `log(e/t)` for `α = n`, `K(0) = ∞`.
pub fn riesz_kernel(t: f64, alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha, n)?;
    if t == 0.0 {
        return Ok(f64::INFINITY);
    }
    if alpha == n as f64 {
        Ok(1.0 - t.ln())
    } else {
        Ok(t.powf(alpha - n as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum EnergyScheme {
    /// Uniform product grid on the model torus, refined `refinements` times
    /// by quadrupling the number of points.
    TorusGrid { base_points: usize, refinements: usize },
    /// Model torus: i.i.d. pairs. Point cloud: the exact U-statistic over
    /// distinct atoms (`samples` and `seed` unused).
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for EnergyScheme {
    fn default() -> Self {
        Self::TorusGrid {
            base_points: 1 << 10,
            refinements: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyStatus {
    /// Refinements changed the value by less than 5% each.
    Finite,
    /// Diagonal mass (an atom) or at least 2× growth per refinement.
    Infinite,
    /// Neither rule applied.
    Undetermined,
    /// A sampled value without a finiteness decision.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub points: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub status: EnergyStatus,
    /// Last level or sample mean; `None` when infinite by an atom.
    pub value: Option<f64>,
    pub std_err: Option<f64>,
    pub levels: Vec<EnergyLevel>,
    /// Growth per refinement `v_{i+1}/v_i`.
    pub growth: Vec<f64>,
    /// `log(v_last/v_prev)/log(points ratio)`: the energy grows like
    /// `points^exponent` on the last refinement.
    pub growth_exponent: Option<f64>,
}

fn torus_inner(m: usize, delta: &[f64]) -> Complex64 {
    let mut s: Complex64 = delta.iter().map(|&d| Complex64::from_polar(1.0, d)).sum();
    s += Complex64::from_polar(1.0, -delta.iter().sum::<f64>());
    s / m as f64
}

/// Product-grid energy with `side^{m−1}` points. The grid is translation
/// invariant, so the double sum over pairs reduces to a single sum over
/// differences; the zero difference (diagonal cells) is excluded.
fn torus_grid_energy(n: usize, m: usize, alpha: f64, side: usize) -> f64 {
    let dims = m - 1;
    let total = side.pow(dims as u32);
    let h = std::f64::consts::TAU / side as f64;
    let values = par::map_range(total, |mut idx| {
        if idx == 0 {
            return 0.0;
        }
        let delta: Vec<f64> = (0..dims)
            .map(|_| {
                let d = (idx % side) as f64 * h;
                idx /= side;
                d
            })
            .collect();
        let t = (Complex64::new(1.0, 0.0) - torus_inner(m, &delta)).norm();
        riesz_kernel(t, alpha, n).expect("alpha checked")
    });
    par::compensated_sum(values) / total as f64
}

pub fn riesz_energy(mu: &SphereMeasure, alpha: f64, scheme: EnergyScheme) -> Result<EnergyEstimate> {
    mu.validate()?;
    let n = mu.dim();
    check_alpha(alpha, n)?;
    let infinite = EnergyEstimate {
        status: EnergyStatus::Infinite,
        value: None,
        std_err: None,
        levels: Vec::new(),
        growth: Vec::new(),
        growth_exponent: None,
    };
    match (mu, scheme) {
        (SphereMeasure::ModelTorus { m: 1, .. }, _) => Ok(infinite),
        (SphereMeasure::ModelTorus { m, .. }, EnergyScheme::TorusGrid { base_points, refinements }) => {
            let dims = *m as u32 - 1;
            let mut levels = Vec::new();
            let mut points = base_points;
            for _ in 0..=refinements {
                let side = (points as f64).powf(1.0 / dims as f64).round().max(2.0) as usize;
                let actual = side.pow(dims);
                levels.push(EnergyLevel {
                    points: actual,
                    value: torus_grid_energy(n, *m, alpha, side),
                });
                points *= 4;
            }
            let growth: Vec<f64> = levels.windows(2).map(|w| w[1].value / w[0].value).collect();
            let status = if growth.is_empty() {
                EnergyStatus::Undetermined
            } else if growth.iter().all(|&g| (g - 1.0).abs() < 0.05) {
                EnergyStatus::Finite
            } else if growth.iter().all(|&g| g >= 2.0) {
                EnergyStatus::Infinite
            } else {
                EnergyStatus::Undetermined
            };
            let growth_exponent = levels.len().checked_sub(2).map(|i| {
                let (a, b) = (levels[i], levels[i + 1]);
                (b.value / a.value).ln() / (b.points as f64 / a.points as f64).ln()
            });
            Ok(EnergyEstimate {
                status,
                value: levels.last().map(|l| l.value),
                std_err: None,
                levels,
                growth,
                growth_exponent,
            })
        }
        (SphereMeasure::ModelTorus { m, .. }, EnergyScheme::MonteCarlo { samples, seed }) => {
            if samples < 2 {
                return Err(Error::InsufficientPoints { needed: 2, got: samples });
            }
            let dims = *m - 1;
            let chunks = samples.div_ceil(CHUNK);
            let partials = par::map_range(chunks, |c| {
                let mut rng = chunk_rng(seed, c as u64);
                let count = CHUNK.min(samples - c * CHUNK);
                let mut s = KahanSum::default();
                let mut s2 = KahanSum::default();
                for _ in 0..count {
                    // the difference of two uniform torus points is uniform
                    let delta: Vec<f64> = (0..dims)
                        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
                        .collect();
                    let t = (Complex64::new(1.0, 0.0) - torus_inner(*m, &delta)).norm();
                    let k = riesz_kernel(t, alpha, n).expect("alpha checked");
                    s.add(k);
                    s2.add(k * k);
                }
                (s.value(), s2.value())
            });
            let sum = par::compensated_sum(partials.iter().map(|p| p.0));
            let sum2 = par::compensated_sum(partials.iter().map(|p| p.1));
            let mean = sum / samples as f64;
            let var = (sum2 / samples as f64 - mean * mean).max(0.0) * samples as f64 / (samples as f64 - 1.0);
            Ok(EnergyEstimate {
                status: EnergyStatus::Sampled,
                value: Some(mean),
                std_err: Some((var / samples as f64).sqrt()),
                levels: vec![EnergyLevel { points: samples, value: mean }],
                growth: Vec::new(),
                growth_exponent: None,
            })
        }
        (SphereMeasure::PointCloud { .. }, EnergyScheme::TorusGrid { .. }) => Err(Error::Invalid(
            "the grid scheme needs a model torus measure".into(),
        )),
        (SphereMeasure::PointCloud { .. }, EnergyScheme::MonteCarlo { .. }) => {
            let (points, weights) = mu.cloud().expect("cloud");
            if points.len() < 2 {
                return Ok(infinite);
            }
            let rows = par::map_range(points.len(), |i| {
                let mut s = KahanSum::default();
                let mut wsum = KahanSum::default();
                for j in 0..points.len() {
                    if i == j {
                        continue;
                    }
                    let ip: Complex64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b.conj()).sum();
                    let t = (Complex64::new(1.0, 0.0) - ip).norm();
                    let w = weights[i] * weights[j];
                    s.add(w * riesz_kernel(t, alpha, n).expect("alpha checked"));
                    wsum.add(w);
                }
                (s.value(), wsum.value())
            });
            let num = par::compensated_sum(rows.iter().map(|r| r.0));
            let den = par::compensated_sum(rows.iter().map(|r| r.1));
            let value = num / den;
            Ok(EnergyEstimate {
                status: if value.is_finite() {
                    EnergyStatus::Sampled
                } else {
                    EnergyStatus::Infinite
                },
                value: value.is_finite().then_some(value),
                std_err: None,
                levels: vec![EnergyLevel {
                    points: points.len(),
                    value,
                }],
                growth: Vec::new(),
                growth_exponent: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub max_abs: f64,
    pub points: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EnergyOutcome {
    Computed(EnergyEstimate),
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    NonCyclic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub alpha: f64,
    pub support_check: SupportCheck,
    pub energy: EnergyOutcome,
    pub cauchy_verdict: CauchyVerdict,
    pub verdict: Certificate,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Degree `K` of the Cauchy series.
    pub cauchy_terms: u32,
    pub energy: EnergyScheme,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            cauchy_terms: 4000,
            energy: EnergyScheme::default(),
        }
    }
}

/// `NonCyclic` only when `|f| < 1e-8` on the measure and the Cauchy series
/// converges. The Riesz energy is reported but does not decide; it is
/// `NotApplicable` for `α > n`, where the kernel is undefined.
pub fn noncyclicity_certificate(
    f: &CoeffSeries,
    mu: &SphereMeasure,
    alpha: f64,
    opts: &CertificateOptions,
) -> Result<CertificateReport> {
    mu.validate()?;
    let n = mu.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: f.dim() });
    }
    if !f.is_polynomial() {
        return Err(Error::Invalid("the certificate needs a polynomial f".into()));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, inf)",
        });
    }
    let support = mu.support_points();
    let values = par::map_slice(&support, |z| f.evaluate(z).map(|v| v.norm()));
    let max_abs = values.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let support_check = SupportCheck {
        max_abs,
        points: support.len(),
        passed: max_abs < SUPPORT_TOL,
    };
    let energy = if alpha <= n as f64 {
        EnergyOutcome::Computed(riesz_energy(mu, alpha, opts.energy)?)
    } else {
        EnergyOutcome::NotApplicable {
            reason: format!("Riesz kernel needs 0 < alpha <= n = {n}"),
        }
    };
    let table = moments(mu, opts.cauchy_terms)?;
    let terms = cauchy_norm_terms(&table, n, alpha, opts.cauchy_terms)?;
    let cauchy_verdict = cauchy_convergence_verdict(&terms, None)?;
    let verdict = if support_check.passed && matches!(cauchy_verdict, CauchyVerdict::Converges { .. }) {
        Certificate::NonCyclic
    } else {
        Certificate::Inconclusive
    };
    Ok(CertificateReport {
        alpha,
        support_check,
        energy,
        cauchy_verdict,
        verdict,
    })
}
