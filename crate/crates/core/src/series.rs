//! Sparse multivariate power series with a truncation degree.
//!
//! A [`CoeffSeries`] stores the nonzero coefficients `a_k` of
//! `f = Σ a_k z^k` keyed by [`MultiIndex`] in graded order. Exact
//! polynomials carry no truncation degree; truncated expansions remember the
//! highest total degree that is known, and arithmetic never claims more.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Coefficients below this magnitude are dropped on insertion.
pub const DROP_BELOW: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SeriesJson", try_from = "SeriesJson")]
pub struct CoeffSeries {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
    trunc: Option<u32>,
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl CoeffSeries {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            coeffs: BTreeMap::new(),
            trunc: None,
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut s = Self::zero(dim);
        s.insert(MultiIndex::zero(dim), c);
        s
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(k: MultiIndex, c: Complex64) -> Self {
        let mut s = Self::zero(k.dim());
        s.insert(k, c);
        s
    }

    /// Builds a series from `(k, a_k)` pairs; repeated keys are summed.
    pub fn from_terms<I>(dim: usize, trunc: Option<u32>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut s = Self {
            dim,
            coeffs: BTreeMap::new(),
            trunc,
        };
        for (k, c) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: k.dim(),
                });
            }
            if let Some(d) = trunc {
                if k.degree() > d {
                    return Err(Error::Invalid(format!(
                        "term {k} has degree above truncation {d}"
                    )));
                }
            }
            s.accumulate(k, c);
        }
        Ok(s)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(dim: usize, terms: &[(&[u32], f64)]) -> Self {
        Self::from_terms(
            dim,
            None,
            terms
                .iter()
                .map(|(k, c)| (MultiIndex::new(k), Complex64::new(*c, 0.0))),
        )
        .expect("consistent dimensions")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc_degree(&self) -> Option<u32> {
        self.trunc
    }

    pub fn is_polynomial(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn with_trunc(mut self, trunc: Option<u32>) -> Self {
        if let Some(d) = trunc {
            self.coeffs.retain(|k, _| k.degree() <= d);
        }
        self.trunc = trunc;
        self
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &MultiIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Stored terms in graded order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Highest total degree among stored terms.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Highest exponent of any single variable.
    pub fn max_entry(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::max_entry).max().unwrap_or(0)
    }

    fn insert(&mut self, k: MultiIndex, c: Complex64) {
        if c.norm() < DROP_BELOW {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    fn accumulate(&mut self, k: MultiIndex, c: Complex64) {
        let v = self.coeff(&k) + c;
        self.insert(k, v);
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone().with_trunc(min_trunc(self.trunc, other.trunc));
        for (k, c) in &other.coeffs {
            if out.trunc.is_none_or(|d| k.degree() <= d) {
                out.accumulate(k.clone(), *c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self {
            dim: self.dim,
            coeffs: BTreeMap::new(),
            trunc: self.trunc,
        };
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), c * s);
        }
        out
    }

    /// Cauchy product, truncated at the smaller truncation degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let trunc = min_trunc(self.trunc, other.trunc);
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            if trunc.is_some_and(|d| ka.degree() > d) {
                continue;
            }
            for (kb, cb) in &other.coeffs {
                if trunc.is_some_and(|d| ka.degree() + kb.degree() > d) {
                    continue;
                }
                *acc.entry(ka.add(kb)).or_default() += ca * cb;
            }
        }
        let mut out = Self {
            dim: self.dim,
            coeffs: BTreeMap::new(),
            trunc,
        };
        for (k, c) in acc {
            out.insert(k, c);
        }
        Ok(out)
    }

    /// Multiplication by the monomial `z^k` (the shift operators).
    pub fn shift(&self, k: &MultiIndex) -> Result<Self> {
        self.mul(&Self::monomial(k.clone(), Complex64::new(1.0, 0.0)))
    }

    /// `1/f` up to total degree `d` via
    /// `g_0 = 1/f_0`, `g_k = -(1/f_0) Σ_{0<j≤k} f_j g_{k-j}`.
    ///
    /// Only indices reachable as sums of `supp(f)` are visited, so sparse
    /// inputs (model polynomials) stay cheap.
    pub fn reciprocal(&self, d: u32) -> Result<Self> {
        let f0 = self.constant_term();
        if f0.norm() <= DROP_BELOW {
            return Err(Error::ZeroConstantTerm);
        }
        let trunc = min_trunc(Some(d), self.trunc).unwrap_or(d);
        let inv0 = f0.inv();
        let tail: Vec<(&MultiIndex, &Complex64)> =
            self.coeffs.iter().filter(|(k, _)| !k.is_zero()).collect();

        let mut g: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        let mut frontier: BTreeSet<MultiIndex> = BTreeSet::new();
        frontier.insert(MultiIndex::zero(self.dim));
        while let Some(k) = frontier.pop_first() {
            let value = if k.is_zero() {
                inv0
            } else {
                let mut s = Complex64::default();
                for (j, fj) in &tail {
                    if let Some(rest) = k.checked_sub(j) {
                        if let Some(gr) = g.get(&rest) {
                            s += *fj * gr;
                        }
                    }
                }
                -inv0 * s
            };
            if value.norm() < DROP_BELOW {
                continue;
            }
            for (j, _) in &tail {
                if k.degree() + j.degree() <= trunc {
                    frontier.insert(k.add(j));
                }
            }
            g.insert(k, value);
        }
        Ok(Self {
            dim: self.dim,
            coeffs: g,
            trunc: Some(trunc),
        })
    }

    /// Radial dilation `f_r(z) = f(rz)`: `a_k ← r^{|k|} a_k`.
    pub fn dilate(&self, r: f64) -> Self {
        assert!((0.0..=1.0).contains(&r), "dilation radius must lie in [0,1]");
        let mut out = Self {
            dim: self.dim,
            coeffs: BTreeMap::new(),
            trunc: self.trunc,
        };
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), c * r.powi(k.degree() as i32));
        }
        out
    }

    /// `Σ a_k z^k` with compensated accumulation of real and imaginary parts.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: z.len(),
            });
        }
        let mut re = crate::par::KahanSum::default();
        let mut im = crate::par::KahanSum::default();
        for (k, c) in &self.coeffs {
            let mut term = *c;
            for (zi, &e) in z.iter().zip(k.entries()) {
                if e > 0 {
                    term *= zi.powu(e);
                }
            }
            re.add(term.re);
            im.add(term.im);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    /// Coefficients of total degree exactly `d`.
    pub fn shell(&self, d: u32) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter().filter(move |(k, _)| k.degree() == d)
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&MultiIndex> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json_value(&self) -> SeriesJson {
        SeriesJson {
            dim: self.dim,
            trunc: self.trunc,
            terms: self
                .coeffs
                .iter()
                .map(|(k, c)| TermJson {
                    k: k.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson =
            serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        raw.try_into()
    }
}

/// `{"dim": n, "trunc": D or null, "terms": [{"k": [...], "re": x, "im": y}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub dim: usize,
    pub trunc: Option<u32>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub k: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl From<CoeffSeries> for SeriesJson {
    fn from(s: CoeffSeries) -> Self {
        s.to_json_value()
    }
}

impl TryFrom<SeriesJson> for CoeffSeries {
    type Error = Error;

    fn try_from(raw: SeriesJson) -> Result<Self> {
        if raw.dim == 0 {
            return Err(Error::Invalid("dim must be >= 1".into()));
        }
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            if t.k.len() != raw.dim {
                return Err(Error::DimensionMismatch {
                    left: raw.dim,
                    right: t.k.len(),
                });
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::Invalid("non-finite coefficient".into()));
            }
            terms.push((MultiIndex::new(&t.k), Complex64::new(t.re, t.im)));
        }
        CoeffSeries::from_terms(raw.dim, raw.trunc, terms)
    }
}

/// The model polynomial `p(z) = 1 - m^{m/2} z_1⋯z_m` on `C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPolynomialSpec {
    pub n: usize,
    pub m: usize,
}

impl ModelPolynomialSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m < 1 || m > n {
            return Err(Error::Invalid(format!("need 1 <= m <= n, got m={m}, n={n}")));
        }
        Ok(Self { n, m })
    }

    /// `λ = m^{m/2}`.
    pub fn lambda(&self) -> f64 {
        (self.m as f64).powf(self.m as f64 / 2.0)
    }

    /// `(1,...,1,0,...,0)` with `m` ones.
    pub fn diagonal_index(&self) -> MultiIndex {
        let v: Vec<u32> = (0..self.n).map(|i| u32::from(i < self.m)).collect();
        MultiIndex::new(&v)
    }

    /// `(2n+1-m)/2`.
    pub fn threshold(&self) -> f64 {
        (2 * self.n + 1 - self.m) as f64 / 2.0
    }

    /// A point of `Z(p) ∩ S_n` for torus angles `θ_1..θ_{m-1}`.
    pub fn zero_set_point(&self, angles: &[f64]) -> Vec<Complex64> {
        assert_eq!(angles.len(), self.m - 1);
        let s = (self.m as f64).sqrt().recip();
        let mut z = vec![Complex64::default(); self.n];
        let mut total = 0.0;
        for (i, &t) in angles.iter().enumerate() {
            z[i] = Complex64::from_polar(s, t);
            total += t;
        }
        z[self.m - 1] = Complex64::from_polar(s, -total);
        z
    }
}

pub fn model_polynomial(spec: &ModelPolynomialSpec) -> CoeffSeries {
    let mut p = CoeffSeries::one(spec.n);
    p.insert(spec.diagonal_index(), Complex64::new(-spec.lambda(), 0.0));
    p
}
