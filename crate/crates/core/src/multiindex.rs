//! Multi-indices, log-factorials and exact monomial moments on the sphere
//! and ball.
//!
//! All factorial ratios are formed as differences of `ln(k!)` and
//! exponentiated at the end, so weights such as `(n-1+|k|)!` stay finite far
//! past `k = 170`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exponent `k = (k_1, ..., k_n)` of the monomial `z^k`.
///
/// Ordered by total degree first, then lexicographically. This graded order
/// is the canonical basis order used for every sum and Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: SmallVec<[u32; 4]>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: &[u32]) -> Self {
        assert!(!entries.is_empty(), "multi-index needs dimension >= 1");
        Self {
            entries: SmallVec::from_slice(entries),
            degree: entries.iter().sum(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(&vec![0; n])
    }

    /// `e_i` scaled by `power`.
    pub fn unit(n: usize, i: usize, power: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = power;
        Self::new(&v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `|k|`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        let entries: SmallVec<[u32; 4]> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex {
            degree: self.degree + other.degree,
            entries,
        }
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        let mut entries: SmallVec<[u32; 4]> = SmallVec::with_capacity(self.dim());
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            entries.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex {
            degree: self.degree - other.degree,
            entries,
        })
    }

    pub fn scale(&self, l: u32) -> MultiIndex {
        let entries: SmallVec<[u32; 4]> = self.entries.iter().map(|e| e * l).collect();
        MultiIndex {
            degree: self.degree * l,
            entries,
        }
    }

    /// `ln(k!) = Σ ln(k_i!)`.
    pub fn ln_factorial(&self) -> f64 {
        self.entries.iter().map(|&e| ln_factorial(e as u64)).sum()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        if v.is_empty() {
            return Err(serde::de::Error::custom("multi-index must have length >= 1"));
        }
        Ok(MultiIndex::new(&v))
    }
}

/// Table of `ln(k!)` for `k = 0..=k_max`, built by compensated cumulative
/// summation of `ln k`.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(k_max: usize) -> Self {
        let mut values = Vec::with_capacity(k_max + 1);
        values.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=k_max {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            values.push(sum);
        }
        Self { values }
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

const TABLE_SIZE: usize = 4096;

fn table() -> &'static LogFactorialTable {
    static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| LogFactorialTable::new(TABLE_SIZE))
}

/// `ln(k!)`: table lookup below 4096, Stirling series above (error far
/// below one ulp there).
pub fn ln_factorial(k: u64) -> f64 {
    if let Some(v) = table().get(k as usize) {
        return v;
    }
    let x = k as f64 + 1.0;
    stirling_ln_gamma(x)
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// `ln|Γ(x)|` and the sign of `Γ(x)`. Fails at the poles `x ∈ {0, -1, -2, ...}`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole { arg: x });
    }
    let (v, sign) = libm::lgamma_r(x);
    Ok((v, if sign < 0 { -1.0 } else { 1.0 }))
}

/// All multi-indices of length `n` with `|k| = d`, in lexicographic order.
pub fn enumerate(n: usize, d: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be >= 1");
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(&mut cur, 0, d, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex::new(cur));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(cur, pos + 1, remaining - v, out);
    }
}

/// All multi-indices with `|k| <= d`, graded order.
pub fn enumerate_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
    (0..=d).flat_map(|e| enumerate(n, e)).collect()
}

/// Multi-indices with every entry at most `cap` (the `P_N^n` basis), in
/// lexicographic order of the entries.
pub fn box_indices(n: usize, cap: u32) -> Vec<MultiIndex> {
    let side = cap as usize + 1;
    let total = side.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; n];
    for _ in 0..total {
        out.push(MultiIndex::new(&cur));
        for pos in (0..n).rev() {
            if cur[pos] < cap {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
    }
    out
}

/// Number of multi-indices of length `n` and degree `d`: `C(d+n-1, n-1)`.
pub fn count(n: usize, d: u32) -> u64 {
    let mut c: u64 = 1;
    let top = d as u64 + n as u64 - 1;
    for i in 0..(n as u64 - 1) {
        c = c * (top - i) / (i + 1);
    }
    c
}

/// Multinomial coefficient `k!/j!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multinomial {
    /// Exact value; present when `k <= 20`.
    pub exact: Option<u64>,
    pub ln_value: f64,
}

pub fn multinomial(k: u32, j: &MultiIndex) -> Result<Multinomial> {
    if j.degree() != k {
        return Err(Error::DegreeMismatch {
            expected: k,
            found: j.degree(),
        });
    }
    let ln_value = ln_factorial(k as u64) - j.ln_factorial();
    let exact = (k <= 20).then(|| {
        // product of binomials C(partial, j_i); each intermediate is exact
        let mut acc: u128 = 1;
        let mut partial: u128 = 0;
        for &e in j.entries() {
            for i in 1..=e as u128 {
                partial += 1;
                acc = acc * partial / i;
            }
        }
        acc as u64
    });
    Ok(Multinomial { exact, ln_value })
}

/// `ln ∫_S |ζ^k|² dσ = ln[(n-1)! k! / (n-1+|k|)!]`.
pub fn ln_sphere_monomial_integral(k: &MultiIndex) -> f64 {
    let n = k.dim() as u64;
    ln_factorial(n - 1) + k.ln_factorial() - ln_factorial(n - 1 + k.degree() as u64)
}

/// `∫_S |ζ^k|² dσ` for the normalized surface measure.
pub fn sphere_monomial_integral(k: &MultiIndex) -> f64 {
    ln_sphere_monomial_integral(k).exp()
}

/// `∫_B |z^k|² du = n! k! / (n+|k|)!` for the normalized volume measure.
pub fn ball_monomial_integral(k: &MultiIndex) -> f64 {
    let n = k.dim() as u64;
    (ln_factorial(n) + k.ln_factorial() - ln_factorial(n + k.degree() as u64)).exp()
}

/// Checks `j_1!⋯j_n! >= (k!)^n` for `|j| = n k`, in log space.
///
/// Holds for every admissible input by log-convexity of Γ.
pub fn factorial_inequality_check(j: &MultiIndex, k: u32) -> Result<bool> {
    let n = j.dim() as u32;
    if j.degree() != n * k {
        return Err(Error::DegreeMismatch {
            expected: n * k,
            found: j.degree(),
        });
    }
    let lhs = j.ln_factorial();
    let rhs = n as f64 * ln_factorial(k as u64);
    // ln-space rounding slack; equality cases are exact in integers
    Ok(lhs >= rhs - 1e-12 * rhs.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v)
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(1, 5), vec![mi(&[5])]);
        assert_eq!(enumerate(2, 2), vec![mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
        // brute-force triple loop oracle
        let mut brute = 0;
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                for c in 0..=4u32 {
                    if a + b + c == 4 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(enumerate(3, 4).len(), brute);
        assert_eq!(brute, 15);
    }

    #[test]
    fn enumerate_counts_match_stars_and_bars() {
        for n in 1..=5 {
            for d in 0..=8 {
                let v = enumerate(n, d);
                assert_eq!(v.len() as u64, count(n, d));
                assert!(v.windows(2).all(|w| w[0] < w[1]));
                assert!(v.iter().all(|k| k.degree() == d));
            }
        }
    }

    #[test]
    fn box_indices_size_and_order() {
        let b = box_indices(2, 2);
        assert_eq!(b.len(), 9);
        assert_eq!(b[0], mi(&[0, 0]));
        assert_eq!(b[1], mi(&[0, 1]));
        assert_eq!(b[8], mi(&[2, 2]));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &mi(&[1, 1, 1])).unwrap().exact, Some(6));
        assert_eq!(multinomial(4, &mi(&[4, 0])).unwrap().exact, Some(1));
        assert_eq!(multinomial(2, &mi(&[1, 1])).unwrap().exact, Some(2));
        let m = multinomial(20, &mi(&[7, 6, 7])).unwrap();
        // 20!/(7!6!7!) computed directly from factorials
        let fact = |k: u64| (1..=k).product::<u64>() as f64;
        let direct = fact(20) / (fact(7) * fact(6) * fact(7));
        assert_eq!(m.exact.unwrap() as f64, direct);
        assert!((m.ln_value - direct.ln()).abs() < 1e-12);
        assert!(multinomial(30, &mi(&[10, 20])).unwrap().exact.is_none());
        assert!(matches!(
            multinomial(3, &mi(&[1, 1])),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn sphere_and_ball_examples() {
        assert!((sphere_monomial_integral(&mi(&[0, 0])) - 1.0).abs() < 1e-15);
        assert!((sphere_monomial_integral(&mi(&[1, 0])) - 0.5).abs() < 1e-15);
        assert!((sphere_monomial_integral(&mi(&[1, 1, 0])) - 1.0 / 12.0).abs() < 1e-15);
        assert!((ball_monomial_integral(&mi(&[0, 0])) - 1.0).abs() < 1e-15);
        assert!((ball_monomial_integral(&mi(&[1, 0])) - 1.0 / 3.0).abs() < 1e-15);
        assert!((ball_monomial_integral(&mi(&[2, 0])) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn large_degree_stays_finite() {
        let k = mi(&[400, 300]);
        let v = ln_sphere_monomial_integral(&k);
        assert!(v.is_finite() && v < 0.0);
    }

    #[test]
    fn log_factorial_table_invariants() {
        let t = LogFactorialTable::new(200);
        assert_eq!(t.get(0), Some(0.0));
        for k in 1..=200usize {
            let d = t.values()[k] - t.values()[k - 1];
            let want = (k as f64).ln();
            assert!((d - want).abs() <= 1e-12 * want.max(1.0), "k={k}");
        }
    }

    #[test]
    fn stirling_asymptote() {
        for k in 20..3000u64 {
            let kf = k as f64;
            let st = kf * kf.ln() - kf + 0.5 * kf.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln();
            assert!((ln_factorial(k) - st).abs() < 1.0 / (10.0 * kf));
        }
    }

    #[test]
    fn table_and_series_agree_at_the_seam() {
        for k in [4000u64, 4096, 4097, 5000] {
            let table = LogFactorialTable::new(5000).get(k as usize).unwrap();
            let series = stirling_ln_gamma(k as f64 + 1.0);
            assert!((table - series).abs() < 1e-9, "k={k}");
            assert!((ln_factorial(k) - table).abs() < 1e-9);
        }
    }

    #[test]
    fn ln_gamma_signed_poles_and_signs() {
        assert!(matches!(ln_gamma_signed(0.0), Err(Error::Pole { .. })));
        assert!(matches!(ln_gamma_signed(-3.0), Err(Error::Pole { .. })));
        let (v, s) = ln_gamma_signed(-0.5).unwrap();
        // Γ(-1/2) = -2√π
        assert_eq!(s, -1.0);
        assert!((v - (2.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-14);
        let (v, s) = ln_gamma_signed(5.0).unwrap();
        assert_eq!(s, 1.0);
        assert!((v - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn factorial_inequality_exhaustive() {
        assert!(factorial_inequality_check(&mi(&[1, 1]), 1).unwrap());
        assert!(factorial_inequality_check(&mi(&[2, 0]), 1).unwrap());
        for n in 1..=4usize {
            for k in 0..=6u32 {
                for j in enumerate(n, n as u32 * k) {
                    assert!(factorial_inequality_check(&j, k).unwrap(), "{j:?} k={k}");
                }
            }
        }
        assert!(factorial_inequality_check(&mi(&[1, 0]), 1).is_err());
    }

    #[test]
    fn multinomial_theorem() {
        let pts: [[f64; 3]; 4] = [
            [0.3, -1.2, 0.7],
            [1.1, 0.4, 0.25],
            [-0.6, -0.9, 2.0],
            [0.05, 1.5, -0.35],
        ];
        for x in pts {
            for d in 0..=8 {
                let lhs: f64 = enumerate(3, d)
                    .iter()
                    .map(|j| {
                        let c = multinomial(d, j).unwrap().exact.unwrap() as f64;
                        c * j
                            .entries()
                            .iter()
                            .zip(x.iter())
                            .map(|(&e, &xi)| xi.powi(e as i32))
                            .product::<f64>()
                    })
                    .sum();
                let rhs = x.iter().sum::<f64>().powi(d as i32);
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
            }
        }
    }
}
