//! Seeded uniform sampling on the sphere `S_n ⊂ C^n` and in the ball.
//!
//! Sphere points are normalized vectors of `n` independent standard complex
//! Gaussians. Ball points scale a sphere point by a radius with density
//! `2n ε^{2n-1}`, i.e. `ε = U^{1/(2n)}`.
//!
//! Samples are drawn in fixed-size chunks, each with its own ChaCha stream
//! derived from `(seed, chunk)`, so estimates do not depend on thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::par::{self, KahanSum};

pub const CHUNK: usize = 1 << 14;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

pub fn sphere_point<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<Complex64>) {
    out.clear();
    let mut norm2 = 0.0;
    for _ in 0..n {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        norm2 += re * re + im * im;
        out.push(Complex64::new(re, im));
    }
    let inv = norm2.sqrt().recip();
    for z in out.iter_mut() {
        *z *= inv;
    }
}

pub fn ball_point<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<Complex64>) {
    sphere_point(rng, n, out);
    let u: f64 = rng.gen();
    let radius = u.powf(1.0 / (2.0 * n as f64));
    for z in out.iter_mut() {
        *z *= radius;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Sphere,
    Ball,
}

/// Mean and standard error of a vector-valued sample statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub samples: usize,
}

/// Monte Carlo means of `stat(z)` (which writes `width` values) over
/// `samples` uniform points of the sphere or ball.
pub fn mc_means<F>(
    domain: Domain,
    n: usize,
    samples: usize,
    seed: u64,
    width: usize,
    stat: F,
) -> McEstimate
where
    F: Fn(&[Complex64], &mut [f64]) + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    let partials = par::map_range(chunks, |c| {
        let mut rng = chunk_rng(seed, c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        let mut z = Vec::with_capacity(n);
        let mut buf = vec![0.0; width];
        let mut s = vec![KahanSum::default(); width];
        let mut s2 = vec![KahanSum::default(); width];
        for _ in 0..count {
            match domain {
                Domain::Sphere => sphere_point(&mut rng, n, &mut z),
                Domain::Ball => ball_point(&mut rng, n, &mut z),
            }
            stat(&z, &mut buf);
            for i in 0..width {
                s[i].add(buf[i]);
                s2[i].add(buf[i] * buf[i]);
            }
        }
        (
            s.iter().map(KahanSum::value).collect::<Vec<_>>(),
            s2.iter().map(KahanSum::value).collect::<Vec<_>>(),
        )
    });
    let mut sum = vec![KahanSum::default(); width];
    let mut sum2 = vec![KahanSum::default(); width];
    for (a, b) in &partials {
        for i in 0..width {
            sum[i].add(a[i]);
            sum2[i].add(b[i]);
        }
    }
    let nf = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s.value() / nf).collect();
    let std_err = (0..width)
        .map(|i| {
            let var = (sum2[i].value() / nf - mean[i] * mean[i]).max(0.0) * nf / (nf - 1.0);
            (var / nf).sqrt()
        })
        .collect();
    McEstimate {
        mean,
        std_err,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = chunk_rng(7, 0);
        let mut z = Vec::new();
        for _ in 0..100 {
            sphere_point(&mut rng, 3, &mut z);
            let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_radius_distribution() {
        // E[|z|^2] over the ball is n/(n+1)
        let est = mc_means(Domain::Ball, 2, 200_000, 3, 1, |z, out| {
            out[0] = z.iter().map(|c| c.norm_sqr()).sum();
        });
        assert!((est.mean[0] - 2.0 / 3.0).abs() < 4.0 * est.std_err[0]);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let f = |z: &[Complex64], out: &mut [f64]| out[0] = z[0].re;
        let a = mc_means(Domain::Sphere, 2, 50_000, 11, 1, f);
        let b = mc_means(Domain::Sphere, 2, 50_000, 11, 1, f);
        assert_eq!(a, b);
    }
}
