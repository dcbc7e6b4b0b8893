#![allow(dead_code)]

use dirichlet_lab::multiindex::enumerate_up_to;
use dirichlet_lab::CoeffSeries;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Each monomial of degree `1..=degree` is present with probability 1/2;
/// the constant term is `1 + small`.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, degree: u32, scale: f64) -> CoeffSeries {
    let terms = enumerate_up_to(n, degree).into_iter().filter_map(|k| {
        if k.is_zero() {
            Some((k, Complex64::new(1.0, 0.0) + complex(rng, 0.1)))
        } else if rng.gen_bool(0.5) {
            Some((k, complex(rng, scale)))
        } else {
            None
        }
    });
    CoeffSeries::from_terms(n, None, terms.collect::<Vec<_>>()).unwrap()
}
