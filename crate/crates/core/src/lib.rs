//! Numerical laboratory for Dirichlet-type spaces `D_α(B_n)` on the unit
//! ball of `C^n`.
//!
//! Functions are sparse power series ([`series::CoeffSeries`]); the norm is
//! the weighted coefficient sum in [`norms`]. On top of that sit optimal
//! polynomial approximants to `1/f` ([`approximant`]), the one-variable
//! reduction for diagonal functions ([`diagonal`]), radial-dilation sweeps
//! for the model polynomials `1 - m^{m/2} z_1⋯z_m` ([`dilation`]) and
//! Cauchy-transform / Riesz-energy non-cyclicity certificates
//! ([`capacity`]).
//!
//! With the default `parallel` feature, Monte Carlo sampling, Gram assembly
//! and sweeps run on the rayon pool. Every reduction is done in a fixed
//! order, so results are identical with or without the feature.

pub mod approximant;
pub mod capacity;
pub mod diagonal;
pub mod dilation;
pub mod error;
pub mod fit;
pub mod multiindex;
pub mod norms;
pub mod par;
pub mod sampling;
pub mod series;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use norms::SpaceParams;
pub use series::{CoeffSeries, ModelPolynomialSpec};
