//! Lower bounds on the probability that a Gaussian random projection
//! preserves every pairwise distance of a point set (the Johnson-Lindenstrauss
//! "no-failure" event), built on the Kibble bivariate gamma law of pairs of
//! projection errors.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`special`] | log-gamma, regularized incomplete gamma, scaled Bessel I, bivariate normal CDF |
//! | [`quadrature`] | Gauss-Legendre rules and adaptive 1-D / 2-D integration |
//! | [`marginal`] | `Γ(k/2, 2)` success and failure probabilities of one projection error |
//! | [`bivariate`] | Kibble density, joint CDF, joint success probability, CLT approximation |
//! | [`bounds`] | marginal, bivariate, trivariate and data-dependent no-failure bounds |
//! | [`embedding`] | smallest embedding dimension with a positive bound |
//! | [`mc`] | seeded Monte Carlo oracle for every analytic quantity |
//!
//! Projections use the unscaled convention: entries of the `d × k` matrix are
//! i.i.d. `N(0, 1)`, so a projection error `V = ‖Rᵀw̃‖²` has mean `k` and
//! variance `2k`.

pub mod bivariate;
pub mod bounds;
pub mod embedding;
mod error;
pub mod marginal;
pub mod mc;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use marginal::{EmbeddingSpec, Method, Probability, SuccessRate};
