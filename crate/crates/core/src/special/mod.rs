//! Scalar special functions, evaluated in log or exponentially scaled form
//! wherever the unscaled value could overflow.

mod bessel;
mod gamma;
mod incomplete_gamma;
mod normal;

pub use bessel::{bessel_i_scaled, ln_bessel_i_scaled};
pub use gamma::log_gamma;
pub use incomplete_gamma::{
    ln_reg_lower_incomplete_gamma, ln_reg_upper_incomplete_gamma, reg_lower_incomplete_gamma,
    reg_upper_incomplete_gamma,
};
pub use normal::{std_bivariate_normal_cdf, std_normal_cdf, std_normal_pdf};

pub(crate) use gamma::ln_gamma;
