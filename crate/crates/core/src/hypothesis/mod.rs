//! Likelihood-ratio tests, chi-square goodness of fit and the bivariate
//! Poisson comparison model.

mod bvpois;
mod chi2;
mod gof;
mod lrt;

pub use bvpois::{bvpois_fit, bvpois_loglik, bvpois_pmf, BvPoissonFit, BvPoissonParams};
pub use chi2::chi2_sf;
pub use gof::{chi_square_gof, chi_square_gof_1d, GofResult, TailPolicy};
pub use lrt::{
    independence_null_fit, likelihood_ratio_test, lrt_equal_all_alphas, lrt_equal_alpha12, lrt_geometric_marginals,
    lrt_independence, LrtResult, NullDistribution, NullFit, TestKind,
};
