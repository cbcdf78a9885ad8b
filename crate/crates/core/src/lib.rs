//! Discrete generalized exponential (DGE) laws and their bivariate
//! max-construction (BDGE).
//!
//! The crate is organised bottom-up:
//!
//! * [`dge`]: univariate law, moments, sampling and two-parameter MLE.
//! * [`bdge`]: bivariate law built as `(max(U1, U3), max(U2, U3))` from three
//!   independent DGE variables sharing the base `p`.
//! * [`fit`]: EM estimation with a prediction E-step and a profile-likelihood
//!   M-step, a staged grid-search oracle, observed information and Wald
//!   intervals.
//! * [`hypothesis`]: likelihood-ratio tests, chi-square goodness of fit and the
//!   bivariate Poisson comparison model.
//! * [`reproduce`]: the football-score case study end to end.

pub mod bdge;
pub mod dge;
mod error;
pub mod fit;
pub mod hypothesis;
pub mod io;
mod numeric;
pub mod optim;
pub mod reproduce;

pub use bdge::{BdgeParams, BivariatePoint};
pub use dge::{DgeParams, TailTolerance};
pub use error::{Error, Result};
pub use fit::{BivariateDataset, EStepKind, FitConfig, FitResult, LatentTriple};
pub use numeric::numerical_hessian;
