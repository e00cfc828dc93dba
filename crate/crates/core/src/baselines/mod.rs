//! Frequentist comparison methods: the factor-adjusted lasso and principal
//! component regression.

mod lasso;
mod pcr;

pub use lasso::{lambda_grid, lasso_cv, lasso_cv_default, lasso_cv_with, CvRule, lasso_fit, LassoFit};
pub use pcr::{pcr_fit, PcrFit};
