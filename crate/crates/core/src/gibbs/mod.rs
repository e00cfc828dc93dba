//! Gibbs sampler for the spike-and-slab pseudo-posterior of the
//! factor-adjusted regression `Y = F̂α + Ûβ + σε`.
//!
//! Each iteration (1) rescans the support `ξ` with `β` integrated out,
//! (2) draws `β_ξ`, (3) draws `α` and (4) draws `σ²`.

mod flip;
mod prior;
mod sampler;
#[cfg(test)]
mod tests;

pub use flip::flip_probability;
pub use prior::{rescale_design, PriorConfig, ScaledDesign, Slab, TauPolicy};
pub use sampler::{
    beta_conditional, run_chain, run_chain_on, sample_alpha_given, sample_beta_given,
    sample_sigma2_given, scan_support, sigma2_conditional, threshold_select, ChainConfig,
    ChainResult, GaussianConditional, GibbsState,
};
