//! Heavy-tail inference over integer event sizes.
//!
//! Follows the discrete maximum-likelihood methodology: candidate families
//! are fit above a lower cutoff x_min (scanned by KS minimization or fixed),
//! non-nested alternatives are compared with Vuong's normalized likelihood
//! ratio, parameter uncertainty comes from nonparametric bootstrap, and
//! extreme-value scaling ties the fitted exponent to the growth of per-run
//! maxima with system size.

mod attachment;
mod bootstrap;
mod compare;
mod families;
mod fit;
pub mod sample;
mod scaling;
mod zeta;

pub use attachment::{estimate_attachment, AttachmentBin, AttachmentEstimate, EventAttachment};
pub use bootstrap::{bootstrap_ci, BootstrapCi, ParamInterval};
pub use compare::{compare_fits, compare_models, ModelComparison};
pub use families::{cdf_at, log_normalizer, log_pmf, Family, Params};
pub use fit::{
    ccdf, fit_family, ks_statistic, select_xmin, TailData, TailFit, MIN_DISTINCT_SCAN, MIN_TAIL,
};
pub use scaling::{fit_extreme_scaling, ScalingFit, ScalingPoint};
pub use zeta::{hurwitz_zeta, ols};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TailError {
    #[error("no samples provided")]
    EmptySamples,
    #[error("insufficient tail: {n_tail} samples, {distinct} distinct values")]
    InsufficientTail { n_tail: u64, distinct: u64 },
    #[error("optimizer exhausted its budget without meeting tolerance")]
    NonConvergence,
    #[error("pointwise likelihoods identical; comparison undefined")]
    IdenticalLikelihoods,
    #[error("{distinct_n} distinct N values; need at least 3 with 3 runs each")]
    InsufficientScales { distinct_n: u32 },
    #[error("only {decisions} routing decisions; need at least 100")]
    InsufficientDecisions { decisions: u64 },
    #[error("{failed} of {total} bootstrap resamples failed to fit")]
    BootstrapFailures { failed: u32, total: u32 },
}
