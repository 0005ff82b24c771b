//! Rank correlation between metric-score differences and human-rating
//! differences over randomly sampled observation units.
//!
//! A study fixes a set of system pairs. Each sampled [`Assignment`] splits the
//! test set into disjoint units of `M` segments; every pair then yields one
//! [`PairedObservation`] per unit. Observations from all pairs are pooled per
//! assignment, Spearman's rho and Kendall's tau-b are computed, and the
//! coefficients are averaged over assignments. Confidence intervals come from
//! a percentile bootstrap over resampled observations.

mod rank;
mod sampling;
mod study;

pub use rank::{fractional_ranks, kendall_tau, spearman_rho, tau_b};
pub use sampling::{domain, sample_assignments, stream_rng, Assignment};
pub use study::{
    build_observations, correlate, correlate_assignments, correlate_observations, pooled_observations,
    CorrelationSummary, MetricScorer, PairedObservation, RatingScorer, Ratings, Study, StudyOptions, UnitScorer,
};
