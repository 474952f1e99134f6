//! Orthogonality, maximality and completeness checks for candidate spectra.

mod classify;
mod clique;
mod criteria;
mod density;
mod orthogonality;
mod qsum;
mod verdict;

pub use classify::{classify_qb, Classification, QbClass};
pub use clique::{max_orthogonal_search, CliqueResult, MAX_CLIQUE_WINDOW};
pub use criteria::{criterion_report, fitting_horizon, AlphaSequence, Conclusion, CriterionConfig, CriterionReport};
pub use density::{beurling_density, DensityRow};
pub use orthogonality::{check_bizero, check_maximality_window, BizeroReport, BizeroWitness};
pub use qsum::{pairwise_sum, q_eval, q_terms, qn_identity_check, QValue};
pub use verdict::{
    compare_regularized, spectrum_verdict, DeficitCertificate, QPoint, RegularizedComparison, Verdict, VerdictConfig,
    VerdictKind,
};
