//! L2-Boosting variable selection and the inference procedures built on it:
//! double-selection treatment-effect estimation with robust confidence
//! intervals, two-stage IV with a boosted first stage, and the simulation
//! designs used to study both.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! parallel Monte Carlo driver and the command-line interface live in the
//! `l2boost` companion crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod boosting;
pub mod dselect;
pub mod error;
pub mod expand;
pub mod ivboost;
pub mod numerics;
pub mod simlab;

pub use boosting::{
    destandardize, fit_boost, fit_learner, refit_post_boost, should_stop, BoostConfig, BoostPath,
    BoostVariant, DesignMatrix, Learner, LearnerFit, StopReason,
};
pub use dselect::{
    double_select, fixed_controls_estimate, naive_select_estimate, robust_variance, DSConfig,
    DoubleSelectionResult,
};
pub use error::{Error, ErrorCategory, Result};
pub use expand::{expand_design, ExpandedDesign, ExpansionConfig, RawTable};
pub use ivboost::{fit_iv, fit_iv_fixed, IVConfig, IVResult};
pub use numerics::{RealMatrix, ToeplitzAr1Cov};
pub use simlab::{DgpSpec, Estimator, MonteCarloReport, SimulatedDataset};
