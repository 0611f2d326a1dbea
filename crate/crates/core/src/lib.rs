//! Exact engine for ordered series fields carrying a logarithm.
//!
//! The base field is built from a finite chain of labels, each carrying a
//! copy of the integers: the resulting index chain orders the archimedean
//! classes of a group of finite-support rational combinations, and series
//! over that group with explicit precision floors form the field. Every
//! computation is exact rational arithmetic; where a real logarithm of a
//! rational constant would be irrational, the engine either restricts to
//! residue one or carries a rational enclosure out of band, so that order
//! comparisons never touch approximate data.
//!
//! The logarithm decomposes a positive series into a monomial, a residue,
//! and a one-unit, handling each by its own channel: the monomial through
//! a cross-section lift of the exponent group into purely infinite series,
//! the one-unit through the usual alternating expansion truncated at a
//! configured order with a floor recording what is no longer trusted. The
//! same decomposition, run backwards, gives a partial exponential whose
//! domain is decided exactly: the purely infinite part must be a lifted
//! group element. Stacking that obstruction is the job of the tower
//! module, where each new stage adopts the previous stage's purely
//! infinite series as its exponents and the domain strictly grows.
//!
//! On top of the field sit the structural invariants: the contraction the
//! logarithm induces on archimedean classes, the final segments of the
//! index chain with their coarsened valuations and compatibility verdicts,
//! and the rank ladders those segments form.
//!
//! ```
//! use hahnlog_core::{assemble_log, OrderTypeSpec, PrecisionPolicy, ResidueLogMode, Series};
//!
//! let u = OrderTypeSpec::standard(1).unwrap().into_universe();
//! let log = assemble_log(&u, ResidueLogMode::Monic, PrecisionPolicy::new(2).unwrap());
//! let a = Series::parse(&u, "t^{-e(t0,0)} (exact)").unwrap();
//! let out = log.full_log(&a).unwrap();
//! assert_eq!(out.exact_total().unwrap().to_string(), "t^{-e(t0,1)} (exact)");
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod contraction;
pub mod error;
pub mod explog;
pub mod group;
pub mod order_type;
pub mod rank;
pub mod rational;
pub mod series;
pub mod tower;

mod text;

pub use contraction::{GroupCrossSection, ZetaMap, MAX_ZETA_ITER};
pub use error::{Error, Result};
pub use explog::{
    assemble_log, check_growth, check_strong, check_unit_law, chi_from_log, decompose_log,
    exp_interval, full_exp_with, full_log_with, iterate_log_value, log_equiv_class,
    log_equiv_witness, log_interval, rexp, rlog, zeta_from_chi, CrossSection, DecomposedLog,
    ExpOutput, FactorTerm, LogComponents, LogCrossSection, LogOutput, Logarithm, PrecisionPolicy,
    ResidueLogMode, ResidueTerm, UnitLawReport,
};
pub use group::{GroupElement, IndexPoint, OFFSET_BOUND};
pub use order_type::{same_universe, OrderTypeSpec, Universe};
pub use rank::{
    cofinality_class_check, corollary14_check, enumerate_segments, exponential_rank,
    principal_exponential_rank, principal_rank, theorem15_check, w_data, zeta_closed_segments,
    FinalSegment, PrincipalRank, QuotientSegment, SegmentKind, WData,
};
pub use rational::{rat, rat_i, Rational};
pub use series::{AddDecomposition, Exponent, ExtValue, MulDecomposition, Series};
pub use tower::{
    embed1, embed_series1, embed_to, parse_stage_series, series_stage, try_unembed1,
    try_unembed_to, StageElement, StageSection, StageTower, STAGE_DEPTH_CAP,
};
