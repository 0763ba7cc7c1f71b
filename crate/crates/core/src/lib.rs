//! Exact arithmetic for totally ramified extensions of local fields.

pub mod classfield;
pub mod enumerate;
pub mod error;
pub mod padics;
pub mod identify;
pub mod ramify;
pub mod records;
pub mod reduce;
pub mod rational;
pub mod residue;

pub use classfield::{
    construct, construct_detailed, norm_level_bound, norm_unit, range_pairs, skeleton,
    stage_parameters, Construction, NormGroupSpec, StageReport,
};
pub use enumerate::{candidate_polygons, enumerate_totally_ramified, ClassInfo, Enumeration};
pub use error::Error;
pub use padics::{BaseField, IntegerElement, Valuation};
pub use ramify::{
    different_val, ramification_data, ramification_polygon, reduced_support, residual_poly,
    residual_poly_with, EisensteinPoly, ExtRing, ExtensionElement, NewtonPolygon, RamData,
    ResidualBody, ResidualPolynomial, SupportEntry, SupportKind,
};
pub use identify::{
    congruence_level, default_root_precision, greedy_filter, is_isomorphic, lead_diff,
    root_count, DiffReport, RuleOutReason, Verdict,
};
pub use reduce::{
    all_reduced, aut_info, krasner_bound, lift_factor, reduce, reduce_step, reduce_step0,
    required_precision, step0_representatives, substitute, substitute_with_tail, AutInfo,
    MixedValuation, ReducedMultiset,
};
pub use rational::{rat, ExtRat, PiecewiseLinear, Rat};
pub use records::{BaseRecord, ClassRecord, NormGroupRecord, PolyRecord, WildConditionRecord};
pub use residue::{ResidueElement, ResidueField};

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
